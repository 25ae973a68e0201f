#include "cli.hpp"

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <memory>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>
#include <openssl/evp.h>

#include <sparsefd/sparsefd.hpp>

namespace fs = std::filesystem;
using nlohmann::json;

namespace sparsefd::cli {
namespace {

std::string sha256_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open '" + path + "'");
    std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
    EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr);
    std::vector<char> buf(1 << 16);
    while (in) {
        in.read(buf.data(), static_cast<std::streamsize>(buf.size()));
        EVP_DigestUpdate(ctx.get(), buf.data(), static_cast<std::size_t>(in.gcount()));
    }
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_DigestFinal_ex(ctx.get(), digest, &len);
    std::ostringstream hex;
    for (unsigned int i = 0; i < len; ++i) hex << std::hex << std::setw(2) << std::setfill('0') << int(digest[i]);
    return hex.str();
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write '" + path.string() + "'");
    out << text;
    if (!out) throw DataError("write failed for '" + path.string() + "'");
}

std::string read_text(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_matrix_csv(const fs::path& path, const Eigen::MatrixXd& m, const std::vector<std::string>& schema) {
    std::ostringstream out;
    out << std::setprecision(17);
    for (std::size_t j = 0; j < schema.size(); ++j) out << (j ? "," : "") << schema[j];
    out << '\n';
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) out << (j ? "," : "") << m(i, j);
        out << '\n';
    }
    write_text(path, out.str());
}

template <typename T>
std::vector<T> parse_list(const std::string& text, const char* what) {
    std::vector<T> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        std::istringstream is(item);
        T v;
        if (!(is >> v) || !is.eof()) throw UsageError(std::string("invalid ") + what + " '" + item + "'");
        out.push_back(v);
    }
    return out;
}

std::vector<std::string> split_names(const std::string& text) {
    std::vector<std::string> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ','))
        if (!item.empty()) out.push_back(item);
    return out;
}

// ---------------------------------------------------------------------------

struct DiscoverArgs {
    std::string input;
    std::optional<double> lambda;
    double lambda_scale = 0.5;
    double tau = 0.05;
    double ridge = 1e-6;
    std::uint64_t seed = 0;
    std::optional<std::size_t> max_rows;
    std::string column_order;
    std::string format = "json";
    std::string manifest;
    std::string out;
    bool no_header = false;
    std::vector<std::string> na_tokens;
    bool no_numeric_detect = false;
    std::string dump_dir;
    int max_sweeps = 100;
    double tol = 1e-4;
};

int cmd_discover(const DiscoverArgs& a, std::ostream& out, std::ostream& err) {
    CsvOptions csv;
    csv.header = !a.no_header;
    csv.numeric_detect = !a.no_numeric_detect;
    if (!a.na_tokens.empty()) csv.na_tokens = {a.na_tokens.begin(), a.na_tokens.end()};

    const auto t0 = std::chrono::steady_clock::now();
    Dataset data;
    try {
        data = load_csv(a.input, csv);
    } catch (const DataError& e) {
        throw DataError(std::string("load: ") + e.what());
    }
    const double load_sec = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    DiscoverOptions opts;
    opts.lambda = a.lambda;
    opts.lambda_scale = a.lambda_scale;
    opts.tau = a.tau;
    opts.ridge = a.ridge;
    opts.seed = a.seed;
    opts.max_rows = a.max_rows;
    opts.column_order = split_names(a.column_order);
    opts.glasso.max_sweeps = a.max_sweeps;
    opts.glasso.tol = a.tol;
    opts.keep_samples = !a.dump_dir.empty();

    if (opts.max_rows && data.rows() > *opts.max_rows)
        err << "note: subsampling " << data.rows() << " rows to " << *opts.max_rows << " (--max-rows)\n";

    const auto result = discover(data, opts);
    for (const auto& z : result.zero_variance) err << "note: attribute '" << z << "' has zero variance in the samples\n";
    if (!result.precision.converged)
        err << "warning: graphical lasso did not converge in " << result.precision.iterations << " sweeps\n";

    const auto format = a.format == "human" ? FDFormat::Human : FDFormat::JsonLines;
    const auto text = serialize_fds(result.fds, format);
    if (a.out.empty())
        out << text;
    else
        write_text(a.out, text);

    if (!a.dump_dir.empty()) {
        fs::create_directories(a.dump_dir);
        const fs::path dir(a.dump_dir);
        {
            std::ofstream f(dir / "samples.csv", std::ios::binary);
            write_csv(f, *result.samples);
        }
        write_matrix_csv(dir / "covariance.csv", result.covariance.s, result.schema);
        write_matrix_csv(dir / "theta.csv", result.precision.theta, result.schema);
        write_matrix_csv(dir / "u.csv", result.factorization.u, result.schema);
        write_matrix_csv(dir / "d.csv", result.factorization.d.transpose(), result.schema);
        write_matrix_csv(dir / "b.csv", result.autoregression.b, result.schema);
        std::ostringstream trace;
        for (const auto& r : result.precision.trace)
            trace << json{{"sweep", r.sweep}, {"objective", r.objective}, {"max_change", r.max_change},
                          {"mean_change", r.mean_change}}.dump()
                  << '\n';
        write_text(dir / "trace.jsonl", trace.str());
    }

    if (!a.manifest.empty()) {
        auto timings = timings_json(result.timings);
        timings["load"] = load_sec;
        json manifest{{"command", "discover"},
                      {"tool_version", kVersion},
                      {"input", {{"path", a.input}, {"sha256", sha256_file(a.input)}}},
                      {"csv",
                       {{"header", csv.header},
                        {"numeric_detect", csv.numeric_detect},
                        {"na_tokens", std::vector<std::string>(csv.na_tokens.begin(), csv.na_tokens.end())}}},
                      {"parameters", options_json(opts, result.lambda)},
                      {"format", a.format},
                      {"timings_sec", timings},
                      {"diagnostics", diagnostics_json(result)}};
        write_text(a.manifest, manifest.dump(2) + "\n");
    }
    return 0;
}

// ---------------------------------------------------------------------------

struct SynthArgs {
    std::vector<std::string> settings;
    std::size_t instances = 5;
    std::string outdir;
    std::uint64_t seed = 0;
    bool dry_run = false;
};

void write_instance(const fs::path& dir, const SynthConfig& cfg, const SynthOutput& data) {
    // Build in a sibling temp directory, then rename into place.
    fs::path tmp = dir;
    tmp += ".tmp";
    fs::remove_all(tmp);
    fs::create_directories(tmp);
    save_csv((tmp / "data.csv").string(), data.dataset);
    save_csv((tmp / "clean.csv").string(), data.clean);
    write_text(tmp / "truth.jsonl", serialize_fds(data.truth, FDFormat::JsonLines));
    write_text(tmp / "manifest.json", manifest_json(cfg, data).dump(2) + "\n");
    fs::remove_all(dir);
    fs::rename(tmp, dir);
}

int cmd_synth(const SynthArgs& a, std::ostream& out, std::ostream& err) {
    std::vector<SynthSetting> settings;
    for (const auto& s : a.settings) {
        if (s == "all24") {
            auto all = all_settings();
            settings.insert(settings.end(), all.begin(), all.end());
        } else {
            settings.push_back(parse_setting(s));
        }
    }
    if (settings.empty()) throw UsageError("synth: no settings given");
    if (a.instances == 0) throw UsageError("synth: --instances must be >= 1");

    const fs::path root(a.outdir);
    for (const auto& s : settings) {
        for (std::size_t i = 0; i < a.instances; ++i) {
            const auto dir = root / s.dir_name() / ("instance-" + std::to_string(i));
            out << dir.string() << '\n';
            if (a.dry_run) continue;
            const auto cfg = make_config(s, i, a.seed);
            const auto data = generate(cfg);
            write_instance(dir, cfg, data);
            err << s.name() << " #" << i << ": r=" << cfg.n_attributes << " truth=" << data.truth.size()
                << " noised=" << data.noised_cells.size() << '\n';
        }
    }
    return 0;
}

// ---------------------------------------------------------------------------

int cmd_eval(const std::string& pred_path, const std::string& truth_path, std::ostream& out) {
    const auto pred = parse_fds(read_text(pred_path));
    const auto truth = parse_fds(read_text(truth_path));
    const auto report = score(pred, truth);
    out << to_json(report).dump() << '\n';
    const ReportRow row{fs::path(pred_path).filename().string(), report};
    out << format_table(std::span<const ReportRow>(&row, 1));
    return 0;
}

// ---------------------------------------------------------------------------

struct BenchArgs {
    std::string k_list = "8,16,32,64";
    std::size_t reps = 3;
    std::size_t tuples = 1000;
    std::uint64_t seed = 0;
    std::optional<double> lambda;
    double tau = 0.05;
    // noise sweep
    std::string rates = "0.01,0.1,0.3,0.5";
    std::string base = "s/s/s";
    std::size_t instances = 5;
};

int cmd_bench_scaling(const BenchArgs& a, std::ostream& out, std::ostream& err) {
    ScalingOptions opts;
    opts.k_list = parse_list<std::size_t>(a.k_list, "k");
    if (opts.k_list.empty()) throw UsageError("bench-scaling: empty --k list");
    opts.reps = a.reps;
    opts.n_tuples = a.tuples;
    opts.seed = a.seed;
    opts.discover.lambda = a.lambda;
    opts.discover.tau = a.tau;
    const auto result = bench_scaling(opts);
    out << result.csv();
    if (result.total_slope) {
        out << "# total_slope," << *result.total_slope << '\n';
        out << "# sl_slope," << *result.sl_slope << '\n';
    } else {
        err << "note: fewer than two k values, no slope fitted\n";
    }
    return 0;
}

int cmd_bench_noise(const BenchArgs& a, std::ostream& out, std::ostream&) {
    const auto base = parse_setting("Zero/" + a.base);
    const auto rates = parse_list<double>(a.rates, "noise rate");
    DiscoverOptions opts;
    opts.lambda = a.lambda.value_or(0.01);
    opts.tau = a.tau;
    const auto runs = bench_noise(base, rates, a.instances, a.seed, opts);
    std::vector<ReportRow> rows;
    json j = json::array();
    for (const auto& r : runs) {
        rows.push_back({r.setting.noise_label, r.median});
        j.push_back({{"noise_rate", r.setting.noise_rate},
                     {"median", {{"precision", r.median.precision}, {"recall", r.median.recall}, {"f1", r.median.f1}}}});
    }
    out << j.dump() << '\n' << format_table(rows);
    return 0;
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Functional dependency discovery via sparse inverse covariance estimation"};
    app.require_subcommand(1);
    app.set_version_flag("--version", kVersion);

    DiscoverArgs da;
    auto* discover_cmd = app.add_subcommand("discover", "Discover FDs in a CSV file");
    discover_cmd->add_option("input", da.input, "Input CSV")->required();
    discover_cmd->add_option("--lambda", da.lambda, "L1 penalty (default: scale*sqrt(log k / N))");
    discover_cmd->add_option("--lambda-scale", da.lambda_scale, "Scale c of the default penalty")->capture_default_str();
    discover_cmd->add_option("--tau", da.tau, "Threshold on |B| entries")->capture_default_str();
    discover_cmd->add_option("--ridge", da.ridge, "Diagonal ridge added to the covariance")->capture_default_str();
    discover_cmd->add_option("--seed", da.seed, "Shuffle / subsample seed")->capture_default_str();
    discover_cmd->add_option("--max-rows", da.max_rows, "Uniformly subsample to at most this many rows");
    discover_cmd->add_option("--column-order", da.column_order, "Comma list of attributes to place first");
    discover_cmd->add_option("--format", da.format, "Output format")
        ->check(CLI::IsMember({"json", "human"}))
        ->capture_default_str();
    discover_cmd->add_option("--manifest", da.manifest, "Write a run manifest (JSON) here");
    discover_cmd->add_option("--out", da.out, "Write FDs here instead of stdout");
    discover_cmd->add_flag("--no-header", da.no_header, "First row is data, not attribute names");
    discover_cmd->add_option("--na-token", da.na_tokens, "Token read as missing (repeatable; replaces defaults)");
    discover_cmd->add_flag("--no-numeric-detect", da.no_numeric_detect, "Keep every column categorical");
    discover_cmd->add_option("--dump-dir", da.dump_dir, "Write intermediate matrices and solver trace here");
    discover_cmd->add_option("--max-sweeps", da.max_sweeps, "Graphical lasso sweep limit")->capture_default_str();
    discover_cmd->add_option("--tol", da.tol, "Graphical lasso convergence tolerance")->capture_default_str();

    SynthArgs sa;
    auto* synth_cmd = app.add_subcommand("synth", "Generate synthetic benchmark datasets");
    synth_cmd->add_option("--setting", sa.settings, "NOISE/t/r/d (e.g. Low/s/s/s) or all24")->required();
    synth_cmd->add_option("--instances", sa.instances, "Instances per setting")->capture_default_str();
    synth_cmd->add_option("--outdir", sa.outdir, "Output directory")->required();
    synth_cmd->add_option("--seed", sa.seed, "Base seed")->capture_default_str();
    synth_cmd->add_flag("--dry-run", sa.dry_run, "List instance directories without generating");

    std::string pred_path, truth_path;
    auto* eval_cmd = app.add_subcommand("eval", "Score predicted FDs against ground truth");
    eval_cmd->add_option("--pred", pred_path, "Predicted FDs (json lines)")->required();
    eval_cmd->add_option("--truth", truth_path, "Ground-truth FDs (json lines)")->required();

    BenchArgs ba;
    auto* scaling_cmd = app.add_subcommand("bench-scaling", "Runtime versus number of attributes");
    scaling_cmd->add_option("--k", ba.k_list, "Ascending comma list of attribute counts")->capture_default_str();
    scaling_cmd->add_option("--reps", ba.reps, "Repetitions per k")->capture_default_str();
    scaling_cmd->add_option("--tuples", ba.tuples, "Rows per dataset")->capture_default_str();
    scaling_cmd->add_option("--seed", ba.seed, "Base seed")->capture_default_str();
    scaling_cmd->add_option("--lambda", ba.lambda, "L1 penalty (default: data-dependent)");
    scaling_cmd->add_option("--tau", ba.tau, "Threshold on |B| entries")->capture_default_str();

    auto* noise_cmd = app.add_subcommand("bench-noise", "Median F1 versus noise rate");
    noise_cmd->add_option("--rates", ba.rates, "Comma list of noise rates")->capture_default_str();
    noise_cmd->add_option("--setting", ba.base, "t/r/d sizes, e.g. s/s/s")->capture_default_str();
    noise_cmd->add_option("--instances", ba.instances, "Instances per rate")->capture_default_str();
    noise_cmd->add_option("--seed", ba.seed, "Base seed")->capture_default_str();
    noise_cmd->add_option("--lambda", ba.lambda, "L1 penalty (default 0.01)");
    noise_cmd->add_option("--tau", ba.tau, "Threshold on |B| entries")->capture_default_str();

    std::vector<const char*> argv{"sparsefd"};
    for (const auto& s : args) argv.push_back(s.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return static_cast<int>(ErrorKind::Usage);
    }

    try {
        if (*discover_cmd) return cmd_discover(da, out, err);
        if (*synth_cmd) return cmd_synth(sa, out, err);
        if (*eval_cmd) return cmd_eval(pred_path, truth_path, out);
        if (*scaling_cmd) return cmd_bench_scaling(ba, out, err);
        if (*noise_cmd) return cmd_bench_noise(ba, out, err);
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return e.exit_code();
    } catch (const fs::filesystem_error& e) {
        err << "error: " << e.what() << '\n';
        return static_cast<int>(ErrorKind::Data);
    }
    return static_cast<int>(ErrorKind::Usage);
}

} // namespace sparsefd::cli
