#pragma once

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "sparsefd/dataset.hpp"
#include "sparsefd/error.hpp"
#include "sparsefd/fdgen.hpp"
#include "sparsefd/transform.hpp"

namespace sparsefd {

template <typename T>
struct Range {
    T low{};
    T high{};

    bool valid() const { return low <= high; }
    friend bool operator==(const Range&, const Range&) = default;
};

struct SynthConfig {
    double noise_rate = 0.0;
    std::size_t n_tuples = 1000;
    std::size_t n_attributes = 8;
    Range<std::size_t> domain_card_range{64, 216};
    Range<std::size_t> fd_lhs_size_range{1, 3};
    Range<double> rho_range{0.0, 0.85};
    std::uint64_t seed = 0;

    void validate() const {
        if (!(noise_rate >= 0.0 && noise_rate <= 1.0)) throw UsageError("synth: noise_rate must lie in [0,1]");
        if (n_attributes < 2) throw UsageError("synth: need at least 2 attributes");
        if (n_tuples < 2) throw UsageError("synth: need at least 2 tuples");
        if (!domain_card_range.valid() || domain_card_range.low < 2)
            throw UsageError("synth: domain cardinality range must be nonempty with low >= 2");
        if (!fd_lhs_size_range.valid() || fd_lhs_size_range.low < 1)
            throw UsageError("synth: lhs size range must be nonempty with low >= 1");
        if (!rho_range.valid() || rho_range.low < 0.0 || rho_range.high > 1.0)
            throw UsageError("synth: rho range must be a nonempty subrange of [0,1]");
    }
};

struct CellRef {
    std::size_t row = 0;
    std::size_t col = 0;
    friend bool operator==(const CellRef&, const CellRef&) = default;
    friend auto operator<=>(const CellRef&, const CellRef&) = default;
};

// Per-group generation record.
struct SynthGroup {
    std::size_t first = 0;            // index of the first X attribute
    std::size_t lhs_size = 0;         // |X|; Y is attribute first + lhs_size
    std::size_t card_requested = 0;   // v drawn from the range
    std::size_t card = 0;             // |dom(Y)| actually used
    std::vector<std::size_t> x_domains;
    bool is_fd = false;
    double rho = 0.0;                 // correlation groups only
};

struct SynthOutput {
    Dataset dataset;
    FDSet truth;
    Dataset clean;
    std::vector<CellRef> noised_cells;
    std::vector<SynthGroup> groups;
};

namespace detail {

inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
    std::uint32_t out[2];
    seq.generate(out, out + 2);
    return (static_cast<std::uint64_t>(out[0]) << 32) | out[1];
}

// Consecutive group sizes (|X| + 1) covering n attributes. A size is only
// chosen if the remainder can still be covered.
inline std::vector<std::size_t> partition_groups(std::size_t n, Range<std::size_t> lhs, std::mt19937_64& rng) {
    const std::size_t lo = lhs.low + 1, hi = lhs.high + 1;
    auto coverable = [&](std::size_t rest) {
        // rest is a sum of m sizes in [lo, hi] iff m*lo <= rest <= m*hi for some m.
        const std::size_t m = (rest + hi - 1) / hi;
        return m * lo <= rest;
    };
    if (!coverable(n)) throw UsageError("synth: cannot split " + std::to_string(n) + " attributes into groups of size " +
                                        std::to_string(lo) + "-" + std::to_string(hi));
    std::vector<std::size_t> sizes;
    std::size_t rest = n;
    while (rest > 0) {
        std::vector<std::size_t> options;
        for (std::size_t s = lo; s <= std::min(hi, rest); ++s)
            if (coverable(rest - s)) options.push_back(s);
        std::uniform_int_distribution<std::size_t> pick(0, options.size() - 1);
        const auto s = options[pick(rng)];
        sizes.push_back(s);
        rest -= s;
    }
    return sizes;
}

inline std::size_t ipow(std::size_t base, std::size_t exp) {
    std::size_t r = 1;
    while (exp--) r *= base;
    return r;
}

// Near-equal factors, each >= 2, whose product approximates v.
// e.g. (216, 3) -> 6x6x6, (100, 2) -> 10x10.
inline std::vector<std::size_t> factor_domain(std::size_t v, std::size_t parts) {
    auto base = static_cast<std::size_t>(std::floor(std::pow(static_cast<double>(v), 1.0 / static_cast<double>(parts))));
    while (ipow(base + 1, parts) <= v) ++base;
    while (base > 2 && ipow(base, parts) > v) --base;
    base = std::max<std::size_t>(base, 2);
    std::vector<std::size_t> f(parts, base);
    std::size_t prod = ipow(base, parts);
    auto dist = [&](std::size_t p) { return p > v ? p - v : v - p; };
    for (std::size_t i = 0; i < parts; ++i) {
        const std::size_t bumped = prod / f[i] * (f[i] + 1);
        if (dist(bumped) < dist(prod)) {
            ++f[i];
            prod = bumped;
        }
    }
    return f;
}

} // namespace detail

// Flips floor(rate * n * |attrs|) distinct cells of the listed attributes to a
// different value from the attribute's observed domain. Cells that cannot be
// flipped (single-valued attribute) are skipped and another cell is drawn.
inline std::pair<Dataset, std::vector<CellRef>> inject_noise(const Dataset& d, double rate,
                                                             const std::vector<std::size_t>& attrs,
                                                             std::uint64_t seed) {
    if (!(rate >= 0.0 && rate <= 1.0)) throw UsageError("inject_noise: rate must lie in [0,1]");
    for (auto a : attrs)
        if (a >= d.cols()) throw UsageError("inject_noise: attribute index out of range");

    const std::size_t n = d.rows();
    const std::size_t total = n * attrs.size();
    const auto target = static_cast<std::size_t>(std::floor(rate * static_cast<double>(total) + 1e-9));

    // Observed domain per attribute, in rank order, with each cell's position in it.
    std::vector<std::vector<CellValue>> domains(attrs.size());
    std::vector<std::vector<std::int32_t>> codes(attrs.size());
    for (std::size_t a = 0; a < attrs.size(); ++a) {
        const auto column = d.column(attrs[a]);
        codes[a] = detail::rank_codes(column);
        const auto distinct = static_cast<std::size_t>(*std::max_element(codes[a].begin(), codes[a].end()) + 1);
        domains[a].resize(distinct);
        for (std::size_t i = 0; i < n; ++i)
            if (codes[a][i] >= 0) domains[a][static_cast<std::size_t>(codes[a][i])] = column[i];
    }

    Dataset out = d;
    std::vector<CellRef> noised;
    noised.reserve(target);
    std::vector<std::size_t> cells(total);
    std::iota(cells.begin(), cells.end(), 0);
    std::mt19937_64 rng(seed);
    for (std::size_t t = 0; t < total && noised.size() < target; ++t) {
        std::uniform_int_distribution<std::size_t> pick(t, total - 1);
        std::swap(cells[t], cells[pick(rng)]);
        const std::size_t row = cells[t] / attrs.size();
        const std::size_t a = cells[t] % attrs.size();
        const auto& domain = domains[a];
        const auto current = codes[a][row];
        const std::size_t others = current >= 0 ? domain.size() - 1 : domain.size();
        if (others == 0) continue;
        std::uniform_int_distribution<std::size_t> draw(0, others - 1);
        std::size_t idx = draw(rng);
        if (current >= 0 && idx >= static_cast<std::size_t>(current)) ++idx;
        out.set(row, attrs[a], domain[idx]);
        noised.push_back({row, attrs[a]});
    }
    std::sort(noised.begin(), noised.end());
    return {std::move(out), std::move(noised)};
}

inline SynthOutput generate(const SynthConfig& cfg) {
    cfg.validate();
    const std::size_t n = cfg.n_tuples;
    const std::size_t r = cfg.n_attributes;
    std::mt19937_64 rng(detail::derive_seed(cfg.seed, 1));

    SynthOutput out;
    std::vector<std::string> schema;
    for (std::size_t j = 0; j < r; ++j) schema.push_back("A" + std::to_string(j));
    std::vector<Dataset::Column> columns(r);

    const auto sizes = detail::partition_groups(r, cfg.fd_lhs_size_range, rng);
    std::uniform_int_distribution<std::size_t> card_dist(cfg.domain_card_range.low, cfg.domain_card_range.high);
    std::uniform_real_distribution<double> rho_dist(cfg.rho_range.low, cfg.rho_range.high);
    std::vector<std::size_t> fd_attrs;

    std::size_t first = 0;
    for (std::size_t g = 0; g < sizes.size(); ++g) {
        SynthGroup group;
        group.first = first;
        group.lhs_size = sizes[g] - 1;
        group.card_requested = card_dist(rng);
        group.card = std::max(group.card_requested, detail::ipow(2, group.lhs_size));
        group.x_domains = group.lhs_size == 1 ? std::vector<std::size_t>{group.card}
                                              : detail::factor_domain(group.card, group.lhs_size);
        group.is_fd = g % 2 == 0;

        const std::size_t x_card = std::accumulate(group.x_domains.begin(), group.x_domains.end(), std::size_t{1},
                                                   std::multiplies<>());
        std::uniform_int_distribution<std::size_t> y_dist(0, group.card - 1);
        std::vector<std::size_t> mapping(x_card);
        for (auto& m : mapping) m = y_dist(rng);
        if (!group.is_fd) group.rho = rho_dist(rng);

        std::vector<std::uniform_int_distribution<std::size_t>> x_dist;
        for (auto dom : group.x_domains) x_dist.emplace_back(0, dom - 1);
        std::uniform_real_distribution<double> coin(0.0, 1.0);
        std::uniform_int_distribution<std::size_t> other(0, group.card - 2);

        const std::size_t y_col = first + group.lhs_size;
        for (std::size_t c = first; c <= y_col; ++c) columns[c].reserve(n);
        for (std::size_t i = 0; i < n; ++i) {
            std::size_t code = 0;
            for (std::size_t x = 0; x < group.lhs_size; ++x) {
                const auto v = x_dist[x](rng);
                code = code * group.x_domains[x] + v;
                columns[first + x].emplace_back(static_cast<double>(v));
            }
            std::size_t y = mapping[code];
            if (!group.is_fd && coin(rng) >= group.rho) {
                const auto alt = other(rng);
                y = alt < y ? alt : alt + 1;
            }
            columns[y_col].emplace_back(static_cast<double>(y));
        }

        if (group.is_fd) {
            FD fd;
            for (std::size_t x = 0; x < group.lhs_size; ++x) {
                fd.lhs.push_back(schema[first + x]);
                fd.weights.push_back(1.0 / static_cast<double>(group.lhs_size));
            }
            fd.rhs = schema[y_col];
            out.truth.fds.push_back(std::move(fd));
            for (std::size_t c = first; c <= y_col; ++c) fd_attrs.push_back(c);
        }
        out.groups.push_back(std::move(group));
        first = y_col + 1;
    }

    out.truth.schema = schema;
    out.clean = Dataset(std::move(schema), std::move(columns));
    if (cfg.noise_rate > 0.0) {
        auto [noisy, cells] = inject_noise(out.clean, cfg.noise_rate, fd_attrs, detail::derive_seed(cfg.seed, 2));
        out.dataset = std::move(noisy);
        out.noised_cells = std::move(cells);
    } else {
        out.dataset = out.clean;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Benchmark settings: noise x tuples x attributes x domain cardinality.

struct SynthSetting {
    std::string noise_label;   // Zero, Low, High or a custom rate
    char tuples = 's';
    char attrs = 's';
    char card = 's';
    double noise_rate = 0.0;

    std::string name() const { return noise_label + "/" + tuples + "/" + attrs + "/" + card; }
    std::string dir_name() const { return noise_label + "-" + tuples + "-" + attrs + "-" + card; }

    std::size_t n_tuples() const { return tuples == 'l' ? 100000 : 1000; }
    Range<std::size_t> attr_range() const { return attrs == 'l' ? Range<std::size_t>{40, 80} : Range<std::size_t>{8, 16}; }
    Range<std::size_t> card_range() const {
        return card == 'l' ? Range<std::size_t>{1000, 1728} : Range<std::size_t>{64, 216};
    }
};

inline double noise_for_label(const std::string& label) {
    if (label == "Zero" || label == "zero") return 0.0;
    if (label == "Low" || label == "low") return 0.01;
    if (label == "High" || label == "high") return 0.3;
    throw UsageError("unknown noise level '" + label + "' (expected Zero, Low or High)");
}

// Accepts "High/s/l/s" or "High-s-l-s".
inline SynthSetting parse_setting(const std::string& text) {
    std::vector<std::string> parts;
    std::string cur;
    for (char c : text) {
        if (c == '/' || c == '-') {
            parts.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    parts.push_back(cur);
    auto flag = [&](const std::string& p) {
        if (p != "s" && p != "l") throw UsageError("setting '" + text + "': size flags must be 's' or 'l'");
        return p[0];
    };
    if (parts.size() != 4) throw UsageError("setting '" + text + "': expected NOISE/t/r/d");
    SynthSetting s;
    s.noise_rate = noise_for_label(parts[0]);
    s.noise_label = std::string(1, static_cast<char>(std::toupper(parts[0][0]))) + parts[0].substr(1);
    s.tuples = flag(parts[1]);
    s.attrs = flag(parts[2]);
    s.card = flag(parts[3]);
    return s;
}

inline std::vector<SynthSetting> all_settings() {
    std::vector<SynthSetting> out;
    for (const char* noise : {"High", "Low", "Zero"})
        for (char t : {'l', 's'})
            for (char r : {'l', 's'})
                for (char d : {'l', 's'}) out.push_back({noise, t, r, d, noise_for_label(noise)});
    return out;
}

// Resolves a setting into a concrete instance config. The attribute count is
// drawn uniformly from the setting's range with the instance's own stream.
inline SynthConfig make_config(const SynthSetting& s, std::size_t instance, std::uint64_t base_seed) {
    SynthConfig cfg;
    cfg.noise_rate = s.noise_rate;
    cfg.n_tuples = s.n_tuples();
    cfg.domain_card_range = s.card_range();
    std::uint64_t key = 0;
    for (char c : s.name()) key = key * 131 + static_cast<unsigned char>(c);
    cfg.seed = detail::derive_seed(base_seed ^ key, instance);
    std::mt19937_64 rng(cfg.seed);
    const auto ar = s.attr_range();
    cfg.n_attributes = std::uniform_int_distribution<std::size_t>(ar.low, ar.high)(rng);
    return cfg;
}

inline nlohmann::json to_json(const SynthConfig& c) {
    return {{"noise_rate", c.noise_rate},
            {"n_tuples", c.n_tuples},
            {"n_attributes", c.n_attributes},
            {"domain_card_range", {c.domain_card_range.low, c.domain_card_range.high}},
            {"fd_lhs_size_range", {c.fd_lhs_size_range.low, c.fd_lhs_size_range.high}},
            {"rho_range", {c.rho_range.low, c.rho_range.high}},
            {"seed", c.seed}};
}

inline nlohmann::json manifest_json(const SynthConfig& c, const SynthOutput& o) {
    nlohmann::json groups = nlohmann::json::array();
    for (const auto& g : o.groups) {
        groups.push_back({{"first", g.first},
                          {"lhs_size", g.lhs_size},
                          {"card_requested", g.card_requested},
                          {"card", g.card},
                          {"x_domains", g.x_domains},
                          {"is_fd", g.is_fd},
                          {"rho", g.rho}});
    }
    return {{"config", to_json(c)},
            {"n_rows", o.dataset.rows()},
            {"n_truth_fds", o.truth.size()},
            {"noised_cells", o.noised_cells.size()},
            {"groups", groups}};
}

} // namespace sparsefd
