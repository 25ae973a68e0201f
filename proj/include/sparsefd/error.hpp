#pragma once

#include <stdexcept>
#include <string>

namespace sparsefd {

// Process exit codes used by the command-line front end.
enum class ErrorKind : int {
    Usage = 1,
    Data = 2,
    Numerical = 3,
};

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }
    int exit_code() const noexcept { return static_cast<int>(kind_); }

private:
    ErrorKind kind_;
};

class UsageError : public Error {
public:
    explicit UsageError(const std::string& what) : Error(ErrorKind::Usage, what) {}
};

// Malformed input: bad CSV, unknown attribute, schema mismatch, I/O failure.
class DataError : public Error {
public:
    explicit DataError(const std::string& what) : Error(ErrorKind::Data, what) {}
};

// Loss of positive definiteness, non-finite arithmetic.
class NumericalError : public Error {
public:
    explicit NumericalError(const std::string& what) : Error(ErrorKind::Numerical, what) {}
};

} // namespace sparsefd
