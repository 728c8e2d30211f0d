// error.hpp: exception types shared by every qzsim module.

#pragma once

#include <stdexcept>
#include <string>

namespace qzsim {

enum class ErrorKind { missing_key, invalid_value, convergence_failure, degenerate_fit, io };

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

// A required configuration key was absent.
class MissingKey : public Error {
public:
    explicit MissingKey(const std::string& key)
        : Error(ErrorKind::missing_key, "missing key '" + key + "'"), key_(key) {}
    const std::string& key() const noexcept { return key_; }

private:
    std::string key_;
};

// A value was present but violates its domain (named key and reason).
class InvalidValue : public Error {
public:
    InvalidValue(const std::string& key, const std::string& reason)
        : Error(ErrorKind::invalid_value, "invalid value for '" + key + "': " + reason), key_(key) {}
    const std::string& key() const noexcept { return key_; }

private:
    std::string key_;
};

class ConvergenceFailure : public Error {
public:
    ConvergenceFailure(int sweeps, double off_norm)
        : Error(ErrorKind::convergence_failure,
                "Jacobi eigensolver did not converge after " + std::to_string(sweeps) +
                    " sweeps (off-diagonal norm " + std::to_string(off_norm) + ")"),
          sweeps_(sweeps), off_norm_(off_norm) {}
    int sweeps() const noexcept { return sweeps_; }
    double off_norm() const noexcept { return off_norm_; }

private:
    int sweeps_;
    double off_norm_;
};

class DegenerateFit : public Error {
public:
    explicit DegenerateFit(const std::string& what) : Error(ErrorKind::degenerate_fit, what) {}
};

class IoError : public Error {
public:
    explicit IoError(const std::string& what) : Error(ErrorKind::io, what) {}
};

}  // namespace qzsim
