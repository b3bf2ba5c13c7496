// Exception types shared by every module.
#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace ratebound {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidPairError : public Error {
public:
    using Error::Error;
};

class InvalidSignalError : public Error {
public:
    using Error::Error;
};

// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
public:
    using Error::Error;
};

class UnsupportedError : public Error {
public:
    using Error::Error;
};

class NotStronglyConnectedError : public Error {
public:
    using Error::Error;
};

class SizeError : public Error {
public:
    using Error::Error;
};

// A strategy tried to read outside its information set.
class VisibilityViolation : public Error {
public:
    using Error::Error;
};

class ScheduleIntegrityError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

class ConvergenceError : public Error {
public:
    ConvergenceError(const std::string& what, double lo, double hi)
        : Error(what), bracket_lo(lo), bracket_hi(hi) {}
    double bracket_lo;
    double bracket_hi;
};

// Carries every violation found, each prefixed with a field path.
class ConfigError : public Error {
public:
    explicit ConfigError(std::vector<std::string> violations)
        : Error(join(violations)), violations_(std::move(violations)) {}

    const std::vector<std::string>& violations() const { return violations_; }

private:
    static std::string join(const std::vector<std::string>& v) {
        std::string out;
        for (const auto& s : v) {
            if (!out.empty()) out += "; ";
            out += s;
        }
        return out;
    }
    std::vector<std::string> violations_;
};

}  // namespace ratebound
