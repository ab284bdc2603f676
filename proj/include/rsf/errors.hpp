#ifndef RSF_ERRORS_HPP
#define RSF_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace rsf {

// Exit-code classes used by the CLI: 2 usage, 3 data, 4 numeric, 5 capability.
enum class ErrorClass : int {
    usage = 2,
    data = 3,
    numeric = 4,
    capability = 5,
};

class Error : public std::runtime_error {
public:
    Error(ErrorClass cls, const std::string& what) : std::runtime_error(what), cls_(cls) {}
    ErrorClass error_class() const noexcept { return cls_; }
    int exit_code() const noexcept { return static_cast<int>(cls_); }

private:
    ErrorClass cls_;
};

// Invalid parameters or flag combinations (infeasible generator settings, empty grids, ...).
class UsageError : public Error {
public:
    explicit UsageError(const std::string& what) : Error(ErrorClass::usage, what) {}
};

// Malformed input files; message carries the offending line when known.
class DataError : public Error {
public:
    explicit DataError(const std::string& what) : Error(ErrorClass::data, what) {}
};

// Singular systems, degenerate smoothers, dimension mismatches, budget exhaustion.
class NumericError : public Error {
public:
    explicit NumericError(const std::string& what) : Error(ErrorClass::numeric, what) {}
};

class DimensionError : public NumericError {
public:
    explicit DimensionError(const std::string& what) : NumericError(what) {}
};

// Requests beyond configured limits (dense spectrum on large graphs).
class CapabilityError : public Error {
public:
    explicit CapabilityError(const std::string& what) : Error(ErrorClass::capability, what) {}
};

}  // namespace rsf

#endif
