#pragma once

#include <stdexcept>
#include <string>

namespace inflection {

// Root of everything the library throws on purpose.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

#define INFLECTION_ERROR(Name)                 \
    class Name : public Error {                \
    public:                                    \
        using Error::Error;                    \
    }

INFLECTION_ERROR(NonFinite);
INFLECTION_ERROR(OutOfRange);
INFLECTION_ERROR(DomainError);
INFLECTION_ERROR(OrderTooHigh);
INFLECTION_ERROR(GridTooCoarse);
INFLECTION_ERROR(SolverFailure);
INFLECTION_ERROR(WindowBreach);
INFLECTION_ERROR(GridMismatch);
INFLECTION_ERROR(IoError);
INFLECTION_ERROR(FormatError);
INFLECTION_ERROR(InsufficientFrames);
INFLECTION_ERROR(InterpolationError);
INFLECTION_ERROR(BoundaryExtractionError);
INFLECTION_ERROR(RangeError);

#undef INFLECTION_ERROR

// line == 0 means the problem is not tied to a particular line
class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& msg, int line = 0, std::string key = {})
        : Error(line > 0 ? "line " + std::to_string(line) + (key.empty() ? "" : " (" + key + ")") + ": " + msg
                         : (key.empty() ? msg : key + ": " + msg)),
          line_(line), key_(std::move(key)) {}
    int line() const { return line_; }
    const std::string& key() const { return key_; }

private:
    int line_;
    std::string key_;
};

// One mode of a scattering batch failed; the batch keeps going.
class ModeFailure : public Error {
public:
    ModeFailure(int j, const std::string& what)
        : Error("mode j=" + std::to_string(j) + ": " + what), j_(j) {}
    int mode() const { return j_; }

private:
    int j_;
};

}  // namespace inflection
