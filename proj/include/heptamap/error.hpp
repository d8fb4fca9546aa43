#pragma once

#include <stdexcept>
#include <string>

namespace hepta {

enum class ErrorCode {
    NonPositiveDefinite,
    NoConvergence,
    BadLabel,
    BadSegment,
    PathThroughSingularity,
    SingularSystem,
    ConeViolation,
    HumbertDegenerate,
    DenominatorZero,
    SignCheckFailed,
    InvalidHeptagon,
    InvalidCurve,
    NoRootInBracket,
    ContinuationStalled,
    LeftValidRegion,
    AtPole,
    OutsideHeptagon,
    OutsideHalfPlane,
    WrongTile,
    ParseError,
};

const char* to_string(ErrorCode code);

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

}  // namespace hepta
