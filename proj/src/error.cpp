#include "heptamap/error.hpp"

namespace hepta {

const char* to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::NonPositiveDefinite: return "NonPositiveDefinite";
        case ErrorCode::NoConvergence: return "NoConvergence";
        case ErrorCode::BadLabel: return "BadLabel";
        case ErrorCode::BadSegment: return "BadSegment";
        case ErrorCode::PathThroughSingularity: return "PathThroughSingularity";
        case ErrorCode::SingularSystem: return "SingularSystem";
        case ErrorCode::ConeViolation: return "ConeViolation";
        case ErrorCode::HumbertDegenerate: return "HumbertDegenerate";
        case ErrorCode::DenominatorZero: return "DenominatorZero";
        case ErrorCode::SignCheckFailed: return "SignCheckFailed";
        case ErrorCode::InvalidHeptagon: return "InvalidHeptagon";
        case ErrorCode::InvalidCurve: return "InvalidCurve";
        case ErrorCode::NoRootInBracket: return "NoRootInBracket";
        case ErrorCode::ContinuationStalled: return "ContinuationStalled";
        case ErrorCode::LeftValidRegion: return "LeftValidRegion";
        case ErrorCode::AtPole: return "AtPole";
        case ErrorCode::OutsideHeptagon: return "OutsideHeptagon";
        case ErrorCode::OutsideHalfPlane: return "OutsideHalfPlane";
        case ErrorCode::WrongTile: return "WrongTile";
        case ErrorCode::ParseError: return "ParseError";
    }
    return "Unknown";
}

}  // namespace hepta
