#include "morphwing/error.hpp"

namespace morphwing {

const char* to_string(ErrorKind kind) {
    switch (kind) {
    case ErrorKind::InvalidInput: return "InvalidInput";
    case ErrorKind::NoConvergence: return "NoConvergence";
    case ErrorKind::NonPhysical: return "NonPhysical";
    case ErrorKind::OutOfRange: return "OutOfRange";
    case ErrorKind::BranchAmbiguity: return "BranchAmbiguity";
    case ErrorKind::TooFewTriggers: return "TooFewTriggers";
    case ErrorKind::RankDeficient: return "RankDeficient";
    case ErrorKind::NoThrustZero: return "NoThrustZero";
    case ErrorKind::NoTrim: return "NoTrim";
    case ErrorKind::InvalidCutoff: return "InvalidCutoff";
    case ErrorKind::TooFewMarkers: return "TooFewMarkers";
    case ErrorKind::TooFewTrials: return "TooFewTrials";
    case ErrorKind::Io: return "Io";
    }
    return "Unknown";
}

} // namespace morphwing
