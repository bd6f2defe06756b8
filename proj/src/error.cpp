#include "evdet/error.hpp"

namespace evdet {

const char* to_string(ErrorKind kind) {
    switch (kind) {
    case ErrorKind::OutOfBounds: return "OutOfBounds";
    case ErrorKind::NegativeDuration: return "NegativeDuration";
    case ErrorKind::InvalidRange: return "InvalidRange";
    case ErrorKind::NotCanonical: return "NotCanonical";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::HeaderMismatch: return "HeaderMismatch";
    case ErrorKind::GeometryMismatch: return "GeometryMismatch";
    case ErrorKind::DegenerateFps: return "DegenerateFps";
    case ErrorKind::InvalidConfig: return "InvalidConfig";
    case ErrorKind::ZeroWindow: return "ZeroWindow";
    case ErrorKind::NonPositiveBox: return "NonPositiveBox";
    case ErrorKind::FpsMismatch: return "FpsMismatch";
    case ErrorKind::DegenerateBox: return "DegenerateBox";
    case ErrorKind::Io: return "Io";
    }
    return "Unknown";
}

}  // namespace evdet
