#include "jointdesc/error.hpp"

namespace jointdesc {

std::string_view to_string(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::MissingCell: return "MissingCell";
        case ErrorKind::SizeLimit: return "SizeLimit";
        case ErrorKind::ParseError: return "ParseError";
        case ErrorKind::RationalizeError: return "RationalizeError";
        case ErrorKind::DimensionMismatch: return "DimensionMismatch";
        case ErrorKind::WrongScenario: return "WrongScenario";
        case ErrorKind::NoFriend: return "NoFriend";
        case ErrorKind::NotInfeasible: return "NotInfeasible";
        case ErrorKind::Unnormalized: return "Unnormalized";
        case ErrorKind::NonUnitary: return "NonUnitary";
        case ErrorKind::NotFound: return "NotFound";
        case ErrorKind::EmptyCounts: return "EmptyCounts";
        case ErrorKind::CapExceeded: return "CapExceeded";
        case ErrorKind::ZeroBase: return "ZeroBase";
        case ErrorKind::InvalidArgument: return "InvalidArgument";
    }
    return "Unknown";
}

Error::Error(ErrorKind kind, const std::string& message)
    : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

}  // namespace jointdesc
