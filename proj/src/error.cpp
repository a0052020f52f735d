#include "dressing/error.hpp"

namespace dressing {

std::string_view to_string(ErrorKind kind) noexcept {
    switch (kind) {
        case ErrorKind::OrderTooLow: return "OrderTooLow";
        case ErrorKind::IndexError: return "IndexError";
        case ErrorKind::DivisionByZeroSigma: return "DivisionByZeroSigma";
        case ErrorKind::EvenN: return "EvenN";
        case ErrorKind::UnsupportedN: return "UnsupportedN";
        case ErrorKind::NonFinite: return "NonFinite";
        case ErrorKind::ComplexBranch: return "ComplexBranch";
        case ErrorKind::CFLViolation: return "CFLViolation";
        case ErrorKind::NegativeRadicand: return "NegativeRadicand";
        case ErrorKind::ZeroEta3: return "ZeroEta3";
        case ErrorKind::NotInRange: return "NotInRange";
        case ErrorKind::SingularB: return "SingularB";
        case ErrorKind::SingularPhi: return "SingularPhi";
        case ErrorKind::SingularSigma: return "SingularSigma";
        case ErrorKind::IndexOutOfRange: return "IndexOutOfRange";
        case ErrorKind::SingularSystem: return "SingularSystem";
        case ErrorKind::InvalidArgument: return "InvalidArgument";
    }
    return "Unknown";
}

}  // namespace dressing
