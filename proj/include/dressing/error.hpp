#ifndef DRESSING_ERROR_HPP
#define DRESSING_ERROR_HPP

#include <stdexcept>
#include <string>
#include <string_view>

namespace dressing {

enum class ErrorKind {
    OrderTooLow,
    IndexError,
    DivisionByZeroSigma,
    EvenN,
    UnsupportedN,
    NonFinite,
    ComplexBranch,
    CFLViolation,
    NegativeRadicand,
    ZeroEta3,
    NotInRange,
    SingularB,
    SingularPhi,
    SingularSigma,
    IndexOutOfRange,
    SingularSystem,
    InvalidArgument,
};

std::string_view to_string(ErrorKind kind) noexcept;

// Raised for mathematically invalid input (negative radicand, singular frame, ...).
// The CLI maps these to exit code 2.
class DomainError : public std::runtime_error {
   public:
    DomainError(ErrorKind kind, const std::string& what)
        : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

   private:
    ErrorKind kind_;
};

}  // namespace dressing

#endif
