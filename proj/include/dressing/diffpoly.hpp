#ifndef DRESSING_DIFFPOLY_HPP
#define DRESSING_DIFFPOLY_HPP

#include <complex>
#include <initializer_list>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace dressing {

using Rational = boost::multiprecision::cpp_rational;
using Complex = std::complex<double>;

// Exponents of a monomial over (σ, σ', σ'', ...). Entry k is the power of σ^(k).
// Trailing zeros are never stored, so equal monomials have equal vectors.
using Exponents = std::vector<unsigned>;

// Total degree first, then lexicographic on the exponent vector.
struct CanonicalOrder {
    bool operator()(const Exponents& lhs, const Exponents& rhs) const;
};

/// Values (σ, σ', ..., σ^(m)) of a function and its derivatives at one point.
class Jet {
   public:
    explicit Jet(std::vector<Complex> values);
    Jet(std::initializer_list<Complex> values) : Jet(std::vector<Complex>(values)) {}

    int order() const noexcept { return static_cast<int>(values_.size()) - 1; }
    const Complex& operator[](std::size_t k) const { return values_[k]; }
    std::span<const Complex> values() const noexcept { return values_; }

   private:
    std::vector<Complex> values_;
};

/// Polynomial in σ and its derivatives with exact rational coefficients.
/// Immutable once built except through the compound-assignment operators.
class DiffPoly {
   public:
    using TermMap = std::map<Exponents, Rational, CanonicalOrder>;

    DiffPoly() = default;
    DiffPoly(const Rational& constant);  // NOLINT: numbers promote to constants
    DiffPoly(int constant) : DiffPoly(Rational(constant)) {}  // NOLINT

    /// The jet variable σ^(k).
    static DiffPoly sigma(unsigned k = 0);
    /// c·Π (σ^(k))^exps[k]; trailing zero exponents are allowed.
    static DiffPoly monomial(Exponents exps, const Rational& c);

    const TermMap& terms() const noexcept { return terms_; }
    bool is_zero() const noexcept { return terms_.empty(); }

    /// Highest k with σ^(k) present; -1 for constants.
    int max_order() const noexcept;
    unsigned total_degree() const noexcept;

    DiffPoly& operator+=(const DiffPoly& rhs);
    DiffPoly& operator-=(const DiffPoly& rhs);
    DiffPoly& operator*=(const DiffPoly& rhs);

    friend DiffPoly operator+(DiffPoly lhs, const DiffPoly& rhs) { return lhs += rhs; }
    friend DiffPoly operator-(DiffPoly lhs, const DiffPoly& rhs) { return lhs -= rhs; }
    friend DiffPoly operator*(const DiffPoly& lhs, const DiffPoly& rhs);
    friend DiffPoly operator-(const DiffPoly& p);
    friend bool operator==(const DiffPoly& lhs, const DiffPoly& rhs) = default;

   private:
    void add_term(const Exponents& exps, const Rational& coeff);

    TermMap terms_;
};

DiffPoly scale(const DiffPoly& p, const Rational& c);

/// D(p) by the Leibniz rule with D σ^(k) = σ^(k+1).
DiffPoly total_derivative(const DiffPoly& p);
DiffPoly total_derivative(const DiffPoly& p, unsigned times);

/// Substitutes jet values. Throws DomainError(OrderTooLow) when p needs σ^(k), k > jet.order().
Complex evaluate(const DiffPoly& p, const Jet& jet);

/// Canonical text, e.g. `2*s^(1) + s^(0)^2`.
std::string to_string(const DiffPoly& p);
std::ostream& operator<<(std::ostream& os, const DiffPoly& p);

}  // namespace dressing

#endif
