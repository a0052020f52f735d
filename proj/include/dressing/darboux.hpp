#ifndef DRESSING_DARBOUX_HPP
#define DRESSING_DARBOUX_HPP

#include <span>
#include <vector>

#include "dressing/diffpoly.hpp"

namespace dressing {

/// Coefficients of L = Σ a_n Dⁿ sampled at one point; coeffs[n] is the jet of a_n.
struct OperatorCoeffs {
    std::vector<Jet> coeffs;

    int order() const noexcept { return static_cast<int>(coeffs.size()) - 1; }
};

/// ψ[1] = ψ' − σψ at the point.
Complex dt_eigenfunction(const Jet& psi, const Jet& sigma);

/// Jet of ψ[1] = ψ' − σψ up to order min(ψ.order − 1, σ.order).
Jet dt_eigenfunction_jet(const Jet& psi, const Jet& sigma);

/// Jet of σ = φ'/φ from a jet of φ (order drops by one). Throws SingularPhi if φ = 0.
Jet log_derivative_jet(const Jet& phi);

/// Transformed coefficient values a_n[1]:
///   a_N[1] = a_N,
///   a_n[1] = a_n + Σ_{k>n} [a_k B_{k,k-n} + (a_k' − σ a_k) B_{k-1,k-1-n}].
std::vector<Complex> dt_coefficients(const OperatorCoeffs& op, const Jet& sigma);

/// Exact shifts Δ_n = a_n[1] − a_n for an operator with constant rational coefficients
/// (index n multiplies Dⁿ), as polynomials in σ and its derivatives.
std::vector<DiffPoly> dt_coefficient_shifts(std::span<const Rational> coeffs);

/// r = Σ a_n B_n(σ). Constant in x for a stationary scalar chain link.
Complex miura_r(const OperatorCoeffs& op, const Jet& sigma);

/// dr/dx = Σ (a_n' B_n + a_n D B_n); needs σ one order higher than miura_r.
Complex miura_r_dx(const OperatorCoeffs& op, const Jet& sigma);

/// Only-potential-a_0 link: a_0 = −Σ_{n≥1} a_n B_n(σ) + c.
Complex potential_a0(const OperatorCoeffs& op, const Jet& sigma, Complex c);

/// order 2: u = σ' + σ² + μ.
/// order 3: u = (μ − σ'' − 3σσ' − σ³ − w)/σ, DivisionByZeroSigma when σ = 0.
Complex potential_from_sigma(int order, const Jet& sigma, Complex mu, Complex w = 0.0);

/// Second-order link residual, LHS − RHS of
///   σ_{i+1}' + σ_{i+1}² + μ_{i+1} = −σ_i' + σ_i² + μ_i.
Complex chain_residual_n2(const Jet& sigma_i, const Jet& sigma_next, Complex mu_i, Complex mu_next);

/// Third-order link residual (w = 0), LHS − RHS of
///   (σ_{i+1}'' + 3σ_{i+1}σ_{i+1}' + σ_{i+1}³ − μ_{i+1}) σ_i
///     = (σ_i'' + 3σ_iσ_i' + σ_i³ − μ_i) σ_{i+1} + 3σ_i'σ_iσ_{i+1}.
Complex chain_residual_n3(const Jet& sigma_i, const Jet& sigma_next, Complex mu_i, Complex mu_next);

}  // namespace dressing

#endif
