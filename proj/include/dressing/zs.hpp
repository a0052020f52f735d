#ifndef DRESSING_ZS_HPP
#define DRESSING_ZS_HPP

#include <array>
#include <vector>

#include <Eigen/Dense>

#include "dressing/diffpoly.hpp"

namespace dressing {

using Mat2 = Eigen::Matrix2cd;
using PauliVec = std::array<Complex, 3>;

/// σ₁, σ₂, σ₃ for k = 1, 2, 3.
Mat2 pauli(int k);

/// η₁σ₁ + η₂σ₂ + η₃σ₃.
Mat2 from_pauli(const PauliVec& eta);

/// Pauli coefficients of a traceless matrix, η_k = tr(Mσ_k)/2.
PauliVec to_pauli(const Mat2& m);

/// Printed:     η₁² + η₂² + η₃² = m.
/// Determinant: η₁² + η₂² + η₃² = −m, i.e. det(η·σ) = m.
enum class DetConvention { Printed, Determinant };

/// Principal root of the radicand for the chosen convention. In real mode a radicand that is
/// negative or not real throws NegativeRadicand.
Complex eta3(Complex eta1, Complex eta2, Complex m, DetConvention conv = DetConvention::Printed,
             bool real_mode = true);

struct NSPotential {
    Complex u1;
    Complex u2;

    Mat2 matrix() const;
};

/// (η₁, η₂) with their first derivatives and the product m = μ₁μ₂.
struct EtaJet {
    Complex eta1;
    Complex eta2;
    Complex d_eta1;
    Complex d_eta2;
    Complex m;
};

/// u₁ = −(η₂'/η₃ + 2η₂)/2i, u₂ = (η₁'/η₃ + 2η₁)/2i. Throws ZeroEta3.
NSPotential ns_potential_from_eta(const EtaJet& j, Complex eta3_value);
NSPotential ns_potential_from_eta(const EtaJet& j, DetConvention conv = DetConvention::Printed);

/// Left minus right of
///   η₁' + 2η₁η₃ = 2iη₃u₂,
///   η₂' + 2η₂η₃ = −2iη₃u₁,
///   η₃' = 2η₁² + 2η₂² − 2iη₁u₂ + 2iη₂u₁.
std::array<Complex, 3> etas_residual(const EtaJet& j, Complex eta3_value, Complex d_eta3, const NSPotential& u);

/// u₁ ↦ u₁ − 2iη₂, u₂ ↦ u₂ + 2iη₁.
NSPotential ns_dt(const NSPotential& u, const PauliVec& eta);

/// u + [J, σ].
Mat2 operator_dt(const Mat2& u, const Mat2& sigma, const Mat2& J);

struct USolution {
    Mat2 u;
    int kernel_dim;
    double residual;
};

/// Minimum-norm u with [σ, u] = [Jσ, σ]. Throws NotInRange if the right side leaves range(ad_σ).
USolution solve_u_from_sigma(const Mat2& sigma, const Mat2& J);

/// B_{βα} = 2i ε_{γβα} ξ_γ (0-based indices in the matrix).
Eigen::Matrix3cd lie_B_matrix(const PauliVec& xi);

/// η with Bᵀη = −Dξ, minimum norm. Throws SingularB when Dξ has a part along ker Bᵀ.
PauliVec eta_from_xi(const PauliVec& xi, const PauliVec& d_xi);

struct ClosureParams {
    double c;
    double m;
    double alpha3;
};

/// dx/dt = −(1 − α₃)√(−m x² − x⁴ − c²). Throws NegativeRadicand.
double closure_rhs(double x, const ClosureParams& p);

/// (x', y') obtained by composing the potential map and the DT step with η^{i+1} = α η^i,
/// α = (−α₃, −α₃, α₃), solved as a 2×2 linear system. z = η₃ at the current point.
std::array<double, 2> closure_eta_rates(double x, double y, double z, const ClosureParams& p);

struct ClosureSample {
    double t;
    double x;           // reduced route
    double x_eta;       // η-system route
    double y;
    double eta3;
    NSPotential u;
    double discrepancy;
};

struct ClosureRun {
    std::vector<ClosureSample> samples;
    double max_discrepancy = 0.0;
    double max_xy_drift = 0.0;
    double max_det_drift = 0.0;
    double max_trace_drift = 0.0;
};

/// Integrates the reduced equation and the η-system side by side with RK4; y₀ = c/x₀ and
/// η₃ = −sign(x)√(−m − x² − y²) (determinant convention).
ClosureRun integrate_closure(double x0, const ClosureParams& p, double dt, int steps);

}  // namespace dressing

#endif
