#ifndef DRESSING_CHAIN_HPP
#define DRESSING_CHAIN_HPP

#include <array>
#include <optional>
#include <utility>
#include <vector>

namespace dressing {

/// Closed chain of odd length N = sigma.size() = mu.size().
struct ChainState {
    std::vector<double> sigma;
    std::vector<double> mu;
};

/// σ_i' = Σ_{k=1}^{N-1} (−1)^k (σ_{i+k}² + μ_{i+k}), indices mod N. For N = 3:
/// σ₁' = σ₃² − σ₂² + μ₃ − μ₂ and cyclic. Throws EvenN.
std::vector<double> chain_rhs(const ChainState& s);

double casimir_c(const ChainState& s);

/// g₁ = σ₁+σ₂, g₂ = σ₂+σ₃, g₃ = σ₃+σ₁. N = 3 only.
std::array<double, 3> g_variables(const ChainState& s);

/// A = g₁g₂g₃ + μ₂g₃ + μ₁g₂ + μ₃g₁. Throws UnsupportedN for N ≠ 3.
double invariant_A(const ChainState& s);

/// dA/dx along chain_rhs by the chain rule.
double invariant_A_dx(const ChainState& s);

struct ChainSample {
    double x;
    std::vector<double> sigma;
    double c;
    double A;
};

struct Trajectory {
    std::vector<double> mu;
    std::vector<ChainSample> samples;
};

/// Fixed-step RK4 from x = 0; steps + 1 samples. A is recorded as NaN for N ≠ 3.
/// Throws NonFinite (naming the last valid x) if the state overflows.
Trajectory integrate_chain(const ChainState& s0, double h, int steps);

/// First return of the orbit to s0 within x_max, refined by bisection. Empty if none found.
std::optional<double> find_period(const ChainState& s0, double h, double x_max, double tol = 1e-8);

struct GState {
    double g1;
    double g2;
    double c;
    double A;
    std::array<double, 3> mu;
};

/// dg₁ = μ₁ − μ₂ + 2cg₁ − g₁² − 2g₁g₂, dg₂ = μ₂ − μ₃ + 2cg₂ − g₂² − 2g₂g₃ with g₃ = 2c − g₁ − g₂.
std::pair<double, double> g_rhs(const GState& g);

/// Coefficients of the g₂-quadratic −g₁g₂² + b g₂ + e = 0 obtained from A with g₃ eliminated,
/// and its discriminant b² + 4g₁e.
struct SpectralQuadratic {
    double b;
    double e;
    double discriminant;
};
SpectralQuadratic spectral_quadratic(double g1, double c, double A, const std::array<double, 3>& mu);

enum class Branch { Low, High };

/// Both g₂ roots, ordered. Near-zero discriminant (|Δ| ≤ 1e−10·scale²) returns the double root twice.
/// Throws ComplexBranch when Δ is negative beyond that threshold.
std::pair<double, double> g2_branches(double g1, double c, double A, const std::array<double, 3>& mu);

/// dg₁/dx with g₂ taken from the chosen root.
double reduced_rhs(double g1, Branch branch, double c, double A, const std::array<double, 3>& mu);

struct ReducedSample {
    double x;
    double g1;
    double g2;
    Branch branch;
};

struct ReducedTrajectory {
    std::vector<ReducedSample> samples;
    std::vector<double> flips;  // x positions where the sheet changes
};

/// Integrates g₁ on the spectral curve starting on `branch`. The state is (g₁, p) with p = dg₁/dx,
/// p' = Δ'(g₁)/2, so the orbit passes turning points smoothly; g₂ = (b − p)/(2g₁).
ReducedTrajectory integrate_reduced(double g1_0, Branch branch, double c, double A, const std::array<double, 3>& mu,
                                    double h, int steps);

/// Periodic grid of N = 3 chain states with uniform spacing dx.
struct TChainField {
    double dx;
    double t = 0.0;
    std::array<double, 3> mu;
    std::vector<std::array<double, 3>> sigma;
};

/// F = σ₂² + 2σ₂σ₃ + 2σ₁σ₂ + σ₁² + 2σ₁σ₃ + σ₃², written out term by term.
double tchain_F(const std::array<double, 3>& sigma);

/// Advection speeds λ_i = ½(μ_{i+1} + μ_{i+2} − 5μ_i − F), indices mod 3.
std::array<double, 3> tchain_speeds(const std::array<double, 3>& mu, double F);

/// σ_t = λ σ_x with first-order upwind differences. λ is evaluated at the upwind edge
/// with F averaged over the edge as (c_L² + c_L c_R + c_R²)/3.
std::vector<std::array<double, 3>> tchain_rhs(const TChainField& field);

/// Largest |λ_i| over the grid.
double tchain_max_speed(const TChainField& field);

/// Samples one period of the orbit through s0 on an M-point grid (sub RK4 steps per cell).
/// Throws NotInRange if no period is found within x_max.
TChainField tchain_field_from_orbit(const ChainState& s0, int M, double x_max = 10.0, int sub = 16);

struct TChainRun {
    std::vector<double> t;
    std::vector<double> c_mean;
    std::vector<double> A_mean;
    double max_F_minus_c2 = 0.0;  // over every grid point and time
    double chain_residual_start = 0.0;
    double chain_residual_end = 0.0;
    TChainField final_field;
};

/// Forward Euler in time. Throws CFLViolation when max|λ|·dt > dx at any step.
TChainRun integrate_tchain(const TChainField& field, double dt, int steps);

/// max |σ_x − chain_rhs(σ)| on the grid with central differences.
double tchain_chain_residual(const TChainField& field);

struct LinearFit {
    double slope;
    double intercept;
    double max_residual;
    double range;
};

/// Least-squares line through (t, y).
LinearFit fit_line(const std::vector<double>& t, const std::vector<double>& y);

}  // namespace dressing

#endif
