#ifndef DRESSING_LATTICE_ZS_HPP
#define DRESSING_LATTICE_ZS_HPP

#include <cstdint>
#include <vector>

#include "dressing/zs.hpp"

namespace dressing {

using MatField = std::vector<Mat2>;

/// φ(n), n = 0..M−1. Periodic frames wrap the shift; free frames only use indices with n+1 < M.
struct LatticeFrame {
    MatField phi;
    bool periodic = false;

    int size() const noexcept { return static_cast<int>(phi.size()); }
};

/// φ(n) = diag(2ⁿ, 1), free boundary.
LatticeFrame diagonal_frame(int M);

/// φ(n) alternating between two random invertible matrices; periodic, M must be even.
LatticeFrame period2_frame(int M, std::uint64_t seed);

/// Independent random invertible φ(n), free boundary.
LatticeFrame random_frame(int M, std::uint64_t seed);

/// φ(n) ↦ φ(n)·g.
LatticeFrame gauge_transform(const LatticeFrame& frame, const Mat2& g);

/// Largest 2-norm condition number over the frame.
double max_condition(const LatticeFrame& frame);

/// σ(n) = φ(n)φ(n+1)⁻¹ on every index with a right neighbour. Throws SingularPhi.
MatField sigma_plus(const LatticeFrame& frame);

/// s(n) = φ(n)μφ(n+1)⁻¹.
MatField lattice_s(const LatticeFrame& frame, const Mat2& mu);

/// U(n) = φ(n)μφ(n+1)⁻¹ − Jσ(n).
MatField lattice_potential_U(const LatticeFrame& frame, const Mat2& mu, const Mat2& J);

/// max_n ‖Jφ(n) + U(n)φ(n+1) − φ(n)μ‖.
double spectral_residual(const LatticeFrame& frame, const MatField& U, const Mat2& mu, const Mat2& J);

/// max_n ‖σ(n+1)φ(n+2) − φ(n+1)‖.
double ts_residual(const LatticeFrame& frame, const MatField& sigma);

/// σ(n)U(n+1)σ(n) − U(n) − [J, σ(n)]. Throws IndexOutOfRange unless n and n+1 index U.
Mat2 miura_residual(const MatField& U, const MatField& sigma, const Mat2& J, int n, bool periodic);

struct LatticeDT {
    MatField u_next;     // U + [J, σ]
    MatField u_next_z;   // σ(n)U(n+1)σ(n+1)⁻¹
    double max_difference;
};

/// Both DT forms on every index where both are defined. Throws SingularSigma.
LatticeDT lattice_dt(const MatField& U, const MatField& sigma, const Mat2& J, bool periodic);

struct SChainReport {
    Mat2 mu1;
    double s_identity_level0;  // s = σ T(s) σ
    double s_identity_level1;
    double ss_residual;        // s₁ − s₀ − (Jσ₁ − σ₀J)
    double spectral_level1;    // level-1 frame against the transformed potential
};

/// Builds the DT iterate of a period-2 frame: U₁ = U₀ + [J, σ₀], then a period-2 solution φ₁ of
/// (J + U₁T)φ₁ = φ₁μ₁ from the 4×4 problem [[J, U₁(0)], [U₁(1), J]](p; q) = λ(p; q).
/// Throws InvalidArgument unless the frame is periodic with period 2, SingularPhi if no invertible pair exists.
SChainReport s_chain_residuals(const LatticeFrame& frame, const Mat2& mu, const Mat2& J);

}  // namespace dressing

#endif
