#ifndef DRESSING_SYMMETRY_HPP
#define DRESSING_SYMMETRY_HPP

#include <vector>

#include "dressing/chain.hpp"
#include "dressing/diffpoly.hpp"

namespace dressing {

using CVec = std::vector<Complex>;

/// Characters a_j = exp(2πi j/N) of the cyclic group of order N.
class CyclicGroup {
   public:
    explicit CyclicGroup(int order);

    int order() const noexcept { return order_; }
    /// a_j for any integer j (reduced mod N).
    Complex character(int j) const;

   private:
    int order_;
    std::vector<Complex> chars_;
};

/// (v₁, …, v_N) → (v₂, …, v_N, v₁).
CVec cyclic_shift(const CVec& v);
std::vector<double> cyclic_shift(const std::vector<double>& v);

CVec embed(const std::vector<double>& v);

/// s_j = N⁻¹ Σ_k a^{−(j−1)(k−1)} σ_k with a = a₁ (1-based j, k). Shift-eigenvectors:
/// to_irreducible(cyclic_shift(σ))_j = a^{j−1} s_j.
CVec to_irreducible(const CVec& sigma);

/// σ_k = Σ_j a^{(j−1)(k−1)} s_j; for N = 3: σ₁ = s₁+s₂+s₃, σ₂ = s₁+as₂+a²s₃, σ₃ = s₁+a²s₂+as₃.
CVec from_irreducible(const CVec& s);

/// Component of v in the j-th irreducible subspace (0-based j).
CVec projector(int j, const CVec& v);

/// Ω_ik = {σ_i, σ_k} for 0-based indices: (−1)^{k−i} when k < i, antisymmetric, zero diagonal.
int poisson_bracket(int i, int k);

/// {f, g} = Σ ∂_i f Ω_ik ∂_k g from gradients.
Complex bracket(const CVec& grad_f, const CVec& grad_g);

/// H = Σ (σ_i³/3 + μ_i σ_i).
double hamiltonian(const ChainState& s);

/// (ad_H)_j = {H, σ_j} = Σ_k (σ_k² + μ_k) Ω_kj. Throws EvenN.
std::vector<double> ad_H(const ChainState& s);

/// Chain flow in irreducible coordinates (N = 3): ds_j = (a^{2(j−1)} − a^{j−1})(Σ s_i s_l + μ̂_j),
/// the sum over (i−1)+(l−1) ≡ j−1 mod 3 and μ̂ = to_irreducible(μ). Throws UnsupportedN.
CVec ss_rhs(const CVec& s, const CVec& mu);

}  // namespace dressing

#endif
