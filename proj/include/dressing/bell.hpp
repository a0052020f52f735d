#ifndef DRESSING_BELL_HPP
#define DRESSING_BELL_HPP

#include <map>
#include <utility>
#include <vector>

#include "dressing/diffpoly.hpp"

namespace dressing {

/// Standard Bell polynomial B_n(σ) = φ⁻¹ Dⁿ φ for σ = φ'/φ, via B_{n+1} = (D + σ) B_n.
DiffPoly bell_standard(unsigned n);

/// B_{n,k} from B_{n,0} = 1, B_{n,k} = B_{n-1,k} + D B_{n-1,k-1} (0 < k < n)
/// and the diagonal B_{n,n} = D B_{n-1,n-1} + B_n. Throws IndexError unless 0 <= k <= n.
DiffPoly bell_generalized_recurrence(int n, int k);

/// B_{n,k} = Σ_{i<k} C(n-i, n-k+1) B_{n,i} D^{k-i-1} σ, filling row n in increasing k.
DiffPoly bell_generalized_explicit(int n, int k);

/// Memoized rows 0..n_max of B_{n,k} (recurrence route) and B_n. Immutable after construction.
class BellTable {
   public:
    explicit BellTable(unsigned n_max);

    unsigned n_max() const noexcept { return n_max_; }
    const DiffPoly& standard(unsigned n) const;
    const DiffPoly& generalized(int n, int k) const;

   private:
    unsigned n_max_;
    std::vector<DiffPoly> standard_;
    std::vector<std::vector<DiffPoly>> rows_;
};

}  // namespace dressing

#endif
