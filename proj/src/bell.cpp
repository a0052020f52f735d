#include "dressing/bell.hpp"

#include <string>

#include "dressing/error.hpp"

namespace dressing {

namespace {

void check_indices(int n, int k) {
    if (n < 0 || k < 0 || k > n) {
        throw DomainError(ErrorKind::IndexError,
                          "B_{n,k} needs 0 <= k <= n, got n=" + std::to_string(n) + ", k=" + std::to_string(k));
    }
}

Rational binomial(int n, int k) {
    if (k < 0 || k > n) return 0;
    Rational out = 1;
    for (int i = 1; i <= k; ++i) out = out * (n - k + i) / i;
    return out;
}

std::vector<DiffPoly> standard_rows(unsigned n_max) {
    std::vector<DiffPoly> out{DiffPoly(1)};
    const DiffPoly sigma = DiffPoly::sigma();
    for (unsigned n = 0; n < n_max; ++n) out.push_back(total_derivative(out.back()) + sigma * out.back());
    return out;
}

}  // namespace

DiffPoly bell_standard(unsigned n) { return standard_rows(n).back(); }

BellTable::BellTable(unsigned n_max) : n_max_(n_max), standard_(standard_rows(n_max)) {
    rows_.reserve(n_max + 1);
    for (unsigned n = 0; n <= n_max; ++n) {
        std::vector<DiffPoly> row(n + 1);
        row[0] = DiffPoly(1);
        for (unsigned k = 1; k < n; ++k) row[k] = rows_[n - 1][k] + total_derivative(rows_[n - 1][k - 1]);
        if (n >= 1) row[n] = total_derivative(rows_[n - 1][n - 1]) + standard_[n];
        rows_.push_back(std::move(row));
    }
}

const DiffPoly& BellTable::standard(unsigned n) const {
    if (n > n_max_) throw DomainError(ErrorKind::IndexError, "B_n beyond table size");
    return standard_[n];
}

const DiffPoly& BellTable::generalized(int n, int k) const {
    check_indices(n, k);
    if (static_cast<unsigned>(n) > n_max_) throw DomainError(ErrorKind::IndexError, "B_{n,k} beyond table size");
    return rows_[n][k];
}

DiffPoly bell_generalized_recurrence(int n, int k) {
    check_indices(n, k);
    return BellTable(static_cast<unsigned>(n)).generalized(n, k);
}

DiffPoly bell_generalized_explicit(int n, int k) {
    check_indices(n, k);
    std::vector<DiffPoly> row(k + 1);
    row[0] = DiffPoly(1);
    // D^j σ for j < k
    std::vector<DiffPoly> sigma_derivs{DiffPoly::sigma()};
    for (int j = 1; j < k; ++j) sigma_derivs.push_back(total_derivative(sigma_derivs.back()));
    for (int kk = 1; kk <= k; ++kk) {
        DiffPoly sum;
        for (int i = 0; i < kk; ++i) sum += scale(row[i] * sigma_derivs[kk - i - 1], binomial(n - i, n - kk + 1));
        row[kk] = std::move(sum);
    }
    return row[k];
}

}  // namespace dressing
