#include "dressing/symmetry.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "dressing/error.hpp"

namespace dressing {

namespace {

int mod(int a, int n) { return ((a % n) + n) % n; }

}  // namespace

CyclicGroup::CyclicGroup(int order) : order_(order) {
    if (order < 1) throw DomainError(ErrorKind::InvalidArgument, "group order must be positive");
    chars_.reserve(order);
    for (int j = 0; j < order; ++j) chars_.push_back(std::polar(1.0, 2 * std::numbers::pi * j / order));
}

Complex CyclicGroup::character(int j) const { return chars_[mod(j, order_)]; }

CVec cyclic_shift(const CVec& v) {
    CVec out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) out[i] = v[(i + 1) % v.size()];
    return out;
}

std::vector<double> cyclic_shift(const std::vector<double>& v) {
    std::vector<double> out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) out[i] = v[(i + 1) % v.size()];
    return out;
}

CVec embed(const std::vector<double>& v) { return CVec(v.begin(), v.end()); }

CVec to_irreducible(const CVec& sigma) {
    const int n = static_cast<int>(sigma.size());
    if (n == 0) return {};
    const CyclicGroup group(n);
    CVec s(n, 0.0);
    for (int j = 0; j < n; ++j) {
        for (int k = 0; k < n; ++k) s[j] += group.character(-j * k) * sigma[k];
        s[j] /= static_cast<double>(n);
    }
    return s;
}

CVec from_irreducible(const CVec& s) {
    const int n = static_cast<int>(s.size());
    if (n == 0) return {};
    const CyclicGroup group(n);
    CVec sigma(n, 0.0);
    for (int k = 0; k < n; ++k)
        for (int j = 0; j < n; ++j) sigma[k] += group.character(j * k) * s[j];
    return sigma;
}

CVec projector(int j, const CVec& v) {
    const int n = static_cast<int>(v.size());
    if (j < 0 || j >= n) throw DomainError(ErrorKind::IndexOutOfRange, "projector index " + std::to_string(j));
    const CVec s = to_irreducible(v);
    CVec only(n, 0.0);
    only[j] = s[j];
    return from_irreducible(only);
}

int poisson_bracket(int i, int k) {
    if (i == k) return 0;
    if (k < i) return (i - k) % 2 == 0 ? 1 : -1;
    return -poisson_bracket(k, i);
}

Complex bracket(const CVec& grad_f, const CVec& grad_g) {
    if (grad_f.size() != grad_g.size()) throw DomainError(ErrorKind::InvalidArgument, "gradient sizes differ");
    Complex out = 0.0;
    const int n = static_cast<int>(grad_f.size());
    for (int i = 0; i < n; ++i)
        for (int k = 0; k < n; ++k) out += grad_f[i] * static_cast<double>(poisson_bracket(i, k)) * grad_g[k];
    return out;
}

double hamiltonian(const ChainState& s) {
    double h = 0.0;
    for (std::size_t i = 0; i < s.sigma.size(); ++i) h += s.sigma[i] * s.sigma[i] * s.sigma[i] / 3 + s.mu[i] * s.sigma[i];
    return h;
}

std::vector<double> ad_H(const ChainState& s) {
    if (s.sigma.size() != s.mu.size() || s.sigma.empty())
        throw DomainError(ErrorKind::InvalidArgument, "sigma and mu must be non-empty and of equal length");
    const int n = static_cast<int>(s.sigma.size());
    if (n % 2 == 0) throw DomainError(ErrorKind::EvenN, "Poisson structure needs odd N");
    std::vector<double> out(n, 0.0);
    for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) out[j] += (s.sigma[k] * s.sigma[k] + s.mu[k]) * poisson_bracket(k, j);
    return out;
}

CVec ss_rhs(const CVec& s, const CVec& mu) {
    if (s.size() != 3 || mu.size() != 3) throw DomainError(ErrorKind::UnsupportedN, "ss_rhs is written for N = 3");
    const CyclicGroup group(3);
    const CVec mu_hat = to_irreducible(mu);
    CVec out(3, 0.0);
    for (int j = 0; j < 3; ++j) {
        Complex quad = 0.0;
        for (int i = 0; i < 3; ++i)
            for (int l = 0; l < 3; ++l)
                if ((i + l) % 3 == j) quad += s[i] * s[l];
        out[j] = (group.character(2 * j) - group.character(j)) * (quad + mu_hat[j]);
    }
    return out;
}

}  // namespace dressing
