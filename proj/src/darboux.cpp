#include "dressing/darboux.hpp"

#include <memory>
#include <string>

#include "dressing/bell.hpp"
#include "dressing/error.hpp"

namespace dressing {

namespace {

constexpr unsigned kSharedRows = 8;

const BellTable& shared_table() {
    static const BellTable table(kSharedRows);
    return table;
}

// Returns the shared table when it is large enough, otherwise builds one into `scratch`.
const BellTable& table_for(int n, std::unique_ptr<BellTable>& scratch) {
    if (n <= static_cast<int>(kSharedRows)) return shared_table();
    scratch = std::make_unique<BellTable>(static_cast<unsigned>(n));
    return *scratch;
}

void require_order(const Jet& jet, int order, const char* what) {
    if (jet.order() < order) {
        throw DomainError(ErrorKind::OrderTooLow, std::string(what) + " needs order " + std::to_string(order) +
                                                      ", got " + std::to_string(jet.order()));
    }
}

void require_operator(const OperatorCoeffs& op) {
    if (op.coeffs.empty()) throw DomainError(ErrorKind::InvalidArgument, "operator has no coefficients");
}

double binomial(int n, int k) {
    double out = 1.0;
    for (int i = 1; i <= k; ++i) out = out * (n - k + i) / i;
    return out;
}

}  // namespace

Complex dt_eigenfunction(const Jet& psi, const Jet& sigma) {
    require_order(psi, 1, "psi");
    return psi[1] - sigma[0] * psi[0];
}

Jet dt_eigenfunction_jet(const Jet& psi, const Jet& sigma) {
    require_order(psi, 1, "psi");
    const int order = std::min(psi.order() - 1, sigma.order());
    std::vector<Complex> out(order + 1);
    // (σψ)^(m) by Leibniz
    for (int m = 0; m <= order; ++m) {
        Complex prod = 0.0;
        for (int j = 0; j <= m; ++j) prod += binomial(m, j) * sigma[j] * psi[m - j];
        out[m] = psi[m + 1] - prod;
    }
    return Jet(std::move(out));
}

Jet log_derivative_jet(const Jet& phi) {
    require_order(phi, 1, "phi");
    if (phi[0] == 0.0) throw DomainError(ErrorKind::SingularPhi, "log-derivative of a vanishing function");
    // φ' = σφ differentiated m times, solved for σ^(m)
    std::vector<Complex> sigma(phi.order());
    for (int m = 0; m < phi.order(); ++m) {
        Complex rest = 0.0;
        for (int j = 0; j < m; ++j) rest += binomial(m, j) * sigma[j] * phi[m - j];
        sigma[m] = (phi[m + 1] - rest) / phi[0];
    }
    return Jet(std::move(sigma));
}

std::vector<Complex> dt_coefficients(const OperatorCoeffs& op, const Jet& sigma) {
    require_operator(op);
    const int order = op.order();
    if (op.coeffs.back()[0] == 0.0) throw DomainError(ErrorKind::InvalidArgument, "leading coefficient vanishes");
    std::unique_ptr<BellTable> scratch;
    const BellTable& bell = table_for(order, scratch);
    std::vector<Complex> out(order + 1);
    out[order] = op.coeffs[order][0];
    for (int n = 0; n < order; ++n) {
        Complex value = op.coeffs[n][0];
        for (int k = n + 1; k <= order; ++k) {
            const Jet& a = op.coeffs[k];
            require_order(a, 1, "coefficient jet");
            value += a[0] * evaluate(bell.generalized(k, k - n), sigma) +
                     (a[1] - sigma[0] * a[0]) * evaluate(bell.generalized(k - 1, k - 1 - n), sigma);
        }
        out[n] = value;
    }
    return out;
}

std::vector<DiffPoly> dt_coefficient_shifts(std::span<const Rational> coeffs) {
    if (coeffs.empty()) throw DomainError(ErrorKind::InvalidArgument, "operator has no coefficients");
    const int order = static_cast<int>(coeffs.size()) - 1;
    std::unique_ptr<BellTable> scratch;
    const BellTable& bell = table_for(order, scratch);
    const DiffPoly sigma = DiffPoly::sigma();
    std::vector<DiffPoly> out(order + 1);
    for (int n = 0; n < order; ++n) {
        for (int k = n + 1; k <= order; ++k) {
            const DiffPoly a(coeffs[k]);
            out[n] += a * bell.generalized(k, k - n) - sigma * a * bell.generalized(k - 1, k - 1 - n);
        }
    }
    return out;
}

Complex miura_r(const OperatorCoeffs& op, const Jet& sigma) {
    require_operator(op);
    std::unique_ptr<BellTable> scratch;
    const BellTable& bell = table_for(op.order(), scratch);
    Complex r = 0.0;
    for (int n = 0; n <= op.order(); ++n) r += op.coeffs[n][0] * evaluate(bell.standard(n), sigma);
    return r;
}

Complex miura_r_dx(const OperatorCoeffs& op, const Jet& sigma) {
    require_operator(op);
    std::unique_ptr<BellTable> scratch;
    const BellTable& bell = table_for(op.order(), scratch);
    Complex dr = 0.0;
    for (int n = 0; n <= op.order(); ++n) {
        const Jet& a = op.coeffs[n];
        require_order(a, 1, "coefficient jet");
        dr += a[1] * evaluate(bell.standard(n), sigma) + a[0] * evaluate(total_derivative(bell.standard(n)), sigma);
    }
    return dr;
}

Complex potential_a0(const OperatorCoeffs& op, const Jet& sigma, Complex c) {
    require_operator(op);
    std::unique_ptr<BellTable> scratch;
    const BellTable& bell = table_for(op.order(), scratch);
    Complex a0 = c;
    for (int n = 1; n <= op.order(); ++n) a0 -= op.coeffs[n][0] * evaluate(bell.standard(n), sigma);
    return a0;
}

Complex potential_from_sigma(int order, const Jet& sigma, Complex mu, Complex w) {
    if (order == 2) {
        require_order(sigma, 1, "sigma");
        return sigma[1] + sigma[0] * sigma[0] + mu;
    }
    if (order == 3) {
        require_order(sigma, 2, "sigma");
        if (sigma[0] == 0.0) throw DomainError(ErrorKind::DivisionByZeroSigma, "third-order link divides by sigma");
        const Complex s = sigma[0];
        return (mu - sigma[2] - 3.0 * s * sigma[1] - s * s * s - w) / s;
    }
    throw DomainError(ErrorKind::UnsupportedN, "potential_from_sigma supports orders 2 and 3");
}

Complex chain_residual_n2(const Jet& sigma_i, const Jet& sigma_next, Complex mu_i, Complex mu_next) {
    require_order(sigma_i, 1, "sigma_i");
    require_order(sigma_next, 1, "sigma_{i+1}");
    const Complex lhs = sigma_next[1] + sigma_next[0] * sigma_next[0] + mu_next;
    const Complex rhs = -sigma_i[1] + sigma_i[0] * sigma_i[0] + mu_i;
    return lhs - rhs;
}

Complex chain_residual_n3(const Jet& sigma_i, const Jet& sigma_next, Complex mu_i, Complex mu_next) {
    require_order(sigma_i, 2, "sigma_i");
    require_order(sigma_next, 2, "sigma_{i+1}");
    auto link = [](const Jet& s, Complex mu) { return s[2] + 3.0 * s[0] * s[1] + s[0] * s[0] * s[0] - mu; };
    const Complex lhs = link(sigma_next, mu_next) * sigma_i[0];
    const Complex rhs = link(sigma_i, mu_i) * sigma_next[0] + 3.0 * sigma_i[1] * sigma_i[0] * sigma_next[0];
    return lhs - rhs;
}

}  // namespace dressing
