#include "dressing/zs.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "dressing/error.hpp"
#include "dressing/rk4.hpp"

namespace dressing {

namespace {

constexpr Complex kI{0.0, 1.0};

int levi_civita(int i, int j, int k) {
    if (i == j || j == k || i == k) return 0;
    return ((j - i + 3) % 3 == 1) ? 1 : -1;
}

}  // namespace

Mat2 pauli(int k) {
    Mat2 m;
    switch (k) {
        case 1: m << 0.0, 1.0, 1.0, 0.0; break;
        case 2: m << 0.0, -kI, kI, 0.0; break;
        case 3: m << 1.0, 0.0, 0.0, -1.0; break;
        default: throw DomainError(ErrorKind::IndexOutOfRange, "Pauli index must be 1, 2 or 3");
    }
    return m;
}

Mat2 from_pauli(const PauliVec& eta) { return eta[0] * pauli(1) + eta[1] * pauli(2) + eta[2] * pauli(3); }

PauliVec to_pauli(const Mat2& m) {
    return {(m * pauli(1)).trace() / 2.0, (m * pauli(2)).trace() / 2.0, (m * pauli(3)).trace() / 2.0};
}

Complex eta3(Complex eta1, Complex eta2, Complex m, DetConvention conv, bool real_mode) {
    const Complex base = conv == DetConvention::Printed ? m : -m;
    const Complex radicand = base - eta1 * eta1 - eta2 * eta2;
    if (real_mode && (radicand.imag() != 0.0 || radicand.real() < 0.0)) {
        throw DomainError(ErrorKind::NegativeRadicand, "eta3 radicand is " + std::to_string(radicand.real()) +
                                                           (radicand.imag() != 0.0 ? " (not real)" : ""));
    }
    return std::sqrt(radicand);
}

Mat2 NSPotential::matrix() const { return u1 * pauli(1) + u2 * pauli(2); }

NSPotential ns_potential_from_eta(const EtaJet& j, Complex e3) {
    if (e3 == 0.0) throw DomainError(ErrorKind::ZeroEta3, "potential needs eta3 != 0");
    return {-(j.d_eta2 / e3 + 2.0 * j.eta2) / (2.0 * kI), (j.d_eta1 / e3 + 2.0 * j.eta1) / (2.0 * kI)};
}

NSPotential ns_potential_from_eta(const EtaJet& j, DetConvention conv) {
    return ns_potential_from_eta(j, eta3(j.eta1, j.eta2, j.m, conv, false));
}

std::array<Complex, 3> etas_residual(const EtaJet& j, Complex e3, Complex d_eta3, const NSPotential& u) {
    return {
        j.d_eta1 + 2.0 * j.eta1 * e3 - 2.0 * kI * e3 * u.u2,
        j.d_eta2 + 2.0 * j.eta2 * e3 + 2.0 * kI * e3 * u.u1,
        d_eta3 - (2.0 * j.eta1 * j.eta1 + 2.0 * j.eta2 * j.eta2 - 2.0 * kI * j.eta1 * u.u2 + 2.0 * kI * j.eta2 * u.u1),
    };
}

NSPotential ns_dt(const NSPotential& u, const PauliVec& eta) {
    return {u.u1 - 2.0 * kI * eta[1], u.u2 + 2.0 * kI * eta[0]};
}

Mat2 operator_dt(const Mat2& u, const Mat2& sigma, const Mat2& J) { return u + J * sigma - sigma * J; }

USolution solve_u_from_sigma(const Mat2& sigma, const Mat2& J) {
    const Eigen::Matrix2cd id = Eigen::Matrix2cd::Identity();
    Eigen::Matrix4cd ad;
    // vec(σu − uσ) = (I ⊗ σ − σᵀ ⊗ I) vec(u), column-major vec
    for (int r = 0; r < 2; ++r)
        for (int c = 0; c < 2; ++c) {
            ad.block<2, 2>(2 * c, 2 * r) = id(c, r) * sigma - sigma(r, c) * id;
        }
    const Mat2 rhs_m = J * sigma * sigma - sigma * J * sigma;
    const Eigen::Vector4cd rhs = Eigen::Map<const Eigen::Vector4cd>(rhs_m.data());

    Eigen::CompleteOrthogonalDecomposition<Eigen::Matrix4cd> cod(ad);
    const double scale = std::max({ad.norm(), rhs.norm(), 1.0});
    cod.setThreshold(1e-12 * scale);
    const Eigen::Vector4cd x = cod.rank() == 0 ? Eigen::Vector4cd::Zero().eval() : cod.solve(rhs).eval();
    const double residual = (ad * x - rhs).norm();
    if (residual > 1e-10 * scale) {
        throw DomainError(ErrorKind::NotInRange,
                          "[J sigma, sigma] has a component outside range(ad_sigma): " + std::to_string(residual));
    }
    USolution out{Mat2::Zero(), 4 - static_cast<int>(cod.rank()), residual};
    Eigen::Map<Eigen::Vector4cd>(out.u.data()) = x;
    return out;
}

Eigen::Matrix3cd lie_B_matrix(const PauliVec& xi) {
    Eigen::Matrix3cd B = Eigen::Matrix3cd::Zero();
    for (int beta = 0; beta < 3; ++beta)
        for (int alpha = 0; alpha < 3; ++alpha)
            for (int gamma = 0; gamma < 3; ++gamma)
                B(beta, alpha) += 2.0 * kI * static_cast<double>(levi_civita(gamma, beta, alpha)) * xi[gamma];
    return B;
}

PauliVec eta_from_xi(const PauliVec& xi, const PauliVec& d_xi) {
    const Eigen::Matrix3cd Bt = lie_B_matrix(xi).transpose();
    const Eigen::Vector3cd rhs(-d_xi[0], -d_xi[1], -d_xi[2]);
    Eigen::CompleteOrthogonalDecomposition<Eigen::Matrix3cd> cod(Bt);
    const double scale = std::max({Bt.norm(), rhs.norm(), 1.0});
    cod.setThreshold(1e-12 * scale);
    const Eigen::Vector3cd eta = cod.rank() == 0 ? Eigen::Vector3cd::Zero().eval() : cod.solve(rhs).eval();
    const double residual = (Bt * eta - rhs).norm();
    if (residual > 1e-10 * scale) {
        throw DomainError(ErrorKind::SingularB, "D xi has a component along the kernel of B: " + std::to_string(residual));
    }
    return {eta(0), eta(1), eta(2)};
}

double closure_rhs(double x, const ClosureParams& p) {
    const double radicand = -p.m * x * x - x * x * x * x - p.c * p.c;
    const double scale = std::abs(p.m * x * x) + x * x * x * x + p.c * p.c;
    if (radicand < -1e-14 * std::max(scale, 1.0)) {
        throw DomainError(ErrorKind::NegativeRadicand,
                          "closure radicand -m x^2 - x^4 - c^2 = " + std::to_string(radicand) + " at x = " + std::to_string(x));
    }
    return -(1.0 - p.alpha3) * std::sqrt(std::max(radicand, 0.0));
}

std::array<double, 2> closure_eta_rates(double x, double y, double z, const ClosureParams& p) {
    if (z == 0.0) return {0.0, 0.0};
    const double a1 = -p.alpha3, a2 = -p.alpha3, a3 = p.alpha3;
    // affine in (x', y'): evaluate at three points and solve
    auto mismatch = [&](double dx, double dy) {
        const NSPotential here = ns_potential_from_eta(EtaJet{x, y, dx, dy, p.m}, Complex(z));
        const NSPotential next = ns_potential_from_eta(EtaJet{a1 * x, a2 * y, a1 * dx, a2 * dy, p.m}, Complex(a3 * z));
        const NSPotential stepped = ns_dt(here, {x, y, z});
        return Eigen::Vector2cd(next.u1 - stepped.u1, next.u2 - stepped.u2);
    };
    const Eigen::Vector2cd r0 = mismatch(0.0, 0.0);
    Eigen::Matrix2cd M;
    M.col(0) = mismatch(1.0, 0.0) - r0;
    M.col(1) = mismatch(0.0, 1.0) - r0;
    Eigen::FullPivLU<Eigen::Matrix2cd> lu(M);
    if (!lu.isInvertible()) throw DomainError(ErrorKind::SingularSystem, "closure rates are undetermined for these alpha");
    const Eigen::Vector2cd d = lu.solve(-r0);
    return {d(0).real(), d(1).real()};
}

ClosureRun integrate_closure(double x0, const ClosureParams& p, double dt, int steps) {
    if (!(dt > 0)) throw DomainError(ErrorKind::InvalidArgument, "dt must be positive");
    if (steps < 0) throw DomainError(ErrorKind::InvalidArgument, "steps must be non-negative");
    if (x0 == 0.0) throw DomainError(ErrorKind::InvalidArgument, "x0 must be nonzero (y = c/x)");
    closure_rhs(x0, p);
    const double sheet = x0 > 0 ? -1.0 : 1.0;
    auto z_of = [&](double x, double y) {
        const double radicand = -p.m - x * x - y * y;
        if (radicand < -1e-14 * std::max({std::abs(p.m), x * x + y * y, 1.0})) {
            throw DomainError(ErrorKind::NegativeRadicand, "eta3 radicand -m - x^2 - y^2 = " + std::to_string(radicand));
        }
        return sheet * std::sqrt(std::max(radicand, 0.0));
    };
    auto reduced = [&](const State& s) { return State{closure_rhs(s[0], p)}; };
    auto eta_system = [&](const State& s) {
        const auto r = closure_eta_rates(s[0], s[1], z_of(s[0], s[1]), p);
        return State{r[0], r[1]};
    };

    ClosureRun run;
    State a{x0};
    State b{x0, p.c / x0};
    auto record = [&](double t) {
        const double z = z_of(b[0], b[1]);
        const auto rates = closure_eta_rates(b[0], b[1], z, p);
        const NSPotential u = z == 0.0 ? NSPotential{0.0, 0.0}
                                       : ns_potential_from_eta(EtaJet{b[0], b[1], rates[0], rates[1], p.m}, Complex(z));
        const Mat2 sigma = from_pauli({b[0], b[1], z});
        ClosureSample smp{t, a[0], b[0], b[1], z, u, std::abs(a[0] - b[0])};
        run.max_discrepancy = std::max(run.max_discrepancy, smp.discrepancy);
        run.max_xy_drift = std::max(run.max_xy_drift, std::abs(b[0] * b[1] - p.c));
        run.max_det_drift = std::max(run.max_det_drift, std::abs(sigma.determinant() - p.m));
        run.max_trace_drift = std::max(run.max_trace_drift, std::abs(sigma.trace()));
        run.samples.push_back(smp);
    };
    record(0.0);
    for (int i = 1; i <= steps; ++i) {
        a = rk4_step(reduced, a, dt);
        b = rk4_step(eta_system, b, dt);
        record(i * dt);
    }
    return run;
}

}  // namespace dressing
