#include "dressing/lattice_zs.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>

#include "dressing/error.hpp"

namespace dressing {

namespace {

// Uniform in [−1, 1) from the raw 64-bit engine output, identical on every platform.
double unit(std::mt19937_64& rng) { return 2.0 * static_cast<double>(rng() >> 11) * 0x1.0p-53 - 1.0; }

Mat2 random_invertible(std::mt19937_64& rng) {
    Mat2 m;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) m(i, j) = Complex(unit(rng), unit(rng));
    m += 1.5 * Mat2::Identity();
    return m;
}

bool singular(const Mat2& m) { return std::abs(m.determinant()) <= 1e-14 * std::max(m.squaredNorm(), 1e-300); }

Mat2 checked_inverse(const Mat2& m, ErrorKind kind, const std::string& what) {
    if (singular(m)) throw DomainError(kind, what + " is singular");
    return m.inverse();
}

int links(const LatticeFrame& f) { return f.periodic ? f.size() : f.size() - 1; }

int wrap(int n, int size) { return ((n % size) + size) % size; }

}  // namespace

LatticeFrame diagonal_frame(int M) {
    if (M < 2) throw DomainError(ErrorKind::InvalidArgument, "frame needs at least 2 sites");
    LatticeFrame f;
    for (int n = 0; n < M; ++n) {
        Mat2 m = Mat2::Zero();
        m(0, 0) = std::ldexp(1.0, n);
        m(1, 1) = 1.0;
        f.phi.push_back(m);
    }
    return f;
}

LatticeFrame period2_frame(int M, std::uint64_t seed) {
    if (M < 2 || M % 2 != 0) throw DomainError(ErrorKind::InvalidArgument, "period-2 frame needs an even size");
    std::mt19937_64 rng(seed);
    const Mat2 a = random_invertible(rng);
    const Mat2 b = random_invertible(rng);
    LatticeFrame f{{}, true};
    for (int n = 0; n < M; ++n) f.phi.push_back(n % 2 == 0 ? a : b);
    return f;
}

LatticeFrame random_frame(int M, std::uint64_t seed) {
    if (M < 2) throw DomainError(ErrorKind::InvalidArgument, "frame needs at least 2 sites");
    std::mt19937_64 rng(seed);
    LatticeFrame f;
    for (int n = 0; n < M; ++n) f.phi.push_back(random_invertible(rng));
    return f;
}

LatticeFrame gauge_transform(const LatticeFrame& frame, const Mat2& g) {
    LatticeFrame out = frame;
    for (auto& m : out.phi) m = m * g;
    return out;
}

double max_condition(const LatticeFrame& frame) {
    double worst = 0.0;
    for (const auto& m : frame.phi) {
        Eigen::JacobiSVD<Mat2> svd(m);
        const auto sv = svd.singularValues();
        worst = std::max(worst, sv(1) > 0 ? sv(0) / sv(1) : std::numeric_limits<double>::infinity());
    }
    return worst;
}

MatField sigma_plus(const LatticeFrame& frame) {
    MatField out;
    for (int n = 0; n < links(frame); ++n) {
        const Mat2& next = frame.phi[wrap(n + 1, frame.size())];
        out.push_back(frame.phi[n] * checked_inverse(next, ErrorKind::SingularPhi, "phi(" + std::to_string(n + 1) + ")"));
    }
    return out;
}

MatField lattice_s(const LatticeFrame& frame, const Mat2& mu) {
    MatField out;
    for (int n = 0; n < links(frame); ++n) {
        const Mat2& next = frame.phi[wrap(n + 1, frame.size())];
        out.push_back(frame.phi[n] * mu *
                      checked_inverse(next, ErrorKind::SingularPhi, "phi(" + std::to_string(n + 1) + ")"));
    }
    return out;
}

MatField lattice_potential_U(const LatticeFrame& frame, const Mat2& mu, const Mat2& J) {
    const MatField s = lattice_s(frame, mu);
    const MatField sigma = sigma_plus(frame);
    MatField U(s.size());
    for (std::size_t n = 0; n < s.size(); ++n) U[n] = s[n] - J * sigma[n];
    return U;
}

double spectral_residual(const LatticeFrame& frame, const MatField& U, const Mat2& mu, const Mat2& J) {
    double worst = 0.0;
    for (int n = 0; n < static_cast<int>(U.size()); ++n) {
        const Mat2 r = J * frame.phi[n] + U[n] * frame.phi[wrap(n + 1, frame.size())] - frame.phi[n] * mu;
        worst = std::max(worst, r.norm());
    }
    return worst;
}

double ts_residual(const LatticeFrame& frame, const MatField& sigma) {
    double worst = 0.0;
    const int size = frame.size();
    const int last = frame.periodic ? static_cast<int>(sigma.size()) : static_cast<int>(sigma.size()) - 1;
    for (int n = 0; n < last; ++n) {
        const Mat2 r = sigma[wrap(n + 1, static_cast<int>(sigma.size()))] * frame.phi[wrap(n + 2, size)] -
                       frame.phi[wrap(n + 1, size)];
        worst = std::max(worst, r.norm());
    }
    return worst;
}

Mat2 miura_residual(const MatField& U, const MatField& sigma, const Mat2& J, int n, bool periodic) {
    const int size = static_cast<int>(std::min(U.size(), sigma.size()));
    if (n < 0 || n >= size || (!periodic && n + 1 >= size))
        throw DomainError(ErrorKind::IndexOutOfRange, "site " + std::to_string(n) + " has no right neighbour");
    const Mat2& s = sigma[n];
    return s * U[wrap(n + 1, size)] * s - U[n] - (J * s - s * J);
}

LatticeDT lattice_dt(const MatField& U, const MatField& sigma, const Mat2& J, bool periodic) {
    const int size = static_cast<int>(std::min(U.size(), sigma.size()));
    LatticeDT out{{}, {}, 0.0};
    for (int n = 0; n < size; ++n) out.u_next.push_back(U[n] + J * sigma[n] - sigma[n] * J);
    const int last = periodic ? size : size - 1;
    for (int n = 0; n < last; ++n) {
        const int m = wrap(n + 1, size);
        const Mat2 z = sigma[n] * U[m] *
                       checked_inverse(sigma[m], ErrorKind::SingularSigma, "sigma(" + std::to_string(m) + ")");
        out.u_next_z.push_back(z);
        out.max_difference = std::max(out.max_difference, (z - out.u_next[n]).norm());
    }
    return out;
}

SChainReport s_chain_residuals(const LatticeFrame& frame, const Mat2& mu, const Mat2& J) {
    const int size = frame.size();
    if (!frame.periodic || size % 2 != 0)
        throw DomainError(ErrorKind::InvalidArgument, "s-chain needs a periodic frame of even size");
    for (int n = 0; n < size; ++n) {
        if ((frame.phi[wrap(n + 2, size)] - frame.phi[n]).norm() > 1e-14 * frame.phi[n].norm())
            throw DomainError(ErrorKind::InvalidArgument, "s-chain needs a frame of period 2");
    }
    const MatField sigma0 = sigma_plus(frame);
    const MatField s0 = lattice_s(frame, mu);
    const MatField U0 = lattice_potential_U(frame, mu, J);
    const LatticeDT dt = lattice_dt(U0, sigma0, J, true);
    const Mat2& Ua = dt.u_next[0];
    const Mat2& Ub = dt.u_next[1];

    Eigen::Matrix4cd block;
    block << J, Ua, Ub, J;
    Eigen::ComplexEigenSolver<Eigen::Matrix4cd> solver(block);
    if (solver.info() != Eigen::Success) throw DomainError(ErrorKind::SingularSystem, "level-1 eigenproblem failed");
    const auto& vals = solver.eigenvalues();
    const auto& vecs = solver.eigenvectors();

    auto score = [](const Eigen::Vector2cd& a, const Eigen::Vector2cd& b) {
        const double na = a.norm(), nb = b.norm();
        if (na == 0.0 || nb == 0.0) return 0.0;
        Mat2 m;
        m << a, b;
        return std::abs(m.determinant()) / (na * nb);
    };
    int best_i = -1, best_j = -1;
    double best = 0.0;
    for (int i = 0; i < 4; ++i)
        for (int j = i + 1; j < 4; ++j) {
            if (std::abs(vals(i) - vals(j)) <= 1e-12 * std::max(1.0, std::abs(vals(i)))) continue;
            const double sc = std::min(score(vecs.col(i).head<2>(), vecs.col(j).head<2>()),
                                       score(vecs.col(i).tail<2>(), vecs.col(j).tail<2>()));
            if (sc > best) {
                best = sc;
                best_i = i;
                best_j = j;
            }
        }
    if (best_i < 0 || best <= 1e-10) throw DomainError(ErrorKind::SingularPhi, "no invertible level-1 frame");

    Mat2 P, Q, mu1 = Mat2::Zero();
    P << vecs.col(best_i).head<2>(), vecs.col(best_j).head<2>();
    Q << vecs.col(best_i).tail<2>(), vecs.col(best_j).tail<2>();
    mu1(0, 0) = vals(best_i);
    mu1(1, 1) = vals(best_j);
    LatticeFrame level1{{}, true};
    for (int n = 0; n < size; ++n) level1.phi.push_back(n % 2 == 0 ? P : Q);

    const MatField sigma1 = sigma_plus(level1);
    const MatField s1 = lattice_s(level1, mu1);
    SChainReport rep{mu1, 0.0, 0.0, 0.0, spectral_residual(level1, dt.u_next, mu1, J)};
    for (int n = 0; n < size; ++n) {
        const int m = wrap(n + 1, size);
        rep.s_identity_level0 = std::max(rep.s_identity_level0, (s0[n] - sigma0[n] * s0[m] * sigma0[n]).norm());
        rep.s_identity_level1 = std::max(rep.s_identity_level1, (s1[n] - sigma1[n] * s1[m] * sigma1[n]).norm());
        rep.ss_residual = std::max(rep.ss_residual, (s1[n] - s0[n] - (J * sigma1[n] - sigma0[n] * J)).norm());
    }
    return rep;
}

}  // namespace dressing
