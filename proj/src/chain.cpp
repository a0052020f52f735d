#include "dressing/chain.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "dressing/error.hpp"
#include "dressing/rk4.hpp"

namespace dressing {

namespace {

void require_shape(const ChainState& s) {
    if (s.sigma.size() != s.mu.size() || s.sigma.empty())
        throw DomainError(ErrorKind::InvalidArgument, "sigma and mu must be non-empty and of equal length");
    if (s.sigma.size() % 2 == 0)
        throw DomainError(ErrorKind::EvenN, "closed chain needs odd N, got " + std::to_string(s.sigma.size()));
}

void require_three(const ChainState& s) {
    require_shape(s);
    if (s.sigma.size() != 3) throw DomainError(ErrorKind::UnsupportedN, "only N = 3 is supported here");
}

bool all_finite(const std::vector<double>& v) {
    return std::all_of(v.begin(), v.end(), [](double a) { return std::isfinite(a); });
}

double A_of(const std::array<double, 3>& g, const std::array<double, 3>& mu) {
    return g[0] * g[1] * g[2] + mu[1] * g[2] + mu[0] * g[1] + mu[2] * g[0];
}

double A_at(const std::array<double, 3>& s, const std::array<double, 3>& mu) {
    return A_of({s[0] + s[1], s[1] + s[2], s[2] + s[0]}, mu);
}

std::vector<double> rhs3(const std::array<double, 3>& s, const std::array<double, 3>& mu) {
    return chain_rhs(ChainState{{s[0], s[1], s[2]}, {mu[0], mu[1], mu[2]}});
}

}  // namespace

std::vector<double> chain_rhs(const ChainState& s) {
    require_shape(s);
    const std::size_t n = s.sigma.size();
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = s.sigma[i] * s.sigma[i] + s.mu[i];
    std::vector<double> out(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        double sign = -1.0;
        for (std::size_t k = 1; k < n; ++k, sign = -sign) out[i] += sign * v[(i + k) % n];
    }
    return out;
}

double casimir_c(const ChainState& s) { return std::accumulate(s.sigma.begin(), s.sigma.end(), 0.0); }

std::array<double, 3> g_variables(const ChainState& s) {
    require_three(s);
    const auto& x = s.sigma;
    return {x[0] + x[1], x[1] + x[2], x[2] + x[0]};
}

double invariant_A(const ChainState& s) { return A_of(g_variables(s), {s.mu[0], s.mu[1], s.mu[2]}); }

double invariant_A_dx(const ChainState& s) {
    const auto g = g_variables(s);
    const auto& mu = s.mu;
    const double dA_dg1 = g[1] * g[2] + mu[2];
    const double dA_dg2 = g[0] * g[2] + mu[0];
    const double dA_dg3 = g[0] * g[1] + mu[1];
    const auto r = chain_rhs(s);
    return dA_dg1 * (r[0] + r[1]) + dA_dg2 * (r[1] + r[2]) + dA_dg3 * (r[2] + r[0]);
}

Trajectory integrate_chain(const ChainState& s0, double h, int steps) {
    require_shape(s0);
    if (!(h > 0)) throw DomainError(ErrorKind::InvalidArgument, "step h must be positive");
    if (steps < 0) throw DomainError(ErrorKind::InvalidArgument, "steps must be non-negative");
    const bool three = s0.sigma.size() == 3;
    auto sample = [&](double x, const std::vector<double>& y) {
        const ChainState s{y, s0.mu};
        return ChainSample{x, y, casimir_c(s), three ? invariant_A(s) : std::numeric_limits<double>::quiet_NaN()};
    };
    auto f = [&](const State& y) { return chain_rhs(ChainState{y, s0.mu}); };

    Trajectory traj{s0.mu, {}};
    traj.samples.reserve(static_cast<std::size_t>(steps) + 1);
    State y = s0.sigma;
    traj.samples.push_back(sample(0.0, y));
    for (int i = 1; i <= steps; ++i) {
        State next = rk4_step(f, y, h);
        if (!all_finite(next)) {
            throw DomainError(ErrorKind::NonFinite,
                              "chain state blew up; last valid x = " + std::to_string((i - 1) * h));
        }
        y = std::move(next);
        traj.samples.push_back(sample(i * h, y));
    }
    return traj;
}

std::optional<double> find_period(const ChainState& s0, double h, double x_max, double tol) {
    require_shape(s0);
    auto f = [&](const State& y) { return chain_rhs(ChainState{y, s0.mu}); };
    const auto r0 = f(s0.sigma);
    std::size_t j = 0;
    for (std::size_t i = 1; i < r0.size(); ++i)
        if (std::abs(r0[i]) > std::abs(r0[j])) j = i;
    if (r0[j] == 0.0) return std::nullopt;
    const double dir = r0[j] > 0 ? 1.0 : -1.0;
    const double target = s0.sigma[j];
    double scale = 1.0;
    for (double v : s0.sigma) scale = std::max(scale, std::abs(v));

    State y = s0.sigma;
    const int steps = static_cast<int>(std::ceil(x_max / h));
    for (int i = 1; i <= steps; ++i) {
        State next = rk4_step(f, y, h);
        const double before = dir * (y[j] - target);
        const double after = dir * (next[j] - target);
        if (i > 1 && before < 0 && after >= 0) {
            double lo = 0.0, hi = h;
            for (int it = 0; it < 80; ++it) {
                const double mid = 0.5 * (lo + hi);
                if (dir * (rk4_step(f, y, mid)[j] - target) < 0) lo = mid;
                else hi = mid;
            }
            const double tau = 0.5 * (lo + hi);
            const State at = rk4_step(f, y, tau);
            double dist = 0.0;
            for (std::size_t k = 0; k < at.size(); ++k) dist = std::max(dist, std::abs(at[k] - s0.sigma[k]));
            if (dist <= tol * scale) return (i - 1) * h + tau;
        }
        y = std::move(next);
    }
    return std::nullopt;
}

std::pair<double, double> g_rhs(const GState& g) {
    const double g3 = 2 * g.c - g.g1 - g.g2;
    const auto& mu = g.mu;
    const double d1 = mu[0] - mu[1] + 2 * g.c * g.g1 - g.g1 * g.g1 - 2 * g.g1 * g.g2;
    const double d2 = mu[1] - mu[2] + 2 * g.c * g.g2 - g.g2 * g.g2 - 2 * g.g2 * g3;
    return {d1, d2};
}

SpectralQuadratic spectral_quadratic(double g1, double c, double A, const std::array<double, 3>& mu) {
    const double b = g1 * (2 * c - g1) + mu[0] - mu[1];
    const double e = mu[1] * (2 * c - g1) + mu[2] * g1 - A;
    return {b, e, b * b + 4 * g1 * e};
}

std::pair<double, double> g2_branches(double g1, double c, double A, const std::array<double, 3>& mu) {
    const auto q = spectral_quadratic(g1, c, A, mu);
    if (g1 == 0.0) {
        if (q.b == 0.0) throw DomainError(ErrorKind::ComplexBranch, "g2 is undetermined at g1 = 0 with b = 0");
        const double root = -q.e / q.b;
        return {root, root};
    }
    const double scale2 = q.b * q.b + 4 * std::abs(g1 * q.e);
    const double threshold = 1e-10 * std::max(scale2, 1.0);
    if (q.discriminant < -threshold) {
        throw DomainError(ErrorKind::ComplexBranch,
                          "no real g2 for g1 = " + std::to_string(g1) + " (discriminant " +
                              std::to_string(q.discriminant) + ")");
    }
    if (std::abs(q.discriminant) <= threshold) {
        const double root = q.b / (2 * g1);
        return {root, root};
    }
    const double r = std::sqrt(q.discriminant);
    const double a = (q.b - r) / (2 * g1);
    const double bb = (q.b + r) / (2 * g1);
    return {std::min(a, bb), std::max(a, bb)};
}

double reduced_rhs(double g1, Branch branch, double c, double A, const std::array<double, 3>& mu) {
    const auto [low, high] = g2_branches(g1, c, A, mu);
    return g_rhs(GState{g1, branch == Branch::Low ? low : high, c, A, mu}).first;
}

ReducedTrajectory integrate_reduced(double g1_0, Branch branch, double c, double A, const std::array<double, 3>& mu,
                                    double h, int steps) {
    if (!(h > 0)) throw DomainError(ErrorKind::InvalidArgument, "step h must be positive");
    if (g1_0 == 0.0) throw DomainError(ErrorKind::InvalidArgument, "g1 must be nonzero to recover g2");
    auto f = [&](const State& y) {
        const auto q0 = spectral_quadratic(y[0], c, A, mu);
        const double db = 2 * c - 2 * y[0];
        const double de = mu[2] - mu[1];
        const double d_disc = 2 * q0.b * db + 4 * q0.e + 4 * y[0] * de;
        return State{y[1], 0.5 * d_disc};
    };
    auto sample = [&](double x, const State& y) {
        const auto q = spectral_quadratic(y[0], c, A, mu);
        const double g2 = (q.b - y[1]) / (2 * y[0]);
        const auto [low, high] = g2_branches(y[0], c, A, mu);
        const Branch b = std::abs(g2 - low) <= std::abs(g2 - high) ? Branch::Low : Branch::High;
        return ReducedSample{x, y[0], g2, b};
    };

    ReducedTrajectory out;
    State y{g1_0, reduced_rhs(g1_0, branch, c, A, mu)};
    out.samples.push_back(ReducedSample{0.0, g1_0, 0.0, branch});
    {
        const auto [low, high] = g2_branches(g1_0, c, A, mu);
        out.samples.back().g2 = branch == Branch::Low ? low : high;
    }
    for (int i = 1; i <= steps; ++i) {
        State next = rk4_step(f, y, h);
        if (!std::isfinite(next[0]) || !std::isfinite(next[1]))
            throw DomainError(ErrorKind::NonFinite, "reduced orbit blew up; last valid x = " + std::to_string((i - 1) * h));
        if (next[0] == 0.0) throw DomainError(ErrorKind::InvalidArgument, "orbit reached g1 = 0");
        if ((y[1] > 0) != (next[1] > 0) && y[1] != 0.0) {
            // linear interpolation of the sign change of p
            out.flips.push_back((i - 1) * h + h * y[1] / (y[1] - next[1]));
        }
        y = std::move(next);
        out.samples.push_back(sample(i * h, y));
    }
    return out;
}

double tchain_F(const std::array<double, 3>& s) {
    return s[1] * s[1] + 2 * s[1] * s[2] + 2 * s[0] * s[1] + s[0] * s[0] + 2 * s[0] * s[2] + s[2] * s[2];
}

std::array<double, 3> tchain_speeds(const std::array<double, 3>& mu, double F) {
    std::array<double, 3> out{};
    for (int i = 0; i < 3; ++i) out[i] = 0.5 * (mu[(i + 1) % 3] + mu[(i + 2) % 3] - 5 * mu[i] - F);
    return out;
}

namespace {

double sum3(const std::array<double, 3>& s) { return s[0] + s[1] + s[2]; }

double edge_F(const std::array<double, 3>& l, const std::array<double, 3>& r) {
    const double cl = sum3(l), cr = sum3(r);
    return (cl * cl + cl * cr + cr * cr) / 3;
}

void require_grid(const TChainField& field) {
    if (field.sigma.size() < 3) throw DomainError(ErrorKind::InvalidArgument, "t-chain grid needs at least 3 points");
    if (!(field.dx > 0)) throw DomainError(ErrorKind::InvalidArgument, "grid spacing must be positive");
}

}  // namespace

std::vector<std::array<double, 3>> tchain_rhs(const TChainField& field) {
    require_grid(field);
    const std::size_t m = field.sigma.size();
    std::vector<std::array<double, 3>> out(m);
    for (std::size_t j = 0; j < m; ++j) {
        const auto& here = field.sigma[j];
        const auto& prev = field.sigma[(j + m - 1) % m];
        const auto& next = field.sigma[(j + 1) % m];
        const auto point = tchain_speeds(field.mu, tchain_F(here));
        const auto fwd = tchain_speeds(field.mu, edge_F(here, next));
        const auto bwd = tchain_speeds(field.mu, edge_F(prev, here));
        for (int i = 0; i < 3; ++i) {
            out[j][i] = point[i] > 0 ? fwd[i] * (next[i] - here[i]) / field.dx : bwd[i] * (here[i] - prev[i]) / field.dx;
        }
    }
    return out;
}

double tchain_max_speed(const TChainField& field) {
    double lam = 0.0;
    for (const auto& s : field.sigma)
        for (double v : tchain_speeds(field.mu, tchain_F(s))) lam = std::max(lam, std::abs(v));
    return lam;
}

TChainField tchain_field_from_orbit(const ChainState& s0, int M, double x_max, int sub) {
    require_three(s0);
    if (M < 3 || sub < 1) throw DomainError(ErrorKind::InvalidArgument, "grid needs M >= 3 and sub >= 1");
    const auto period = find_period(s0, 1e-3, x_max);
    if (!period) throw DomainError(ErrorKind::NotInRange, "no closed orbit found within x_max");
    TChainField field{*period / M, 0.0, {s0.mu[0], s0.mu[1], s0.mu[2]}, {}};
    field.sigma.reserve(M);
    auto f = [&](const State& y) { return chain_rhs(ChainState{y, s0.mu}); };
    State y = s0.sigma;
    for (int j = 0; j < M; ++j) {
        field.sigma.push_back({y[0], y[1], y[2]});
        for (int k = 0; k < sub; ++k) y = rk4_step(f, y, field.dx / sub);
    }
    return field;
}

double tchain_chain_residual(const TChainField& field) {
    require_grid(field);
    const std::size_t m = field.sigma.size();
    double worst = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
        const auto& prev = field.sigma[(j + m - 1) % m];
        const auto& next = field.sigma[(j + 1) % m];
        const auto r = rhs3(field.sigma[j], field.mu);
        for (int i = 0; i < 3; ++i) worst = std::max(worst, std::abs((next[i] - prev[i]) / (2 * field.dx) - r[i]));
    }
    return worst;
}

TChainRun integrate_tchain(const TChainField& field, double dt, int steps) {
    require_grid(field);
    if (!(dt > 0)) throw DomainError(ErrorKind::InvalidArgument, "dt must be positive");
    TChainRun run;
    run.chain_residual_start = tchain_chain_residual(field);
    TChainField cur = field;
    const double m = static_cast<double>(cur.sigma.size());
    auto record = [&] {
        double c = 0.0, A = 0.0;
        for (const auto& s : cur.sigma) {
            const double cs = sum3(s);
            c += cs;
            A += A_at(s, cur.mu);
            run.max_F_minus_c2 = std::max(run.max_F_minus_c2, std::abs(tchain_F(s) - cs * cs));
        }
        run.t.push_back(cur.t);
        run.c_mean.push_back(c / m);
        run.A_mean.push_back(A / m);
    };
    record();
    for (int n = 0; n < steps; ++n) {
        const double lam = tchain_max_speed(cur);
        if (lam * dt > cur.dx) {
            throw DomainError(ErrorKind::CFLViolation, "max speed " + std::to_string(lam) + " times dt exceeds dx at t = " +
                                                           std::to_string(cur.t));
        }
        const auto rate = tchain_rhs(cur);
        for (std::size_t j = 0; j < cur.sigma.size(); ++j)
            for (int i = 0; i < 3; ++i) cur.sigma[j][i] += dt * rate[j][i];
        cur.t = field.t + (n + 1) * dt;
        record();
    }
    run.chain_residual_end = tchain_chain_residual(cur);
    run.final_field = std::move(cur);
    return run;
}

LinearFit fit_line(const std::vector<double>& t, const std::vector<double>& y) {
    if (t.size() != y.size() || t.size() < 2) throw DomainError(ErrorKind::InvalidArgument, "fit needs two or more points");
    const double n = static_cast<double>(t.size());
    const double tm = std::accumulate(t.begin(), t.end(), 0.0) / n;
    const double ym = std::accumulate(y.begin(), y.end(), 0.0) / n;
    double stt = 0.0, sty = 0.0;
    for (std::size_t i = 0; i < t.size(); ++i) {
        stt += (t[i] - tm) * (t[i] - tm);
        sty += (t[i] - tm) * (y[i] - ym);
    }
    const double slope = stt > 0 ? sty / stt : 0.0;
    LinearFit fit{slope, ym - slope * tm, 0.0, 0.0};
    const auto [lo, hi] = std::minmax_element(y.begin(), y.end());
    fit.range = *hi - *lo;
    for (std::size_t i = 0; i < t.size(); ++i)
        fit.max_residual = std::max(fit.max_residual, std::abs(y[i] - fit.slope * t[i] - fit.intercept));
    return fit;
}

}  // namespace dressing
