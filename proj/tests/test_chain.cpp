#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "dressing/chain.hpp"
#include "dressing/error.hpp"

using namespace dressing;

namespace {

const std::array<double, 3> kMu{0.1, 0.2, 0.3};

ChainState reference() { return {{1.0, 2.0, 3.0}, {0.1, 0.2, 0.3}}; }

double max_A_drift(double h, double x_end) {
    const auto traj = integrate_chain(reference(), h, static_cast<int>(std::lround(x_end / h)));
    double worst = 0.0;
    for (const auto& s : traj.samples) worst = std::max(worst, std::abs(s.A - traj.samples.front().A));
    return worst;
}

}  // namespace

TEST_CASE("chain right-hand side") {
    CHECK(chain_rhs({{1, 2, 3}, {0, 0, 0}}) == std::vector<double>{5, -8, 3});
    CHECK(chain_rhs({{1, 2, 3}, {7, 7, 7}}) == std::vector<double>{5, -8, 3});
    CHECK(chain_rhs({{0.4, 0.4, 0.4}, {2, 2, 2}}) == std::vector<double>{0, 0, 0});
    try {
        chain_rhs({{1, 2}, {0, 0}});
        FAIL("expected EvenN");
    } catch (const DomainError& e) {
        CHECK(e.kind() == ErrorKind::EvenN);
    }
}

TEST_CASE("casimir and second integral") {
    CHECK(casimir_c({{1, 2, 3}, {0, 0, 0}}) == 6.0);
    CHECK(casimir_c({{0, 0, 0}, {0, 0, 0}}) == 0.0);
    CHECK(casimir_c({{1.5, 1.5, 1.5}, {0, 0, 0}}) == 4.5);
    CHECK(g_variables({{1, 2, 3}, {0, 0, 0}}) == std::array<double, 3>{3, 5, 4});
    CHECK(invariant_A({{1, 2, 3}, {0, 0, 0}}) == 60.0);
    CHECK(invariant_A({{0, 0, 0}, {0, 0, 0}}) == 0.0);
    CHECK(invariant_A({{1, 1, 1}, {1, 1, 1}}) == 14.0);
    CHECK_THROWS_AS(invariant_A({{1, 2, 3, 4, 5}, {0, 0, 0, 0, 0}}), DomainError);
}

TEST_CASE("random states: components sum to zero, A is a first integral, mu shift invariance") {
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> d(-2.0, 2.0);
    for (int trial = 0; trial < 100; ++trial) {
        ChainState s{{d(rng), d(rng), d(rng)}, {d(rng), d(rng), d(rng)}};
        const auto r = chain_rhs(s);
        const double scale = std::abs(r[0]) + std::abs(r[1]) + std::abs(r[2]) + 1.0;
        CHECK(std::abs(r[0] + r[1] + r[2]) <= 1e-14 * scale);
        CHECK(std::abs(invariant_A_dx(s)) <= 1e-12 * std::max(1.0, scale * scale));
        ChainState shifted = s;
        const double k = d(rng);
        for (double& m : shifted.mu) m += k;
        const auto rs = chain_rhs(shifted);
        for (int i = 0; i < 3; ++i) CHECK(std::abs(rs[i] - r[i]) <= 1e-14 * scale);
    }
}

TEST_CASE("five-component chain keeps the telescoping sum") {
    const ChainState s{{0.3, -1.1, 0.7, 2.0, 0.5}, {0.1, 0.0, -0.4, 0.2, 0.9}};
    const auto r = chain_rhs(s);
    double sum = 0.0;
    for (double v : r) sum += v;
    CHECK(std::abs(sum) <= 1e-14);
}

TEST_CASE("integration conserves c and A") {
    const auto fixed = integrate_chain({{0.5, 0.5, 0.5}, {1, 1, 1}}, 1e-2, 100);
    CHECK(fixed.samples.back().sigma == std::vector<double>{0.5, 0.5, 0.5});

    const auto traj = integrate_chain(reference(), 1e-3, 10000);
    REQUIRE(traj.samples.size() == 10001);
    CHECK(traj.samples.front().c == 6.0);
    double c_drift = 0.0;
    for (const auto& s : traj.samples) c_drift = std::max(c_drift, std::abs(s.c - 6.0));
    CHECK(c_drift <= 1e-12);
    const double a1 = max_A_drift(1e-3, 10.0);
    const double a2 = max_A_drift(5e-4, 10.0);
    CHECK(a1 <= 1e-8);
    CHECK(a1 / a2 >= 8.0);
}

TEST_CASE("blow-up is reported") {
    try {
        integrate_chain({{50, -50, 0.0}, {0, 0, 0}}, 0.5, 50);
        FAIL("expected NonFinite");
    } catch (const DomainError& e) {
        CHECK(e.kind() == ErrorKind::NonFinite);
    }
    CHECK_THROWS_AS(integrate_chain(reference(), -1.0, 10), DomainError);
}

TEST_CASE("period of the reference orbit") {
    const auto X = find_period(reference(), 1e-3, 5.0);
    REQUIRE(X);
    const auto traj = integrate_chain(reference(), *X / 4000, 4000);
    for (int i = 0; i < 3; ++i) CHECK(std::abs(traj.samples.back().sigma[i] - reference().sigma[i]) <= 1e-9);
}

TEST_CASE("g-variable derivatives") {
    const std::array<double, 3> zero{0, 0, 0};
    auto [d1, d2] = g_rhs(GState{3, 5, 6, 60, zero});
    CHECK(d1 == -3.0);
    CHECK(d2 == -5.0);
    auto [e1, e2] = g_rhs(GState{0, 0, 1.3, 0, kMu});
    CHECK(e1 == Catch::Approx(kMu[0] - kMu[1]));
    CHECK(e2 == Catch::Approx(kMu[1] - kMu[2]));
}

TEST_CASE("g2 branches and the reduced flow") {
    const std::array<double, 3> zero{0, 0, 0};
    const auto [low, high] = g2_branches(3, 6, 60, zero);
    CHECK(low == Catch::Approx(4.0));
    CHECK(high == Catch::Approx(5.0));
    CHECK(reduced_rhs(3, Branch::High, 6, 60, zero) == Catch::Approx(-3.0));
    CHECK(reduced_rhs(3, Branch::Low, 6, 60, zero) == Catch::Approx(3.0));

    // A at the double root: discriminant b² + 4g₁e = 0 with g₁ = 3, c = 6 gives A = 60.75
    const auto [a, b] = g2_branches(3, 6, 60.75, zero);
    CHECK(a == b);
    CHECK(reduced_rhs(3, Branch::Low, 6, 60.75, zero) == reduced_rhs(3, Branch::High, 6, 60.75, zero));
    try {
        g2_branches(3, 6, 70, zero);
        FAIL("expected ComplexBranch");
    } catch (const DomainError& e) {
        CHECK(e.kind() == ErrorKind::ComplexBranch);
    }
}

TEST_CASE("reduced integration follows the sigma-space orbit") {
    const auto ref = reference();
    const double h = 1e-3;
    const int steps = 5000;
    const auto traj = integrate_chain(ref, h, steps);
    const double c = casimir_c(ref), A = invariant_A(ref);
    const double g1 = ref.sigma[0] + ref.sigma[1];
    const auto [low, high] = g2_branches(g1, c, A, kMu);
    const double g2 = ref.sigma[1] + ref.sigma[2];
    const Branch start = std::abs(g2 - low) < std::abs(g2 - high) ? Branch::Low : Branch::High;
    const auto red = integrate_reduced(g1, start, c, A, kMu, h, steps);
    double worst = 0.0;
    for (int i = 0; i <= steps; ++i)
        worst = std::max(worst, std::abs(red.samples[i].g1 - (traj.samples[i].sigma[0] + traj.samples[i].sigma[1])));
    CHECK(worst <= 1e-6);
    CHECK_FALSE(red.flips.empty());
}

TEST_CASE("t-chain pointwise quantities") {
    const std::array<double, 3> s{1, 2, 3};
    CHECK(tchain_F(s) == 36.0);
    CHECK(tchain_speeds({0, 0, 0}, 36.0)[2] == -18.0);

    TChainField flat{0.1, 0.0, kMu, std::vector<std::array<double, 3>>(8, {0.2, -0.4, 1.0})};
    for (const auto& r : tchain_rhs(flat))
        for (double v : r) CHECK(v == 0.0);
    TChainField zero{0.1, 0.0, {0, 0, 0}, std::vector<std::array<double, 3>>(8, {0, 0, 0})};
    const auto run = integrate_tchain(zero, 0.01, 5);
    for (double v : run.A_mean) CHECK(v == 0.0);
    for (double v : run.c_mean) CHECK(v == 0.0);
}

TEST_CASE("t-chain keeps the mean Casimir") {
    const auto field = tchain_field_from_orbit(reference(), 128);
    const double dt = 0.5 * field.dx / tchain_max_speed(field);
    const auto run = integrate_tchain(field, dt, 200);
    double drift = 0.0;
    for (double c : run.c_mean) drift = std::max(drift, std::abs(c - run.c_mean.front()));
    CHECK(drift <= 1e-10);
    CHECK(run.max_F_minus_c2 <= 1e-10);
    CHECK_THROWS_AS(integrate_tchain(field, 10 * field.dx, 1), DomainError);
}

TEST_CASE("t-chain with equal spectral values: A drift is first-order numerical diffusion") {
    auto drift_at = [](int M) {
        const auto field = tchain_field_from_orbit({{1, 2, 3}, {0.2, 0.2, 0.2}}, M);
        const double dt = 0.5 * field.dx / tchain_max_speed(field);
        const int steps = static_cast<int>(std::ceil(0.05 / dt));
        const auto run = integrate_tchain(field, 0.05 / steps, steps);
        return std::abs(run.A_mean.back() - run.A_mean.front());
    };
    const double coarse = drift_at(128);
    const double fine = drift_at(256);
    CHECK(coarse / fine >= 1.8);
}

TEST_CASE("line fit") {
    const auto fit = fit_line({0, 1, 2, 3}, {1, 3, 5, 7});
    CHECK(fit.slope == Catch::Approx(2.0));
    CHECK(fit.intercept == Catch::Approx(1.0));
    CHECK(fit.max_residual <= 1e-12);
    CHECK(fit.range == 6.0);
}
