#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "dressing/bell.hpp"
#include "dressing/chain.hpp"
#include "dressing/cli.hpp"
#include "dressing/darboux.hpp"
#include "dressing/lattice_zs.hpp"
#include "dressing/zs.hpp"

using namespace dressing;

namespace {

struct Outcome {
    bool pass;
    std::string detail;
};

std::string num(double v) { return cli::format_double(v); }

nlohmann::json report_of(const std::vector<std::string>& args, int& code) {
    std::ostringstream data;
    const auto report = cli::run(cli::parse_config(args), data);
    code = report.exit_code;
    return report.body;
}

Outcome bell_cross_validation() {
    int mismatches = 0;
    for (int n = 0; n <= 8; ++n)
        for (int k = 0; k <= n; ++k)
            if (!(bell_generalized_recurrence(n, k) == bell_generalized_explicit(n, k))) ++mismatches;
    return {mismatches == 0, "mismatches=" + std::to_string(mismatches)};
}

Outcome bell_numeric_oracle() {
    double worst = 0.0;
    for (double x : {0.3, 1.0, 2.5}) {
        const double t = std::tanh(x), s2 = 1.0 - t * t;
        const Jet sigma{t, s2, -2 * t * s2, -2 * s2 * (1 - 3 * t * t), 8 * t * s2 * (2 - 3 * t * t),
                        -8 * s2 * (2 - 15 * t * t + 15 * t * t * t * t)};
        for (unsigned n = 0; n <= 5; ++n) {
            const double expected = (n % 2 == 0 ? std::cosh(x) : std::sinh(x)) / std::cosh(x);
            worst = std::max(worst, std::abs(evaluate(bell_standard(n), sigma) - expected) / std::abs(expected));
        }
    }
    return {worst <= 1e-9, "max_relative_error=" + num(worst)};
}

Outcome dt_coefficient_identity() {
    const std::vector<Rational> minus_d2{0, 0, -1};
    const auto shifts = dt_coefficient_shifts(minus_d2);
    const bool a0 = shifts[0] == scale(DiffPoly::sigma(1), -2);
    const bool a1 = shifts[1].is_zero();
    return {a0 && a1, "a0_shift=" + to_string(shifts[0]) + " a1_shift=" + to_string(shifts[1])};
}

Outcome dt_covariance() {
    const auto start = std::chrono::steady_clock::now();
    int code = 0;
    const auto body = report_of({"verify-darboux", "--order", "2", "--k", "1", "--lambda", "0.7", "--grid", "-5:5:200"}, code);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const double r = body["max_residual_covariance"].get<double>();
    return {r <= 1e-8 && secs < 1.0 && body["points"] == 200, "max_residual=" + num(r) + " seconds=" + num(secs)};
}

const ChainState reference{{1, 2, 3}, {0.1, 0.2, 0.3}};

std::pair<double, double> chain_drifts(double h, double x_end) {
    const auto traj = integrate_chain(reference, h, static_cast<int>(std::lround(x_end / h)));
    const double c0 = traj.samples.front().c, A0 = traj.samples.front().A;
    double dc = 0.0, dA = 0.0;
    for (const auto& s : traj.samples) {
        dc = std::max(dc, std::abs(s.c - c0));
        dA = std::max(dA, std::abs(s.A - A0));
    }
    return {dc, dA};
}

Outcome chain_conservation() {
    const auto [dc, dA] = chain_drifts(1e-3, 10.0);
    const auto [dc2, dA2] = chain_drifts(5e-4, 10.0);
    const double ratio = dA / dA2;
    return {dc <= 1e-12 && dc2 <= 1e-12 && dA <= 1e-8 && ratio >= 8.0,
            "c_drift=" + num(dc) + " A_drift=" + num(dA) + " halving_ratio=" + num(ratio)};
}

Outcome g_reduction() {
    const double h = 1e-3;
    const int steps = 5000;
    const auto traj = integrate_chain(reference, h, steps);
    const double c = casimir_c(reference), A = invariant_A(reference);
    const std::array<double, 3> mu{0.1, 0.2, 0.3};
    const double g1 = reference.sigma[0] + reference.sigma[1];
    const double g2 = g_variables(reference)[1];
    const auto [low, high] = g2_branches(g1, c, A, mu);
    const Branch b = std::abs(g2 - low) < std::abs(g2 - high) ? Branch::Low : Branch::High;
    const auto red = integrate_reduced(g1, b, c, A, mu, h, steps);
    double worst = 0.0;
    for (std::size_t i = 0; i < traj.samples.size(); ++i)
        worst = std::max(worst, std::abs(red.samples[i].g1 - traj.samples[i].sigma[0] - traj.samples[i].sigma[1]));
    return {worst <= 1e-6, "max_g1_difference=" + num(worst) + " branch_flips=" + std::to_string(red.flips.size())};
}

Outcome tchain_properties() {
    const auto field = tchain_field_from_orbit(reference, 512);
    const double dt_cfl = 0.5 * field.dx / tchain_max_speed(field);
    const int steps = static_cast<int>(std::ceil(1.0 / dt_cfl));
    const auto run = integrate_tchain(field, 1.0 / steps, steps);
    double dc = 0.0;
    for (double c : run.c_mean) dc = std::max(dc, std::abs(c - run.c_mean.front()));
    const auto fit = fit_line(run.t, run.A_mean);
    const double rel = fit.range > 0 ? fit.max_residual / fit.range : 0.0;
    const bool ok = run.max_F_minus_c2 <= 1e-10 && dc <= 1e-8 && rel <= 1e-4;
    return {ok, "F_minus_c2=" + num(run.max_F_minus_c2) + " c_drift=" + num(dc) + " A_fit_residual_over_range=" +
                    num(rel) + " chain_residual_start=" + num(run.chain_residual_start) +
                    " chain_residual_end=" + num(run.chain_residual_end)};
}

Outcome symmetry_suite() {
    int code = 0;
    const auto body = report_of({"symmetry", "--check", "--samples", "100"}, code);
    std::string detail;
    for (const auto& [name, check] : body["checks"].items()) detail += name + "=" + num(check["value"].get<double>()) + " ";
    detail.pop_back();
    return {code == 0, detail};
}

Outcome closure_dual_route() {
    const auto run = integrate_closure(0.5, ClosureParams{0.0, -2.0, -1.0}, 1e-3, 400);
    const bool ok = run.max_discrepancy <= 1e-6 && run.max_xy_drift <= 1e-8 && std::abs(run.samples.back().t - 0.4) < 1e-12;
    return {ok, "route_discrepancy=" + num(run.max_discrepancy) + " xy_drift=" + num(run.max_xy_drift)};
}

Outcome zs_cross_checks() {
    double ns = 0.0;
    std::uint64_t state = 2;
    auto dyadic = [&state] {
        state = state * 6364136223846793005ULL + 1442695040888963407ULL;
        return static_cast<double>(static_cast<int>((state >> 33) % 129) - 64) / 16.0;
    };
    for (int t = 0; t < 200; ++t) {
        const NSPotential u{Complex(dyadic(), dyadic()), Complex(dyadic(), dyadic())};
        const PauliVec eta{Complex(dyadic(), dyadic()), Complex(dyadic(), dyadic()), Complex(dyadic(), dyadic())};
        ns = std::max(ns, (ns_dt(u, eta).matrix() - operator_dt(u.matrix(), from_pauli(eta), pauli(3))).norm());
    }
    double recovered = 0.0;
    for (double e2 : {0.4, 1.0, -0.7})
        for (double m : {2.0, 3.5}) {
            const Complex e3 = eta3(0.0, e2, m);
            const auto sol = solve_u_from_sigma(from_pauli({0.0, e2, e3}), pauli(3));
            recovered = std::max(recovered, (sol.u - ns_potential_from_eta(EtaJet{0.0, e2, 0.0, 0.0, m}, e3).matrix()).norm());
        }
    const auto run = integrate_closure(0.5, ClosureParams{0.0, -2.0, -1.0}, 1e-3, 400);
    const bool ok = ns == 0.0 && recovered <= 1e-10 && run.max_trace_drift <= 1e-9 && run.max_det_drift <= 1e-8;
    return {ok, "ns_dt_vs_operator_dt=" + num(ns) + " parametrization_recovery=" + num(recovered) +
                    " trace_drift=" + num(run.max_trace_drift) + " det_drift=" + num(run.max_det_drift)};
}

Outcome lattice_zs() {
    double spectral = 0.0, ts = 0.0, mt = 0.0, dtz = 0.0;
    for (const std::string seed : {"1", "2", "3"}) {
        int code = 0;
        const auto r = report_of({"lattice-zs", "--family", "random", "--size", "64", "--seed", seed}, code);
        spectral = std::max(spectral, r["zsp2_residual"].get<double>());
        ts = std::max(ts, r["ts_residual"].get<double>());
        const auto p = report_of({"lattice-zs", "--family", "period2", "--size", "64", "--seed", seed}, code);
        mt = std::max(mt, p["mt_residual"].get<double>());
        dtz = std::max(dtz, p["dtz_vs_dtn"].get<double>());
    }
    const bool ok = spectral <= 1e-12 && ts <= 1e-12 && mt <= 1e-12 && dtz <= 1e-12;
    return {ok, "zsp2=" + num(spectral) + " ts=" + num(ts) + " mt_period2=" + num(mt) + " dtz_vs_dtn_period2=" + num(dtz)};
}

Outcome cli_determinism() {
    auto invoke = [](const std::vector<std::string>& args) {
        std::ostringstream out, err;
        const int code = cli::main_entry(args, out, err);
        return std::pair{code, out.str()};
    };
    const auto [code_a, self_a] = invoke({"selftest"});
    const auto [code_b, self_b] = invoke({"selftest"});
    bool identical = self_a == self_b;
    for (const std::vector<std::string>& args :
         {std::vector<std::string>{"chain-kdv", "--steps", "1000"},
          std::vector<std::string>{"tchain", "--grid", "128", "--t-end", "0.1"},
          std::vector<std::string>{"ns-closure"},
          std::vector<std::string>{"lattice-zs", "--family", "random", "--seed", "5"},
          std::vector<std::string>{"symmetry", "--check", "--seed", "9"}})
        identical = identical && invoke(args) == invoke(args);
    return {code_a == 0 && code_b == 0 && identical,
            "selftest_exit=" + std::to_string(code_a) + " byte_identical=" + (identical ? "true" : "false")};
}

struct Criterion {
    const char* name;
    std::function<Outcome()> check;
};

const std::vector<Criterion> criteria{
    {"bell cross-validation", bell_cross_validation},
    {"bell numeric oracle", bell_numeric_oracle},
    {"DT coefficient identity", dt_coefficient_identity},
    {"DT covariance", dt_covariance},
    {"chain conservation", chain_conservation},
    {"g-reduction consistency", g_reduction},
    {"t-chain properties", tchain_properties},
    {"symmetry suite", symmetry_suite},
    {"NS closure dual-route", closure_dual_route},
    {"ZS cross-checks", zs_cross_checks},
    {"lattice ZS", lattice_zs},
    {"CLI determinism", cli_determinism},
};

bool report(std::size_t index) {
    Outcome outcome;
    try {
        outcome = criteria[index].check();
    } catch (const std::exception& e) {
        outcome = {false, std::string("exception: ") + e.what()};
    }
    std::printf("criterion %2zu %-26s %s  %s\n", index + 1, criteria[index].name, outcome.pass ? "PASS" : "FAIL",
                outcome.detail.c_str());
    std::fflush(stdout);
    return outcome.pass;
}

}  // namespace

int main(int argc, char** argv) {
    if (argc == 3 && std::string(argv[1]) == "--criterion") {
        const long n = std::strtol(argv[2], nullptr, 10);
        if (n < 1 || n > static_cast<long>(criteria.size())) {
            std::fprintf(stderr, "criterion must be 1..%zu\n", criteria.size());
            return 2;
        }
        return report(static_cast<std::size_t>(n - 1)) ? 0 : 1;
    }
    if (argc != 1) {
        std::fprintf(stderr, "usage: acceptance [--criterion N]\n");
        return 2;
    }
    bool all = true;
    for (std::size_t i = 0; i < criteria.size(); ++i) all = report(i) && all;
    return all ? 0 : 1;
}
