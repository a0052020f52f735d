#include "dressing/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <future>
#include <iostream>
#include <numbers>
#include <random>
#include <sstream>
#include <thread>

#include "dressing/bell.hpp"
#include "dressing/chain.hpp"
#include "dressing/darboux.hpp"
#include "dressing/error.hpp"
#include "dressing/lattice_zs.hpp"
#include "dressing/symmetry.hpp"
#include "dressing/zs.hpp"

namespace dressing::cli {

using nlohmann::json;

namespace {

struct OptionSpec {
    std::string name;
    std::string default_value;
    std::string help;
    enum Kind { Text, Number, Positive, NonNegative, Integer, PositiveInteger, List, Flag } kind = Number;
};

const std::map<std::string, std::vector<OptionSpec>>& schema() {
    using K = OptionSpec::Kind;
    static const std::map<std::string, std::vector<OptionSpec>> table{
        {"bell",
         {{"n", "3", "row index", K::Integer},
          {"k", "-1", "column index; omit for the standard polynomial", K::Integer},
          {"explicit", "false", "use the binomial-sum route", K::Flag}}},
        {"verify-darboux",
         {{"order", "2", "operator order (2 or 3)", K::Integer},
          {"k", "1", "seed wave number", K::Positive},
          {"lambda", "0.7", "test eigenfunction exponent", K::Number},
          {"grid", "-5:5:200", "a:b:n sample grid", K::Text},
          {"tol", "1e-8", "tolerance on both residuals", K::Positive}}},
        {"chain-kdv",
         {{"sigma0", "1,2,3", "initial sigma", K::List},
          {"mu", "0.1,0.2,0.3", "spectral values", K::List},
          {"h", "1e-3", "RK4 step", K::Positive},
          {"steps", "10000", "number of steps", K::PositiveInteger}}},
        {"tchain",
         {{"sigma0", "1,2,3", "point on the closed orbit", K::List},
          {"mu", "0.1,0.2,0.3", "spectral values", K::List},
          {"grid", "512", "points per period", K::PositiveInteger},
          {"dt", "0", "time step; 0 picks half the CFL limit", K::NonNegative},
          {"steps", "0", "time steps; 0 runs to t-end", K::Integer},
          {"t-end", "1", "final time when steps is 0", K::Positive},
          {"init", "", "chain-kdv CSV covering one period", K::Text},
          {"snapshots", "", "JSON file for field snapshots", K::Text},
          {"snapshot-every", "0", "steps between snapshots", K::Integer}}},
        {"symmetry",
         {{"check", "false", "run the invariant suite", K::Flag},
          {"samples", "100", "random states for ad_H", K::PositiveInteger}}},
        {"ns-closure",
         {{"x0", "0.5", "initial x", K::Number},
          {"c", "0", "first integral xy", K::Number},
          {"m", "-2", "product mu1 mu2", K::Number},
          {"alpha3", "-1", "closure constant", K::Number},
          {"dt", "1e-3", "RK4 step", K::Positive},
          {"steps", "400", "number of steps", K::PositiveInteger},
          {"tol", "1e-6", "tolerance on the route discrepancy", K::Positive}}},
        {"lattice-zs",
         {{"family", "period2", "diag, period2 or random", K::Text},
          {"size", "64", "lattice size M", K::PositiveInteger},
          {"mu", "", "diagonal of mu; defaults to 1,2 for diag and 0.5,2 otherwise", K::Text},
          {"tol", "1e-12", "tolerance on asserted identities", K::Positive}}},
        {"selftest", {}},
    };
    return table;
}

bool tabular(const std::string& command) {
    return command == "verify-darboux" || command == "chain-kdv" || command == "tchain" || command == "ns-closure";
}

std::string default_extension(const std::string& command, const std::string& format) {
    if (command == "bell" || command == "symmetry" || command == "selftest") return "txt";
    if (command == "lattice-zs") return "json";
    return format;
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::map<std::string, std::string> read_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw UsageError("--config: cannot open " + path);
    std::map<std::string, std::string> out;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw UsageError("--config: " + path + ":" + std::to_string(lineno) + " is not key=value");
        out[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
    }
    return out;
}

double parse_number(const std::string& key, const std::string& text) {
    try {
        std::size_t used = 0;
        const double v = std::stod(text, &used);
        if (used != text.size() || !std::isfinite(v)) throw std::invalid_argument(text);
        return v;
    } catch (const std::exception&) {
        throw UsageError("--" + key + ": '" + text + "' is not a finite number");
    }
}

long long parse_integer(const std::string& key, const std::string& text) {
    try {
        std::size_t used = 0;
        const long long v = std::stoll(text, &used);
        if (used != text.size()) throw std::invalid_argument(text);
        return v;
    } catch (const std::exception&) {
        throw UsageError("--" + key + ": '" + text + "' is not an integer");
    }
}

std::vector<double> parse_list(const std::string& key, const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(parse_number(key, trim(item)));
    if (out.empty()) throw UsageError("--" + key + ": empty list");
    return out;
}

void validate(const OptionSpec& spec, const std::string& value) {
    using K = OptionSpec::Kind;
    switch (spec.kind) {
        case K::Number: parse_number(spec.name, value); break;
        case K::Positive:
            if (!(parse_number(spec.name, value) > 0)) throw UsageError("--" + spec.name + ": must be positive");
            break;
        case K::NonNegative:
            if (parse_number(spec.name, value) < 0) throw UsageError("--" + spec.name + ": must be non-negative");
            break;
        case K::Integer: parse_integer(spec.name, value); break;
        case K::PositiveInteger:
            if (parse_integer(spec.name, value) <= 0) throw UsageError("--" + spec.name + ": must be a positive integer");
            break;
        case K::List: parse_list(spec.name, value); break;
        case K::Flag:
            if (value != "true" && value != "false") throw UsageError("--" + spec.name + ": expected true or false");
            break;
        case K::Text: break;
    }
}

std::string resolve_out(const std::string& given, const std::string& command, const std::string& format) {
    const char* dir = std::getenv("DC_OUT_DIR");
    if (given.empty()) {
        if (dir == nullptr || *dir == '\0') return "";
        return (std::filesystem::path(dir) / (command + "." + default_extension(command, format))).string();
    }
    std::filesystem::path p(given);
    if (p.is_relative() && dir != nullptr && *dir != '\0') p = std::filesystem::path(dir) / p;
    return p.string();
}

// ---- table emission -------------------------------------------------------------------------

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;
};

void emit(std::ostream& os, const Table& t, const std::string& format) {
    if (format == "csv") {
        write_csv(os, t.header, t.rows);
        return;
    }
    json j;
    j["columns"] = t.header;
    j["rows"] = t.rows;
    os << j.dump(2) << '\n';
}

// ---- checks shared by symmetry --check and selftest ---------------------------------------------

struct Check {
    std::string name;
    double value;
    double bound;
    bool at_least = false;  // value ≥ bound instead of value ≤ bound

    bool pass() const { return std::isfinite(value) && (at_least ? value >= bound : value <= bound); }
};

void print_checks(std::ostream& os, const std::vector<Check>& checks) {
    for (const auto& c : checks) {
        char line[256];
        std::snprintf(line, sizeof line, "%-44s %-24s %s %-10.3g %s\n", c.name.c_str(), format_double(c.value).c_str(),
                      c.at_least ? ">=" : "<=", c.bound, c.pass() ? "PASS" : "FAIL");
        os << line;
    }
}

json checks_json(const std::vector<Check>& checks) {
    json out = json::object();
    for (const auto& c : checks) out[c.name] = {{"value", c.value}, {"bound", c.bound}, {"pass", c.pass()}};
    return out;
}

bool all_pass(const std::vector<Check>& checks) {
    return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass(); });
}

double cdist(const CVec& a, const CVec& b) {
    double d = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
    return d;
}

std::vector<Check> symmetry_checks(int samples, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    auto uniform = [&rng] { return 4.0 * static_cast<double>(rng() >> 11) * 0x1.0p-53 - 2.0; };
    const CyclicGroup group(3);
    double idem = 0, complete = 0, ortho = 0, roundtrip = 0, equiv = 0, adh = 0, ss = 0;
    for (int t = 0; t < samples; ++t) {
        CVec v(3);
        for (auto& z : v) z = Complex(uniform(), uniform());
        roundtrip = std::max(roundtrip, cdist(from_irreducible(to_irreducible(v)), v));
        CVec total(3, 0.0);
        for (int j = 0; j < 3; ++j) {
            const CVec p = projector(j, v);
            idem = std::max(idem, cdist(projector(j, p), p));
            for (int l = 0; l < 3; ++l)
                if (l != j) ortho = std::max(ortho, cdist(projector(l, p), CVec(3, 0.0)));
            for (int i = 0; i < 3; ++i) total[i] += p[i];
        }
        complete = std::max(complete, cdist(total, v));
        const CVec s = to_irreducible(v);
        const CVec sh = to_irreducible(cyclic_shift(v));
        for (int j = 0; j < 3; ++j) equiv = std::max(equiv, std::abs(sh[j] - group.character(j) * s[j]));

        const ChainState st{{uniform(), uniform(), uniform()}, {uniform(), uniform(), uniform()}};
        const auto a = ad_H(st);
        const auto b = chain_rhs(st);
        for (int i = 0; i < 3; ++i) adh = std::max(adh, std::abs(a[i] - b[i]));
        ss = std::max(ss, cdist(to_irreducible(embed(b)), ss_rhs(to_irreducible(embed(st.sigma)), embed(st.mu))));
    }
    const auto traj = integrate_chain({{1, 2, 3}, {0.1, 0.2, 0.3}}, 1e-3, 5000);
    const Complex s0 = to_irreducible(embed(traj.samples.front().sigma))[0];
    double s1_drift = 0.0;
    for (const auto& smp : traj.samples) s1_drift = std::max(s1_drift, std::abs(to_irreducible(embed(smp.sigma))[0] - s0));
    return {
        {"projector_idempotence", idem, 1e-14},
        {"projector_completeness", complete, 1e-14},
        {"projector_orthogonality", ortho, 1e-14},
        {"irreducible_roundtrip", roundtrip, 1e-14},
        {"shift_equivariance", equiv, 1e-14},
        {"ad_H_equals_chain_rhs", adh, 1e-13},
        {"ss_rhs_change_of_variables", ss, 1e-12},
        {"s1_constant_along_flow", s1_drift, 1e-10},
    };
}

// ---- subcommands ----------------------------------------------------------------------------

RunReport run_bell(const ScenarioConfig& cfg, std::ostream& data) {
    const long long n = cfg.integer("n");
    const long long k = cfg.integer("k");
    if (n < 0) throw UsageError("--n: must be non-negative");
    DiffPoly p;
    if (k < 0) {
        p = bell_standard(static_cast<unsigned>(n));
    } else {
        p = cfg.flag("explicit") ? bell_generalized_explicit(static_cast<int>(n), static_cast<int>(k))
                                 : bell_generalized_recurrence(static_cast<int>(n), static_cast<int>(k));
    }
    data << to_string(p) << '\n';
    return {{{"polynomial", to_string(p)}}, 0};
}

struct Grid {
    double a;
    double b;
    int n;
};

Grid parse_grid(const std::string& text) {
    const auto c1 = text.find(':');
    const auto c2 = text.find(':', c1 == std::string::npos ? 0 : c1 + 1);
    if (c1 == std::string::npos || c2 == std::string::npos) throw UsageError("--grid: expected a:b:n");
    Grid g{parse_number("grid", text.substr(0, c1)), parse_number("grid", text.substr(c1 + 1, c2 - c1 - 1)),
           static_cast<int>(parse_integer("grid", text.substr(c2 + 1)))};
    if (g.n < 2 || !(g.b > g.a)) throw UsageError("--grid: need a < b and n >= 2");
    return g;
}

// φ^(m) for the order-2 seed cosh(kx) and the order-3 seed Σ_j exp(ω_j k x) over cube roots ω_j.
Jet seed_jet(int order, double k, double x, int m) {
    std::vector<Complex> v(m + 1);
    for (int d = 0; d <= m; ++d) {
        if (order == 2) {
            const double km = std::pow(k, d);
            v[d] = km * (d % 2 == 0 ? std::cosh(k * x) : std::sinh(k * x));
        } else {
            Complex sum = 0.0;
            for (int j = 0; j < 3; ++j) {
                const Complex w = k * std::polar(1.0, 2 * std::numbers::pi * j / 3);
                sum += std::pow(w, d) * std::exp(w * x);
            }
            v[d] = sum.real();
        }
    }
    return Jet(std::move(v));
}

RunReport run_verify_darboux(const ScenarioConfig& cfg, std::ostream& data) {
    const long long order = cfg.integer("order");
    if (order != 2 && order != 3) throw UsageError("--order: must be 2 or 3");
    const double k = cfg.number("k");
    const double lambda = cfg.number("lambda");
    const double tol = cfg.number("tol");
    const Grid grid = parse_grid(cfg.text("grid"));
    const int N = static_cast<int>(order);

    OperatorCoeffs op;
    for (int n = 0; n <= N; ++n) op.coeffs.push_back(Jet{0.0, 0.0});
    op.coeffs[N] = N == 2 ? Jet{-1.0, 0.0} : Jet{1.0, 0.0};
    const double mu_seed = N == 2 ? -k * k : k * k * k;
    const double mu_psi = N == 2 ? -lambda * lambda : lambda * lambda * lambda;

    Table t{{"x", "residual_covariance", "residual_miura"}, {}};
    double worst_cov = 0.0, worst_miura = 0.0;
    for (int i = 0; i < grid.n; ++i) {
        const double x = grid.a + (grid.b - grid.a) * i / (grid.n - 1);
        const Jet sigma = log_derivative_jet(seed_jet(N, k, x, N + 2));
        std::vector<Complex> pv(N + 2);
        for (int d = 0; d <= N + 1; ++d) pv[d] = std::pow(lambda, d) * std::exp(lambda * x);
        const Jet psi1 = dt_eigenfunction_jet(Jet(pv), sigma);
        const auto a1 = dt_coefficients(op, sigma);
        Complex cov = -mu_psi * psi1[0];
        for (int n = 0; n <= N; ++n) cov += a1[n] * psi1[n];
        const double miura = std::abs(miura_r(op, sigma) - mu_seed);
        worst_cov = std::max(worst_cov, std::abs(cov));
        worst_miura = std::max(worst_miura, miura);
        t.rows.push_back({x, std::abs(cov), miura});
    }
    emit(data, t, cfg.format);
    const bool ok = worst_cov <= tol && worst_miura <= tol;
    return {{{"max_residual_covariance", worst_cov}, {"max_residual_miura", worst_miura}, {"points", grid.n}}, ok ? 0 : 1};
}

ChainState chain_state_from(const ScenarioConfig& cfg) {
    ChainState s{cfg.list("sigma0"), cfg.list("mu")};
    if (s.sigma.size() != s.mu.size()) throw UsageError("--mu: length must match --sigma0");
    return s;
}

RunReport run_chain_kdv(const ScenarioConfig& cfg, std::ostream& data) {
    const ChainState s0 = chain_state_from(cfg);
    if (s0.sigma.size() != 3) throw UsageError("--sigma0: chain-kdv writes three components");
    const auto traj = integrate_chain(s0, cfg.number("h"), static_cast<int>(cfg.integer("steps")));
    Table t{{"x", "sigma1", "sigma2", "sigma3", "c", "A"}, {}};
    double dc = 0.0, dA = 0.0;
    for (const auto& smp : traj.samples) {
        t.rows.push_back({smp.x, smp.sigma[0], smp.sigma[1], smp.sigma[2], smp.c, smp.A});
        dc = std::max(dc, std::abs(smp.c - traj.samples.front().c));
        dA = std::max(dA, std::abs(smp.A - traj.samples.front().A));
    }
    emit(data, t, cfg.format);
    return {{{"max_drift_c", dc},
             {"max_drift_A", dA},
             {"samples", traj.samples.size()},
             {"c0", traj.samples.front().c},
             {"A0", traj.samples.front().A}},
            0};
}

}  // namespace

TChainField read_chain_csv(const std::string& path, const std::vector<double>& mu) {
    std::ifstream in(path);
    if (!in) throw UsageError("--init: cannot open " + path);
    std::string line;
    std::getline(in, line);
    if (trim(line).rfind("x,sigma1,sigma2,sigma3", 0) != 0) throw UsageError("--init: expected a chain-kdv CSV header");
    std::vector<double> xs;
    std::vector<std::array<double, 3>> rows;
    while (std::getline(in, line)) {
        if (trim(line).empty()) continue;
        const auto v = parse_list("init", line);
        if (v.size() < 4) throw UsageError("--init: short row");
        xs.push_back(v[0]);
        rows.push_back({v[1], v[2], v[3]});
    }
    if (rows.size() < 4) throw UsageError("--init: need at least 4 rows");
    // a closing row that repeats the first state is dropped
    const auto& f = rows.front();
    const auto& b = rows.back();
    const double size = std::abs(f[0]) + std::abs(f[1]) + std::abs(f[2]) + 1.0;
    if (std::abs(f[0] - b[0]) + std::abs(f[1] - b[1]) + std::abs(f[2] - b[2]) <= 1e-6 * size) {
        rows.pop_back();
        xs.pop_back();
    }
    if (mu.size() != 3) throw UsageError("--mu: the t-chain has three components");
    return TChainField{xs[1] - xs[0], 0.0, {mu[0], mu[1], mu[2]}, rows};
}

namespace {

RunReport run_tchain(const ScenarioConfig& cfg, std::ostream& data) {
    const ChainState s0 = chain_state_from(cfg);
    if (s0.sigma.size() != 3) throw UsageError("--sigma0: the t-chain has three components");
    const TChainField field = cfg.text("init").empty()
                                  ? tchain_field_from_orbit(s0, static_cast<int>(cfg.integer("grid")))
                                  : read_chain_csv(cfg.text("init"), s0.mu);
    double dt = cfg.number("dt");
    long long steps = cfg.integer("steps");
    if (steps < 0) throw UsageError("--steps: must be non-negative");
    const double lam = tchain_max_speed(field);
    if (dt == 0.0) dt = 0.5 * field.dx / std::max(lam, 1e-300);
    if (steps == 0) {
        steps = static_cast<long long>(std::ceil(cfg.number("t-end") / dt));
        dt = cfg.number("t-end") / static_cast<double>(steps);
    }
    if (lam * dt > field.dx) throw UsageError("--dt: violates the CFL bound max|lambda|*dt <= dx");

    const long long every = cfg.integer("snapshot-every");
    json snaps = json::array();
    TChainRun run;
    if (!cfg.text("snapshots").empty() && every > 0) {
        TChainField cur = field;
        run = integrate_tchain(field, dt, 0);
        snaps.push_back({{"t", cur.t}, {"sigma", cur.sigma}});
        for (long long done = 0; done < steps;) {
            const long long chunk = std::min(every, steps - done);
            const TChainRun part = integrate_tchain(cur, dt, static_cast<int>(chunk));
            for (std::size_t i = 1; i < part.t.size(); ++i) {
                run.t.push_back(part.t[i]);
                run.c_mean.push_back(part.c_mean[i]);
                run.A_mean.push_back(part.A_mean[i]);
            }
            run.max_F_minus_c2 = std::max(run.max_F_minus_c2, part.max_F_minus_c2);
            cur = part.final_field;
            done += chunk;
            snaps.push_back({{"t", cur.t}, {"sigma", cur.sigma}});
        }
        run.chain_residual_end = tchain_chain_residual(cur);
        run.final_field = cur;
        std::ofstream snap_out(cfg.text("snapshots"));
        if (!snap_out) throw std::runtime_error("cannot write " + cfg.text("snapshots"));
        snap_out << json{{"dx", field.dx}, {"snapshots", snaps}}.dump() << '\n';
    } else {
        run = integrate_tchain(field, dt, static_cast<int>(steps));
    }

    Table t{{"t", "c_mean", "A_mean"}, {}};
    double dc = 0.0;
    for (std::size_t i = 0; i < run.t.size(); ++i) {
        t.rows.push_back({run.t[i], run.c_mean[i], run.A_mean[i]});
        dc = std::max(dc, std::abs(run.c_mean[i] - run.c_mean.front()));
    }
    emit(data, t, cfg.format);
    const LinearFit fit = fit_line(run.t, run.A_mean);
    const bool ok = run.max_F_minus_c2 <= 1e-10 && dc <= 1e-8;
    return {{{"dx", field.dx},
             {"dt", dt},
             {"steps", steps},
             {"max_F_minus_c2", run.max_F_minus_c2},
             {"max_drift_c_mean", dc},
             {"A_fit_slope", fit.slope},
             {"A_fit_residual_over_range", fit.range > 0 ? fit.max_residual / fit.range : 0.0},
             {"chain_residual_start", run.chain_residual_start},
             {"chain_residual_end", run.chain_residual_end}},
            ok ? 0 : 1};
}

RunReport run_symmetry(const ScenarioConfig& cfg, std::ostream& data) {
    if (!cfg.flag("check")) throw UsageError("symmetry: nothing to do without --check");
    const auto checks = symmetry_checks(static_cast<int>(cfg.integer("samples")), cfg.seed);
    print_checks(data, checks);
    return {{{"checks", checks_json(checks)}}, all_pass(checks) ? 0 : 1};
}

RunReport run_ns_closure(const ScenarioConfig& cfg, std::ostream& data) {
    const ClosureParams p{cfg.number("c"), cfg.number("m"), cfg.number("alpha3")};
    const auto run = integrate_closure(cfg.number("x0"), p, cfg.number("dt"), static_cast<int>(cfg.integer("steps")));
    Table t{{"t", "x", "y", "eta3", "u1_re", "u1_im", "u2_re", "u2_im", "discrepancy"}, {}};
    for (const auto& s : run.samples) {
        t.rows.push_back({s.t, s.x, s.y, s.eta3, s.u.u1.real(), s.u.u1.imag(), s.u.u2.real(), s.u.u2.imag(),
                          s.discrepancy});
    }
    emit(data, t, cfg.format);
    const bool ok = run.max_discrepancy <= cfg.number("tol");
    return {{{"max_discrepancy", run.max_discrepancy},
             {"max_drift_xy", run.max_xy_drift},
             {"max_drift_det", run.max_det_drift},
             {"max_drift_trace", run.max_trace_drift}},
            ok ? 0 : 1};
}

json lattice_report(const std::string& family, int size, std::uint64_t seed, const std::vector<double>& mu_diag,
                    double tol, bool& ok) {
    Mat2 mu = Mat2::Zero(), J = Mat2::Zero();
    mu(0, 0) = mu_diag[0];
    mu(1, 1) = mu_diag[1];
    J(0, 0) = 1.0;
    J(1, 1) = -1.0;
    LatticeFrame frame;
    if (family == "diag") frame = diagonal_frame(size);
    else if (family == "period2") frame = period2_frame(size, seed);
    else if (family == "random") frame = random_frame(size, seed);
    else throw UsageError("--family: expected diag, period2 or random");

    const auto sigma = sigma_plus(frame);
    const auto U = lattice_potential_U(frame, mu, J);
    double mt = 0.0;
    const int last = frame.periodic ? static_cast<int>(U.size()) : static_cast<int>(U.size()) - 1;
    for (int n = 0; n < last; ++n) mt = std::max(mt, miura_residual(U, sigma, J, n, frame.periodic).norm());
    const auto dt = lattice_dt(U, sigma, J, frame.periodic);

    Mat2 g = Mat2::Zero();
    g(0, 0) = Complex(1.3, -0.4);
    g(1, 1) = 0.7;
    const auto gauged = gauge_transform(frame, g);
    const auto Ug = lattice_potential_U(gauged, mu, J);
    double gauge = 0.0;
    for (std::size_t n = 0; n < U.size(); ++n) gauge = std::max(gauge, (U[n] - Ug[n]).norm());

    json rep{{"family", family},
             {"size", size},
             {"max_condition", max_condition(frame)},
             {"zsp2_residual", spectral_residual(frame, U, mu, J)},
             {"ts_residual", ts_residual(frame, sigma)},
             {"mt_residual", mt},
             {"dtz_vs_dtn", dt.max_difference},
             {"gauge_U_change", gauge}};
    ok = rep["zsp2_residual"].get<double>() <= tol && rep["ts_residual"].get<double>() <= tol;
    if (family != "random") {
        ok = ok && mt <= tol && dt.max_difference <= tol;
    }
    if (family == "period2") {
        const auto s = s_chain_residuals(frame, mu, J);
        rep["s_identity_level0"] = s.s_identity_level0;
        rep["s_identity_level1"] = s.s_identity_level1;
        rep["ss_residual"] = s.ss_residual;
        rep["level1_spectral_residual"] = s.spectral_level1;
        ok = ok && s.s_identity_level0 <= tol && s.s_identity_level1 <= tol && s.ss_residual <= tol;
    }
    return rep;
}

RunReport run_lattice_zs(const ScenarioConfig& cfg, std::ostream& data) {
    const std::string& family = cfg.text("family");
    const auto mu = cfg.text("mu").empty() ? std::vector<double>{family == "diag" ? 1.0 : 0.5, 2.0} : cfg.list("mu");
    if (mu.size() != 2) throw UsageError("--mu: expected two diagonal entries");
    bool ok = true;
    const json rep = lattice_report(family, static_cast<int>(cfg.integer("size")), cfg.seed, mu,
                                    cfg.number("tol"), ok);
    data << rep.dump(2) << '\n';
    return {rep, ok ? 0 : 1};
}

std::string capture(const std::vector<std::string>& args) {
    std::ostringstream out;
    std::ostringstream err;
    const int code = main_entry(args, out, err);
    return std::to_string(code) + "\n" + out.str();
}

std::vector<Check> selftest_checks() {
    std::vector<Check> checks;

    double mismatches = 0;
    for (int n = 0; n <= 8; ++n)
        for (int k = 0; k <= n; ++k)
            if (!(bell_generalized_recurrence(n, k) == bell_generalized_explicit(n, k))) mismatches += 1;
    checks.push_back({"bell_routes_mismatches", mismatches, 0});

    double rel = 0.0;
    for (double x : {0.3, 1.0, 2.5}) {
        const Jet sigma = log_derivative_jet(seed_jet(2, 1.0, x, 6));
        for (unsigned n = 0; n <= 5; ++n) {
            const double expected = (n % 2 == 0 ? std::cosh(x) : std::sinh(x)) / std::cosh(x);
            rel = std::max(rel, std::abs(evaluate(bell_standard(n), sigma) - expected) / std::abs(expected));
        }
    }
    checks.push_back({"bell_cosh_oracle_rel", rel, 1e-9});

    const std::vector<Rational> two{0, 0, -1};
    const auto shifts = dt_coefficient_shifts(two);
    const bool dt_ok = shifts[0] == scale(DiffPoly::sigma(1), -2) && shifts[1].is_zero();
    checks.push_back({"dt_order2_shift_mismatch", dt_ok ? 0.0 : 1.0, 0});

    double cov = 0.0, miura_dx = 0.0;
    OperatorCoeffs op{{Jet{0.0, 0.0}, Jet{0.0, 0.0}, Jet{-1.0, 0.0}}};
    for (int i = 0; i < 200; ++i) {
        const double x = -5.0 + 10.0 * i / 199.0;
        const Jet sigma = log_derivative_jet(seed_jet(2, 1.0, x, 4));
        const double e = std::exp(0.7 * x);
        const Jet psi1 = dt_eigenfunction_jet(Jet{e, 0.7 * e, 0.49 * e, 0.343 * e}, sigma);
        const auto a1 = dt_coefficients(op, sigma);
        cov = std::max(cov, std::abs(a1[2] * psi1[2] + a1[0] * psi1[0] + 0.49 * psi1[0]));
        miura_dx = std::max(miura_dx, std::abs(miura_r_dx(op, sigma)));
    }
    checks.push_back({"darboux_covariance", cov, 1e-8});
    checks.push_back({"darboux_miura_dx", miura_dx, 1e-9});

    std::mt19937_64 rng(1);
    auto uniform = [&rng] { return 4.0 * static_cast<double>(rng() >> 11) * 0x1.0p-53 - 2.0; };
    double sum_zero = 0.0, dA = 0.0;
    for (int t = 0; t < 100; ++t) {
        const ChainState s{{uniform(), uniform(), uniform()}, {uniform(), uniform(), uniform()}};
        const auto r = chain_rhs(s);
        const double scale_r = std::abs(r[0]) + std::abs(r[1]) + std::abs(r[2]) + 1.0;
        sum_zero = std::max(sum_zero, std::abs(r[0] + r[1] + r[2]) / scale_r);
        dA = std::max(dA, std::abs(invariant_A_dx(s)) / (scale_r * scale_r));
    }
    checks.push_back({"chain_rhs_sum_rel", sum_zero, 1e-14});
    checks.push_back({"chain_dA_dx_rel", dA, 1e-12});

    const ChainState ref{{1, 2, 3}, {0.1, 0.2, 0.3}};
    auto drifts = [&](double h) {
        const auto traj = integrate_chain(ref, h, static_cast<int>(std::lround(10.0 / h)));
        double c = 0.0, a = 0.0;
        for (const auto& s : traj.samples) {
            c = std::max(c, std::abs(s.c - 6.0));
            a = std::max(a, std::abs(s.A - traj.samples.front().A));
        }
        return std::pair{c, a};
    };
    const auto [c1, a1] = drifts(1e-3);
    const auto [c2, a2] = drifts(5e-4);
    checks.push_back({"chain_c_drift", std::max(c1, c2), 1e-12});
    checks.push_back({"chain_A_drift", a1, 1e-8});
    checks.push_back({"chain_A_drift_halving_ratio", a1 / a2, 8.0, true});

    {
        const auto traj = integrate_chain(ref, 1e-3, 5000);
        const double g1 = 3.0, g2 = 5.0;
        const auto [low, high] = g2_branches(g1, 6.0, invariant_A(ref), {0.1, 0.2, 0.3});
        const Branch b = std::abs(g2 - low) < std::abs(g2 - high) ? Branch::Low : Branch::High;
        const auto red = integrate_reduced(g1, b, 6.0, invariant_A(ref), {0.1, 0.2, 0.3}, 1e-3, 5000);
        double worst = 0.0;
        for (std::size_t i = 0; i < traj.samples.size(); ++i)
            worst = std::max(worst, std::abs(red.samples[i].g1 - traj.samples[i].sigma[0] - traj.samples[i].sigma[1]));
        checks.push_back({"g_reduction_vs_sigma_space", worst, 1e-6});
    }

    {
        const auto field = tchain_field_from_orbit(ref, 128);
        const double dt = 0.5 * field.dx / tchain_max_speed(field);
        const auto run = integrate_tchain(field, dt, 500);
        double dc = 0.0;
        for (double c : run.c_mean) dc = std::max(dc, std::abs(c - run.c_mean.front()));
        checks.push_back({"tchain_F_minus_c2", run.max_F_minus_c2, 1e-10});
        checks.push_back({"tchain_c_drift", dc, 1e-8});
    }

    for (auto& c : symmetry_checks(100, 1)) {
        c.name = "symmetry_" + c.name;
        checks.push_back(c);
    }

    {
        double ns = 0.0;
        std::mt19937_64 r2(2);
        auto dy = [&r2] { return static_cast<double>(static_cast<int>(r2() % 129) - 64) / 16.0; };
        for (int t = 0; t < 100; ++t) {
            const NSPotential u{Complex(dy(), dy()), Complex(dy(), dy())};
            const PauliVec eta{Complex(dy(), dy()), Complex(dy(), dy()), Complex(dy(), dy())};
            ns = std::max(ns, (ns_dt(u, eta).matrix() - operator_dt(u.matrix(), from_pauli(eta), pauli(3))).norm());
        }
        checks.push_back({"ns_dt_vs_operator_dt", ns, 0.0});
        double us = 0.0;
        for (double e2 : {0.4, 1.0, -0.7}) {
            const Complex e3 = eta3(0.0, e2, 2.0);
            const auto sol = solve_u_from_sigma(from_pauli({0.0, e2, e3}), pauli(3));
            us = std::max(us, (sol.u - ns_potential_from_eta(EtaJet{0.0, e2, 0.0, 0.0, 2.0}, e3).matrix()).norm());
        }
        checks.push_back({"solve_u_vs_parametrization", us, 1e-10});
        const auto run = integrate_closure(0.5, {0.0, -2.0, -1.0}, 1e-3, 400);
        checks.push_back({"closure_route_discrepancy", run.max_discrepancy, 1e-6});
        checks.push_back({"closure_xy_drift", run.max_xy_drift, 1e-8});
        checks.push_back({"closure_det_drift", run.max_det_drift, 1e-8});
        checks.push_back({"closure_trace_drift", run.max_trace_drift, 1e-9});
    }

    for (const std::string fam : {"diag", "period2", "random"}) {
        bool ok = true;
        const json rep = lattice_report(fam, fam == "diag" ? 16 : 64, 1, {fam == "diag" ? 1.0 : 0.5, 2.0}, 1e-12, ok);
        checks.push_back({"lattice_" + fam + "_asserted_identities", ok ? 0.0 : 1.0, 0});
    }

    const std::vector<std::string> chain_args{"chain-kdv", "--steps", "500"};
    checks.push_back({"determinism_chain_kdv", capture(chain_args) == capture(chain_args) ? 0.0 : 1.0, 0});
    const std::vector<std::string> lattice_args{"lattice-zs", "--family", "random", "--seed", "7"};
    checks.push_back({"determinism_lattice_zs", capture(lattice_args) == capture(lattice_args) ? 0.0 : 1.0, 0});
    return checks;
}

RunReport run_selftest(const ScenarioConfig&, std::ostream& data) {
    const auto checks = selftest_checks();
    print_checks(data, checks);
    return {{{"checks", checks_json(checks)}}, all_pass(checks) ? 0 : 1};
}

const std::map<std::string, std::function<RunReport(const ScenarioConfig&, std::ostream&)>>& runners() {
    static const std::map<std::string, std::function<RunReport(const ScenarioConfig&, std::ostream&)>> table{
        {"bell", run_bell},           {"verify-darboux", run_verify_darboux},
        {"chain-kdv", run_chain_kdv}, {"tchain", run_tchain},
        {"symmetry", run_symmetry},   {"ns-closure", run_ns_closure},
        {"lattice-zs", run_lattice_zs}, {"selftest", run_selftest},
    };
    return table;
}

// Runs one parsed invocation with the data stream chosen from config.out; reports go to `out`
// unless the data already occupies it, then to `err`.
int execute(const ScenarioConfig& cfg, std::ostream& out, std::ostream& err) {
    const auto start = std::chrono::steady_clock::now();
    RunReport report;
    json header{{"command", cfg.command}, {"parameters", cfg.params}, {"seed", cfg.seed}};
    if (cfg.out.empty()) {
        report = runners().at(cfg.command)(cfg, out);
    } else {
        std::ofstream file(cfg.out, std::ios::binary);
        if (!file) throw std::runtime_error("cannot open output file " + cfg.out);
        report = runners().at(cfg.command)(cfg, file);
        file.close();
        if (!file) throw std::runtime_error("failed writing " + cfg.out);
        header["output"] = cfg.out;
    }
    header["results"] = report.body;
    header["exit_status"] = report.exit_code;
    std::ostream& rep = cfg.out.empty() ? err : out;
    if (cfg.command != "bell") rep << header.dump(2) << '\n';
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    err << "wall time " << format_double(secs) << " s\n";
    return report.exit_code;
}

int run_batch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app("batch");
    int jobs = 1;
    std::vector<std::string> files;
    app.add_option("--jobs", jobs, "parallel workers")->check(CLI::PositiveNumber);
    app.add_option("configs", files, "scenario files")->required();
    std::vector<std::string> rest(args.begin() + 1, args.end());
    std::reverse(rest.begin(), rest.end());
    try {
        app.parse(rest);
    } catch (const CLI::ParseError& e) {
        throw UsageError(std::string("batch: ") + e.what());
    }

    struct Job {
        std::string out;
        std::string err;
        int code = 0;
    };
    std::vector<Job> results(files.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < files.size(); i = next++) {
            std::ostringstream o, e;
            try {
                const auto file_cfg = read_config_file(files[i]);
                const auto it = file_cfg.find("command");
                if (it == file_cfg.end()) throw UsageError(files[i] + ": missing command key");
                ScenarioConfig cfg = parse_config({it->second, "--config", files[i]});
                if (file_cfg.find("out") == file_cfg.end()) {
                    const auto stem = std::filesystem::path(files[i]).stem().string();
                    cfg.out = resolve_out(stem + "." + default_extension(cfg.command, cfg.format), cfg.command, cfg.format);
                }
                results[i].code = execute(cfg, o, e);
            } catch (const UsageError& ex) {
                e << "usage error: " << ex.what() << '\n';
                results[i].code = 2;
            } catch (const DomainError& ex) {
                e << "domain error: " << ex.what() << '\n';
                results[i].code = 2;
            } catch (const std::exception& ex) {
                e << "internal error: " << ex.what() << '\n';
                results[i].code = 1;
            }
            results[i].out = o.str();
            results[i].err = e.str();
        }
    };
    std::vector<std::future<void>> pool;
    for (int w = 0; w < jobs; ++w) pool.push_back(std::async(std::launch::async, worker));
    for (auto& f : pool) f.get();

    int code = 0;
    for (const auto& r : results) {
        out << r.out;
        err << r.err;
        code = std::max(code, r.code);
    }
    return code;
}

}  // namespace

double ScenarioConfig::number(const std::string& key) const { return parse_number(key, text(key)); }

long long ScenarioConfig::integer(const std::string& key) const { return parse_integer(key, text(key)); }

std::vector<double> ScenarioConfig::list(const std::string& key) const { return parse_list(key, text(key)); }

const std::string& ScenarioConfig::text(const std::string& key) const {
    const auto it = params.find(key);
    if (it == params.end()) throw std::out_of_range("no parameter " + key + " for " + command);
    return it->second;
}

bool ScenarioConfig::flag(const std::string& key) const { return text(key) == "true"; }

ScenarioConfig parse_config(const std::vector<std::string>& args) {
    if (args.empty()) throw UsageError("missing subcommand");
    const std::string& command = args[0];
    const auto spec_it = schema().find(command);
    if (spec_it == schema().end()) throw UsageError("unknown subcommand '" + command + "'");
    const auto& specs = spec_it->second;

    // config-file entries come first so that command-line flags override them
    std::vector<std::string> tokens;
    for (std::size_t i = 1; i < args.size(); ++i) {
        std::string path;
        if (args[i] == "--config") {
            if (i + 1 >= args.size()) throw UsageError("--config: missing file name");
            path = args[i + 1];
        } else if (args[i].rfind("--config=", 0) == 0) {
            path = args[i].substr(9);
        }
        if (path.empty()) continue;
        for (const auto& [key, value] : read_config_file(path)) {
            if (key == "command") {
                if (value != command) throw UsageError("--config: file is for '" + value + "', not '" + command + "'");
                continue;
            }
            tokens.push_back("--" + key + "=" + value);
        }
    }
    for (std::size_t i = 1; i < args.size(); ++i) tokens.push_back(args[i]);

    CLI::App app(command);
    app.set_help_flag();
    app.allow_extras(false);
    std::map<std::string, std::string> values;
    std::string out, format = "csv", seed = "0", config;
    auto take_last = CLI::MultiOptionPolicy::TakeLast;
    for (const auto& spec : specs) {
        values[spec.name] = spec.default_value;
        if (spec.kind == OptionSpec::Flag) {
            app.add_option_function<std::string>(
                   "--" + spec.name, [&values, name = spec.name](const std::string& v) { values[name] = v; }, spec.help)
                ->expected(0, 1)
                ->default_str("true")
                ->multi_option_policy(take_last);
        } else {
            app.add_option("--" + spec.name, values[spec.name], spec.help)->multi_option_policy(take_last);
        }
    }
    app.add_option("--out", out, "data file (relative to DC_OUT_DIR when set)")->multi_option_policy(take_last);
    if (tabular(command))
        app.add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}))->multi_option_policy(take_last);
    app.add_option("--seed", seed, "random seed")->multi_option_policy(take_last);
    app.add_option("--config", config, "key=value scenario file")->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);

    std::vector<std::string> reversed(tokens.rbegin(), tokens.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        throw UsageError(command + ": " + e.what());
    }

    for (const auto& spec : specs) {
        if (spec.kind == OptionSpec::Flag && values[spec.name].empty()) values[spec.name] = "true";
        validate(spec, values[spec.name]);
    }
    ScenarioConfig cfg;
    cfg.command = command;
    cfg.params = values;
    cfg.format = format;
    try {
        std::size_t used = 0;
        cfg.seed = std::stoull(seed, &used);
        if (used != seed.size() || seed.find('-') != std::string::npos) throw std::invalid_argument(seed);
    } catch (const std::exception&) {
        throw UsageError("--seed: '" + seed + "' is not a non-negative integer");
    }
    cfg.out = resolve_out(out, command, format);
    return cfg;
}

RunReport run(const ScenarioConfig& config, std::ostream& data) {
    const auto it = runners().find(config.command);
    if (it == runners().end()) throw UsageError("unknown subcommand '" + config.command + "'");
    return it->second(config, data);
}

int main_entry(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    try {
        if (args.empty() || args[0] == "--help" || args[0] == "-h") {
            out << "usage: dressing <subcommand> [--key value ...] [--config file]\n"
                   "subcommands: bell verify-darboux chain-kdv tchain symmetry ns-closure lattice-zs selftest\n"
                   "             batch --jobs k cfg...\n";
            return args.empty() ? 2 : 0;
        }
        if (args[0] == "batch") return run_batch(args, out, err);
        if (args.size() > 1 && (args[1] == "--help" || args[1] == "-h")) {
            const auto it = schema().find(args[0]);
            if (it == schema().end()) throw UsageError("unknown subcommand '" + args[0] + "'");
            out << "dressing " << args[0] << " options:\n";
            for (const auto& s : it->second) out << "  --" << s.name << " (default " << s.default_value << "): " << s.help << '\n';
            out << "  --out, --seed, --config" << (tabular(args[0]) ? ", --format" : "") << '\n';
            return 0;
        }
        return execute(parse_config(args), out, err);
    } catch (const UsageError& e) {
        err << "usage error: " << e.what() << '\n';
        return 2;
    } catch (const DomainError& e) {
        err << "domain error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        err << "internal error: " << e.what() << '\n';
        return 1;
    }
}

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_csv(std::ostream& os, const std::vector<std::string>& header, const std::vector<std::vector<double>>& rows) {
    for (std::size_t i = 0; i < header.size(); ++i) os << (i ? "," : "") << header[i];
    os << '\n';
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << format_double(row[i]);
        os << '\n';
    }
}

}  // namespace dressing::cli
