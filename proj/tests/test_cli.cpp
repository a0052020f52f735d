#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "dressing/chain.hpp"
#include "dressing/cli.hpp"

using namespace dressing;
using namespace dressing::cli;

namespace {

std::filesystem::path scratch(const std::string& name) {
    const auto dir = std::filesystem::temp_directory_path() / "dressing_cli_tests";
    std::filesystem::create_directories(dir);
    return dir / name;
}

struct Captured {
    int code;
    std::string out;
    std::string err;
};

Captured call(const std::vector<std::string>& args) {
    std::ostringstream out, err;
    const int code = main_entry(args, out, err);
    return {code, out.str(), err.str()};
}

std::vector<double> row(const std::string& line) {
    std::vector<double> v;
    std::stringstream ss(line);
    std::string item;
    while (std::getline(ss, item, ',')) v.push_back(std::stod(item));
    return v;
}

}  // namespace

TEST_CASE("parse_config accepts the documented chain-kdv invocation") {
    const auto cfg = parse_config({"chain-kdv", "--sigma0", "1,2,3", "--mu", "0,0,0", "--h", "1e-3", "--steps", "10000"});
    CHECK(cfg.command == "chain-kdv");
    CHECK(cfg.list("mu") == std::vector<double>{0, 0, 0});
    CHECK(cfg.number("h") == 1e-3);
    CHECK(cfg.integer("steps") == 10000);
    CHECK(cfg.format == "csv");
}

TEST_CASE("parse_config rejects invalid values and names the flag") {
    try {
        parse_config({"chain-kdv", "--h", "-1"});
        FAIL("expected UsageError");
    } catch (const UsageError& e) {
        CHECK(std::string(e.what()).find("--h") != std::string::npos);
    }
    CHECK_THROWS_AS(parse_config({"chain-kdv", "--steps", "0"}), UsageError);
    CHECK_THROWS_AS(parse_config({"chain-kdv", "--steps", "2.5"}), UsageError);
    CHECK_THROWS_AS(parse_config({"chain-kdv", "--bogus", "1"}), UsageError);
    CHECK_THROWS_AS(parse_config({"chain-kdv", "--format", "xml"}), UsageError);
    CHECK_THROWS_AS(parse_config({"tchain", "--dt", "-0.1"}), UsageError);
    CHECK_THROWS_AS(parse_config({"nonsense"}), UsageError);
    CHECK_THROWS_AS(parse_config({"chain-kdv", "--seed", "-3"}), UsageError);
}

TEST_CASE("config file values are overridden by flags") {
    const auto path = scratch("override.cfg");
    {
        std::ofstream f(path);
        f << "# scenario\ncommand = chain-kdv\nh = 0.01\nsteps = 20\n";
    }
    const auto cfg = parse_config({"chain-kdv", "--config", path.string(), "--h", "0.002"});
    CHECK(cfg.number("h") == 0.002);
    CHECK(cfg.integer("steps") == 20);
    CHECK_THROWS_AS(parse_config({"bell", "--config", path.string()}), UsageError);

    const auto bad = scratch("unknown.cfg");
    {
        std::ofstream f(bad);
        f << "command=chain-kdv\nwidth=3\n";
    }
    CHECK_THROWS_AS(parse_config({"chain-kdv", "--config", bad.string()}), UsageError);
}

TEST_CASE("flags take true or false") {
    CHECK(parse_config({"bell", "--n", "3", "--k", "2", "--explicit"}).flag("explicit"));
    CHECK_FALSE(parse_config({"bell", "--n", "3"}).flag("explicit"));
    CHECK_THROWS_AS(parse_config({"bell", "--explicit=maybe"}), UsageError);
}

TEST_CASE("CSV emission") {
    std::ostringstream os;
    write_csv(os, {"x", "sigma1", "sigma2", "sigma3", "c", "A"}, {});
    CHECK(os.str() == "x,sigma1,sigma2,sigma3,c,A\n");
    CHECK(format_double(0.1) == "0.10000000000000001");
    CHECK(std::stod(format_double(1.0 / 3.0)) == 1.0 / 3.0);
}

TEST_CASE("chain-kdv output starts at the initial state") {
    const auto r = call({"chain-kdv", "--steps", "10"});
    REQUIRE(r.code == 0);
    std::stringstream ss(r.out);
    std::string header, first;
    std::getline(ss, header);
    std::getline(ss, first);
    CHECK(header == "x,sigma1,sigma2,sigma3,c,A");
    const auto v = row(first);
    CHECK(v[0] == 0.0);
    CHECK(v[1] == 1.0);
    CHECK(v[2] == 2.0);
    CHECK(v[3] == 3.0);
    CHECK(v[4] == casimir_c(ChainState{{1, 2, 3}, {0.1, 0.2, 0.3}}));
    const auto report = nlohmann::json::parse(r.err.substr(0, r.err.rfind("wall time")));
    CHECK(report["results"].contains("max_drift_A"));
    CHECK(report["exit_status"] == 0);
}

TEST_CASE("identical configurations give identical bytes") {
    for (const std::vector<std::string>& args :
         {std::vector<std::string>{"chain-kdv", "--steps", "200"},
          std::vector<std::string>{"lattice-zs", "--family", "random", "--seed", "11"},
          std::vector<std::string>{"tchain", "--grid", "64", "--steps", "20"},
          std::vector<std::string>{"ns-closure", "--steps", "50", "--format", "json"}}) {
        const auto a = call(args);
        const auto b = call(args);
        CHECK(a.code == 0);
        CHECK(a.out == b.out);
    }
    CHECK(call({"lattice-zs", "--family", "random", "--seed", "11"}).out !=
          call({"lattice-zs", "--family", "random", "--seed", "12"}).out);
}

TEST_CASE("domain errors exit with code 2 and name the cause") {
    const auto r = call({"ns-closure", "--x0", "3", "--m", "1"});
    CHECK(r.code == 2);
    CHECK(r.err.find("radicand") != std::string::npos);
    CHECK(call({"chain-kdv", "--h", "-1"}).code == 2);
    CHECK(call({"tchain", "--grid", "64", "--dt", "1"}).code == 2);
    CHECK(call({}).code == 2);
}

TEST_CASE("output paths resolve against DC_OUT_DIR") {
    const auto dir = scratch("out");
    std::filesystem::create_directories(dir);
    ::setenv("DC_OUT_DIR", dir.string().c_str(), 1);
    const auto r = call({"chain-kdv", "--steps", "5"});
    const auto named = call({"chain-kdv", "--steps", "5", "--out", "named.csv"});
    ::unsetenv("DC_OUT_DIR");
    CHECK(r.code == 0);
    CHECK(named.code == 0);
    CHECK(std::filesystem::exists(dir / "chain-kdv.csv"));
    CHECK(std::filesystem::exists(dir / "named.csv"));
    CHECK(nlohmann::json::parse(r.out)["output"] == (dir / "chain-kdv.csv").string());
}

TEST_CASE("chain-kdv CSV is re-ingested by tchain without loss") {
    const ChainState s0{{1, 2, 3}, {0.1, 0.2, 0.3}};
    const auto period = find_period(s0, 1e-3, 10.0);
    REQUIRE(period.has_value());
    const int M = 256;
    const double h = *period / M;
    const auto path = scratch("orbit.csv");
    const auto r = call({"chain-kdv", "--h", format_double(h), "--steps", std::to_string(M), "--out", path.string()});
    REQUIRE(r.code == 0);

    const auto traj = integrate_chain(s0, h, M);
    const auto field = read_chain_csv(path.string(), {0.1, 0.2, 0.3});
    REQUIRE(field.sigma.size() == static_cast<std::size_t>(M));
    CHECK(field.dx == traj.samples[1].x - traj.samples[0].x);
    for (int n = 0; n < M; ++n)
        for (int i = 0; i < 3; ++i) CHECK(field.sigma[n][i] == traj.samples[n].sigma[i]);

    const auto t = call({"tchain", "--init", path.string(), "--steps", "10"});
    CHECK(t.code == 0);
    CHECK_THROWS_AS(read_chain_csv(scratch("missing.csv").string(), {0.1, 0.2, 0.3}), UsageError);
}

TEST_CASE("batch runs each file and keeps input order") {
    const auto a = scratch("first.cfg");
    const auto b = scratch("second.cfg");
    {
        std::ofstream(a) << "command=chain-kdv\nsteps=5\n";
        std::ofstream(b) << "command=lattice-zs\nfamily=random\nsize=8\n";
    }
    const auto dir = scratch("batch");
    std::filesystem::create_directories(dir);
    ::setenv("DC_OUT_DIR", dir.string().c_str(), 1);
    const auto r = call({"batch", "--jobs", "2", a.string(), b.string()});
    ::unsetenv("DC_OUT_DIR");
    CHECK(r.code == 0);
    CHECK(r.out.find("chain-kdv") < r.out.find("lattice-zs"));
    CHECK(std::filesystem::exists(dir / "first.csv"));
    CHECK(std::filesystem::exists(dir / "second.json"));
}

TEST_CASE("subcommand reports") {
    CHECK(call({"bell", "--n", "3"}).out == "s^(2) + 3*s^(0)*s^(1) + s^(0)^3\n");
    CHECK(call({"verify-darboux", "--grid", "-5:5:200"}).code == 0);
    CHECK(call({"verify-darboux", "--order", "3", "--grid", "-3:3:50"}).code == 0);
    CHECK(call({"verify-darboux", "--order", "4"}).code == 2);
    CHECK(call({"verify-darboux", "--grid", "1:0:5"}).code == 2);
    CHECK(call({"symmetry", "--check"}).code == 0);
    CHECK(call({"lattice-zs", "--family", "diag", "--size", "16"}).code == 0);
    CHECK(call({"lattice-zs", "--family", "period2", "--size", "64"}).code == 0);
    CHECK(call({"lattice-zs", "--family", "period2", "--size", "7"}).code == 2);
    CHECK(call({"lattice-zs", "--family", "hexagonal"}).code == 2);
}
