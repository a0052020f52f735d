#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "dressing/diffpoly.hpp"
#include "dressing/error.hpp"

using namespace dressing;
using Catch::Approx;

namespace {

const DiffPoly s = DiffPoly::sigma(0);
const DiffPoly s1 = DiffPoly::sigma(1);
const DiffPoly s2 = DiffPoly::sigma(2);

DiffPoly random_poly(std::mt19937& rng) {
    std::uniform_int_distribution<int> coeff(-4, 4);
    std::uniform_int_distribution<unsigned> exp(0, 2);
    std::uniform_int_distribution<int> count(1, 4);
    DiffPoly p;
    for (int t = count(rng); t > 0; --t) {
        Exponents e{exp(rng), exp(rng), exp(rng)};
        p += DiffPoly::monomial(e, Rational(coeff(rng), 1 + exp(rng)));
    }
    return p;
}

}  // namespace

TEST_CASE("total derivative on small monomials") {
    CHECK(total_derivative(s) == s1);
    CHECK(total_derivative(s * s) == 2 * s * s1);
    CHECK(total_derivative(s * s1) == s1 * s1 + s * s2);
    CHECK(total_derivative(DiffPoly(5)).is_zero());
}

TEST_CASE("evaluate substitutes jet values") {
    CHECK(evaluate(s * s + s1, Jet{2.0, 3.0}) == Complex(7.0));
    CHECK(evaluate(DiffPoly(1), Jet{0.3}) == Complex(1.0));
    const double k = 1.7;
    CHECK(std::abs(evaluate(2 * s1 + s * s, Jet{k, 0.0}) - k * k) < 1e-15);
}

TEST_CASE("evaluate rejects a short jet") {
    try {
        evaluate(s2, Jet{1.0, 2.0});
        FAIL("expected OrderTooLow");
    } catch (const DomainError& e) {
        CHECK(e.kind() == ErrorKind::OrderTooLow);
    }
}

TEST_CASE("ring operations normalize") {
    CHECK(s + s == 2 * s);
    CHECK(s * s1 == DiffPoly::monomial({1, 1}, 1));
    CHECK(scale(s * s, 0).is_zero());
    CHECK((s - s).is_zero());
    CHECK((s - s).terms().empty());
}

TEST_CASE("canonical rendering") {
    CHECK(to_string(2 * s1 + s * s) == "2*s^(1) + s^(0)^2");
    CHECK(to_string(DiffPoly()) == "0");
    CHECK(to_string(s - 3) == "-3 + s^(0)");
    CHECK(to_string(scale(s * s2, Rational(3, 2))) == "3/2*s^(0)*s^(2)");
    CHECK(to_string(-s1) == "-s^(1)");
}

TEST_CASE("degree bookkeeping") {
    CHECK(DiffPoly(3).max_order() == -1);
    CHECK((s * s2 + s1).max_order() == 2);
    CHECK((s * s * s1 + s2).total_degree() == 3);
}

TEST_CASE("Leibniz rule and ring axioms on random polynomials") {
    std::mt19937 rng(20240611);
    for (int trial = 0; trial < 50; ++trial) {
        const DiffPoly p = random_poly(rng);
        const DiffPoly q = random_poly(rng);
        const DiffPoly r = random_poly(rng);
        CHECK(total_derivative(p * q) == total_derivative(p) * q + p * total_derivative(q));
        CHECK((p * q) * r == p * (q * r));
        CHECK(p * (q + r) == p * q + p * r);
        CHECK(p + q == q + p);
    }
}

TEST_CASE("derivative matches central differences on a smooth jet") {
    // σ(x) = sin(x) + x²/3, all derivatives in closed form
    auto jet_at = [](double x) {
        return Jet{std::sin(x) + x * x / 3.0, std::cos(x) + 2.0 * x / 3.0, -std::sin(x) + 2.0 / 3.0,
                   -std::cos(x), std::sin(x), std::cos(x)};
    };
    std::mt19937 rng(7);
    const double h = 1e-5;
    for (int trial = 0; trial < 20; ++trial) {
        const DiffPoly p = random_poly(rng);
        for (double x : {0.2, 0.9, 1.6}) {
            const Complex exact = evaluate(total_derivative(p), jet_at(x));
            const Complex fd = (evaluate(p, jet_at(x + h)) - evaluate(p, jet_at(x - h))) / (2.0 * h);
            CHECK(std::abs(exact - fd) <= 1e-6 * std::max(1.0, std::abs(exact)));
        }
    }
}

TEST_CASE("empty jet is rejected") { CHECK_THROWS_AS(Jet(std::vector<Complex>{}), DomainError); }
