#include "dressing/diffpoly.hpp"

#include <algorithm>
#include <numeric>
#include <ostream>

#include "dressing/error.hpp"

namespace dressing {

namespace {

unsigned degree_of(const Exponents& e) { return std::accumulate(e.begin(), e.end(), 0U); }

void trim(Exponents& e) {
    while (!e.empty() && e.back() == 0) e.pop_back();
}

std::string render_monomial(const Exponents& e) {
    std::string out;
    for (std::size_t k = 0; k < e.size(); ++k) {
        if (e[k] == 0) continue;
        if (!out.empty()) out += '*';
        out += "s^(" + std::to_string(k) + ")";
        if (e[k] > 1) out += "^" + std::to_string(e[k]);
    }
    return out;
}

}  // namespace

bool CanonicalOrder::operator()(const Exponents& lhs, const Exponents& rhs) const {
    const unsigned dl = degree_of(lhs);
    const unsigned dr = degree_of(rhs);
    if (dl != dr) return dl < dr;
    return std::lexicographical_compare(lhs.begin(), lhs.end(), rhs.begin(), rhs.end());
}

Jet::Jet(std::vector<Complex> values) : values_(std::move(values)) {
    if (values_.empty()) throw DomainError(ErrorKind::InvalidArgument, "a jet needs at least the value itself");
}

DiffPoly::DiffPoly(const Rational& constant) {
    if (constant != 0) terms_.emplace(Exponents{}, constant);
}

DiffPoly DiffPoly::monomial(Exponents exps, const Rational& c) {
    DiffPoly p;
    trim(exps);
    p.add_term(exps, c);
    return p;
}

DiffPoly DiffPoly::sigma(unsigned k) {
    Exponents e(k + 1, 0);
    e[k] = 1;
    DiffPoly p;
    p.terms_.emplace(std::move(e), Rational(1));
    return p;
}

int DiffPoly::max_order() const noexcept {
    int order = -1;
    for (const auto& [e, c] : terms_) order = std::max(order, static_cast<int>(e.size()) - 1);
    return order;
}

unsigned DiffPoly::total_degree() const noexcept {
    // the map is sorted by total degree
    return terms_.empty() ? 0 : degree_of(terms_.rbegin()->first);
}

void DiffPoly::add_term(const Exponents& exps, const Rational& coeff) {
    if (coeff == 0) return;
    auto [it, inserted] = terms_.try_emplace(exps, coeff);
    if (inserted) return;
    it->second += coeff;
    if (it->second == 0) terms_.erase(it);
}

DiffPoly& DiffPoly::operator+=(const DiffPoly& rhs) {
    for (const auto& [e, c] : rhs.terms_) add_term(e, c);
    return *this;
}

DiffPoly& DiffPoly::operator-=(const DiffPoly& rhs) {
    for (const auto& [e, c] : rhs.terms_) add_term(e, -c);
    return *this;
}

DiffPoly& DiffPoly::operator*=(const DiffPoly& rhs) {
    *this = *this * rhs;
    return *this;
}

DiffPoly operator*(const DiffPoly& lhs, const DiffPoly& rhs) {
    DiffPoly out;
    for (const auto& [el, cl] : lhs.terms_) {
        for (const auto& [er, cr] : rhs.terms_) {
            Exponents e(std::max(el.size(), er.size()), 0);
            for (std::size_t k = 0; k < el.size(); ++k) e[k] += el[k];
            for (std::size_t k = 0; k < er.size(); ++k) e[k] += er[k];
            out.add_term(e, cl * cr);
        }
    }
    return out;
}

DiffPoly operator-(const DiffPoly& p) { return scale(p, Rational(-1)); }

DiffPoly scale(const DiffPoly& p, const Rational& c) {
    DiffPoly out;
    if (c == 0) return out;
    for (const auto& [e, coeff] : p.terms()) out += DiffPoly::monomial(e, coeff * c);
    return out;
}

DiffPoly total_derivative(const DiffPoly& p) {
    DiffPoly out;
    for (const auto& [e, c] : p.terms()) {
        for (std::size_t k = 0; k < e.size(); ++k) {
            if (e[k] == 0) continue;
            Exponents d = e;
            d.resize(std::max(d.size(), k + 2), 0);
            d[k] -= 1;
            d[k + 1] += 1;
            out += DiffPoly::monomial(std::move(d), c * e[k]);
        }
    }
    return out;
}

DiffPoly total_derivative(const DiffPoly& p, unsigned times) {
    DiffPoly out = p;
    for (unsigned i = 0; i < times; ++i) out = total_derivative(out);
    return out;
}

Complex evaluate(const DiffPoly& p, const Jet& jet) {
    if (p.max_order() > jet.order()) {
        throw DomainError(ErrorKind::OrderTooLow, "polynomial needs s^(" + std::to_string(p.max_order()) +
                                                      ") but the jet has order " + std::to_string(jet.order()));
    }
    Complex sum = 0.0;
    for (const auto& [e, c] : p.terms()) {
        Complex term = c.convert_to<double>();
        for (std::size_t k = 0; k < e.size(); ++k)
            for (unsigned i = 0; i < e[k]; ++i) term *= jet[k];
        sum += term;
    }
    return sum;
}

std::string to_string(const DiffPoly& p) {
    if (p.is_zero()) return "0";
    std::string out;
    bool first = true;
    for (const auto& [e, c] : p.terms()) {
        const bool negative = c < 0;
        const Rational mag = negative ? Rational(-c) : c;
        std::string term;
        if (e.empty()) {
            term = mag.str();
        } else if (mag == 1) {
            term = render_monomial(e);
        } else {
            term = mag.str() + "*" + render_monomial(e);
        }
        if (first) {
            out = negative ? "-" + term : term;
            first = false;
        } else {
            out += negative ? " - " : " + ";
            out += term;
        }
    }
    return out;
}

std::ostream& operator<<(std::ostream& os, const DiffPoly& p) { return os << to_string(p); }

}  // namespace dressing
