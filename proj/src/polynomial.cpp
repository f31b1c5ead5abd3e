#include "pfaffnet/polynomial.hpp"

#include "pfaffnet/errors.hpp"

#include <algorithm>

namespace pfaffnet {

SparsePoly SparsePoly::constant(std::size_t nvars, double c) {
    SparsePoly p(nvars);
    p.add_term(Exponents(nvars, 0), c);
    return p;
}

SparsePoly SparsePoly::variable(std::size_t nvars, std::size_t var) {
    if (var >= nvars)
        throw std::out_of_range("variable index out of range");
    SparsePoly p(nvars);
    Exponents e(nvars, 0);
    e[var] = 1;
    p.add_term(e, 1.0);
    return p;
}

void SparsePoly::add_term(const Exponents& exps, double c) {
    if (exps.size() != nvars_)
        throw ShapeError("exponent vector has wrong length");
    if (c == 0.0)
        return;
    auto [it, inserted] = terms_.try_emplace(exps, c);
    if (!inserted) {
        it->second += c;
        if (it->second == 0.0)
            terms_.erase(it);
    }
}

double SparsePoly::coefficient(const Exponents& exps) const {
    auto it = terms_.find(exps);
    return it == terms_.end() ? 0.0 : it->second;
}

void SparsePoly::set_coefficient(const Exponents& exps, double c) {
    if (exps.size() != nvars_)
        throw ShapeError("exponent vector has wrong length");
    if (c == 0.0)
        terms_.erase(exps);
    else
        terms_[exps] = c;
}

int SparsePoly::total_degree() const {
    int deg = -1;
    for (const auto& [e, c] : terms_) {
        int s = 0;
        for (auto x : e)
            s += x;
        deg = std::max(deg, s);
    }
    return deg;
}

std::ptrdiff_t SparsePoly::highest_variable() const {
    std::ptrdiff_t hi = -1;
    for (const auto& [e, c] : terms_)
        for (std::size_t v = e.size(); v-- > 0;)
            if (e[v] > 0) {
                hi = std::max<std::ptrdiff_t>(hi, static_cast<std::ptrdiff_t>(v));
                break;
            }
    return hi;
}

void SparsePoly::check_vars(const SparsePoly& other) const {
    if (nvars_ != other.nvars_)
        throw ShapeError("polynomials over different variable sets");
}

SparsePoly& SparsePoly::operator+=(const SparsePoly& other) {
    check_vars(other);
    for (const auto& [e, c] : other.terms_)
        add_term(e, c);
    return *this;
}

SparsePoly& SparsePoly::operator-=(const SparsePoly& other) {
    check_vars(other);
    for (const auto& [e, c] : other.terms_)
        add_term(e, -c);
    return *this;
}

SparsePoly& SparsePoly::operator*=(double s) {
    if (s == 0.0) {
        terms_.clear();
        return *this;
    }
    for (auto& [e, c] : terms_)
        c *= s;
    return *this;
}

SparsePoly operator*(const SparsePoly& a, const SparsePoly& b) {
    a.check_vars(b);
    SparsePoly out(a.nvars_);
    SparsePoly::Exponents e(a.nvars_);
    for (const auto& [ea, ca] : a.terms_)
        for (const auto& [eb, cb] : b.terms_) {
            for (std::size_t v = 0; v < e.size(); ++v)
                e[v] = static_cast<std::uint16_t>(ea[v] + eb[v]);
            out.add_term(e, ca * cb);
        }
    return out;
}

SparsePoly SparsePoly::pow(unsigned e) const {
    SparsePoly result = constant(nvars_, 1.0);
    SparsePoly base = *this;
    while (e > 0) {
        if (e & 1u)
            result = result * base;
        e >>= 1;
        if (e > 0)
            base = base * base;
    }
    return result;
}

SparsePoly SparsePoly::derivative(std::size_t var) const {
    if (var >= nvars_)
        throw std::out_of_range("variable index out of range");
    SparsePoly out(nvars_);
    for (const auto& [e, c] : terms_) {
        if (e[var] == 0)
            continue;
        Exponents lowered = e;
        --lowered[var];
        out.add_term(lowered, c * e[var]);
    }
    return out;
}

double SparsePoly::evaluate(std::span<const double> values) const {
    if (values.size() != nvars_)
        throw ShapeError("wrong number of values for polynomial evaluation");
    double sum = 0.0;
    for (const auto& [e, c] : terms_) {
        double term = c;
        for (std::size_t v = 0; v < e.size(); ++v)
            for (unsigned k = 0; k < e[v]; ++k)
                term *= values[v];
        sum += term;
    }
    return sum;
}

Jet SparsePoly::evaluate(std::span<const Jet> values) const {
    if (values.size() != nvars_ || values.empty())
        throw ShapeError("wrong number of jets for polynomial evaluation");
    int order = values[0].order();
    for (const auto& v : values)
        order = std::min(order, v.order());
    const auto& space = values[0].space();
    Jet sum(space, order);
    for (const auto& [e, c] : terms_) {
        Jet term = Jet::constant(space, order, c);
        for (std::size_t v = 0; v < e.size(); ++v)
            for (unsigned k = 0; k < e[v]; ++k)
                term = term * values[v];
        sum += term;
    }
    return sum;
}

} // namespace pfaffnet
