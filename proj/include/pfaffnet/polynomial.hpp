#pragma once

#include "pfaffnet/jet.hpp"

#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <stdexcept>
#include <vector>

namespace pfaffnet {

/// Sparse multivariate polynomial with real coefficients over a fixed number
/// of variables. Terms are kept in a map keyed by exponent vector; zero
/// coefficients are never stored.
class SparsePoly {
public:
    using Exponents = std::vector<std::uint16_t>;
    using TermMap = std::map<Exponents, double>;

    SparsePoly() = default;
    explicit SparsePoly(std::size_t nvars) : nvars_(nvars) {}

    static SparsePoly constant(std::size_t nvars, double c);
    static SparsePoly variable(std::size_t nvars, std::size_t var);

    std::size_t nvars() const noexcept { return nvars_; }
    const TermMap& terms() const noexcept { return terms_; }
    bool is_zero() const noexcept { return terms_.empty(); }
    std::size_t term_count() const noexcept { return terms_.size(); }

    /// Adds c * x^exps, erasing the term if the sum cancels to zero.
    void add_term(const Exponents& exps, double c);
    double coefficient(const Exponents& exps) const;
    /// Mutable access for tests that corrupt a certificate.
    void set_coefficient(const Exponents& exps, double c);

    /// Total degree; -1 for the zero polynomial.
    int total_degree() const;
    /// Largest variable index with a positive exponent; -1 if constant.
    std::ptrdiff_t highest_variable() const;

    SparsePoly& operator+=(const SparsePoly& other);
    SparsePoly& operator-=(const SparsePoly& other);
    SparsePoly& operator*=(double s);
    friend SparsePoly operator+(SparsePoly a, const SparsePoly& b) { return a += b; }
    friend SparsePoly operator-(SparsePoly a, const SparsePoly& b) { return a -= b; }
    friend SparsePoly operator*(SparsePoly a, double s) { return a *= s; }
    friend SparsePoly operator*(double s, SparsePoly a) { return a *= s; }
    friend SparsePoly operator*(const SparsePoly& a, const SparsePoly& b);

    SparsePoly pow(unsigned e) const;
    /// Partial derivative with respect to variable `var`.
    SparsePoly derivative(std::size_t var) const;

    double evaluate(std::span<const double> values) const;

    /// Evaluation with jet-valued arguments (Taylor expansion of the polynomial
    /// in terms of the argument jets).
    Jet evaluate(std::span<const Jet> values) const;

private:
    void check_vars(const SparsePoly& other) const;

    std::size_t nvars_ = 0;
    TermMap terms_;
};

} // namespace pfaffnet
