#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <vector>

namespace pfaffnet {

/// Largest total order a jet may carry.
inline constexpr int kMaxJetOrder = 4;

using MultiIndex = std::vector<int>;

/// Monomial layout for jets in d variables up to total order Q: monomials are
/// stored graded (all of degree 0, then degree 1, ...) and lexicographically
/// inside a degree, with precomputed product and shift tables.
class JetSpace {
public:
    /// Shared layout for (d, Q); throws BudgetError if Q > kMaxJetOrder.
    static std::shared_ptr<const JetSpace> get(int d, int max_order);

    JetSpace(int d, int max_order);

    int dim() const noexcept { return d_; }
    int max_order() const noexcept { return q_; }
    std::size_t size() const noexcept { return monomials_.size(); }
    /// Number of monomials of total degree <= order.
    std::size_t prefix(int order) const { return prefix_[order]; }
    const MultiIndex& monomial(std::size_t i) const { return monomials_[i]; }
    int degree(std::size_t i) const { return degrees_[i]; }
    /// Index of a multi-index; -1 if it is not in the layout.
    std::ptrdiff_t index_of(const MultiIndex& alpha) const;
    /// Index of monomial(i) * monomial(j); -1 if the degree exceeds Q.
    std::ptrdiff_t product(std::size_t i, std::size_t j) const { return product_[i * size() + j]; }
    /// Index of monomial(i) + e_p; -1 if the degree exceeds Q.
    std::ptrdiff_t raise(std::size_t i, int p) const { return raise_[i * d_ + p]; }

private:
    int d_;
    int q_;
    std::vector<MultiIndex> monomials_;
    std::vector<int> degrees_;
    std::vector<std::size_t> prefix_;
    std::vector<std::ptrdiff_t> product_;
    std::vector<std::ptrdiff_t> raise_;
};

/// Truncated Taylor expansion of a function of d variables at a point:
/// coefficient c_alpha = (d^alpha f)(x0) / alpha!. Coefficients above
/// `order()` are meaningless and kept at zero. Products and derivatives
/// truncate to the smaller valid order.
class Jet {
public:
    Jet() = default;
    Jet(std::shared_ptr<const JetSpace> space, int order);

    static Jet constant(std::shared_ptr<const JetSpace> space, int order, double value);
    /// The coordinate function x_p expanded at x0_p.
    static Jet variable(std::shared_ptr<const JetSpace> space, int order, int p, double x0_p);

    const std::shared_ptr<const JetSpace>& space() const noexcept { return space_; }
    int order() const noexcept { return order_; }
    int dim() const noexcept { return space_->dim(); }
    double value() const { return coeffs_[0]; }
    std::span<const double> coefficients() const noexcept { return coeffs_; }
    double coefficient(std::size_t i) const { return coeffs_[i]; }
    double& coefficient(std::size_t i) { return coeffs_[i]; }

    /// d^alpha f (x0) = alpha! * c_alpha. Throws if |alpha| > order().
    double partial(const MultiIndex& alpha) const;
    /// First derivative d_p f(x0).
    double gradient(int p) const;

    /// Jet of d_p f, one order lower.
    Jet derivative(int p) const;
    /// Copy truncated to a lower order.
    Jet truncated(int order) const;

    Jet& operator+=(const Jet& other);
    Jet& operator-=(const Jet& other);
    Jet& operator*=(double s);
    /// this += s * other
    Jet& add_scaled(double s, const Jet& other);

    friend Jet operator+(Jet a, const Jet& b) { return a += b; }
    friend Jet operator-(Jet a, const Jet& b) { return a -= b; }
    friend Jet operator*(Jet a, double s) { return a *= s; }
    friend Jet operator*(double s, Jet a) { return a *= s; }
    friend Jet operator*(const Jet& a, const Jet& b);

    /// g(f) for a univariate g given its derivatives g^(j)(f(x0)), j = 0..order().
    Jet compose(std::span<const double> outer_derivatives) const;

private:
    void check_compatible(const Jet& other) const;

    std::shared_ptr<const JetSpace> space_;
    int order_ = 0;
    std::vector<double> coeffs_;
};

} // namespace pfaffnet
