#pragma once

#include <functional>
#include <limits>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace pfaffnet {

/// Open real interval (lo, hi); either end may be infinite.
struct Interval {
    double lo = -std::numeric_limits<double>::infinity();
    double hi = std::numeric_limits<double>::infinity();

    static Interval real_line() { return {}; }

    bool contains(double t) const noexcept { return t > lo && t < hi; }
    bool is_real_line() const noexcept;
    /// Distance from t to the nearest end; +inf on the real line, negative outside.
    double margin(double t) const noexcept;
};

/// Coefficients of zeta' = a0 + a1 zeta + a2 zeta^2.
struct RiccatiCoefficients {
    double a0 = 0.0;
    double a1 = 0.0;
    double a2 = 0.0;

    double rhs(double y) const noexcept { return a0 + y * (a1 + a2 * y); }
};

/// Tolerance used to certify the Riccati property of registered activations.
inline constexpr double kRiccatiCertificationTol = 1e-10;

/// A nondecreasing activation whose r-th derivative solves a Riccati ODE with
/// constant coefficients. Derivatives up to order r come from closed forms;
/// higher orders follow from the ODE through the polynomial recurrence
///   zeta^(j) = Q_j(zeta),  Q_1 = a0 + a1 y + a2 y^2,  Q_{j+1} = Q_j' * Q_1.
/// Instances are immutable.
class RiccatiActivation {
public:
    using Evaluator = std::function<double(double)>;

    /// `closed_forms[q]` evaluates sigma^(q) for q = 0..r. Throws
    /// std::invalid_argument if a2 == 0 or a closed form is missing.
    RiccatiActivation(std::string name, int riccati_index, RiccatiCoefficients coefficients,
                      Interval analytic_interval, std::vector<Evaluator> closed_forms);

    const std::string& name() const noexcept { return name_; }
    int riccati_index() const noexcept { return r_; }
    const RiccatiCoefficients& coefficients() const noexcept { return coeffs_; }
    const Interval& analytic_interval() const noexcept { return interval_; }

    double operator()(double t) const { return derivative(t, 0); }

    /// sigma^(q)(t). Throws DomainError outside the analytic interval.
    double derivative(double t, int q) const;

    /// zeta(t) = sigma^(r)(t).
    double zeta(double t) const { return derivative(t, r_); }

    /// Writes sigma^(q0 + j)(t) into out[j] for j = 0..out.size()-1, sharing
    /// the single zeta evaluation among all orders above r.
    void derivatives(double t, int q0, std::span<double> out) const;

    /// Coefficients (ascending powers of zeta) of Q_j for j >= 1.
    std::vector<double> recurrence_polynomial(int j) const;

    /// Copy with different ODE coefficients and the same closed forms. Used for
    /// negative controls; the result is not certified.
    RiccatiActivation with_coefficients(RiccatiCoefficients c) const;

private:
    void check_domain(double t) const;

    std::string name_;
    int r_;
    RiccatiCoefficients coeffs_;
    Interval interval_;
    std::vector<Evaluator> closed_forms_;
    std::vector<std::vector<double>> recurrence_; // recurrence_[j-1] = Q_j
};

using ActivationPtr = std::shared_ptr<const RiccatiActivation>;

/// logistic (r = 0), tanh (r = 0) and softplus (r = 1).
std::vector<ActivationPtr> builtins();

/// Looks up a builtin by name; throws std::invalid_argument for unknown names.
ActivationPtr activation_by_name(const std::string& name);

/// Declaration of a user activation with Riccati index 0. The ODE fixes sigma
/// once sigma(0) is known, so the record carries `sigma0`; the solution is the
/// closed-form solution of the constant-coefficient Riccati equation.
struct ActivationDeclaration {
    std::string name;
    int riccati_index = 0;
    RiccatiCoefficients coefficients;
    double sigma0 = 0.0;
    Interval analytic_interval;
};

/// Builds and certifies a declared activation. Throws std::invalid_argument if
/// r != 0, a2 == 0, 0 is not inside the interval, the solution blows up inside
/// the interval, sigma is decreasing somewhere, or the Riccati residual on the
/// interval exceeds kRiccatiCertificationTol.
ActivationPtr make_custom_activation(const ActivationDeclaration& decl);

/// max_t |zeta'(t) - q(zeta)| / max(1, |q(zeta)|), q = a0 + a1 zeta + a2 zeta^2,
/// with zeta' from an eighth-order central difference of zeta. Throws DomainError for samples
/// outside the analytic interval.
double riccati_residual(const RiccatiActivation& act, std::span<const double> samples);

/// `count` equally spaced certification samples inside the analytic interval
/// clipped to [-5, 5].
std::vector<double> certification_samples(const RiccatiActivation& act, int count = 100);

/// True when sigma(t_i) <= sigma(t_{i+1}) + slack for consecutive sorted samples.
bool is_nondecreasing(const RiccatiActivation& act, std::span<const double> sorted_samples,
                      double slack = 1e-12);

} // namespace pfaffnet
