#include "pfaffnet/activations.hpp"

#include "pfaffnet/errors.hpp"
#include "pfaffnet/grid.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace pfaffnet {

namespace {

constexpr int kPrecomputedOrders = 24;

std::vector<double> poly_derivative(const std::vector<double>& p) {
    if (p.size() <= 1)
        return {0.0};
    std::vector<double> out(p.size() - 1);
    for (std::size_t i = 1; i < p.size(); ++i)
        out[i - 1] = static_cast<double>(i) * p[i];
    return out;
}

std::vector<double> poly_multiply(const std::vector<double>& a, const std::vector<double>& b) {
    std::vector<double> out(a.size() + b.size() - 1, 0.0);
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j)
            out[i + j] += a[i] * b[j];
    return out;
}

double poly_eval(const std::vector<double>& p, double y) {
    double acc = 0.0;
    for (auto it = p.rbegin(); it != p.rend(); ++it)
        acc = acc * y + *it;
    return acc;
}

double logistic(double t) {
    if (t >= 0.0)
        return 1.0 / (1.0 + std::exp(-t));
    const double e = std::exp(t);
    return e / (1.0 + e);
}

double softplus(double t) {
    if (t > 0.0)
        return t + std::log1p(std::exp(-t));
    return std::log1p(std::exp(t));
}

/// Closed-form solution of y' = a0 + a1 y + a2 y^2 with y(0) = y0.
class RiccatiSolution {
public:
    RiccatiSolution(RiccatiCoefficients c, double y0) : c_(c), y0_(y0) {
        const double disc = c.a1 * c.a1 - 4.0 * c.a0 * c.a2;
        if (disc > 0.0) {
            kind_ = Kind::TwoRoots;
            const double sq = std::sqrt(disc);
            root1_ = (-c.a1 - sq) / (2.0 * c.a2);
            root2_ = (-c.a1 + sq) / (2.0 * c.a2);
            if (y0 == root1_ || y0 == root2_) {
                kind_ = Kind::Constant;
                return;
            }
            gain_ = (y0 - root1_) / (y0 - root2_);
            rate_ = c.a2 * (root1_ - root2_);
        } else if (disc == 0.0) {
            root1_ = -c.a1 / (2.0 * c.a2);
            if (y0 == root1_) {
                kind_ = Kind::Constant;
                return;
            }
            kind_ = Kind::DoubleRoot;
            offset_ = -1.0 / (y0 - root1_);
        } else {
            kind_ = Kind::Oscillating;
            shift_ = -c.a1 / (2.0 * c.a2);
            omega_ = std::sqrt(-disc) / (2.0 * std::abs(c.a2));
            phase_ = std::atan((y0 - shift_) / omega_);
        }
    }

    double operator()(double t) const {
        switch (kind_) {
        case Kind::Constant:
            return y0_;
        case Kind::TwoRoots: {
            // y = (r1 - g r2) / (1 - g), g = K exp(mu t)
            const double g = gain_ * std::exp(rate_ * t);
            if (std::abs(g) > 1.0) {
                const double inv = 1.0 / g;
                return (root1_ * inv - root2_) / (inv - 1.0);
            }
            return (root1_ - g * root2_) / (1.0 - g);
        }
        case Kind::DoubleRoot:
            return root1_ - 1.0 / (c_.a2 * t + offset_);
        case Kind::Oscillating:
            return shift_ + omega_ * std::tan(c_.a2 * omega_ * t + phase_);
        }
        return y0_;
    }

    /// True if the solution has a pole inside the open interval.
    bool blows_up_in(const Interval& iv) const {
        switch (kind_) {
        case Kind::Constant:
            return false;
        case Kind::TwoRoots:
            if (gain_ <= 0.0)
                return false;
            return iv.contains(-std::log(gain_) / rate_);
        case Kind::DoubleRoot:
            return iv.contains(-offset_ / c_.a2);
        case Kind::Oscillating: {
            if (!std::isfinite(iv.lo) || !std::isfinite(iv.hi))
                return true;
            // poles where a2*omega*t + phase = pi/2 + n*pi
            const double speed = c_.a2 * omega_;
            const double u_lo = speed * iv.lo + phase_;
            const double u_hi = speed * iv.hi + phase_;
            const double a = std::min(u_lo, u_hi);
            const double b = std::max(u_lo, u_hi);
            const double n = std::ceil((a - std::numbers::pi / 2) / std::numbers::pi);
            const double pole = std::numbers::pi / 2 + n * std::numbers::pi;
            return pole > a && pole < b;
        }
        }
        return false;
    }

private:
    enum class Kind { Constant, TwoRoots, DoubleRoot, Oscillating };

    RiccatiCoefficients c_;
    double y0_;
    Kind kind_ = Kind::Constant;
    double root1_ = 0.0, root2_ = 0.0, gain_ = 0.0, rate_ = 0.0;
    double offset_ = 0.0;
    double shift_ = 0.0, omega_ = 0.0, phase_ = 0.0;
};

double central_difference(const RiccatiActivation& act, double t) {
    double h = 1.0 / 64.0;
    const double margin = act.analytic_interval().margin(t);
    if (std::isfinite(margin))
        h = std::min(h, margin / 100.0);
    auto diff = [&](int k) { return act.zeta(t + k * h) - act.zeta(t - k * h); };
    return (4.0 / 5.0 * diff(1) - 1.0 / 5.0 * diff(2) + 4.0 / 105.0 * diff(3) - 1.0 / 280.0 * diff(4)) / h;
}

} // namespace

bool Interval::is_real_line() const noexcept {
    return std::isinf(lo) && lo < 0 && std::isinf(hi) && hi > 0;
}

double Interval::margin(double t) const noexcept {
    return std::min(t - lo, hi - t);
}

RiccatiActivation::RiccatiActivation(std::string name, int riccati_index, RiccatiCoefficients coefficients,
                                     Interval analytic_interval, std::vector<Evaluator> closed_forms)
    : name_(std::move(name)), r_(riccati_index), coeffs_(coefficients), interval_(analytic_interval),
      closed_forms_(std::move(closed_forms)) {
    if (r_ < 0)
        throw std::invalid_argument("activation " + name_ + ": negative Riccati index");
    if (coeffs_.a2 == 0.0)
        throw std::invalid_argument("activation " + name_ + ": a2 must be nonzero");
    if (!(interval_.lo < interval_.hi))
        throw std::invalid_argument("activation " + name_ + ": empty analytic interval");
    if (closed_forms_.size() != static_cast<std::size_t>(r_) + 1)
        throw std::invalid_argument("activation " + name_ + ": closed forms required for orders 0.." +
                                    std::to_string(r_));
    for (std::size_t q = 0; q < closed_forms_.size(); ++q)
        if (!closed_forms_[q])
            throw std::invalid_argument("activation " + name_ + ": missing closed form for order " +
                                        std::to_string(q));

    recurrence_.reserve(kPrecomputedOrders);
    recurrence_.push_back({coeffs_.a0, coeffs_.a1, coeffs_.a2});
    while (recurrence_.size() < kPrecomputedOrders)
        recurrence_.push_back(poly_multiply(poly_derivative(recurrence_.back()), recurrence_.front()));
}

void RiccatiActivation::check_domain(double t) const {
    if (!interval_.contains(t))
        throw DomainError("activation " + name_ + ": argument " + std::to_string(t) +
                          " outside analytic interval");
}

std::vector<double> RiccatiActivation::recurrence_polynomial(int j) const {
    if (j < 1)
        throw std::invalid_argument("recurrence index must be >= 1");
    if (static_cast<std::size_t>(j) <= recurrence_.size())
        return recurrence_[j - 1];
    std::vector<double> q = recurrence_.back();
    for (int i = static_cast<int>(recurrence_.size()); i < j; ++i)
        q = poly_multiply(poly_derivative(q), recurrence_.front());
    return q;
}

double RiccatiActivation::derivative(double t, int q) const {
    if (q < 0)
        throw std::invalid_argument("derivative order must be nonnegative");
    check_domain(t);
    if (q <= r_)
        return closed_forms_[q](t);
    const double z = closed_forms_[r_](t);
    const int j = q - r_;
    if (static_cast<std::size_t>(j) <= recurrence_.size())
        return poly_eval(recurrence_[j - 1], z);
    return poly_eval(recurrence_polynomial(j), z);
}

void RiccatiActivation::derivatives(double t, int q0, std::span<double> out) const {
    if (q0 < 0)
        throw std::invalid_argument("derivative order must be nonnegative");
    check_domain(t);
    double z = 0.0;
    bool have_zeta = false;
    for (std::size_t j = 0; j < out.size(); ++j) {
        const int q = q0 + static_cast<int>(j);
        if (q <= r_) {
            out[j] = closed_forms_[q](t);
            if (q == r_) {
                z = out[j];
                have_zeta = true;
            }
            continue;
        }
        if (!have_zeta) {
            z = closed_forms_[r_](t);
            have_zeta = true;
        }
        const int k = q - r_;
        out[j] = static_cast<std::size_t>(k) <= recurrence_.size() ? poly_eval(recurrence_[k - 1], z)
                                                                   : poly_eval(recurrence_polynomial(k), z);
    }
}

RiccatiActivation RiccatiActivation::with_coefficients(RiccatiCoefficients c) const {
    return RiccatiActivation(name_, r_, c, interval_, closed_forms_);
}

std::vector<ActivationPtr> builtins() {
    static const std::vector<ActivationPtr> registry = [] {
        std::vector<ActivationPtr> out;
        out.push_back(std::make_shared<const RiccatiActivation>(
            "logistic", 0, RiccatiCoefficients{0.0, 1.0, -1.0}, Interval::real_line(),
            std::vector<RiccatiActivation::Evaluator>{logistic}));
        out.push_back(std::make_shared<const RiccatiActivation>(
            "tanh", 0, RiccatiCoefficients{1.0, 0.0, -1.0}, Interval::real_line(),
            std::vector<RiccatiActivation::Evaluator>{[](double t) { return std::tanh(t); }}));
        out.push_back(std::make_shared<const RiccatiActivation>(
            "softplus", 1, RiccatiCoefficients{0.0, 1.0, -1.0}, Interval::real_line(),
            std::vector<RiccatiActivation::Evaluator>{softplus, logistic}));
        return out;
    }();
    return registry;
}

ActivationPtr activation_by_name(const std::string& name) {
    for (const auto& act : builtins())
        if (act->name() == name)
            return act;
    throw std::invalid_argument("unknown activation '" + name + "'");
}

std::vector<double> certification_samples(const RiccatiActivation& act, int count) {
    const Interval& iv = act.analytic_interval();
    double a = std::max(iv.lo, -5.0);
    double b = std::min(iv.hi, 5.0);
    if (!(a < b))
        throw std::invalid_argument("activation " + act.name() + ": interval does not meet [-5, 5]");
    const double inset = 0.01 * (b - a);
    if (a == iv.lo)
        a += inset;
    if (b == iv.hi)
        b -= inset;
    std::vector<double> out(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i)
        out[i] = count == 1 ? 0.5 * (a + b) : a + (b - a) * i / (count - 1);
    return out;
}

double riccati_residual(const RiccatiActivation& act, std::span<const double> samples) {
    const auto& c = act.coefficients();
    double worst = 0.0;
    for (double t : samples) {
        if (!act.analytic_interval().contains(t))
            throw DomainError("riccati_residual: sample " + std::to_string(t) + " outside analytic interval");
        const double lhs = central_difference(act, t);
        const double rhs = c.rhs(act.zeta(t));
        worst = std::max(worst, std::abs(lhs - rhs) / std::max(1.0, std::abs(rhs)));
    }
    return worst;
}

bool is_nondecreasing(const RiccatiActivation& act, std::span<const double> sorted_samples, double slack) {
    for (std::size_t i = 1; i < sorted_samples.size(); ++i)
        if (act(sorted_samples[i - 1]) > act(sorted_samples[i]) + slack)
            return false;
    return true;
}

ActivationPtr make_custom_activation(const ActivationDeclaration& decl) {
    if (decl.riccati_index != 0)
        throw std::invalid_argument("custom activation " + decl.name + ": only Riccati index 0 is supported");
    if (decl.coefficients.a2 == 0.0)
        throw std::invalid_argument("custom activation " + decl.name + ": a2 must be nonzero");
    if (!decl.analytic_interval.contains(0.0))
        throw std::invalid_argument("custom activation " + decl.name + ": interval must contain 0");
    if (!std::isfinite(decl.sigma0))
        throw std::invalid_argument("custom activation " + decl.name + ": sigma0 must be finite");

    RiccatiSolution solution(decl.coefficients, decl.sigma0);
    if (solution.blows_up_in(decl.analytic_interval))
        throw std::invalid_argument("custom activation " + decl.name + ": solution blows up inside the interval");

    auto act = std::make_shared<const RiccatiActivation>(decl.name, 0, decl.coefficients, decl.analytic_interval,
                                                         std::vector<RiccatiActivation::Evaluator>{solution});
    const auto samples = certification_samples(*act, 1000);
    if (!is_nondecreasing(*act, samples))
        throw std::invalid_argument("custom activation " + decl.name + ": not nondecreasing on its interval");
    const double residual = riccati_residual(*act, certification_samples(*act, 100));
    if (!(residual <= kRiccatiCertificationTol))
        throw std::invalid_argument("custom activation " + decl.name + ": Riccati residual " +
                                    format_double(residual) + " exceeds tolerance");
    return act;
}

} // namespace pfaffnet
