#include "pfaffnet/network.hpp"

#include "pfaffnet/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>
#include <random>
#include <string>

namespace pfaffnet {

int Architecture::total_neurons() const noexcept {
    int n = 0;
    for (int w : widths)
        n += w;
    return n;
}

void Architecture::validate() const {
    if (d < 1)
        throw ShapeError("input dimension must be >= 1");
    if (widths.empty())
        throw ShapeError("depth must be >= 1");
    for (std::size_t l = 0; l < widths.size(); ++l)
        if (widths[l] < 1)
            throw ShapeError("width of layer " + std::to_string(l + 1) + " must be >= 1");
}

NetworkSpec::NetworkSpec(Architecture arch, std::vector<Eigen::MatrixXd> weights, std::vector<Eigen::VectorXd> biases,
                         double c0, Eigen::VectorXd c, ActivationPtr activation)
    : arch_(std::move(arch)), weights_(std::move(weights)), biases_(std::move(biases)), c0_(c0), c_(std::move(c)),
      activation_(std::move(activation)) {
    arch_.validate();
    if (!activation_)
        throw std::invalid_argument("network requires an activation");
    const int L = arch_.depth();
    if (static_cast<int>(weights_.size()) != L || static_cast<int>(biases_.size()) != L)
        throw ShapeError("expected " + std::to_string(L) + " weight matrices and bias vectors");
    for (int l = 1; l <= L; ++l) {
        const auto& W = weights_[l - 1];
        if (W.rows() != arch_.width(l) || W.cols() != arch_.width(l - 1))
            throw ShapeError("W^(" + std::to_string(l) + ") must be " + std::to_string(arch_.width(l)) + "x" +
                             std::to_string(arch_.width(l - 1)));
        if (biases_[l - 1].size() != arch_.width(l))
            throw ShapeError("b^(" + std::to_string(l) + ") must have length " + std::to_string(arch_.width(l)));
        if (!W.allFinite() || !biases_[l - 1].allFinite())
            throw std::invalid_argument("non-finite parameter in layer " + std::to_string(l));
    }
    if (c_.size() != arch_.widths.back())
        throw ShapeError("head vector must have length n_L");
    if (!c_.allFinite() || !std::isfinite(c0_))
        throw std::invalid_argument("non-finite head parameter");
}

NetworkSpec NetworkSpec::with_head(double c0, Eigen::VectorXd c) const {
    return NetworkSpec(arch_, weights_, biases_, c0, std::move(c), activation_);
}

namespace {

bool same_bits(const double* a, const double* b, Eigen::Index n) {
    return std::memcmp(a, b, static_cast<std::size_t>(n) * sizeof(double)) == 0;
}

} // namespace

bool NetworkSpec::identical_to(const NetworkSpec& other) const {
    if (!(arch_ == other.arch_) || activation_->name() != other.activation_->name())
        return false;
    for (std::size_t l = 0; l < weights_.size(); ++l) {
        if (!same_bits(weights_[l].data(), other.weights_[l].data(), weights_[l].size()))
            return false;
        if (!same_bits(biases_[l].data(), other.biases_[l].data(), biases_[l].size()))
            return false;
    }
    return same_bits(&c0_, &other.c0_, 1) && same_bits(c_.data(), other.c_.data(), c_.size());
}

LayerTrace forward(const NetworkSpec& net, std::span<const double> x) {
    if (static_cast<int>(x.size()) != net.input_dim())
        throw ShapeError("input has length " + std::to_string(x.size()) + ", expected " +
                         std::to_string(net.input_dim()));
    const auto& act = net.activation();
    LayerTrace trace;
    const int L = net.depth();
    trace.s.reserve(L);
    trace.h.reserve(L);
    Eigen::VectorXd prev = Eigen::Map<const Eigen::VectorXd>(x.data(), static_cast<Eigen::Index>(x.size()));
    for (int l = 1; l <= L; ++l) {
        const auto& W = net.weight(l);
        const auto& b = net.bias(l);
        Eigen::VectorXd s(W.rows());
        Eigen::VectorXd h(W.rows());
        for (Eigen::Index k = 0; k < W.rows(); ++k) {
            double acc = 0.0;
            for (Eigen::Index m = 0; m < W.cols(); ++m)
                acc += W(k, m) * prev[m];
            s[k] = acc + b[k];
            h[k] = act.derivative(s[k], 0);
        }
        trace.s.push_back(s);
        trace.h.push_back(h);
        prev = std::move(h);
    }
    double acc = 0.0;
    for (Eigen::Index k = 0; k < prev.size(); ++k)
        acc += net.head()[k] * prev[k];
    trace.F = net.head_offset() + acc;
    return trace;
}

double evaluate(const NetworkSpec& net, std::span<const double> x) {
    return forward(net, x).F;
}

Jet activation_jet(const RiccatiActivation& act, const Jet& s, int q) {
    std::vector<double> outer(static_cast<std::size_t>(s.order()) + 1);
    act.derivatives(s.value(), q, outer);
    return s.compose(outer);
}

NetworkJets jet_forward_trace(const NetworkSpec& net, std::span<const double> x, int order) {
    if (static_cast<int>(x.size()) != net.input_dim())
        throw ShapeError("input has length " + std::to_string(x.size()) + ", expected " +
                         std::to_string(net.input_dim()));
    if (order < 0)
        throw std::invalid_argument("jet order must be >= 0");
    const auto space = JetSpace::get(net.input_dim(), order);
    const auto& act = net.activation();

    std::vector<Jet> prev;
    prev.reserve(x.size());
    for (int p = 0; p < net.input_dim(); ++p)
        prev.push_back(Jet::variable(space, order, p, x[p]));

    NetworkJets out;
    const int L = net.depth();
    out.s.reserve(L);
    for (int l = 1; l <= L; ++l) {
        const auto& W = net.weight(l);
        const auto& b = net.bias(l);
        std::vector<Jet> s_layer;
        std::vector<Jet> h_layer;
        s_layer.reserve(W.rows());
        h_layer.reserve(W.rows());
        for (Eigen::Index k = 0; k < W.rows(); ++k) {
            Jet acc(space, order);
            for (Eigen::Index m = 0; m < W.cols(); ++m)
                acc.add_scaled(W(k, m), prev[m]);
            acc.coefficient(0) += b[k];
            h_layer.push_back(activation_jet(act, acc, 0));
            s_layer.push_back(std::move(acc));
        }
        out.s.push_back(std::move(s_layer));
        prev = std::move(h_layer);
    }
    Jet acc(space, order);
    for (Eigen::Index k = 0; k < net.head().size(); ++k)
        acc.add_scaled(net.head()[k], prev[k]);
    acc.coefficient(0) = net.head_offset() + acc.coefficient(0);
    out.F = std::move(acc);
    return out;
}

Jet jet_forward(const NetworkSpec& net, std::span<const double> x, int order) {
    return jet_forward_trace(net, x, order).F;
}

double unit_uniform(std::uint64_t bits) noexcept {
    return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

NetworkSpec sample_network(const Architecture& arch, ActivationPtr activation, std::uint64_t seed, double scale) {
    arch.validate();
    if (!(scale >= 0.0) || !std::isfinite(scale))
        throw std::invalid_argument("scale must be finite and nonnegative");
    std::mt19937_64 rng(seed);
    auto draw = [&] { return scale * (2.0 * unit_uniform(rng()) - 1.0); };
    std::vector<Eigen::MatrixXd> weights;
    std::vector<Eigen::VectorXd> biases;
    for (int l = 1; l <= arch.depth(); ++l) {
        Eigen::MatrixXd W(arch.width(l), arch.width(l - 1));
        for (Eigen::Index i = 0; i < W.rows(); ++i)
            for (Eigen::Index j = 0; j < W.cols(); ++j)
                W(i, j) = draw();
        Eigen::VectorXd b(arch.width(l));
        for (Eigen::Index i = 0; i < b.size(); ++i)
            b[i] = draw();
        weights.push_back(std::move(W));
        biases.push_back(std::move(b));
    }
    Eigen::VectorXd c(arch.widths.back());
    for (Eigen::Index i = 0; i < c.size(); ++i)
        c[i] = draw();
    const double c0 = draw();
    return NetworkSpec(arch, std::move(weights), std::move(biases), c0, std::move(c), std::move(activation));
}

namespace {

constexpr int kPrimes[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37};

double radical_inverse(std::size_t i, int base) {
    double inv = 1.0 / base;
    double f = inv;
    double r = 0.0;
    while (i > 0) {
        r += f * static_cast<double>(i % base);
        i /= base;
        f *= inv;
    }
    return r;
}

} // namespace

std::vector<std::vector<double>> halton_points(const Box& box, std::size_t count, std::uint64_t seed) {
    box.validate();
    const std::size_t d = box.dim();
    if (d > std::size(kPrimes))
        throw BudgetError("halton_points supports at most 12 dimensions");
    std::mt19937_64 rng(seed);
    std::vector<double> shift(d);
    for (auto& s : shift)
        s = unit_uniform(rng());
    std::vector<std::vector<double>> out(count, std::vector<double>(d));
    for (std::size_t i = 0; i < count; ++i)
        for (std::size_t a = 0; a < d; ++a) {
            double u = radical_inverse(i + 1, kPrimes[a]) + shift[a];
            u -= std::floor(u);
            out[i][a] = box.lo[a] + u * box.width(a);
        }
    return out;
}

AnalyticityReport analyticity_check(const NetworkSpec& net, const Box& box, std::size_t samples, std::uint64_t seed) {
    if (static_cast<int>(box.dim()) != net.input_dim())
        throw ShapeError("box dimension does not match the network input");
    const Interval& iv = net.activation().analytic_interval();
    AnalyticityReport report;
    report.samples = samples;
    report.worst_margin = std::numeric_limits<double>::infinity();
    if (iv.is_real_line())
        return report;

    for (const auto& x : halton_points(box, samples, seed)) {
        // Propagate by hand so that points leaving the interval are measured, not thrown.
        Eigen::VectorXd prev = Eigen::Map<const Eigen::VectorXd>(x.data(), static_cast<Eigen::Index>(x.size()));
        for (int l = 1; l <= net.depth(); ++l) {
            const auto& W = net.weight(l);
            Eigen::VectorXd h(W.rows());
            bool broken = false;
            for (Eigen::Index k = 0; k < W.rows(); ++k) {
                double acc = 0.0;
                for (Eigen::Index m = 0; m < W.cols(); ++m)
                    acc += W(k, m) * prev[m];
                const double s = acc + net.bias(l)[k];
                const double margin = iv.margin(s);
                report.worst_margin = std::min(report.worst_margin, margin);
                if (!(margin > 0.0)) {
                    report.ok = false;
                    broken = true;
                    h[k] = 0.0;
                } else {
                    h[k] = net.activation()(s);
                }
            }
            if (broken)
                break;
            prev = std::move(h);
        }
    }
    return report;
}

} // namespace pfaffnet
