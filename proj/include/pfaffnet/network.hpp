#pragma once

#include "pfaffnet/activations.hpp"
#include "pfaffnet/geometry.hpp"
#include "pfaffnet/jet.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <span>
#include <vector>

namespace pfaffnet {

/// Input dimension and hidden widths n_1..n_L.
struct Architecture {
    int d = 1;
    std::vector<int> widths;

    int depth() const noexcept { return static_cast<int>(widths.size()); }
    int total_neurons() const noexcept;
    /// Width of layer l for l = 0..L, with layer 0 the input.
    int width(int layer) const { return layer == 0 ? d : widths.at(layer - 1); }
    /// Throws ShapeError unless d >= 1, L >= 1 and every width >= 1.
    void validate() const;

    friend bool operator==(const Architecture&, const Architecture&) = default;
};

/// Feedforward network h^(l) = sigma(W^(l) h^(l-1) + b^(l)), F = c0 + c . h^(L).
/// Immutable after construction.
class NetworkSpec {
public:
    NetworkSpec(Architecture arch, std::vector<Eigen::MatrixXd> weights, std::vector<Eigen::VectorXd> biases,
                double c0, Eigen::VectorXd c, ActivationPtr activation);

    const Architecture& architecture() const noexcept { return arch_; }
    int input_dim() const noexcept { return arch_.d; }
    int depth() const noexcept { return arch_.depth(); }
    /// W^(l) for l = 1..L.
    const Eigen::MatrixXd& weight(int layer) const { return weights_.at(layer - 1); }
    const Eigen::VectorXd& bias(int layer) const { return biases_.at(layer - 1); }
    double head_offset() const noexcept { return c0_; }
    const Eigen::VectorXd& head() const noexcept { return c_; }
    const RiccatiActivation& activation() const noexcept { return *activation_; }
    const ActivationPtr& activation_ptr() const noexcept { return activation_; }

    /// Same network with a different output head.
    NetworkSpec with_head(double c0, Eigen::VectorXd c) const;

    /// Bitwise comparison of architecture, parameters and activation name.
    bool identical_to(const NetworkSpec& other) const;

private:
    Architecture arch_;
    std::vector<Eigen::MatrixXd> weights_;
    std::vector<Eigen::VectorXd> biases_;
    double c0_;
    Eigen::VectorXd c_;
    ActivationPtr activation_;
};

/// Affine inputs s^(l) and activations h^(l) for l = 1..L (index l-1), plus F.
struct LayerTrace {
    std::vector<Eigen::VectorXd> s;
    std::vector<Eigen::VectorXd> h;
    double F = 0.0;
};

/// Forward pass. Throws ShapeError if x has the wrong length and DomainError if
/// an affine input leaves the activation's analytic interval.
LayerTrace forward(const NetworkSpec& net, std::span<const double> x);

/// F(x) only.
double evaluate(const NetworkSpec& net, std::span<const double> x);

/// Jets of every affine input s^(l)_k and of F.
struct NetworkJets {
    std::vector<std::vector<Jet>> s; // s[l-1][k-1]
    Jet F;
};

/// Partial derivatives of F at x up to total order `order`, by truncated
/// Taylor propagation. The order-0 coefficient equals forward(net, x).F exactly.
Jet jet_forward(const NetworkSpec& net, std::span<const double> x, int order);

/// As jet_forward, also returning the jets of all affine inputs.
NetworkJets jet_forward_trace(const NetworkSpec& net, std::span<const double> x, int order);

/// Jet of u = sigma^(q)(s) given the jet of s.
Jet activation_jet(const RiccatiActivation& act, const Jet& s, int q);

/// Weights, biases, c and c0 drawn i.i.d. uniform on [-scale, scale] from a
/// 64-bit Mersenne twister seeded with `seed`. Draw order: W^(1) row-major,
/// b^(1), ..., W^(L), b^(L), c, c0. Portable across standard libraries.
NetworkSpec sample_network(const Architecture& arch, ActivationPtr activation, std::uint64_t seed, double scale);

struct AnalyticityReport {
    bool ok = true;
    /// Smallest distance from any affine input to the interval boundary.
    double worst_margin = 0.0;
    std::size_t samples = 0;
};

/// Evaluates affine inputs at `samples` Halton points of the box (rotated by a
/// seeded shift) and reports the closest approach to the interval boundary.
AnalyticityReport analyticity_check(const NetworkSpec& net, const Box& box, std::size_t samples, std::uint64_t seed);

/// Low-discrepancy points in the box: Halton sequence with a Cranley-Patterson
/// rotation drawn from `seed`.
std::vector<std::vector<double>> halton_points(const Box& box, std::size_t count, std::uint64_t seed);

/// Uniform double in [0, 1) from the top 53 bits of a 64-bit draw.
double unit_uniform(std::uint64_t bits) noexcept;

} // namespace pfaffnet
