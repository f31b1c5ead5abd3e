#pragma once

#include "pfaffnet/network.hpp"
#include "pfaffnet/polynomial.hpp"

#include <span>
#include <string>
#include <vector>

namespace pfaffnet {

// ---------------------------------------------------------------------------
// Chain layout
//
// For every neuron (l, k) the block  s^(l)_k, u^(l)_{k,r}, ..., u^(l)_{k,0}
// with u^(l)_{k,q} = sigma^(q)(s^(l)_k). Blocks are concatenated layer by
// layer, neurons in increasing order, giving R = (r+2) * sum_l n_l entries.
// Every entry's partial derivatives are polynomials in x and the entries at
// or before it.
// ---------------------------------------------------------------------------

enum class ChainKind { Affine, JetDeriv };

struct ChainFunction {
    ChainKind kind = ChainKind::Affine;
    int layer = 1;  ///< 1-based
    int neuron = 1; ///< 1-based
    int order = 0;  ///< derivative order q for JetDeriv, 0 for Affine
    int index = 0;  ///< 0-based position in the chain

    std::string label() const;
};

/// Chain length (r+2) * sum_l n_l.
int chain_length(const Architecture& arch, int r);

/// Position of s^(l)_k (q < 0) or u^(l)_{k,q} (q >= 0) in the chain.
int chain_position(const Architecture& arch, int r, int layer, int neuron, int q = -1);

std::vector<ChainFunction> build_chain(const NetworkSpec& net);
std::vector<ChainFunction> build_chain(const Architecture& arch, int r);

/// f_1(x), ..., f_R(x) from a forward pass and the activation derivatives.
std::vector<double> chain_values(const NetworkSpec& net, std::span<const double> x);

/// P_{i,p} for every chain entry i and input coordinate p. Polynomials are over
/// d + R variables: index p < d is x_{p+1}, index d + j is y_{j+1} = f_{j+1}.
struct ChainCertificates {
    Architecture arch;
    int r = 0;
    std::vector<ChainFunction> chain;
    std::vector<std::vector<SparsePoly>> poly; ///< poly[i][p]

    std::size_t nvars() const noexcept { return static_cast<std::size_t>(arch.d) + chain.size(); }
    const SparsePoly& at(int i, int p) const { return poly.at(i).at(p); }
    SparsePoly& at(int i, int p) { return poly.at(i).at(p); }
};

/// Derives explicit certificates by the chain rule through the layers, using
/// the Riccati ODE for the derivative of u_{k,r}. Derivatives of affine inputs
/// are expanded once per (l, k, p) and reused.
ChainCertificates derive_certificates(const NetworkSpec& net);

/// The output as a polynomial over the chain: c0 + sum_k c_k y(u^(L)_{k,0}).
SparsePoly output_polynomial(const NetworkSpec& net);

/// d_p of G = Q(x, f) written over the same chain:
///   dQ/dx_p + sum_i dQ/dy_i * P_{i,p}.
SparsePoly differentiate_over_chain(const SparsePoly& Q, const ChainCertificates& certs, int p);

struct ChainVerifyReport {
    double max_residual = 0.0;
    int worst_index = -1;
    int worst_coordinate = -1;
    std::vector<double> worst_point;
    std::size_t points = 0;
    bool ok = true;
};

/// Compares d_p f_i from jet propagation with P_{i,p}(x, f(x)) at every point;
/// residual = |jet - certificate| / (1 + |jet|). ok iff max residual <= tol.
ChainVerifyReport verify_chain(const NetworkSpec& net, const ChainCertificates& certs,
                               std::span<const std::vector<double>> points, double tol);

/// Largest certificate degree among entries of each layer (index l-1).
std::vector<int> certificate_degrees_by_layer(const ChainCertificates& certs);

/// True if each P_{i,p} references only y_j with j <= i.
bool certificates_are_triangular(const ChainCertificates& certs);

// ---------------------------------------------------------------------------
// Formats and the format calculus
// ---------------------------------------------------------------------------

struct PfaffianFormat {
    int d = 1;
    int R = 0;
    int alpha = 1;
    int beta = 0;

    /// Throws std::invalid_argument unless alpha >= 1, beta >= 0, R >= 0, d >= 1.
    void validate() const;
    friend bool operator==(const PfaffianFormat&, const PfaffianFormat&) = default;
};

/// (d, (r+2) sum n_l, 1 + 2L, 1).
PfaffianFormat compute_format(const Architecture& arch, int r);

/// Degree bound D_l = 1 + 2l for certificates of layer-l entries.
inline int layer_degree_bound(int layer) { return 1 + 2 * layer; }

enum class FormatOp { Sum, Product, Power, Derivative, BracketCoeff, Minor };

/// Degree rules over a shared chain (same d, R, alpha):
///   Sum          beta = max(b1, b2)
///   Product      beta = b1 + b2
///   Power e      beta = e * b1
///   Derivative   beta = b - 1 + alpha        (no chain extension needed)
///   BracketCoeff beta = bX + bY + alpha - 1  (coefficient of [X, Y])
///   Minor n      beta = n * b_entry          (n x n determinant)
/// `param` is e for Power and n for Minor. Throws std::invalid_argument for
/// mismatched chains or wrong arity.
PfaffianFormat format_combine(FormatOp op, std::span<const PfaffianFormat> inputs, int param = 0);

PfaffianFormat format_sum(const PfaffianFormat& a, const PfaffianFormat& b);
PfaffianFormat format_product(const PfaffianFormat& a, const PfaffianFormat& b);
PfaffianFormat format_power(const PfaffianFormat& a, int e);
PfaffianFormat format_derivative(const PfaffianFormat& a);
PfaffianFormat format_bracket_coeff(const PfaffianFormat& x, const PfaffianFormat& y);
PfaffianFormat format_minor(const PfaffianFormat& entry, int size);

} // namespace pfaffnet
