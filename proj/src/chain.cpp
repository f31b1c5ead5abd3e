#include "pfaffnet/chain.hpp"

#include "pfaffnet/errors.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace pfaffnet {

std::string ChainFunction::label() const {
    const std::string lk = "(" + std::to_string(layer) + ")_" + std::to_string(neuron);
    if (kind == ChainKind::Affine)
        return "s^" + lk;
    return "u^" + lk + "," + std::to_string(order);
}

int chain_length(const Architecture& arch, int r) {
    return (r + 2) * arch.total_neurons();
}

int chain_position(const Architecture& arch, int r, int layer, int neuron, int q) {
    if (layer < 1 || layer > arch.depth() || neuron < 1 || neuron > arch.width(layer))
        throw std::out_of_range("neuron (" + std::to_string(layer) + ", " + std::to_string(neuron) +
                                ") outside the architecture");
    if (q > r)
        throw std::out_of_range("derivative order above the Riccati index");
    int before = 0;
    for (int l = 1; l < layer; ++l)
        before += arch.width(l);
    before += neuron - 1;
    const int base = (r + 2) * before;
    return q < 0 ? base : base + 1 + (r - q);
}

std::vector<ChainFunction> build_chain(const Architecture& arch, int r) {
    arch.validate();
    if (r < 0)
        throw std::invalid_argument("Riccati index must be >= 0");
    std::vector<ChainFunction> chain;
    chain.reserve(static_cast<std::size_t>(chain_length(arch, r)));
    for (int l = 1; l <= arch.depth(); ++l)
        for (int k = 1; k <= arch.width(l); ++k) {
            chain.push_back({ChainKind::Affine, l, k, 0, static_cast<int>(chain.size())});
            for (int q = r; q >= 0; --q)
                chain.push_back({ChainKind::JetDeriv, l, k, q, static_cast<int>(chain.size())});
        }
    return chain;
}

std::vector<ChainFunction> build_chain(const NetworkSpec& net) {
    return build_chain(net.architecture(), net.activation().riccati_index());
}

std::vector<double> chain_values(const NetworkSpec& net, std::span<const double> x) {
    const auto trace = forward(net, x);
    const auto& arch = net.architecture();
    const int r = net.activation().riccati_index();
    std::vector<double> f(static_cast<std::size_t>(chain_length(arch, r)));
    std::vector<double> derivs(static_cast<std::size_t>(r) + 1);
    std::size_t i = 0;
    for (int l = 1; l <= arch.depth(); ++l)
        for (int k = 0; k < arch.width(l); ++k) {
            const double s = trace.s[l - 1][k];
            net.activation().derivatives(s, 0, derivs);
            f[i++] = s;
            for (int q = r; q >= 0; --q)
                f[i++] = derivs[q];
        }
    return f;
}

ChainCertificates derive_certificates(const NetworkSpec& net) {
    const auto& arch = net.architecture();
    const auto& act = net.activation();
    const int r = act.riccati_index();
    const auto& c = act.coefficients();
    const int d = arch.d;

    ChainCertificates certs;
    certs.arch = arch;
    certs.r = r;
    certs.chain = build_chain(arch, r);
    const std::size_t nv = certs.nvars();
    certs.poly.assign(certs.chain.size(), std::vector<SparsePoly>(static_cast<std::size_t>(d), SparsePoly(nv)));

    auto y = [&](int pos) { return SparsePoly::variable(nv, static_cast<std::size_t>(d + pos)); };

    for (int l = 1; l <= arch.depth(); ++l) {
        const auto& W = net.weight(l);
        for (int k = 1; k <= arch.width(l); ++k) {
            const int s_pos = chain_position(arch, r, l, k);
            const SparsePoly yr = y(chain_position(arch, r, l, k, r));
            SparsePoly riccati = SparsePoly::constant(nv, c.a0);
            riccati += c.a1 * yr;
            riccati += c.a2 * (yr * yr);

            for (int p = 0; p < d; ++p) {
                // d_p s^(l)_k: W^(1)_{kp} in layer 1, else sum_m W_km d_p u^(l-1)_{m,0}
                SparsePoly ds(nv);
                if (l == 1) {
                    ds = SparsePoly::constant(nv, W(k - 1, p));
                } else {
                    for (int m = 1; m <= arch.width(l - 1); ++m) {
                        const double w = W(k - 1, m - 1);
                        if (w != 0.0)
                            ds += w * certs.poly[chain_position(arch, r, l - 1, m, 0)][p];
                    }
                }
                certs.poly[s_pos][p] = ds;
                certs.poly[chain_position(arch, r, l, k, r)][p] = riccati * ds;
                for (int q = r - 1; q >= 0; --q)
                    certs.poly[chain_position(arch, r, l, k, q)][p] = y(chain_position(arch, r, l, k, q + 1)) * ds;
            }
        }
    }
    return certs;
}

SparsePoly output_polynomial(const NetworkSpec& net) {
    const auto& arch = net.architecture();
    const int r = net.activation().riccati_index();
    const std::size_t nv = static_cast<std::size_t>(arch.d + chain_length(arch, r));
    SparsePoly out = SparsePoly::constant(nv, net.head_offset());
    const int L = arch.depth();
    for (int k = 1; k <= arch.width(L); ++k)
        out += net.head()[k - 1] *
               SparsePoly::variable(nv, static_cast<std::size_t>(arch.d + chain_position(arch, r, L, k, 0)));
    return out;
}

SparsePoly differentiate_over_chain(const SparsePoly& Q, const ChainCertificates& certs, int p) {
    if (Q.nvars() != certs.nvars())
        throw ShapeError("polynomial is not over the certificate chain");
    const std::size_t d = static_cast<std::size_t>(certs.arch.d);
    SparsePoly out = Q.derivative(static_cast<std::size_t>(p));
    for (std::size_t i = 0; i < certs.chain.size(); ++i) {
        SparsePoly dQ = Q.derivative(d + i);
        if (!dQ.is_zero())
            out += dQ * certs.poly[i][p];
    }
    return out;
}

ChainVerifyReport verify_chain(const NetworkSpec& net, const ChainCertificates& certs,
                               std::span<const std::vector<double>> points, double tol) {
    const auto& arch = net.architecture();
    const int r = net.activation().riccati_index();
    if (!(certs.arch == arch) || certs.r != r)
        throw ShapeError("certificates were derived for a different architecture");
    const int d = arch.d;

    ChainVerifyReport report;
    report.points = points.size();
    std::vector<double> vars(certs.nvars());
    for (const auto& x : points) {
        const auto jets = jet_forward_trace(net, x, 1);
        const auto f = chain_values(net, x);
        std::copy(x.begin(), x.end(), vars.begin());
        std::copy(f.begin(), f.end(), vars.begin() + d);

        for (int l = 1; l <= arch.depth(); ++l)
            for (int k = 1; k <= arch.width(l); ++k) {
                const Jet& s = jets.s[l - 1][k - 1];
                std::vector<std::pair<int, Jet>> entries;
                entries.emplace_back(chain_position(arch, r, l, k), s);
                for (int q = r; q >= 0; --q)
                    entries.emplace_back(chain_position(arch, r, l, k, q), activation_jet(net.activation(), s, q));
                for (const auto& [pos, jet] : entries)
                    for (int p = 0; p < d; ++p) {
                        const double exact = jet.gradient(p);
                        const double cert = certs.poly[pos][p].evaluate(vars);
                        const double res = std::abs(exact - cert) / (1.0 + std::abs(exact));
                        const bool worse =
                            report.worst_index < 0 || std::isnan(res) || res > report.max_residual;
                        if (worse && !std::isnan(report.max_residual)) {
                            report.max_residual = res;
                            report.worst_index = pos;
                            report.worst_coordinate = p;
                            report.worst_point = x;
                        }
                    }
            }
    }
    report.ok = report.max_residual <= tol;
    return report;
}

std::vector<int> certificate_degrees_by_layer(const ChainCertificates& certs) {
    std::vector<int> deg(static_cast<std::size_t>(certs.arch.depth()), -1);
    for (std::size_t i = 0; i < certs.chain.size(); ++i) {
        const int l = certs.chain[i].layer;
        for (const auto& P : certs.poly[i])
            deg[l - 1] = std::max(deg[l - 1], P.total_degree());
    }
    return deg;
}

bool certificates_are_triangular(const ChainCertificates& certs) {
    const auto d = static_cast<std::ptrdiff_t>(certs.arch.d);
    for (std::size_t i = 0; i < certs.chain.size(); ++i)
        for (const auto& P : certs.poly[i])
            if (P.highest_variable() > d + static_cast<std::ptrdiff_t>(i))
                return false;
    return true;
}

void PfaffianFormat::validate() const {
    if (d < 1 || R < 0 || alpha < 1 || beta < 0)
        throw std::invalid_argument("invalid Pfaffian format (" + std::to_string(d) + ", " + std::to_string(R) +
                                    ", " + std::to_string(alpha) + ", " + std::to_string(beta) + ")");
}

PfaffianFormat compute_format(const Architecture& arch, int r) {
    arch.validate();
    if (r < 0)
        throw std::invalid_argument("Riccati index must be >= 0");
    return {arch.d, chain_length(arch, r), 1 + 2 * arch.depth(), 1};
}

namespace {

void require_common_chain(const PfaffianFormat& a, const PfaffianFormat& b) {
    a.validate();
    b.validate();
    if (a.d != b.d || a.R != b.R || a.alpha != b.alpha)
        throw std::invalid_argument("formats are over different chains");
}

} // namespace

PfaffianFormat format_sum(const PfaffianFormat& a, const PfaffianFormat& b) {
    require_common_chain(a, b);
    return {a.d, a.R, a.alpha, std::max(a.beta, b.beta)};
}

PfaffianFormat format_product(const PfaffianFormat& a, const PfaffianFormat& b) {
    require_common_chain(a, b);
    return {a.d, a.R, a.alpha, a.beta + b.beta};
}

PfaffianFormat format_power(const PfaffianFormat& a, int e) {
    a.validate();
    if (e < 0)
        throw std::invalid_argument("power exponent must be >= 0");
    return {a.d, a.R, a.alpha, e * a.beta};
}

PfaffianFormat format_derivative(const PfaffianFormat& a) {
    a.validate();
    // dQ/dx_p has degree <= beta - 1; each dQ/dy_i * P_{i,p} has degree <= beta - 1 + alpha.
    return {a.d, a.R, a.alpha, a.beta - 1 + a.alpha};
}

PfaffianFormat format_bracket_coeff(const PfaffianFormat& x, const PfaffianFormat& y) {
    require_common_chain(x, y);
    // X_b * d_b Y_a and Y_b * d_b X_a both have degree bX + bY - 1 + alpha.
    return {x.d, x.R, x.alpha, x.beta + y.beta + x.alpha - 1};
}

PfaffianFormat format_minor(const PfaffianFormat& entry, int size) {
    entry.validate();
    if (size < 1)
        throw std::invalid_argument("minor size must be >= 1");
    // every term of the Leibniz expansion is a product of `size` entries
    return {entry.d, entry.R, entry.alpha, size * entry.beta};
}

PfaffianFormat format_combine(FormatOp op, std::span<const PfaffianFormat> inputs, int param) {
    auto need = [&](std::size_t n) {
        if (inputs.size() != n)
            throw std::invalid_argument("format_combine: expected " + std::to_string(n) + " inputs");
    };
    switch (op) {
    case FormatOp::Sum:
        need(2);
        return format_sum(inputs[0], inputs[1]);
    case FormatOp::Product:
        need(2);
        return format_product(inputs[0], inputs[1]);
    case FormatOp::Power:
        need(1);
        return format_power(inputs[0], param);
    case FormatOp::Derivative:
        need(1);
        return format_derivative(inputs[0]);
    case FormatOp::BracketCoeff:
        need(2);
        return format_bracket_coeff(inputs[0], inputs[1]);
    case FormatOp::Minor:
        need(1);
        return format_minor(inputs[0], param);
    }
    throw std::invalid_argument("unknown format operation");
}

} // namespace pfaffnet
