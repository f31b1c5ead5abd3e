#include "pfaffnet/io.hpp"

#include "pfaffnet/errors.hpp"

#include <cmath>
#include <fstream>
#include <limits>

namespace pfaffnet {

namespace {

const json& field(const json& j, const char* key) {
    if (!j.is_object() || !j.contains(key))
        throw SchemaError(std::string("missing field '") + key + "'");
    return j.at(key);
}

double finite_number(const json& j, const std::string& what) {
    if (!j.is_number())
        throw SchemaError(what + " must be a number");
    const double v = j.get<double>();
    if (!std::isfinite(v))
        throw SchemaError(what + " must be finite");
    return v;
}

int positive_int(const json& j, const std::string& what) {
    if (!j.is_number_integer() || j.get<long long>() < 1)
        throw SchemaError(what + " must be a positive integer");
    return j.get<int>();
}

std::vector<double> number_list(const json& j, std::size_t expected, const std::string& what) {
    if (!j.is_array())
        throw SchemaError(what + " must be an array");
    if (j.size() != expected)
        throw SchemaError(what + " has " + std::to_string(j.size()) + " entries, expected " + std::to_string(expected));
    std::vector<double> out;
    out.reserve(expected);
    for (std::size_t i = 0; i < j.size(); ++i)
        out.push_back(finite_number(j[i], what + "[" + std::to_string(i) + "]"));
    return out;
}

double interval_end(const json& j, double infinite) {
    if (j.is_null())
        return infinite;
    if (!j.is_number())
        throw SchemaError("interval ends must be numbers or null");
    return j.get<double>();
}

} // namespace

ActivationPtr activation_from_json(const json& j) {
    if (j.is_string()) {
        try {
            return activation_by_name(j.get<std::string>());
        } catch (const std::invalid_argument& e) {
            throw SchemaError(e.what());
        }
    }
    if (!j.is_object())
        throw SchemaError("activation must be a name or a declaration object");
    ActivationDeclaration decl;
    decl.name = field(j, "name").get<std::string>();
    decl.riccati_index = j.value("r", 0);
    decl.coefficients = {finite_number(field(j, "a0"), "a0"), finite_number(field(j, "a1"), "a1"),
                         finite_number(field(j, "a2"), "a2")};
    decl.sigma0 = finite_number(field(j, "sigma0"), "sigma0");
    const auto& iv = field(j, "interval");
    if (!iv.is_array() || iv.size() != 2)
        throw SchemaError("interval must be [lo, hi]");
    const double inf = std::numeric_limits<double>::infinity();
    decl.analytic_interval = {interval_end(iv[0], -inf), interval_end(iv[1], inf)};
    try {
        return make_custom_activation(decl);
    } catch (const std::invalid_argument& e) {
        throw SchemaError(std::string("activation '") + decl.name + "': " + e.what());
    }
}

json activation_to_json(const RiccatiActivation& act) {
    for (const auto& b : builtins())
        if (b->name() == act.name())
            return act.name();
    const auto& iv = act.analytic_interval();
    json out;
    out["name"] = act.name();
    out["r"] = act.riccati_index();
    out["a0"] = act.coefficients().a0;
    out["a1"] = act.coefficients().a1;
    out["a2"] = act.coefficients().a2;
    out["sigma0"] = act(0.0);
    out["interval"] = json::array({std::isfinite(iv.lo) ? json(iv.lo) : json(nullptr),
                                   std::isfinite(iv.hi) ? json(iv.hi) : json(nullptr)});
    return out;
}

NetworkSpec network_from_json(const json& j) {
    Architecture arch;
    arch.d = positive_int(field(j, "d"), "d");
    const int L = positive_int(field(j, "L"), "L");
    const auto& widths = field(j, "widths");
    if (!widths.is_array() || widths.size() != static_cast<std::size_t>(L))
        throw SchemaError("widths must list L entries");
    for (std::size_t i = 0; i < widths.size(); ++i)
        arch.widths.push_back(positive_int(widths[i], "widths[" + std::to_string(i) + "]"));

    const auto act = activation_from_json(field(j, "activation"));
    const auto& W = field(j, "weights");
    const auto& B = field(j, "biases");
    if (!W.is_array() || W.size() != static_cast<std::size_t>(L))
        throw SchemaError("weights must list L matrices");
    if (!B.is_array() || B.size() != static_cast<std::size_t>(L))
        throw SchemaError("biases must list L vectors");

    std::vector<Eigen::MatrixXd> weights;
    std::vector<Eigen::VectorXd> biases;
    for (int l = 1; l <= L; ++l) {
        const int rows = arch.width(l);
        const int cols = arch.width(l - 1);
        const std::string tag = "layer " + std::to_string(l);
        const auto flat = number_list(W[static_cast<std::size_t>(l - 1)],
                                      static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols), tag + " weights");
        Eigen::MatrixXd m(rows, cols);
        for (int r = 0; r < rows; ++r)
            for (int c = 0; c < cols; ++c)
                m(r, c) = flat[static_cast<std::size_t>(r * cols + c)];
        weights.push_back(std::move(m));
        const auto b = number_list(B[static_cast<std::size_t>(l - 1)], static_cast<std::size_t>(rows), tag + " biases");
        biases.push_back(Eigen::Map<const Eigen::VectorXd>(b.data(), rows));
    }
    const auto& head = field(j, "head");
    const double c0 = finite_number(field(head, "c0"), "head.c0");
    const auto c = number_list(field(head, "c"), static_cast<std::size_t>(arch.widths.back()), "head.c");
    return NetworkSpec(arch, std::move(weights), std::move(biases), c0,
                       Eigen::Map<const Eigen::VectorXd>(c.data(), static_cast<Eigen::Index>(c.size())), act);
}

json network_to_json(const NetworkSpec& net) {
    const auto& arch = net.architecture();
    json out;
    out["d"] = arch.d;
    out["L"] = arch.depth();
    out["widths"] = arch.widths;
    out["activation"] = activation_to_json(net.activation());
    json W = json::array(), B = json::array();
    for (int l = 1; l <= arch.depth(); ++l) {
        const auto& m = net.weight(l);
        json flat = json::array();
        for (Eigen::Index r = 0; r < m.rows(); ++r)
            for (Eigen::Index c = 0; c < m.cols(); ++c)
                flat.push_back(m(r, c));
        W.push_back(std::move(flat));
        B.push_back(std::vector<double>(net.bias(l).data(), net.bias(l).data() + net.bias(l).size()));
    }
    out["weights"] = std::move(W);
    out["biases"] = std::move(B);
    out["head"] = {{"c0", net.head_offset()},
                   {"c", std::vector<double>(net.head().data(), net.head().data() + net.head().size())}};
    return out;
}

SparsePoly polynomial_from_json(const json& j, std::size_t nvars) {
    if (!j.is_array())
        throw SchemaError("polynomial must be a list of [exponents, coefficient] pairs");
    SparsePoly p(nvars);
    for (const auto& term : j) {
        if (!term.is_array() || term.size() != 2 || !term[0].is_array())
            throw SchemaError("polynomial term must be [exponents, coefficient]");
        if (term[0].size() != nvars)
            throw SchemaError("polynomial exponent vector must have " + std::to_string(nvars) + " entries");
        SparsePoly::Exponents e;
        for (const auto& x : term[0]) {
            if (!x.is_number_integer() || x.get<long long>() < 0 || x.get<long long>() > 65535)
                throw SchemaError("exponents must be nonnegative integers");
            e.push_back(x.get<std::uint16_t>());
        }
        p.add_term(e, finite_number(term[1], "polynomial coefficient"));
    }
    return p;
}

json polynomial_to_json(const SparsePoly& p) {
    json out = json::array();
    for (const auto& [e, c] : p.terms())
        out.push_back(json::array({e, c}));
    return out;
}

json certificates_to_json(const ChainCertificates& certs) {
    json out;
    out["d"] = certs.arch.d;
    out["widths"] = certs.arch.widths;
    out["r"] = certs.r;
    out["R"] = certs.chain.size();
    out["variables"] = "x_1..x_d then y_1..y_R";
    json chain = json::array();
    for (const auto& f : certs.chain) {
        json e;
        e["i"] = f.index + 1;
        e["kind"] = f.kind == ChainKind::Affine ? "affine" : "jet";
        e["layer"] = f.layer;
        e["neuron"] = f.neuron;
        if (f.kind == ChainKind::JetDeriv)
            e["q"] = f.order;
        e["label"] = f.label();
        chain.push_back(std::move(e));
    }
    out["chain"] = std::move(chain);
    json polys = json::array();
    for (std::size_t i = 0; i < certs.poly.size(); ++i)
        for (std::size_t p = 0; p < certs.poly[i].size(); ++p)
            polys.push_back({{"i", i + 1}, {"p", p + 1}, {"terms", polynomial_to_json(certs.poly[i][p])}});
    out["certificates"] = std::move(polys);
    return out;
}

VectorFieldFamily family_from_json(const json& j) {
    const int d = positive_int(field(j, "d"), "d");
    const int m = positive_int(field(j, "m"), "m");
    const auto& rows = field(j, "components");
    if (!rows.is_array() || rows.size() != static_cast<std::size_t>(m))
        throw SchemaError("components must list m rows");
    std::vector<ComponentProvider> comps;
    for (const auto& row : rows) {
        if (!row.is_array() || row.size() != static_cast<std::size_t>(d))
            throw SchemaError("each component row must list d entries");
        for (const auto& entry : row) {
            if (entry.is_object() && entry.contains("polynomial"))
                comps.emplace_back(polynomial_from_json(entry.at("polynomial"), static_cast<std::size_t>(d)));
            else
                comps.emplace_back(network_from_json(entry));
        }
    }
    try {
        return VectorFieldFamily(d, m, std::move(comps));
    } catch (const ShapeError& e) {
        throw SchemaError(e.what());
    }
}

json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw SchemaError("cannot open '" + path + "'");
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw SchemaError("'" + path + "': " + e.what());
    }
}

} // namespace pfaffnet
