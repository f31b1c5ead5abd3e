#include "pfaffnet/bounds.hpp"
#include "pfaffnet/chain.hpp"
#include "pfaffnet/errors.hpp"
#include "pfaffnet/io.hpp"
#include "pfaffnet/liegeom.hpp"
#include "pfaffnet/network.hpp"
#include "pfaffnet/topology.hpp"

#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace pfaffnet;

namespace {

py::dict bound_dict(const BigBound& b) {
    py::dict out;
    out["formula"] = b.formula;
    out["value"] = py::int_(py::str(b.decimal()));
    out["log10"] = b.log10;
    out["inputs"] = b.inputs_string();
    out["constant_tag"] = b.constant_tag;
    return out;
}

py::dict format_dict(const PfaffianFormat& f) {
    py::dict out;
    out["d"] = f.d;
    out["R"] = f.R;
    out["alpha"] = f.alpha;
    out["beta"] = f.beta;
    return out;
}

Box make_box(const std::vector<double>& lo, const std::vector<double>& hi) {
    if (lo.size() != hi.size())
        throw ShapeError("lo and hi differ in length");
    return Box(lo, hi);
}

py::dict grid_dict(const SignGrid& g) {
    py::dict out;
    out["resolution"] = g.resolution();
    out["flags"] = std::vector<int>(g.flags().begin(), g.flags().end());
    out["flagged"] = g.flagged_count();
    return out;
}

VectorFieldFamily family_by_name(const std::string& name) {
    if (name == "grushin")
        return grushin_family();
    if (name == "heisenberg")
        return heisenberg_family();
    return family_from_json(json::parse(name));
}

// pybind11 holders cannot be shared_ptr<const T>
using PyActivation = std::shared_ptr<RiccatiActivation>;

PyActivation mut(ActivationPtr a) {
    return std::const_pointer_cast<RiccatiActivation>(std::move(a));
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Pfaffian complexity tools for networks with Riccati activations";

    py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
    py::register_exception<SchemaError>(m, "SchemaError", PyExc_ValueError);
    py::register_exception<ShapeError>(m, "ShapeError", PyExc_ValueError);
    py::register_exception<BudgetError>(m, "BudgetError", PyExc_RuntimeError);

    py::class_<RiccatiActivation, PyActivation>(m, "Activation")
        .def_property_readonly("name", &RiccatiActivation::name)
        .def_property_readonly("r", &RiccatiActivation::riccati_index)
        .def_property_readonly("coefficients",
                               [](const RiccatiActivation& a) {
                                   const auto& c = a.coefficients();
                                   return py::make_tuple(c.a0, c.a1, c.a2);
                               })
        .def("__call__", &RiccatiActivation::operator())
        .def("derivative", &RiccatiActivation::derivative, py::arg("t"), py::arg("q"))
        .def("residual", [](const RiccatiActivation& a, const std::vector<double>& t) { return riccati_residual(a, t); })
        .def("with_coefficients",
             [](const RiccatiActivation& a, double a0, double a1, double a2) {
                 return std::make_shared<RiccatiActivation>(a.with_coefficients({a0, a1, a2}));
             })
        .def("__repr__", [](const RiccatiActivation& a) { return "<Activation " + a.name() + ">"; });

    m.def("builtins", [] {
        std::vector<PyActivation> out;
        for (auto& a : builtins())
            out.push_back(mut(a));
        return out;
    });
    m.def("activation", [](const std::string& name) { return mut(activation_by_name(name)); }, py::arg("name"));
    m.def("activation_from_json",
          [](const std::string& text) { return mut(activation_from_json(json::parse(text))); });

    py::class_<NetworkSpec>(m, "Network")
        .def_property_readonly("d", &NetworkSpec::input_dim)
        .def_property_readonly("widths", [](const NetworkSpec& n) { return n.architecture().widths; })
        .def_property_readonly("activation", [](const NetworkSpec& n) { return mut(n.activation_ptr()); })
        .def("__call__", [](const NetworkSpec& n, const std::vector<double>& x) { return evaluate(n, x); })
        .def("to_json", [](const NetworkSpec& n) { return network_to_json(n).dump(); })
        .def("format", [](const NetworkSpec& n) {
            return format_dict(compute_format(n.architecture(), n.activation().riccati_index()));
        });

    m.def(
        "sample_network",
        [](int d, const std::vector<int>& widths, const std::string& act, std::uint64_t seed, double scale) {
            return sample_network({d, widths}, activation_by_name(act), seed, scale);
        },
        py::arg("d"), py::arg("widths"), py::arg("activation") = "tanh", py::arg("seed") = 0, py::arg("scale") = 1.0);
    m.def("network_from_json", [](const std::string& text) { return network_from_json(json::parse(text)); });

    m.def(
        "compute_format",
        [](int d, const std::vector<int>& widths, int r) { return format_dict(compute_format({d, widths}, r)); },
        py::arg("d"), py::arg("widths"), py::arg("r"));

    m.def(
        "zero_bound", [](int R, int L, const std::string& C) { return bound_dict(zero_bound(R, L, Rational::parse(C))); },
        py::arg("R"), py::arg("L"), py::arg("C") = "1");
    m.def(
        "betti_bound",
        [](int d, int R, int L, const std::string& C) { return bound_dict(betti_bound(d, R, L, Rational::parse(C))); },
        py::arg("d"), py::arg("R"), py::arg("L"), py::arg("C") = "1");
    m.def(
        "gv_bound",
        [](int d, const py::int_& s, int R, int alpha, int beta, const std::string& C) {
            return bound_dict(gv_bound(d, BigInt(py::str(s).cast<std::string>()), R, alpha, beta, Rational::parse(C)));
        },
        py::arg("d"), py::arg("s"), py::arg("R"), py::arg("alpha"), py::arg("beta"), py::arg("C") = "1");
    m.def(
        "rankdrop_bound",
        [](int d, int m_, int k, int rho, const std::vector<int>& widths, int r, const std::string& C,
           const std::string& mode) {
            return bound_dict(rankdrop_bound(d, m_, k, rho, widths, r, Rational::parse(C), parse_bracket_mode(mode)));
        },
        py::arg("d"), py::arg("m"), py::arg("k"), py::arg("rho"), py::arg("widths"), py::arg("r"), py::arg("C") = "1",
        py::arg("mode") = "hall");
    m.def(
        "bracket_count", [](int m_, int k, const std::string& mode) {
            return py::int_(py::str(bracket_count(m_, k, parse_bracket_mode(mode)).str()));
        },
        py::arg("m"), py::arg("k"), py::arg("mode") = "hall");

    m.def(
        "verify_chain",
        [](const NetworkSpec& net, const std::vector<std::vector<double>>& points, double tol) {
            const auto certs = derive_certificates(net);
            const auto rep = verify_chain(net, certs, points, tol);
            py::dict out;
            out["max_residual"] = rep.max_residual;
            out["ok"] = rep.ok;
            out["degrees"] = certificate_degrees_by_layer(certs);
            out["triangular"] = certificates_are_triangular(certs);
            out["chain_length"] = certs.chain.size();
            return out;
        },
        py::arg("network"), py::arg("points"), py::arg("tol") = 1e-8);
    m.def("certificates_json", [](const NetworkSpec& net) { return certificates_to_json(derive_certificates(net)).dump(); });

    m.def(
        "count_zeros",
        [](const NetworkSpec& net, double lo, double hi) {
            if (net.input_dim() != 1)
                throw ShapeError("count_zeros needs a one-input network");
            const auto z = count_zeros_1d([&](double t) { return evaluate(net, std::span(&t, 1)); }, lo, hi);
            py::dict out;
            out["zeros"] = z.zeros;
            out["tangential"] = z.tangential;
            out["identically_zero"] = z.identically_zero;
            return out;
        },
        py::arg("network"), py::arg("lo") = -2.0, py::arg("hi") = 2.0);

    m.def(
        "betti",
        [](const std::function<double(std::vector<double>)>& f, const std::vector<double>& lo,
           const std::vector<double>& hi, int resolution, double tau) {
            const Box box = make_box(lo, hi);
            const auto g = sign_grid([&](std::span<const double> x) { return f({x.begin(), x.end()}); }, box,
                                     uniform_resolution(box.dim(), resolution), tau, 1);
            py::dict out;
            out["betti"] = betti_z2(g).b;
            out["components"] = components(g);
            out["flagged"] = g.flagged_count();
            return out;
        },
        py::arg("f"), py::arg("lo"), py::arg("hi"), py::arg("resolution") = 64, py::arg("tau") = 0.0);
    m.def(
        "betti_network",
        [](const NetworkSpec& net, const std::vector<double>& lo, const std::vector<double>& hi, int resolution,
           double tau) {
            BettiVector b;
            std::size_t comps = 0;
            {
                py::gil_scoped_release release;
                const Box box = make_box(lo, hi);
                const auto g = sign_grid([&](std::span<const double> x) { return evaluate(net, x); }, box,
                                         uniform_resolution(box.dim(), resolution), tau, 0);
                b = betti_z2(g);
                comps = components(g);
            }
            py::dict out;
            out["betti"] = b.b;
            out["components"] = comps;
            return out;
        },
        py::arg("network"), py::arg("lo"), py::arg("hi"), py::arg("resolution") = 64, py::arg("tau") = 0.0);

    m.def(
        "locus",
        [](const std::string& family, int k, int rho, const std::vector<double>& lo, const std::vector<double>& hi,
           int resolution, const std::string& criterion, double tol, const std::string& mode) {
            const auto fam = family_by_name(family);
            LocusOptions o;
            o.criterion = parse_locus_criterion(criterion);
            o.tol = tol;
            o.mode = parse_bracket_mode(mode);
            const Box box = make_box(lo, hi);
            const auto res = locus_sample(fam, k, rho, box, uniform_resolution(box.dim(), resolution), o);
            auto out = grid_dict(res.grid);
            out["margin"] = res.margin_cells;
            return out;
        },
        py::arg("family"), py::arg("k"), py::arg("rho"), py::arg("lo"), py::arg("hi"), py::arg("resolution") = 64,
        py::arg("criterion") = "svd", py::arg("tol") = 1e-8, py::arg("mode") = "hall");
    m.def(
        "brackets",
        [](int m_, int k, const std::string& mode) {
            std::vector<std::string> out;
            for (const auto& b : enumerate_brackets(m_, k, parse_bracket_mode(mode)))
                out.push_back(b->str());
            return out;
        },
        py::arg("m"), py::arg("k"), py::arg("mode") = "hall");
}
