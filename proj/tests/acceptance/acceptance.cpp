// Acceptance runner: one PASS/FAIL line per criterion, exit status 1 if any fail.

#include "oracles/decimal_bigint.hpp"
#include "oracles/dense_zeros.hpp"
#include "oracles/scalar_net.hpp"

#include "pfaffnet/bounds.hpp"
#include "pfaffnet/chain.hpp"
#include "pfaffnet/liegeom.hpp"
#include "pfaffnet/network.hpp"
#include "pfaffnet/topology.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>

using namespace pfaffnet;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;

    void require(bool ok, const std::string& what) {
        if (!ok && pass) {
            pass = false;
            detail = what;
        }
    }
};

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

const char* kActs[] = {"logistic", "tanh", "softplus"};

// 1. exact formula values
Outcome formulas() {
    Outcome o;
    auto eq = [](const PfaffianFormat& f, int d, int R, int a, int b) {
        return f.d == d && f.R == R && f.alpha == a && f.beta == b;
    };
    o.require(eq(compute_format({1, {1}}, 0), 1, 2, 3, 1), "format (d=1, L=1, n=1, r=0)");
    o.require(eq(compute_format({2, {4, 4, 2}}, 1), 2, 30, 7, 1), "format (d=2, (4,4,2), r=1)");
    o.require(zero_bound(2, 1, Rational::parse("1")).value == 64, "zero_bound(2,1,1) != 64");
    o.require(betti_bound(1, 2, 1, Rational::parse("1")).value == 128, "betti_bound(1,2,1,1) != 128");
    o.require(oracle::zero_bound(2, 1).str() == "64", "decimal oracle disagrees on 64");

    std::mt19937_64 rng(20240611);
    std::uniform_int_distribution<int> D(1, 6), R(0, 80), L(1, 10);
    int checked = 0;
    for (int i = 0; i < 200; ++i) {
        const int d = D(rng), r = R(rng), l = L(rng);
        const auto gv = gv_bound(d, 1, r, 1 + 2 * l, 1);
        const auto bt = betti_bound(d, r, l);
        o.require(gv.value == bt.value, "gv specialization fails at d=" + std::to_string(d) +
                                            " R=" + std::to_string(r) + " L=" + std::to_string(l));
        o.require(bt.value.str() == oracle::gv_bound(d, 1, r, 1 + 2 * l, 1).str(),
                  "decimal oracle disagrees at d=" + std::to_string(d));
        ++checked;
    }
    if (o.pass)
        o.detail = std::to_string(checked) + " triples";
    return o;
}

// 2. chain certificates on random networks
Outcome chains() {
    Outcome o;
    std::mt19937_64 rng(77);
    std::uniform_int_distribution<int> W(1, 4);
    std::uniform_real_distribution<double> U(-1, 1);
    double worst = 0.0;
    for (int n = 0; n < 50; ++n) {
        Architecture arch{1 + n % 3, {}};
        const int L = 1 + (n / 3) % 3;
        for (int l = 0; l < L; ++l)
            arch.widths.push_back(W(rng));
        const auto net = sample_network(arch, activation_by_name(kActs[n % 3]), 1000 + n, 1.0);
        const auto certs = derive_certificates(net);
        std::vector<std::vector<double>> pts(100, std::vector<double>(arch.d));
        for (auto& p : pts)
            for (auto& v : p)
                v = U(rng);
        const auto rep = verify_chain(net, certs, pts, 1e-8);
        worst = std::max(worst, rep.max_residual);
        const std::string tag = "network " + std::to_string(n);
        o.require(rep.ok && rep.max_residual <= 1e-8, tag + ": residual " + fmt(rep.max_residual));
        const auto deg = certificate_degrees_by_layer(certs);
        for (std::size_t l = 0; l < deg.size(); ++l)
            o.require(deg[l] <= layer_degree_bound(static_cast<int>(l) + 1), tag + ": degree above 1+2l");
        o.require(deg.front() == 2, tag + ": layer-1 degree " + std::to_string(deg.front()));
        o.require(certificates_are_triangular(certs), tag + ": not triangular");
    }
    if (o.pass)
        o.detail = "50 networks, max residual " + fmt(worst);
    return o;
}

// 3. zero counts against the dense-grid oracle
Outcome zeros() {
    Outcome o;
    std::mt19937_64 rng(4242);
    std::uniform_int_distribution<int> Ld(1, 3), Wd(1, 5);
    std::size_t total = 0;
    double worst_pos = 0.0;
    for (int n = 0; n < 100; ++n) {
        Architecture arch{1, {}};
        for (int l = Ld(rng); l > 0; --l)
            arch.widths.push_back(Wd(rng));
        const auto act = activation_by_name(kActs[n % 3]);
        const auto net = sample_network(arch, act, 5000 + n, 3.0);
        auto f = [&](double t) { return evaluate(net, std::span(&t, 1)); };
        const auto got = count_zeros_1d(f, -2.0, 2.0);
        const auto ref = oracle::dense_zeros(oracle::ScalarNet(net), -2.0, 2.0, 1000000);
        const std::string tag = "network " + std::to_string(n);
        o.require(got.count() == ref.size(),
                  tag + ": " + std::to_string(got.count()) + " zeros vs oracle " + std::to_string(ref.size()));
        if (got.count() == ref.size())
            for (std::size_t i = 0; i < ref.size(); ++i)
                worst_pos = std::max(worst_pos, std::abs(got.zeros[i] - ref[i]));
        const auto bound = zero_bound(compute_format(arch, act->riccati_index()).R, arch.depth());
        o.require(std::log10(got.count() + 1.0) <= bound.log10, tag + ": count exceeds the zero bound");
        total += got.count();
    }
    o.require(worst_pos <= 1e-8, "zero locations differ by " + fmt(worst_pos));
    if (o.pass)
        o.detail = "100 networks, " + std::to_string(total) + " zeros, max location gap " + fmt(worst_pos);
    return o;
}

// 4. homology of fixtures
Outcome homology() {
    Outcome o;
    const ScalarField disk = [](std::span<const double> x) { return 1.0 - x[0] * x[0] - x[1] * x[1]; };
    const ScalarField annulus = [](std::span<const double> x) {
        const double r2 = x[0] * x[0] + x[1] * x[1];
        return std::min(r2 - 0.25, 1.0 - r2);
    };
    const ScalarField two_disks = [](std::span<const double> x) {
        auto bump = [&](double cx) { return 0.36 - (x[0] - cx) * (x[0] - cx) - x[1] * x[1]; };
        return std::max(bump(-1.0), bump(1.0));
    };
    struct Case {
        const char* name;
        const ScalarField* f;
        long long b0, b1;
    };
    const Box box = Box::cube(2, -2, 2);
    int grids = 0;
    for (const Case& c : {Case{"disk", &disk, 1, 0}, Case{"annulus", &annulus, 1, 1}, Case{"two_disks", &two_disks, 2, 0}}) {
        for (int res : {64, 128}) {
            const auto g = sign_grid(*c.f, box, {res, res}, 0.0);
            const auto b = betti_z2(g);
            const std::string tag = std::string(c.name) + " at " + std::to_string(res);
            o.require(b.at(0) == c.b0 && b.at(1) == c.b1 && b.at(2) == 0, tag + ": wrong Betti numbers");
            o.require(static_cast<long long>(components(g)) == b.at(0), tag + ": components != b_0");
            ++grids;
        }
        o.require(betti_with_stability(*c.f, box, 64, 0.0).stable, std::string(c.name) + ": unstable under doubling");
    }
    // random network superlevel sets join the suite for the components check
    for (int n = 0; n < 10; ++n) {
        const auto net = sample_network({2, {5, 3}}, activation_by_name(kActs[n % 3]), 300 + n, 3.0);
        const auto g = sign_grid([&](std::span<const double> x) { return evaluate(net, x); }, box, {48, 48}, 0.0);
        o.require(static_cast<long long>(components(g)) == betti_z2(g).at(0),
                  "network " + std::to_string(n) + ": components != b_0");
        ++grids;
    }
    if (o.pass)
        o.detail = std::to_string(grids) + " grids";
    return o;
}

double max_abs(const std::vector<double>& v) {
    double m = 0;
    for (double x : v)
        m = std::max(m, std::abs(x));
    return m;
}

std::vector<SparsePoly> poly_bracket(const std::vector<SparsePoly>& X, const std::vector<SparsePoly>& Y) {
    std::vector<SparsePoly> out;
    for (std::size_t a = 0; a < X.size(); ++a) {
        SparsePoly acc(X[0].nvars());
        for (std::size_t b = 0; b < X.size(); ++b)
            acc += X[b] * Y[a].derivative(b) - Y[b] * X[a].derivative(b);
        out.push_back(acc);
    }
    return out;
}

// 5. bracket engine
Outcome brackets() {
    Outcome o;
    using B = BracketTerm;
    std::mt19937_64 rng(555);
    std::uniform_real_distribution<double> U(-1, 1);
    double anti = 0.0, jac = 0.0, poly = 0.0;
    const auto X = B::leaf(0), Y = B::leaf(1), Z = B::leaf(2);
    const auto xy = B::bracket(X, Y), yx = B::bracket(Y, X);
    const auto j1 = B::bracket(X, B::bracket(Y, Z)), j2 = B::bracket(Y, B::bracket(Z, X)),
               j3 = B::bracket(Z, B::bracket(X, Y));
    for (int f = 0; f < 20; ++f) {
        const int d = 1 + f % 3;
        Architecture arch{d, {3}};
        if (f % 2)
            arch.widths.push_back(2);
        const auto fam = sample_family(d, 3, arch, activation_by_name(kActs[f % 3]), 900 + f, 1.0);
        for (int i = 0; i < 50; ++i) {
            std::vector<double> z(d);
            for (auto& v : z)
                v = U(rng);
            const auto a = bracket_eval(fam, *xy, z), b = bracket_eval(fam, *yx, z);
            const auto c1 = bracket_eval(fam, *j1, z), c2 = bracket_eval(fam, *j2, z), c3 = bracket_eval(fam, *j3, z);
            for (int p = 0; p < d; ++p) {
                anti = std::max(anti, std::abs(a[p] + b[p]));
                jac = std::max(jac, std::abs(c1[p] + c2[p] + c3[p]));
            }
        }
    }
    o.require(anti <= 1e-9, "antisymmetry residual " + fmt(anti));
    o.require(jac <= 1e-7, "Jacobi residual " + fmt(jac));

    for (int trial = 0; trial < 10; ++trial) {
        std::vector<std::vector<SparsePoly>> F(2, std::vector<SparsePoly>(2, SparsePoly(2)));
        std::vector<ComponentProvider> comps;
        for (int i = 0; i < 2; ++i)
            for (int p = 0; p < 2; ++p) {
                for (std::uint16_t e0 = 0; e0 <= 3; ++e0)
                    for (std::uint16_t e1 = 0; e0 + e1 <= 3; ++e1)
                        F[i][p].add_term({e0, e1}, U(rng));
                comps.emplace_back(F[i][p]);
            }
        const VectorFieldFamily fam(2, 2, comps);
        const auto b12 = poly_bracket(F[0], F[1]);
        const auto b112 = poly_bracket(F[0], b12);
        const auto t112 = B::bracket(X, xy);
        for (int i = 0; i < 20; ++i) {
            const std::vector<double> z{U(rng), U(rng)};
            const auto v12 = bracket_eval(fam, *xy, z), v112 = bracket_eval(fam, *t112, z);
            for (int a = 0; a < 2; ++a) {
                poly = std::max(poly, std::abs(v12[a] - b12[a].evaluate(z)));
                poly = std::max(poly, std::abs(v112[a] - b112[a].evaluate(z)));
            }
        }
    }
    o.require(poly <= 1e-12, "polynomial fixture gap " + fmt(poly));

    const auto heis = heisenberg_family();
    int full = 0;
    for (int i = 0; i < 200; ++i) {
        const std::vector<double> z{2 * U(rng), 2 * U(rng), 2 * U(rng)};
        full += rank_at(bracket_matrix(heis, 2, z).columns, 1e-8) == 3;
    }
    o.require(full == 200, "Heisenberg rank below 3 at " + std::to_string(200 - full) + " points");
    o.require(locus_sample(heis, 2, 2, Box::cube(3, -1, 1), {12, 12, 12}).grid.flagged_count() == 0,
              "Heisenberg locus at k=2 is not empty");
    if (o.pass)
        o.detail = "antisymmetry " + fmt(anti) + ", Jacobi " + fmt(jac) + ", polynomial " + fmt(poly);
    return o;
}

// 6. rank-drop loci
Outcome loci() {
    Outcome o;
    const auto g = grushin_family();
    const Box box = Box::cube(2, -1, 1);
    const auto l1 = locus_sample(g, 1, 1, box, {64, 64});
    const double w = l1.grid.cell_width(0);
    std::vector<int> per_row(64, 0);
    for (std::size_t c = 0; c < l1.grid.cell_count(); ++c) {
        if (!l1.grid.flag(c))
            continue;
        o.require(std::abs(l1.grid.cell_center(c)[0]) <= w, "Grushin cell far from x = 0");
        per_row[static_cast<std::size_t>(l1.grid.cell_coordinates(c)[1])]++;
    }
    for (int r = 0; r < 64; ++r)
        o.require(per_row[r] > 0, "Grushin locus misses row " + std::to_string(r));
    o.require(locus_sample(g, 2, 1, box, {64, 64}).grid.flagged_count() == 0, "Grushin k=2 locus is not empty");

    std::size_t flagged = 0, cells = 0;
    for (int f = 0; f < 20; ++f) {
        const int d = f < 14 ? 2 : 3;
        const int res = d == 2 ? 24 : 8;
        const auto fam = sample_family(d, 2, {d, {3}}, activation_by_name(kActs[f % 3]), 1200 + f, 1.5);
        const Box fb = Box::cube(static_cast<std::size_t>(d), -1.5, 1.5);
        std::optional<SignGrid> prev;
        for (int k = 1; k <= 3; ++k) {
            auto cur = locus_sample(fam, k, 1, fb, uniform_resolution(static_cast<std::size_t>(d), res)).grid;
            flagged += cur.flagged_count();
            cells += cur.cell_count();
            if (prev)
                o.require(cur.is_subset_of(*prev),
                          "nesting fails for family " + std::to_string(f) + " at k=" + std::to_string(k));
            prev = std::move(cur);
        }
    }
    if (o.pass)
        o.detail = "Grushin column width " + std::to_string(l1.grid.flagged_count() / 64) + "; 20 families, " +
                   std::to_string(flagged) + "/" + std::to_string(cells) + " cells flagged";
    return o;
}

// 7. activation certification
Outcome activations() {
    Outcome o;
    std::vector<double> t(100);
    for (int i = 0; i < 100; ++i)
        t[i] = -5.0 + 10.0 * i / 99.0;
    double worst = 0.0, weakest_control = 1e300;
    for (const auto& act : builtins()) {
        const double r = riccati_residual(*act, t);
        worst = std::max(worst, r);
        o.require(r <= 1e-10, act->name() + ": residual " + fmt(r));
        const auto c = act->coefficients();
        for (int which = 0; which < 3; ++which) {
            auto p = c;
            (which == 0 ? p.a0 : which == 1 ? p.a1 : p.a2) += 0.1;
            const double rp = riccati_residual(act->with_coefficients(p), t);
            weakest_control = std::min(weakest_control, rp);
            o.require(rp > 0.05, act->name() + ": perturbed residual only " + fmt(rp));
        }
    }
    if (o.pass)
        o.detail = "max residual " + fmt(worst) + ", weakest negative control " + fmt(weakest_control);
    return o;
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

std::string drop_timestamp(const std::string& text) {
    std::istringstream in(text);
    std::string line, out;
    while (std::getline(in, line))
        if (line.find("\"timestamp\"") == std::string::npos)
            out += line + '\n';
    return out;
}

// 8. CLI determinism
Outcome determinism() {
    Outcome o;
    namespace fs = std::filesystem;
    const fs::path dir = fs::path(PFAFFNET_ACCEPTANCE_WORKDIR) / "determinism";
    fs::remove_all(dir);
    fs::create_directories(dir);
    const fs::path cfg = PFAFFNET_EXAMPLES_DIR;
    struct Run {
        const char* command;
        const char* config;
        int expected_exit;
    };
    const Run runs[] = {
        {"format", "format.json", 0},
        {"bound", "bound.json", 0},
        {"verify-chain", "verify_chain.json", 0},
        {"verify-chain", "verify_chain_corrupt.json", 1},
        {"zeros", "zeros.json", 0},
        {"betti", "betti_annulus.json", 0},
        {"betti", "betti_network.json", 0},
        {"rankdrop", "rankdrop_grushin.json", 0},
        {"rankdrop", "rankdrop_random.json", 0},
        {"rankdrop", "rankdrop_heisenberg.json", 0},
        {"rankdrop", "rankdrop_file.json", 0},
    };
    int n = 0;
    for (const auto& r : runs) {
        std::string outputs[3];
        for (int rep = 0; rep < 3; ++rep) {
            const fs::path prefix = dir / (std::to_string(n) + "_" + std::to_string(rep));
            const bool sweep = std::string(r.command) != "format" && std::string(r.command) != "bound";
            // third run changes only the thread count
            const std::string threads = sweep ? (rep == 2 ? " --threads 3" : " --threads 1") : "";
            const std::string cmd = std::string("\"") + PFAFFNET_CLI_PATH + "\" " + r.command + " --config \"" +
                                    (cfg / r.config).string() + "\" --out \"" + prefix.string() + "\"" + threads +
                                    " 2>/dev/null";
            const int status = std::system(cmd.c_str());
            const int code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
            o.require(code == r.expected_exit, std::string(r.command) + " " + r.config + ": exit " +
                                                   std::to_string(code));
            outputs[rep] = slurp(prefix.string() + ".csv") + drop_timestamp(slurp(prefix.string() + ".json"));
            o.require(!outputs[rep].empty(), std::string(r.command) + ": no output");
        }
        o.require(outputs[0] == outputs[1], std::string(r.command) + " " + r.config + ": reruns differ");
        o.require(outputs[0] == outputs[2], std::string(r.command) + " " + r.config + ": thread count changes output");
        ++n;
    }
    if (o.pass)
        o.detail = std::to_string(n) + " configs, all six subcommands";
    return o;
}

} // namespace

int main() {
    struct Criterion {
        int id;
        const char* name;
        double budget_s;
        std::function<Outcome()> run;
    };
    // budgets of 0 mean no runtime requirement
    const Criterion criteria[] = {
        {1, "formula exactness", 1.0, formulas},
        {2, "chain certification", 60.0, chains},
        {3, "zero-count oracle", 120.0, zeros},
        {4, "homology fixtures", 30.0, homology},
        {5, "bracket engine", 0.0, brackets},
        {6, "rank-drop loci", 120.0, loci},
        {7, "activation certification", 0.0, activations},
        {8, "CLI determinism", 0.0, determinism},
    };
    int failures = 0;
    for (const auto& c : criteria) {
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o.pass = false;
            o.detail = std::string("exception: ") + e.what();
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (o.pass && c.budget_s > 0 && secs >= c.budget_s) {
            o.pass = false;
            o.detail = "over the " + fmt(c.budget_s) + " s budget";
        }
        failures += !o.pass;
        std::printf("%s %d %s (%.2f s) %s\n", o.pass ? "PASS" : "FAIL", c.id, c.name, secs, o.detail.c_str());
        std::fflush(stdout);
    }
    std::printf("%d/%zu criteria passed\n", static_cast<int>(std::size(criteria)) - failures, std::size(criteria));
    return failures ? 1 : 0;
}
