#include "pfaffnet/liegeom.hpp"

#include "pfaffnet/errors.hpp"
#include "pfaffnet/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>

namespace pfaffnet {

namespace {

constexpr double kFloor = std::numeric_limits<double>::min();

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

using Word = std::vector<int>;

bool is_lyndon(const Word& w) {
    for (std::size_t i = 1; i < w.size(); ++i)
        if (!std::lexicographical_compare(w.begin(), w.end(), w.begin() + static_cast<std::ptrdiff_t>(i), w.end()))
            return false;
    return true;
}

// Duval's algorithm: all Lyndon words of length <= n in lexicographic order.
std::vector<Word> lyndon_words(int m, int n) {
    std::vector<Word> out;
    Word w{-1};
    while (!w.empty()) {
        ++w.back();
        out.push_back(w);
        const std::size_t len = w.size();
        while (static_cast<int>(w.size()) < n)
            w.push_back(w[w.size() - len]);
        while (!w.empty() && w.back() == m - 1)
            w.pop_back();
    }
    return out;
}

} // namespace

std::string BracketTerm::str() const {
    if (is_leaf())
        return "X" + std::to_string(generator + 1);
    return "[" + left->str() + "," + right->str() + "]";
}

BracketPtr BracketTerm::leaf(int generator) {
    auto t = std::make_shared<BracketTerm>();
    t->generator = generator;
    return t;
}

BracketPtr BracketTerm::bracket(BracketPtr left, BracketPtr right) {
    auto t = std::make_shared<BracketTerm>();
    t->length = left->length + right->length;
    t->left = std::move(left);
    t->right = std::move(right);
    return t;
}

std::vector<BracketPtr> enumerate_brackets(int m, int k, BracketMode mode) {
    if (m < 1 || k < 1)
        throw std::invalid_argument("enumerate_brackets requires m >= 1 and k >= 1");
    std::vector<BracketPtr> out;
    if (mode == BracketMode::Hall) {
        auto words = lyndon_words(m, k);
        std::stable_sort(words.begin(), words.end(), [](const Word& a, const Word& b) { return a.size() < b.size(); });
        std::map<Word, BracketPtr> built;
        for (const auto& w : words) {
            BracketPtr t;
            if (w.size() == 1) {
                t = BracketTerm::leaf(w[0]);
            } else {
                // standard factorization: v is the longest proper Lyndon suffix
                std::size_t split = 1;
                while (!is_lyndon(Word(w.begin() + static_cast<std::ptrdiff_t>(split), w.end())))
                    ++split;
                const Word u(w.begin(), w.begin() + static_cast<std::ptrdiff_t>(split));
                const Word v(w.begin() + static_cast<std::ptrdiff_t>(split), w.end());
                t = BracketTerm::bracket(built.at(u), built.at(v));
            }
            built[w] = t;
            out.push_back(t);
        }
        return out;
    }
    std::vector<std::vector<BracketPtr>> by_length(static_cast<std::size_t>(k) + 1);
    for (int i = 0; i < m; ++i)
        by_length[1].push_back(BracketTerm::leaf(i));
    for (int n = 2; n <= k; ++n)
        for (int a = 1; a < n; ++a)
            for (const auto& l : by_length[a])
                for (const auto& r : by_length[n - a])
                    by_length[n].push_back(BracketTerm::bracket(l, r));
    for (int n = 1; n <= k; ++n)
        out.insert(out.end(), by_length[n].begin(), by_length[n].end());
    return out;
}

VectorFieldFamily::VectorFieldFamily(int d, int m, std::vector<ComponentProvider> components)
    : d_(d), m_(m), components_(std::move(components)) {
    if (d < 1 || m < 1)
        throw ShapeError("vector field family needs d >= 1 and m >= 1");
    if (components_.size() != static_cast<std::size_t>(d) * static_cast<std::size_t>(m))
        throw ShapeError("vector field family needs m * d components");
    std::string activation;
    for (const auto& c : components_) {
        if (const auto* poly = std::get_if<SparsePoly>(&c)) {
            if (poly->nvars() != static_cast<std::size_t>(d))
                throw ShapeError("polynomial component must have d variables");
            has_poly_ = true;
            continue;
        }
        const auto& net = std::get<NetworkSpec>(c);
        if (net.input_dim() != d)
            throw ShapeError("network component input dimension differs from d");
        if (!arch_) {
            arch_ = net.architecture();
            activation = net.activation().name();
        } else if (!(net.architecture() == *arch_) || net.activation().name() != activation) {
            throw ShapeError("network components must share one architecture and activation");
        }
    }
}

std::vector<Jet> VectorFieldFamily::field_jets(int i, std::span<const double> z, int order) const {
    if (z.size() != static_cast<std::size_t>(d_))
        throw ShapeError("point dimension differs from the family dimension");
    const auto space = JetSpace::get(d_, order);
    std::vector<Jet> vars;
    if (has_poly_)
        for (int p = 0; p < d_; ++p)
            vars.push_back(Jet::variable(space, order, p, z[static_cast<std::size_t>(p)]));
    std::vector<Jet> out;
    out.reserve(static_cast<std::size_t>(d_));
    for (int p = 0; p < d_; ++p) {
        const auto& c = component(i, p);
        if (const auto* poly = std::get_if<SparsePoly>(&c))
            out.push_back(poly->evaluate(std::span<const Jet>(vars)));
        else
            out.push_back(jet_forward(std::get<NetworkSpec>(c), z, order));
    }
    return out;
}

VectorFieldFamily sample_family(int d, int m, const Architecture& arch, ActivationPtr activation, std::uint64_t seed,
                                double scale) {
    if (arch.d != d)
        throw ShapeError("architecture input dimension differs from d");
    std::vector<ComponentProvider> comps;
    for (int j = 0; j < d * m; ++j)
        comps.emplace_back(sample_network(arch, activation, splitmix64(seed * 1000003ULL + static_cast<std::uint64_t>(j)),
                                          scale));
    return VectorFieldFamily(d, m, std::move(comps));
}

namespace {

SparsePoly monomial(std::size_t nvars, std::initializer_list<std::uint16_t> exps, double c) {
    SparsePoly p(nvars);
    p.add_term(SparsePoly::Exponents(exps), c);
    return p;
}

} // namespace

VectorFieldFamily grushin_family() {
    std::vector<ComponentProvider> c;
    c.emplace_back(SparsePoly::constant(2, 1.0));
    c.emplace_back(SparsePoly(2));
    c.emplace_back(SparsePoly(2));
    c.emplace_back(monomial(2, {1, 0}, 1.0));
    return VectorFieldFamily(2, 2, std::move(c));
}

VectorFieldFamily heisenberg_family() {
    std::vector<ComponentProvider> c;
    c.emplace_back(SparsePoly::constant(3, 1.0));
    c.emplace_back(SparsePoly(3));
    c.emplace_back(monomial(3, {0, 1, 0}, -0.5));
    c.emplace_back(SparsePoly(3));
    c.emplace_back(SparsePoly::constant(3, 1.0));
    c.emplace_back(monomial(3, {1, 0, 0}, 0.5));
    return VectorFieldFamily(3, 2, std::move(c));
}

std::vector<Jet> lie_bracket(const std::vector<Jet>& X, const std::vector<Jet>& Y) {
    if (X.size() != Y.size() || X.empty())
        throw ShapeError("lie_bracket needs fields of equal dimension");
    const int order = std::min(X[0].order(), Y[0].order());
    if (order < 1)
        throw std::invalid_argument("lie_bracket needs jets of order >= 1");
    const std::size_t d = X.size();
    std::vector<Jet> out;
    out.reserve(d);
    for (std::size_t a = 0; a < d; ++a) {
        Jet acc = Jet::constant(X[0].space(), order - 1, 0.0);
        for (std::size_t b = 0; b < d; ++b) {
            acc += X[b] * Y[a].derivative(static_cast<int>(b));
            acc -= Y[b] * X[a].derivative(static_cast<int>(b));
        }
        out.push_back(std::move(acc));
    }
    return out;
}

namespace {

/// Jets of every bracket in `terms`, sharing subtrees through a cache.
class BracketJets {
public:
    BracketJets(const VectorFieldFamily& family, std::span<const double> z, int max_length)
        : order_(std::max(max_length - 1, 1)) {
        for (int i = 0; i < family.fields(); ++i)
            generators_.push_back(family.field_jets(i, z, order_));
    }

    const std::vector<Jet>& get(const BracketTerm& t) {
        if (t.is_leaf())
            return generators_.at(static_cast<std::size_t>(t.generator));
        auto it = cache_.find(&t);
        if (it != cache_.end())
            return it->second;
        auto value = lie_bracket(get(*t.left), get(*t.right));
        return cache_.emplace(&t, std::move(value)).first->second;
    }

    const std::vector<std::vector<Jet>>& generators() const noexcept { return generators_; }

private:
    int order_;
    std::vector<std::vector<Jet>> generators_;
    std::map<const BracketTerm*, std::vector<Jet>> cache_;
};

Eigen::MatrixXd assemble(BracketJets& jets, const std::vector<BracketPtr>& terms, int d) {
    Eigen::MatrixXd A(d, static_cast<Eigen::Index>(terms.size()));
    for (std::size_t j = 0; j < terms.size(); ++j) {
        const auto& col = jets.get(*terms[j]);
        for (int a = 0; a < d; ++a) {
            const double v = col[static_cast<std::size_t>(a)].value();
            if (!std::isfinite(v))
                throw DomainError("non-finite bracket value for " + terms[j]->str());
            A(a, static_cast<Eigen::Index>(j)) = v;
        }
    }
    return A;
}

} // namespace

std::vector<double> bracket_eval(const VectorFieldFamily& family, const BracketTerm& term, std::span<const double> z) {
    if (term.length > kMaxBracketLength)
        throw BudgetError("bracket length exceeds " + std::to_string(kMaxBracketLength));
    BracketJets jets(family, z, term.length);
    const auto& v = jets.get(term);
    std::vector<double> out;
    for (const auto& j : v)
        out.push_back(j.value());
    return out;
}

BracketMatrix bracket_matrix(const VectorFieldFamily& family, int k, std::span<const double> z, BracketMode mode) {
    if (k > kMaxBracketLength)
        throw BudgetError("bracket length exceeds " + std::to_string(kMaxBracketLength));
    const auto terms = enumerate_brackets(family.fields(), k, mode);
    BracketJets jets(family, z, k);
    return BracketMatrix{std::vector<double>(z.begin(), z.end()), assemble(jets, terms, family.dim())};
}

double determinant(const Eigen::MatrixXd& M) {
    const Eigen::Index n = M.rows();
    if (n != M.cols())
        throw ShapeError("determinant of a non-square matrix");
    switch (n) {
    case 0:
        return 1.0;
    case 1:
        return M(0, 0);
    case 2:
        return M(0, 0) * M(1, 1) - M(0, 1) * M(1, 0);
    case 3:
    case 4: {
        double det = 0.0;
        for (Eigen::Index j = 0; j < n; ++j) {
            if (M(0, j) == 0.0)
                continue;
            Eigen::MatrixXd sub(n - 1, n - 1);
            for (Eigen::Index r = 1; r < n; ++r)
                for (Eigen::Index c = 0, cc = 0; c < n; ++c)
                    if (c != j)
                        sub(r - 1, cc++) = M(r, c);
            det += (j % 2 == 0 ? 1.0 : -1.0) * M(0, j) * determinant(sub);
        }
        return det;
    }
    default:
        return M.partialPivLu().determinant();
    }
}

namespace {

// Advances a sorted k-subset of {0..n-1}; false after the last one.
bool next_subset(std::vector<Eigen::Index>& s, Eigen::Index n) {
    const auto k = static_cast<Eigen::Index>(s.size());
    for (Eigen::Index i = k - 1; i >= 0; --i) {
        if (s[static_cast<std::size_t>(i)] < n - k + i) {
            ++s[static_cast<std::size_t>(i)];
            for (Eigen::Index j = i + 1; j < k; ++j)
                s[static_cast<std::size_t>(j)] = s[static_cast<std::size_t>(j - 1)] + 1;
            return true;
        }
    }
    return false;
}

} // namespace

std::vector<double> minors(const Eigen::MatrixXd& A, int rho) {
    if (rho < 0)
        throw std::invalid_argument("minors requires rho >= 0");
    const Eigen::Index size = rho + 1;
    std::vector<double> out;
    if (size > std::min(A.rows(), A.cols()))
        return out;
    std::vector<Eigen::Index> rows(static_cast<std::size_t>(size));
    for (Eigen::Index i = 0; i < size; ++i)
        rows[static_cast<std::size_t>(i)] = i;
    Eigen::MatrixXd sub(size, size);
    do {
        std::vector<Eigen::Index> cols(static_cast<std::size_t>(size));
        for (Eigen::Index i = 0; i < size; ++i)
            cols[static_cast<std::size_t>(i)] = i;
        do {
            for (Eigen::Index r = 0; r < size; ++r)
                for (Eigen::Index c = 0; c < size; ++c)
                    sub(r, c) = A(rows[static_cast<std::size_t>(r)], cols[static_cast<std::size_t>(c)]);
            out.push_back(determinant(sub));
        } while (next_subset(cols, A.cols()));
    } while (next_subset(rows, A.rows()));
    return out;
}

namespace {

Eigen::VectorXd singular_values(const Eigen::MatrixXd& A) {
    if (A.size() == 0)
        return Eigen::VectorXd();
    return Eigen::JacobiSVD<Eigen::MatrixXd>(A).singularValues();
}

} // namespace

int rank_at(const Eigen::MatrixXd& A, double tol) {
    if (!(tol > 0.0))
        throw std::invalid_argument("rank tolerance must be positive");
    const auto sv = singular_values(A);
    if (sv.size() == 0)
        return 0;
    const double cut = tol * (sv(0) + kFloor);
    int rank = 0;
    for (Eigen::Index i = 0; i < sv.size(); ++i)
        rank += sv(i) > cut;
    return rank;
}

std::string to_string(LocusCriterion c) {
    return c == LocusCriterion::Svd ? "svd" : "minor";
}

LocusCriterion parse_locus_criterion(const std::string& text) {
    if (text == "svd")
        return LocusCriterion::Svd;
    if (text == "minor")
        return LocusCriterion::Minor;
    throw std::invalid_argument("unknown locus criterion '" + text + "'");
}

LocusCellData locus_cell_data(const VectorFieldFamily& family, int k, int rho, std::span<const double> center,
                              std::span<const double> cell_width, BracketMode mode) {
    const int d = family.dim();
    const auto terms = enumerate_brackets(family.fields(), k, mode);
    BracketJets jets(family, center, k);
    const Eigen::MatrixXd A = assemble(jets, terms, d);

    LocusCellData out;
    const auto sv = singular_values(A);
    if (rho < sv.size())
        out.sigma_next = sv(rho);
    const auto m = minors(A, rho);
    for (double v : m)
        out.max_minor = std::max(out.max_minor, std::abs(v));

    const auto& gens = jets.generators();
    const auto m_fields = static_cast<Eigen::Index>(gens.size());
    Eigen::MatrixXd A1(d, m_fields);
    std::vector<Eigen::MatrixXd> dA1(static_cast<std::size_t>(d), Eigen::MatrixXd(d, m_fields));
    for (Eigen::Index i = 0; i < m_fields; ++i)
        for (int a = 0; a < d; ++a) {
            const Jet& g = gens[static_cast<std::size_t>(i)][static_cast<std::size_t>(a)];
            A1(a, i) = g.value();
            for (int p = 0; p < d; ++p)
                dA1[static_cast<std::size_t>(p)](a, i) = g.gradient(p);
        }
    const auto sv1 = singular_values(A1);
    out.sigma_max_generators = sv1.size() ? sv1(0) : 0.0;
    for (int p = 0; p < d; ++p) {
        const auto svp = singular_values(dA1[static_cast<std::size_t>(p)]);
        if (svp.size())
            out.spread += svp(0) * cell_width[static_cast<std::size_t>(p)] / 2.0;
    }
    return out;
}

LocusResult locus_sample(const VectorFieldFamily& family, int k, int rho, const Box& box,
                         const std::vector<int>& resolution, const LocusOptions& opts) {
    if (family.dim() > kMaxLocusDim)
        throw BudgetError("locus sampling supports d <= " + std::to_string(kMaxLocusDim));
    if (k < 1 || k > kMaxBracketLength)
        throw BudgetError("bracket length must be in 1.." + std::to_string(kMaxBracketLength));
    if (rho < 0)
        throw std::invalid_argument("rho must be >= 0");
    if (!(opts.tol > 0.0))
        throw std::invalid_argument("tol must be positive");
    if (opts.epsilon && !(*opts.epsilon >= 0.0))
        throw std::invalid_argument("epsilon must be nonnegative");
    if (box.dim() != static_cast<std::size_t>(family.dim()))
        throw ShapeError("box dimension differs from the family dimension");
    std::size_t cells = 1;
    for (int r : resolution) {
        cells *= static_cast<std::size_t>(std::max(r, 1));
        if (cells > opts.max_cells)
            throw BudgetError("locus grid exceeds " + std::to_string(opts.max_cells) + " cells");
    }

    LocusResult result{SignGrid(box, resolution), {}, 0};
    std::vector<double> width(box.dim());
    for (std::size_t a = 0; a < box.dim(); ++a)
        width[a] = result.grid.cell_width(a);
    result.labels.assign(result.grid.cell_count(), CellLabel::Out);

    parallel_for(result.grid.cell_count(), opts.threads, [&](std::size_t cell) {
        try {
            const auto c = result.grid.cell_center(cell);
            const auto data = locus_cell_data(family, k, rho, c, width, opts.mode);
            const double scale = data.sigma_max_generators + kFloor;
            auto flagged = [&](double t) {
                const double delta = t * scale + data.spread;
                if (opts.criterion == LocusCriterion::Svd)
                    return data.sigma_next <= delta;
                const double eps = opts.epsilon ? *opts.epsilon * (t / opts.tol) : delta * std::pow(scale, rho);
                return data.max_minor <= eps;
            };
            const bool in = flagged(opts.tol);
            const bool loose = flagged(10.0 * opts.tol);
            result.labels[cell] = in ? CellLabel::In : (loose ? CellLabel::Margin : CellLabel::Out);
        } catch (const std::exception& e) {
            throw CellEvaluationError(cell, e.what());
        }
    });
    for (std::size_t i = 0; i < result.labels.size(); ++i) {
        result.grid.set_flag(i, result.labels[i] == CellLabel::In);
        result.margin_cells += result.labels[i] == CellLabel::Margin;
    }
    return result;
}

} // namespace pfaffnet
