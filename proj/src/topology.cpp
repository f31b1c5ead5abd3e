#include "pfaffnet/topology.hpp"

#include "pfaffnet/errors.hpp"
#include "pfaffnet/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace pfaffnet {

namespace {

constexpr double kGolden = 0.3819660112501051; // 2 - phi

bool nonnegative(double v) {
    return v >= 0.0;
}

double eval_inside(const ScalarFunction1D& f, double x, double lo, double hi) {
    try {
        return f(x);
    } catch (const DomainError&) {
        // open interval: the end itself may be outside the analytic domain
        const double nudge = 1e-9 * (hi - lo);
        return f(x <= lo ? lo + nudge : hi - nudge);
    }
}

struct Sample {
    double x;
    double fx;
};

} // namespace

ZeroSearchResult count_zeros_1d(const ScalarFunction1D& f, double lo, double hi, const ZeroSearchOptions& opts) {
    if (!(lo < hi))
        throw std::invalid_argument("count_zeros_1d: empty interval");
    if (opts.initial_samples < 2)
        throw std::invalid_argument("count_zeros_1d: need at least two samples");

    const int n = opts.initial_samples;
    std::vector<Sample> samples(static_cast<std::size_t>(n) + 1);
    bool all_small = true;
    for (int j = 0; j <= n; ++j) {
        const double x = j == n ? hi : lo + (hi - lo) * j / n;
        const double v = eval_inside(f, x, lo, hi);
        if (!std::isfinite(v))
            throw DomainError("count_zeros_1d: non-finite value at " + std::to_string(x));
        samples[j] = {x, v};
        all_small = all_small && std::abs(v) <= opts.floor;
    }

    ZeroSearchResult result;
    if (all_small) {
        result.identically_zero = true;
        return result;
    }

    // Refine sampled local minima of |f| that sit between same-sign neighbours.
    std::vector<Sample> extra;
    for (int j = 1; j < n; ++j) {
        const auto& a = samples[j - 1];
        const auto& c = samples[j];
        const auto& b = samples[j + 1];
        const bool sign = nonnegative(c.fx);
        if (nonnegative(a.fx) != sign || nonnegative(b.fx) != sign)
            continue;
        if (!(std::abs(c.fx) < std::abs(a.fx) && std::abs(c.fx) <= std::abs(b.fx)))
            continue;
        const double s = sign ? 1.0 : -1.0;
        double left = a.x, right = b.x, mid = c.x, fmid = s * c.fx;
        bool flipped = false;
        for (int it = 0; it < 200 && right - left > opts.tol; ++it) {
            const double x = (right - mid) > (mid - left) ? mid + kGolden * (right - mid) : mid - kGolden * (mid - left);
            if (x == mid)
                break;
            const double fx = f(x);
            if (nonnegative(fx) != sign) {
                extra.push_back({x, fx});
                flipped = true;
                break;
            }
            const double g = s * fx;
            if (g < fmid) {
                (x > mid ? left : right) = mid;
                mid = x;
                fmid = g;
            } else {
                (x > mid ? right : left) = x;
            }
        }
        if (!flipped && fmid <= opts.floor)
            result.tangential.push_back(mid);
    }
    if (!extra.empty()) {
        samples.insert(samples.end(), extra.begin(), extra.end());
        std::sort(samples.begin(), samples.end(), [](const Sample& p, const Sample& q) { return p.x < q.x; });
    }

    for (std::size_t j = 0; j + 1 < samples.size(); ++j) {
        if (nonnegative(samples[j].fx) == nonnegative(samples[j + 1].fx))
            continue;
        double a = samples[j].x, b = samples[j + 1].x;
        const bool sign_a = nonnegative(samples[j].fx);
        for (int it = 0; it < 200 && b - a > opts.tol; ++it) {
            const double m = 0.5 * (a + b);
            if (m <= a || m >= b)
                break;
            (nonnegative(f(m)) == sign_a ? a : b) = m;
        }
        result.zeros.push_back(0.5 * (a + b));
    }
    return result;
}

std::vector<RealInterval> superlevel_intervals_1d(const ScalarFunction1D& f, double lo, double hi,
                                                  const ZeroSearchOptions& opts) {
    const auto zeros = count_zeros_1d(f, lo, hi, opts);
    if (zeros.identically_zero)
        return {RealInterval{lo, hi, false, false}};

    std::vector<double> cuts;
    cuts.reserve(zeros.count() + 2);
    cuts.push_back(lo);
    cuts.insert(cuts.end(), zeros.zeros.begin(), zeros.zeros.end());
    cuts.push_back(hi);

    const std::size_t pieces = cuts.size() - 1;
    std::vector<bool> keep(pieces);
    for (std::size_t i = 0; i < pieces; ++i)
        keep[i] = nonnegative(eval_inside(f, 0.5 * (cuts[i] + cuts[i + 1]), lo, hi));

    std::vector<RealInterval> out;
    for (std::size_t i = 0; i < pieces; ++i) {
        const bool zero_left = i > 0;
        if (!keep[i]) {
            // a zero flanked by two negative pieces is an isolated point of {f >= 0}
            if (zero_left && !keep[i - 1])
                out.push_back({cuts[i], cuts[i], true, true});
            continue;
        }
        if (zero_left && keep[i - 1] && !out.empty() && out.back().hi == cuts[i]) {
            out.back().hi = cuts[i + 1];
            out.back().hi_closed = i + 1 < pieces;
            continue;
        }
        out.push_back({cuts[i], cuts[i + 1], zero_left, i + 1 < pieces});
    }
    return out;
}

SignGrid sign_grid(const ScalarField& f, const Box& box, const std::vector<int>& resolution, double tau,
                   unsigned threads) {
    SignGrid grid(box, resolution);
    std::vector<std::uint8_t> flags(grid.cell_count());
    parallel_for(grid.cell_count(), threads, [&](std::size_t cell) {
        try {
            const auto x = grid.cell_center(cell);
            flags[cell] = f(x) >= tau ? 1 : 0;
        } catch (const std::exception& e) {
            throw CellEvaluationError(cell, e.what());
        }
    });
    for (std::size_t i = 0; i < flags.size(); ++i)
        grid.set_flag(i, flags[i] != 0);
    return grid;
}

CubicalComplex::CubicalComplex(const SignGrid& grid, std::size_t max_lattice_points) {
    const std::size_t d = grid.dim();
    extent_.resize(d);
    stride_.resize(d);
    std::size_t total = 1;
    for (std::size_t a = 0; a < d; ++a) {
        extent_[a] = 2 * static_cast<std::size_t>(grid.resolution()[a]) + 1;
        stride_[a] = total;
        total *= extent_[a];
        if (total > max_lattice_points)
            throw BudgetError("cubical complex exceeds " + std::to_string(max_lattice_points) + " lattice points");
    }
    member_.assign(total, 0);

    std::size_t offsets = 1;
    for (std::size_t a = 0; a < d; ++a)
        offsets *= 3;
    for (std::size_t cell = 0; cell < grid.cell_count(); ++cell) {
        if (!grid.flag(cell))
            continue;
        const auto c = grid.cell_coordinates(cell);
        for (std::size_t o = 0; o < offsets; ++o) {
            std::size_t rem = o;
            std::size_t id = 0;
            for (std::size_t a = 0; a < d; ++a) {
                id += (2 * static_cast<std::size_t>(c[a]) + rem % 3) * stride_[a];
                rem /= 3;
            }
            member_[id] = 1;
        }
    }

    cells_.assign(d + 1, {});
    for (std::size_t id = 0; id < total; ++id)
        if (member_[id])
            cells_[cell_dimension(id)].push_back(id);
}

std::size_t CubicalComplex::cell_dimension(std::size_t id) const {
    std::size_t dim = 0;
    for (std::size_t a = 0; a < extent_.size(); ++a) {
        dim += (id / stride_[a]) % extent_[a] % 2;
    }
    return dim;
}

std::vector<std::size_t> CubicalComplex::boundary(std::size_t id) const {
    std::vector<std::size_t> faces;
    for (std::size_t a = 0; a < extent_.size(); ++a) {
        if ((id / stride_[a]) % extent_[a] % 2 == 1) {
            faces.push_back(id - stride_[a]);
            faces.push_back(id + stride_[a]);
        }
    }
    return faces;
}

long long CubicalComplex::euler_characteristic() const {
    long long chi = 0;
    for (std::size_t k = 0; k < cells_.size(); ++k)
        chi += (k % 2 == 0 ? 1 : -1) * static_cast<long long>(cells_[k].size());
    return chi;
}

long long BettiVector::total() const noexcept {
    return std::accumulate(b.begin(), b.end(), 0LL);
}

namespace {

using Column = std::vector<std::uint32_t>;

// a ^= b for sorted index sets
void add_mod2(Column& a, const Column& b, Column& scratch) {
    scratch.clear();
    std::set_symmetric_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(scratch));
    a.swap(scratch);
}

/// Rank of d_k with clearing: columns listed in `cleared` are known to reduce to zero.
/// Returns the rank and marks the pivot rows (the (k-1)-cells paired by d_k).
std::size_t reduce_boundary(const CubicalComplex& cx, std::size_t k, const std::vector<std::uint32_t>& local,
                            const std::vector<std::uint8_t>& cleared, std::vector<std::uint8_t>& pivot_rows) {
    const auto& cols = cx.cells(k);
    const auto& rows = cx.cells(k - 1);
    std::vector<std::int64_t> pivot_owner(rows.size(), -1);
    std::vector<Column> reduced(cols.size());
    pivot_rows.assign(rows.size(), 0);
    std::size_t rank = 0;
    Column col, scratch;
    for (std::size_t j = 0; j < cols.size(); ++j) {
        if (!cleared.empty() && cleared[j])
            continue;
        col.clear();
        for (std::size_t face : cx.boundary(cols[j]))
            col.push_back(local[face]);
        std::sort(col.begin(), col.end());
        while (!col.empty() && pivot_owner[col.back()] >= 0)
            add_mod2(col, reduced[static_cast<std::size_t>(pivot_owner[col.back()])], scratch);
        if (!col.empty()) {
            pivot_owner[col.back()] = static_cast<std::int64_t>(j);
            pivot_rows[col.back()] = 1;
            reduced[j] = col;
            ++rank;
        }
    }
    return rank;
}

} // namespace

std::vector<std::size_t> boundary_ranks(const CubicalComplex& cx) {
    const std::size_t d = cx.dim();
    std::size_t lattice = 0;
    for (std::size_t k = 0; k <= d; ++k)
        if (!cx.cells(k).empty())
            lattice = std::max(lattice, cx.cells(k).back() + 1);
    std::vector<std::uint32_t> local(lattice, 0);
    for (std::size_t k = 0; k <= d; ++k)
        for (std::size_t i = 0; i < cx.cells(k).size(); ++i)
            local[cx.cells(k)[i]] = static_cast<std::uint32_t>(i);

    std::vector<std::size_t> ranks(d, 0);
    std::vector<std::uint8_t> cleared;
    for (std::size_t k = d; k >= 1; --k) {
        std::vector<std::uint8_t> pivots;
        ranks[k - 1] = reduce_boundary(cx, k, local, cleared, pivots);
        cleared = std::move(pivots);
    }
    return ranks;
}

BettiVector betti_z2(const SignGrid& grid) {
    const std::size_t d = grid.dim();
    if (d > 4)
        throw BudgetError("betti_z2 supports d <= 4");
    CubicalComplex cx(grid);
    BettiVector out;
    if (d == 4) {
        std::size_t lattice = 0;
        for (std::size_t k = 0; k <= d; ++k)
            if (!cx.cells(k).empty())
                lattice = std::max(lattice, cx.cells(k).back() + 1);
        std::vector<std::uint32_t> local(lattice, 0);
        for (std::size_t k = 0; k <= 1; ++k)
            for (std::size_t i = 0; i < cx.cells(k).size(); ++i)
                local[cx.cells(k)[i]] = static_cast<std::uint32_t>(i);
        std::vector<std::uint8_t> pivots;
        const std::size_t rank1 = reduce_boundary(cx, 1, local, {}, pivots);
        out.b = {static_cast<long long>(cx.cell_count(0) - rank1)};
        out.partial = true;
        return out;
    }
    const auto ranks = boundary_ranks(cx);
    out.b.resize(d + 1);
    for (std::size_t k = 0; k <= d; ++k) {
        const std::size_t rank_k = k == 0 ? 0 : ranks[k - 1];
        const std::size_t rank_next = k == d ? 0 : ranks[k];
        out.b[k] = static_cast<long long>(cx.cell_count(k) - rank_k - rank_next);
    }
    return out;
}

namespace {

struct DisjointSets {
    std::vector<std::size_t> parent;

    explicit DisjointSets(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }

    std::size_t find(std::size_t x) {
        while (parent[x] != x) {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        return x;
    }

    bool unite(std::size_t a, std::size_t b) {
        a = find(a);
        b = find(b);
        if (a == b)
            return false;
        parent[std::max(a, b)] = std::min(a, b);
        return true;
    }
};

} // namespace

std::size_t components(const SignGrid& grid) {
    const std::size_t d = grid.dim();
    const auto& res = grid.resolution();
    std::size_t offsets = 1;
    for (std::size_t a = 0; a < d; ++a)
        offsets *= 3;

    DisjointSets sets(grid.cell_count());
    std::size_t count = grid.flagged_count();
    std::vector<int> nb(d);
    for (std::size_t cell = 0; cell < grid.cell_count(); ++cell) {
        if (!grid.flag(cell))
            continue;
        const auto c = grid.cell_coordinates(cell);
        for (std::size_t o = 0; o < offsets; ++o) {
            std::size_t rem = o;
            bool inside = true;
            bool is_self = true;
            for (std::size_t a = 0; a < d; ++a) {
                const int delta = static_cast<int>(rem % 3) - 1;
                rem /= 3;
                nb[a] = c[a] + delta;
                is_self = is_self && delta == 0;
                inside = inside && nb[a] >= 0 && nb[a] < res[a];
            }
            if (is_self || !inside)
                continue;
            const std::size_t other = grid.linear_index(nb);
            if (other > cell && grid.flag(other) && sets.unite(cell, other))
                --count;
        }
    }
    return count;
}

BettiStability betti_with_stability(const ScalarField& f, const Box& box, int resolution, double tau,
                                    unsigned threads) {
    BettiStability out;
    out.base = betti_z2(sign_grid(f, box, uniform_resolution(box.dim(), resolution), tau, threads));
    out.doubled = betti_z2(sign_grid(f, box, uniform_resolution(box.dim(), 2 * resolution), tau, threads));
    out.stable = out.base == out.doubled;
    return out;
}

} // namespace pfaffnet
