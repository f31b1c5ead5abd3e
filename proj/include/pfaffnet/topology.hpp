#pragma once

#include "pfaffnet/grid.hpp"

#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <vector>

namespace pfaffnet {

// ---------------------------------------------------------------------------
// One-dimensional zeros and superlevel intervals
// ---------------------------------------------------------------------------

struct ZeroSearchOptions {
    int initial_samples = 4096;
    /// Bisection stops once a bracket is narrower than this.
    double tol = 1e-12;
    /// |f| below this counts as zero for tangency and F == 0 detection.
    double floor = 1e-14;
};

struct ZeroSearchResult {
    /// Transversal zeros (sign changes), sorted.
    std::vector<double> zeros;
    /// Local minima of |f| below the floor without a sign change; not counted.
    std::vector<double> tangential;
    /// Every sample was below the floor: F == 0 candidate.
    bool identically_zero = false;

    std::size_t count() const noexcept { return zeros.size(); }
};

using ScalarFunction1D = std::function<double(double)>;

/// Counts sign changes of f on the open interval (lo, hi). Samples uniformly,
/// refines around sampled local minima of |f| with a golden-section search to
/// expose closely spaced pairs of zeros, and bisects every bracket. A sample
/// with f = 0 is treated as nonnegative.
ZeroSearchResult count_zeros_1d(const ScalarFunction1D& f, double lo, double hi, const ZeroSearchOptions& opts = {});

/// Subinterval of the real line with open or closed ends.
struct RealInterval {
    double lo = 0.0;
    double hi = 0.0;
    bool lo_closed = false;
    bool hi_closed = false;
};

/// Maximal subintervals of {f >= 0} inside (lo, hi).
std::vector<RealInterval> superlevel_intervals_1d(const ScalarFunction1D& f, double lo, double hi,
                                                  const ZeroSearchOptions& opts = {});

// ---------------------------------------------------------------------------
// Sign grids and cubical homology
// ---------------------------------------------------------------------------

using ScalarField = std::function<double(std::span<const double>)>;

/// Flags cell c iff f(center(c)) >= tau. Evaluation errors are rethrown as
/// CellEvaluationError carrying the cell index. `threads` = 0 uses all cores.
SignGrid sign_grid(const ScalarField& f, const Box& box, const std::vector<int>& resolution, double tau,
                   unsigned threads = 1);

/// Cubical complex made of the closed flagged cells and all their faces.
/// Cells live on the doubled lattice with extent 2 n_a + 1 per axis; a lattice
/// point's dimension is its number of odd coordinates.
class CubicalComplex {
public:
    /// Throws BudgetError if the doubled lattice exceeds `max_lattice_points`.
    explicit CubicalComplex(const SignGrid& grid, std::size_t max_lattice_points = std::size_t{1} << 27);

    std::size_t dim() const noexcept { return extent_.size(); }
    const std::vector<std::size_t>& cells(std::size_t k) const { return cells_[k]; }
    std::size_t cell_count(std::size_t k) const { return cells_[k].size(); }
    std::size_t cell_dimension(std::size_t lattice_id) const;
    /// Lattice ids of the codimension-one faces of a cell.
    std::vector<std::size_t> boundary(std::size_t lattice_id) const;
    bool contains(std::size_t lattice_id) const { return member_[lattice_id] != 0; }
    /// sum_k (-1)^k #cells_k
    long long euler_characteristic() const;

private:
    std::vector<std::size_t> extent_;
    std::vector<std::size_t> stride_;
    std::vector<std::uint8_t> member_;
    std::vector<std::vector<std::size_t>> cells_;
};

/// Z2 Betti numbers b_0..b_d. `partial` marks that only b_0 was computed (d = 4).
struct BettiVector {
    std::vector<long long> b;
    bool partial = false;

    long long total() const noexcept;
    long long at(std::size_t i) const { return i < b.size() ? b[i] : 0; }
    friend bool operator==(const BettiVector&, const BettiVector&) = default;
};

/// Ranks of the Z2 boundary maps d_1..d_dim (index k-1), by column reduction with clearing.
std::vector<std::size_t> boundary_ranks(const CubicalComplex& complex);

/// Homology of the closed cubical set. Full vector for d <= 3, b_0 only for
/// d = 4; BudgetError above that or if the complex is too large.
BettiVector betti_z2(const SignGrid& grid);

/// Connected components of the flagged cells; two cells are adjacent when their
/// closed cubes share any face (3^d - 1 neighbours), matching b_0 of the complex.
std::size_t components(const SignGrid& grid);

/// Betti numbers at a resolution and at twice that resolution.
struct BettiStability {
    BettiVector base;
    BettiVector doubled;
    bool stable = false;
};

BettiStability betti_with_stability(const ScalarField& f, const Box& box, int resolution, double tau,
                                    unsigned threads = 1);

} // namespace pfaffnet
