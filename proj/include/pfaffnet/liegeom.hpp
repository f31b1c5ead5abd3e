#pragma once

#include "pfaffnet/bounds.hpp"
#include "pfaffnet/grid.hpp"
#include "pfaffnet/network.hpp"
#include "pfaffnet/polynomial.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace pfaffnet {

/// Largest bracket length and ambient dimension accepted by the locus sampler.
inline constexpr int kMaxBracketLength = kMaxJetOrder + 1;
inline constexpr int kMaxLocusDim = 4;

struct BracketTerm;
using BracketPtr = std::shared_ptr<const BracketTerm>;

/// Binary bracket tree. Leaves carry a 0-based generator index.
struct BracketTerm {
    int generator = -1;
    BracketPtr left;
    BracketPtr right;
    int length = 1;

    bool is_leaf() const noexcept { return generator >= 0; }
    /// "X1", "[X1,X2]", ... with 1-based generator labels.
    std::string str() const;

    static BracketPtr leaf(int generator);
    static BracketPtr bracket(BracketPtr left, BracketPtr right);
};

/// Hall mode: standard bracketings of Lyndon words, by length then lexicographic.
/// All-trees mode: every bracket tree, by length, then left size, then left and right order.
std::vector<BracketPtr> enumerate_brackets(int m, int k, BracketMode mode);

using ComponentProvider = std::variant<NetworkSpec, SparsePoly>;

/// m vector fields on R^d with components X_{i,p}; components(i * d + p).
/// Network components must share one architecture and activation; polynomial
/// components are fixtures in the variables x_1..x_d.
class VectorFieldFamily {
public:
    VectorFieldFamily(int d, int m, std::vector<ComponentProvider> components);

    int dim() const noexcept { return d_; }
    int fields() const noexcept { return m_; }
    const ComponentProvider& component(int i, int p) const { return components_[static_cast<std::size_t>(i * d_ + p)]; }
    bool has_polynomial_components() const noexcept { return has_poly_; }
    /// Shared architecture of the network components, if any.
    const std::optional<Architecture>& architecture() const noexcept { return arch_; }

    /// Jets of the components of field i at z.
    std::vector<Jet> field_jets(int i, std::span<const double> z, int order) const;

private:
    int d_;
    int m_;
    std::vector<ComponentProvider> components_;
    bool has_poly_ = false;
    std::optional<Architecture> arch_;
};

/// Seeded family whose d*m components are independent networks of one architecture.
VectorFieldFamily sample_family(int d, int m, const Architecture& arch, ActivationPtr activation, std::uint64_t seed,
                                double scale);

/// Polynomial fixtures: Grushin X1 = dx, X2 = x dy on R^2; Heisenberg
/// X1 = dx - (y/2) dt, X2 = dy + (x/2) dt on R^3.
VectorFieldFamily grushin_family();
VectorFieldFamily heisenberg_family();

/// [X,Y]_a = sum_b X_b d_b Y_a - Y_b d_b X_a on component jets; the result is one order lower.
std::vector<Jet> lie_bracket(const std::vector<Jet>& X, const std::vector<Jet>& Y);

/// Coordinate vector of the bracket at z.
std::vector<double> bracket_eval(const VectorFieldFamily& family, const BracketTerm& term, std::span<const double> z);

struct BracketMatrix {
    std::vector<double> z;
    /// d x |B_k|, one column per bracket in enumeration order.
    Eigen::MatrixXd columns;
};

BracketMatrix bracket_matrix(const VectorFieldFamily& family, int k, std::span<const double> z,
                             BracketMode mode = BracketMode::Hall);

/// All (rho+1)-minors, row subsets outer and column subsets inner, both in
/// lexicographic order. Empty if rho + 1 exceeds min(rows, cols).
std::vector<double> minors(const Eigen::MatrixXd& A, int rho);

/// Determinant by cofactor expansion up to 4x4, partial-pivot LU beyond.
double determinant(const Eigen::MatrixXd& M);

/// Number of singular values above tol * (sigma_max + machine floor).
int rank_at(const Eigen::MatrixXd& A, double tol);

enum class LocusCriterion { Svd, Minor };

std::string to_string(LocusCriterion c);
LocusCriterion parse_locus_criterion(const std::string& text);

struct LocusOptions {
    LocusCriterion criterion = LocusCriterion::Svd;
    /// Relative rank tolerance.
    double tol = 1e-8;
    /// Fixed minor threshold; unset means a per-cell threshold derived from tol.
    std::optional<double> epsilon;
    BracketMode mode = BracketMode::Hall;
    unsigned threads = 1;
    std::size_t max_cells = std::size_t{1} << 22;
};

enum class CellLabel : std::uint8_t { Out = 0, In = 1, Margin = 2 };

struct LocusResult {
    /// Cells flagged in the thickened locus.
    SignGrid grid;
    /// In / out, or margin when the decision flips between tol and 10 tol
    /// (epsilon and 10 epsilon for a fixed minor threshold).
    std::vector<CellLabel> labels;
    std::size_t margin_cells = 0;
};

/// Per-cell test quantities at the cell center c with half-widths h/2:
/// delta = tol (sigma_max(A_1) + floor) + sum_p ||d_p A_1||_2 h_p / 2, the
/// first-order spread of the generator matrix over the cell.
struct LocusCellData {
    /// sigma_{rho+1}(A_k), 0 if rank cannot exceed rho.
    double sigma_next = 0.0;
    double max_minor = 0.0;
    double sigma_max_generators = 0.0;
    /// sum_p ||d_p A_1||_2 h_p / 2
    double spread = 0.0;
};

LocusCellData locus_cell_data(const VectorFieldFamily& family, int k, int rho, std::span<const double> center,
                              std::span<const double> cell_width, BracketMode mode);

/// Thickened rank-drop locus {rank A_k <= rho} on cell centers. The svd
/// criterion flags sigma_{rho+1}(A_k) <= delta; the minor criterion flags
/// max |M_i| <= epsilon, by default delta (sigma_max(A_1) + floor)^rho.
/// Throws BudgetError for d > 4, k > 5 or more than max_cells cells.
LocusResult locus_sample(const VectorFieldFamily& family, int k, int rho, const Box& box,
                         const std::vector<int>& resolution, const LocusOptions& opts = {});

} // namespace pfaffnet
