#include "pfaffnet/jet.hpp"

#include "pfaffnet/errors.hpp"

#include <algorithm>
#include <map>
#include <mutex>
#include <stdexcept>
#include <string>

namespace pfaffnet {

namespace {

// All multi-indices of length d and total degree exactly deg, lexicographically descending
// in the first coordinate (x_1^deg first).
void append_degree(int d, int deg, std::vector<MultiIndex>& out) {
    MultiIndex alpha(d, 0);
    auto rec = [&](auto&& self, int pos, int remaining) -> void {
        if (pos == d - 1) {
            alpha[pos] = remaining;
            out.push_back(alpha);
            return;
        }
        for (int e = remaining; e >= 0; --e) {
            alpha[pos] = e;
            self(self, pos + 1, remaining - e);
        }
    };
    rec(rec, 0, deg);
}

double factorial(int n) {
    double f = 1.0;
    for (int i = 2; i <= n; ++i)
        f *= i;
    return f;
}

} // namespace

std::shared_ptr<const JetSpace> JetSpace::get(int d, int max_order) {
    static std::mutex mutex;
    static std::map<std::pair<int, int>, std::shared_ptr<const JetSpace>> cache;
    std::lock_guard lock(mutex);
    auto& slot = cache[{d, max_order}];
    if (!slot)
        slot = std::make_shared<const JetSpace>(d, max_order);
    return slot;
}

JetSpace::JetSpace(int d, int max_order) : d_(d), q_(max_order) {
    if (d < 1)
        throw ShapeError("jet dimension must be >= 1");
    if (max_order < 0 || max_order > kMaxJetOrder)
        throw BudgetError("jet order " + std::to_string(max_order) + " outside supported range 0.." +
                          std::to_string(kMaxJetOrder));
    prefix_.reserve(q_ + 1);
    for (int deg = 0; deg <= q_; ++deg) {
        append_degree(d_, deg, monomials_);
        prefix_.push_back(monomials_.size());
    }
    degrees_.reserve(monomials_.size());
    for (const auto& m : monomials_) {
        int s = 0;
        for (int e : m)
            s += e;
        degrees_.push_back(s);
    }
    const std::size_t n = monomials_.size();
    product_.assign(n * n, -1);
    raise_.assign(n * d_, -1);
    MultiIndex tmp(d_);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (degrees_[i] + degrees_[j] > q_)
                continue;
            for (int p = 0; p < d_; ++p)
                tmp[p] = monomials_[i][p] + monomials_[j][p];
            product_[i * n + j] = index_of(tmp);
        }
        if (degrees_[i] < q_) {
            for (int p = 0; p < d_; ++p) {
                tmp = monomials_[i];
                ++tmp[p];
                raise_[i * d_ + p] = index_of(tmp);
            }
        }
    }
}

std::ptrdiff_t JetSpace::index_of(const MultiIndex& alpha) const {
    if (static_cast<int>(alpha.size()) != d_)
        return -1;
    int deg = 0;
    for (int e : alpha) {
        if (e < 0)
            return -1;
        deg += e;
    }
    if (deg > q_)
        return -1;
    const std::size_t begin = deg == 0 ? 0 : prefix_[deg - 1];
    const std::size_t end = prefix_[deg];
    // descending lexicographic inside a degree block
    auto first = monomials_.begin() + static_cast<std::ptrdiff_t>(begin);
    auto last = monomials_.begin() + static_cast<std::ptrdiff_t>(end);
    auto it = std::lower_bound(first, last, alpha, [](const MultiIndex& a, const MultiIndex& b) { return a > b; });
    if (it == last || *it != alpha)
        return -1;
    return it - monomials_.begin();
}

Jet::Jet(std::shared_ptr<const JetSpace> space, int order) : space_(std::move(space)), order_(order) {
    if (!space_)
        throw std::invalid_argument("jet requires a space");
    if (order_ < 0 || order_ > space_->max_order())
        throw BudgetError("jet order " + std::to_string(order_) + " exceeds space order");
    coeffs_.assign(space_->size(), 0.0);
}

Jet Jet::constant(std::shared_ptr<const JetSpace> space, int order, double value) {
    Jet j(std::move(space), order);
    j.coeffs_[0] = value;
    return j;
}

Jet Jet::variable(std::shared_ptr<const JetSpace> space, int order, int p, double x0_p) {
    Jet j(std::move(space), order);
    j.coeffs_[0] = x0_p;
    if (order >= 1) {
        MultiIndex e(j.dim(), 0);
        e[p] = 1;
        j.coeffs_[j.space_->index_of(e)] = 1.0;
    }
    return j;
}

double Jet::partial(const MultiIndex& alpha) const {
    const auto idx = space_->index_of(alpha);
    if (idx < 0 || space_->degree(static_cast<std::size_t>(idx)) > order_)
        throw std::out_of_range("jet partial: multi-index beyond jet order");
    double scale = 1.0;
    for (int e : alpha)
        scale *= factorial(e);
    return scale * coeffs_[static_cast<std::size_t>(idx)];
}

double Jet::gradient(int p) const {
    if (order_ < 1)
        throw std::out_of_range("jet gradient requires order >= 1");
    const auto idx = space_->raise(0, p);
    return coeffs_[static_cast<std::size_t>(idx)];
}

Jet Jet::derivative(int p) const {
    if (order_ < 1)
        throw std::out_of_range("cannot differentiate an order-0 jet");
    Jet out(space_, order_ - 1);
    const std::size_t n = space_->prefix(order_ - 1);
    for (std::size_t i = 0; i < n; ++i) {
        const auto up = space_->raise(i, p);
        const int e = space_->monomial(i)[p] + 1;
        out.coeffs_[i] = e * coeffs_[static_cast<std::size_t>(up)];
    }
    return out;
}

Jet Jet::truncated(int order) const {
    if (order > order_)
        throw std::invalid_argument("cannot raise jet order by truncation");
    Jet out(space_, order);
    const std::size_t n = space_->prefix(order);
    std::copy(coeffs_.begin(), coeffs_.begin() + static_cast<std::ptrdiff_t>(n), out.coeffs_.begin());
    return out;
}

void Jet::check_compatible(const Jet& other) const {
    if (space_ != other.space_)
        throw ShapeError("jets live in different spaces");
}

Jet& Jet::operator+=(const Jet& other) {
    return add_scaled(1.0, other);
}

Jet& Jet::operator-=(const Jet& other) {
    check_compatible(other);
    order_ = std::min(order_, other.order_);
    const std::size_t n = space_->prefix(order_);
    for (std::size_t i = 0; i < n; ++i)
        coeffs_[i] -= other.coeffs_[i];
    std::fill(coeffs_.begin() + static_cast<std::ptrdiff_t>(n), coeffs_.end(), 0.0);
    return *this;
}

Jet& Jet::operator*=(double s) {
    for (double& c : coeffs_)
        c *= s;
    return *this;
}

Jet& Jet::add_scaled(double s, const Jet& other) {
    check_compatible(other);
    order_ = std::min(order_, other.order_);
    const std::size_t n = space_->prefix(order_);
    for (std::size_t i = 0; i < n; ++i)
        coeffs_[i] += s * other.coeffs_[i];
    std::fill(coeffs_.begin() + static_cast<std::ptrdiff_t>(n), coeffs_.end(), 0.0);
    return *this;
}

Jet operator*(const Jet& a, const Jet& b) {
    a.check_compatible(b);
    Jet out(a.space_, std::min(a.order_, b.order_));
    const std::size_t n = a.space_->prefix(out.order_);
    for (std::size_t i = 0; i < n; ++i) {
        const double ai = a.coeffs_[i];
        if (ai == 0.0)
            continue;
        for (std::size_t j = 0; j < n; ++j) {
            const auto k = a.space_->product(i, j);
            if (k < 0 || static_cast<std::size_t>(k) >= n)
                continue;
            out.coeffs_[static_cast<std::size_t>(k)] += ai * b.coeffs_[j];
        }
    }
    return out;
}

Jet Jet::compose(std::span<const double> outer) const {
    if (outer.size() < static_cast<std::size_t>(order_) + 1)
        throw std::invalid_argument("compose needs outer derivatives up to the jet order");
    // g(f0 + delta) = sum_j g^(j)(f0) / j! * delta^j
    Jet delta = *this;
    delta.coeffs_[0] = 0.0;
    Jet out = constant(space_, order_, outer[0]);
    Jet power = constant(space_, order_, 1.0);
    double inv_fact = 1.0;
    for (int j = 1; j <= order_; ++j) {
        power = power * delta;
        inv_fact /= j;
        out.add_scaled(outer[j] * inv_fact, power);
    }
    return out;
}

} // namespace pfaffnet
