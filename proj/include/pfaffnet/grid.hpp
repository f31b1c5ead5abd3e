#pragma once

#include "pfaffnet/geometry.hpp"

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace pfaffnet {

/// Boolean flags on the cells of a regular grid over a box. Cells are stored
/// with axis 0 varying fastest.
class SignGrid {
public:
    SignGrid() = default;
    /// Throws ShapeError unless resolution has one entry >= 2 per box axis.
    SignGrid(Box box, std::vector<int> resolution);

    const Box& box() const noexcept { return box_; }
    const std::vector<int>& resolution() const noexcept { return resolution_; }
    std::size_t dim() const noexcept { return resolution_.size(); }
    std::size_t cell_count() const noexcept { return flags_.size(); }
    std::size_t flagged_count() const noexcept;

    bool flag(std::size_t cell) const { return flags_[cell] != 0; }
    void set_flag(std::size_t cell, bool v) { flags_[cell] = v ? 1 : 0; }
    const std::vector<std::uint8_t>& flags() const noexcept { return flags_; }

    std::size_t linear_index(const std::vector<int>& cell) const;
    std::vector<int> cell_coordinates(std::size_t cell) const;
    std::vector<double> cell_center(std::size_t cell) const;
    double cell_width(std::size_t axis) const { return box_.width(axis) / resolution_[axis]; }

    /// True if every flagged cell of this grid is flagged in `other`.
    bool is_subset_of(const SignGrid& other) const;

private:
    Box box_;
    std::vector<int> resolution_;
    std::vector<std::uint8_t> flags_;
};

/// Same resolution on every axis.
std::vector<int> uniform_resolution(std::size_t d, int n);

/// Run-length-encoded CSV. Header lines start with '#':
///   # box=lo0:hi0,lo1:hi1
///   # resolution=n0,n1
///   # <key>=<value>      (one line per metadata entry, in key order)
/// followed by a "value,run" header and one row per run over cells in storage order.
void write_rle_csv(std::ostream& out, const SignGrid& grid, const std::map<std::string, std::string>& metadata);

struct RleGrid {
    SignGrid grid;
    std::map<std::string, std::string> metadata;
};

RleGrid read_rle_csv(std::istream& in);

/// Shortest round-trip decimal representation of a double.
std::string format_double(double v);

} // namespace pfaffnet
