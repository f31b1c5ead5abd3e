#include "pfaffnet/grid.hpp"

#include "pfaffnet/errors.hpp"

#include <charconv>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>

namespace pfaffnet {

SignGrid::SignGrid(Box box, std::vector<int> resolution) : box_(std::move(box)), resolution_(std::move(resolution)) {
    box_.validate();
    if (resolution_.size() != box_.dim())
        throw ShapeError("resolution needs one entry per box axis");
    std::size_t n = 1;
    for (int r : resolution_) {
        if (r < 2)
            throw ShapeError("resolution must be >= 2 on every axis");
        n *= static_cast<std::size_t>(r);
    }
    flags_.assign(n, 0);
}

std::size_t SignGrid::flagged_count() const noexcept {
    std::size_t n = 0;
    for (auto f : flags_)
        n += f != 0;
    return n;
}

std::size_t SignGrid::linear_index(const std::vector<int>& cell) const {
    std::size_t idx = 0;
    std::size_t stride = 1;
    for (std::size_t a = 0; a < resolution_.size(); ++a) {
        idx += static_cast<std::size_t>(cell[a]) * stride;
        stride *= static_cast<std::size_t>(resolution_[a]);
    }
    return idx;
}

std::vector<int> SignGrid::cell_coordinates(std::size_t cell) const {
    std::vector<int> c(resolution_.size());
    for (std::size_t a = 0; a < resolution_.size(); ++a) {
        c[a] = static_cast<int>(cell % static_cast<std::size_t>(resolution_[a]));
        cell /= static_cast<std::size_t>(resolution_[a]);
    }
    return c;
}

std::vector<double> SignGrid::cell_center(std::size_t cell) const {
    const auto c = cell_coordinates(cell);
    std::vector<double> x(c.size());
    for (std::size_t a = 0; a < c.size(); ++a)
        x[a] = box_.lo[a] + (c[a] + 0.5) * cell_width(a);
    return x;
}

bool SignGrid::is_subset_of(const SignGrid& other) const {
    if (other.resolution_ != resolution_ || !(other.box_ == box_))
        throw ShapeError("grids are not defined on the same cells");
    for (std::size_t i = 0; i < flags_.size(); ++i)
        if (flags_[i] && !other.flags_[i])
            return false;
    return true;
}

std::vector<int> uniform_resolution(std::size_t d, int n) {
    return std::vector<int>(d, n);
}

std::string format_double(double v) {
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, end);
}

void write_rle_csv(std::ostream& out, const SignGrid& grid, const std::map<std::string, std::string>& metadata) {
    out << "# box=";
    for (std::size_t a = 0; a < grid.dim(); ++a)
        out << (a ? "," : "") << format_double(grid.box().lo[a]) << ':' << format_double(grid.box().hi[a]);
    out << "\n# resolution=";
    for (std::size_t a = 0; a < grid.dim(); ++a)
        out << (a ? "," : "") << grid.resolution()[a];
    out << '\n';
    for (const auto& [k, v] : metadata)
        out << "# " << k << '=' << v << '\n';
    out << "value,run\n";
    const auto& flags = grid.flags();
    std::size_t i = 0;
    while (i < flags.size()) {
        std::size_t j = i;
        while (j < flags.size() && flags[j] == flags[i])
            ++j;
        out << static_cast<int>(flags[i]) << ',' << (j - i) << '\n';
        i = j;
    }
}

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> parts;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, sep))
        parts.push_back(item);
    return parts;
}

} // namespace

RleGrid read_rle_csv(std::istream& in) {
    std::string line;
    Box box;
    std::vector<int> resolution;
    std::map<std::string, std::string> metadata;
    bool header_seen = false;
    std::vector<std::pair<int, std::size_t>> runs;
    while (std::getline(in, line)) {
        if (line.empty())
            continue;
        if (line.rfind("# ", 0) == 0) {
            const auto eq = line.find('=');
            if (eq == std::string::npos)
                throw std::invalid_argument("malformed RLE header line: " + line);
            const std::string key = line.substr(2, eq - 2);
            const std::string value = line.substr(eq + 1);
            if (key == "box") {
                for (const auto& axis : split(value, ',')) {
                    const auto colon = axis.find(':');
                    box.lo.push_back(std::stod(axis.substr(0, colon)));
                    box.hi.push_back(std::stod(axis.substr(colon + 1)));
                }
            } else if (key == "resolution") {
                for (const auto& r : split(value, ','))
                    resolution.push_back(std::stoi(r));
            } else {
                metadata[key] = value;
            }
            continue;
        }
        if (!header_seen) {
            if (line != "value,run")
                throw std::invalid_argument("expected 'value,run' header");
            header_seen = true;
            continue;
        }
        const auto parts = split(line, ',');
        if (parts.size() != 2)
            throw std::invalid_argument("malformed RLE row: " + line);
        runs.emplace_back(std::stoi(parts[0]), static_cast<std::size_t>(std::stoull(parts[1])));
    }
    RleGrid result{SignGrid(box, resolution), metadata};
    std::size_t pos = 0;
    for (const auto& [v, n] : runs) {
        if (pos + n > result.grid.cell_count())
            throw std::invalid_argument("RLE runs exceed the grid size");
        for (std::size_t i = 0; i < n; ++i)
            result.grid.set_flag(pos++, v != 0);
    }
    if (pos != result.grid.cell_count())
        throw std::invalid_argument("RLE runs do not cover the grid");
    return result;
}

} // namespace pfaffnet
