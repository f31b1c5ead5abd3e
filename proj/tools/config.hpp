#pragma once

#include "pfaffnet/io.hpp"

#include <cstdint>
#include <initializer_list>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace pfaffnet::cli {

/// Typed access to one config object. Unknown keys and wrong types raise
/// SchemaError naming the offending path. Every value read (including
/// defaults) is copied into `resolved`.
class Section {
public:
    Section(const json& j, std::string path, std::initializer_list<const char*> allowed);

    bool has(const char* key) const { return j_.contains(key); }
    const json& raw(const char* key) const { return j_.at(key); }

    int integer(const char* key, int fallback, int min_value);
    int required_integer(const char* key, int min_value);
    double number(const char* key, double fallback);
    double positive(const char* key, double fallback);
    std::string string(const char* key, const std::string& fallback, const std::set<std::string>& choices = {});
    std::vector<double> numbers(const char* key, std::size_t expected);
    std::vector<int> positive_integers(const char* key);
    Section child(const char* key, std::initializer_list<const char*> allowed);

    std::string path(const char* key) const { return path_.empty() ? key : path_ + "." + key; }

    json resolved = json::object();

private:
    const json& j_;
    std::string path_;
};

std::vector<std::uint64_t> parse_seed_range(const std::string& text);

/// "seed": N, or "seeds": "N..M" or [N, ...].
std::vector<std::uint64_t> read_seeds(Section& s);

Architecture read_architecture(Section& s);

/// Builtin name or declaration object; recorded verbatim in `resolved`.
ActivationPtr read_activation(Section& s, const char* key, const std::string& fallback);

/// {"lo": [...], "hi": [...]} or default cube [lo, hi]^d.
Box read_box(Section& s, std::size_t d, double lo, double hi);

Rational read_constant(Section& s);

} // namespace pfaffnet::cli
