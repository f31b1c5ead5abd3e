#include "config.hpp"

#include "pfaffnet/errors.hpp"

#include <cmath>

namespace pfaffnet::cli {

Section::Section(const json& j, std::string where, std::initializer_list<const char*> allowed)
    : j_(j), path_(std::move(where)) {
    if (!j_.is_object())
        throw SchemaError((path_.empty() ? std::string("config") : path_) + " must be an object");
    std::set<std::string> ok(allowed.begin(), allowed.end());
    for (const auto& [key, value] : j_.items())
        if (!ok.count(key))
            throw SchemaError("unknown key '" + path(key.c_str()) + "'");
}

int Section::integer(const char* key, int fallback, int min_value) {
    int v = fallback;
    if (has(key)) {
        const auto& x = j_.at(key);
        if (!x.is_number_integer())
            throw SchemaError(path(key) + " must be an integer");
        v = x.get<int>();
    }
    if (v < min_value)
        throw SchemaError(path(key) + " must be >= " + std::to_string(min_value));
    resolved[key] = v;
    return v;
}

int Section::required_integer(const char* key, int min_value) {
    if (!has(key))
        throw SchemaError("missing " + path(key));
    return integer(key, 0, min_value);
}

double Section::number(const char* key, double fallback) {
    double v = fallback;
    if (has(key)) {
        const auto& x = j_.at(key);
        if (!x.is_number() || !std::isfinite(x.get<double>()))
            throw SchemaError(path(key) + " must be a finite number");
        v = x.get<double>();
    }
    resolved[key] = v;
    return v;
}

double Section::positive(const char* key, double fallback) {
    const double v = number(key, fallback);
    if (!(v > 0.0))
        throw SchemaError(path(key) + " must be positive");
    return v;
}

std::string Section::string(const char* key, const std::string& fallback, const std::set<std::string>& choices) {
    std::string v = fallback;
    if (has(key)) {
        if (!j_.at(key).is_string())
            throw SchemaError(path(key) + " must be a string");
        v = j_.at(key).get<std::string>();
    }
    if (!choices.empty() && !choices.count(v)) {
        std::string list;
        for (const auto& c : choices)
            list += (list.empty() ? "" : ", ") + c;
        throw SchemaError(path(key) + " must be one of: " + list);
    }
    resolved[key] = v;
    return v;
}

std::vector<double> Section::numbers(const char* key, std::size_t expected) {
    const auto& x = j_.at(key);
    if (!x.is_array() || x.size() != expected)
        throw SchemaError(path(key) + " must be an array of " + std::to_string(expected) + " numbers");
    std::vector<double> out;
    for (const auto& v : x) {
        if (!v.is_number() || !std::isfinite(v.get<double>()))
            throw SchemaError(path(key) + " must contain finite numbers");
        out.push_back(v.get<double>());
    }
    resolved[key] = out;
    return out;
}

std::vector<int> Section::positive_integers(const char* key) {
    if (!has(key))
        throw SchemaError("missing " + path(key));
    const auto& x = j_.at(key);
    if (!x.is_array() || x.empty())
        throw SchemaError(path(key) + " must be a non-empty array of positive integers");
    std::vector<int> out;
    for (const auto& v : x) {
        if (!v.is_number_integer() || v.get<long long>() < 1)
            throw SchemaError(path(key) + " must be a non-empty array of positive integers");
        out.push_back(v.get<int>());
    }
    resolved[key] = out;
    return out;
}

Section Section::child(const char* key, std::initializer_list<const char*> allowed) {
    if (!has(key))
        throw SchemaError("missing " + path(key));
    return Section(j_.at(key), path(key), allowed);
}

std::vector<std::uint64_t> parse_seed_range(const std::string& text) {
    const auto dots = text.find("..");
    try {
        if (dots == std::string::npos) {
            std::size_t used = 0;
            const auto v = std::stoull(text, &used);
            if (used != text.size())
                throw std::invalid_argument(text);
            return {v};
        }
        std::size_t used_a = 0, used_b = 0;
        const std::string sa = text.substr(0, dots), sb = text.substr(dots + 2);
        const auto a = std::stoull(sa, &used_a);
        const auto b = std::stoull(sb, &used_b);
        if (used_a != sa.size() || used_b != sb.size() || b < a)
            throw std::invalid_argument(text);
        if (b - a >= 1000000)
            throw SchemaError("seed range '" + text + "' is too long");
        std::vector<std::uint64_t> out;
        for (auto s = a; s <= b; ++s)
            out.push_back(s);
        return out;
    } catch (const SchemaError&) {
        throw;
    } catch (const std::exception&) {
        throw SchemaError("malformed seed range '" + text + "' (expected N or N..M)");
    }
}

std::vector<std::uint64_t> read_seeds(Section& s) {
    if (s.has("seed") && s.has("seeds"))
        throw SchemaError("give either seed or seeds, not both");
    std::vector<std::uint64_t> out;
    if (s.has("seeds")) {
        const auto& x = s.raw("seeds");
        if (x.is_string()) {
            out = parse_seed_range(x.get<std::string>());
        } else if (x.is_array() && !x.empty()) {
            for (const auto& v : x) {
                if (!v.is_number_unsigned())
                    throw SchemaError(s.path("seeds") + " entries must be nonnegative integers");
                out.push_back(v.get<std::uint64_t>());
            }
        } else {
            throw SchemaError(s.path("seeds") + " must be \"N..M\" or a non-empty array");
        }
    } else if (s.has("seed")) {
        const auto& x = s.raw("seed");
        if (!x.is_number_unsigned())
            throw SchemaError(s.path("seed") + " must be a nonnegative integer");
        out = {x.get<std::uint64_t>()};
    } else {
        out = {0};
    }
    s.resolved.erase("seed");
    s.resolved["seeds"] = out;
    return out;
}

Architecture read_architecture(Section& s) {
    auto a = s.child("architecture", {"d", "widths"});
    Architecture arch;
    arch.d = a.required_integer("d", 1);
    arch.widths = a.positive_integers("widths");
    s.resolved["architecture"] = a.resolved;
    return arch;
}

ActivationPtr read_activation(Section& s, const char* key, const std::string& fallback) {
    json j = s.has(key) ? s.raw(key) : json(fallback);
    try {
        auto act = activation_from_json(j);
        s.resolved[key] = j;
        return act;
    } catch (const SchemaError& e) {
        throw SchemaError(s.path(key) + ": " + e.what());
    }
}

Box read_box(Section& s, std::size_t d, double lo, double hi) {
    if (!s.has("box")) {
        auto b = Box::cube(d, lo, hi);
        s.resolved["box"] = {{"lo", b.lo}, {"hi", b.hi}};
        return b;
    }
    auto b = s.child("box", {"lo", "hi"});
    auto l = b.numbers("lo", d);
    auto h = b.numbers("hi", d);
    for (std::size_t a = 0; a < d; ++a)
        if (!(l[a] < h[a]))
            throw SchemaError(s.path("box") + " needs lo < hi on every axis");
    s.resolved["box"] = b.resolved;
    return Box(l, h);
}

Rational read_constant(Section& s) {
    std::string text = "1";
    if (s.has("C")) {
        const auto& x = s.raw("C");
        if (x.is_string())
            text = x.get<std::string>();
        else if (x.is_number_unsigned())
            text = std::to_string(x.get<std::uint64_t>());
        else
            throw SchemaError(s.path("C") + " must be a positive integer or a string \"p/q\" or decimal");
    }
    try {
        auto c = Rational::parse(text);
        s.resolved["C"] = c.str();
        return c;
    } catch (const std::invalid_argument& e) {
        throw SchemaError(s.path("C") + ": " + e.what());
    }
}

} // namespace pfaffnet::cli
