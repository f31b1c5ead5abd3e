#include "pfaffnet/bounds.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <stdexcept>

namespace pfaffnet {

namespace mp = boost::multiprecision;

Rational::Rational(BigInt n, BigInt d) : num(std::move(n)), den(std::move(d)) {
    if (den == 0)
        throw std::invalid_argument("rational with zero denominator");
    if (den < 0) {
        num = -num;
        den = -den;
    }
    if (num <= 0)
        throw std::invalid_argument("constant must be positive");
    const BigInt g = mp::gcd(num, den);
    num /= g;
    den /= g;
}

Rational Rational::parse(const std::string& text) {
    auto digits_only = [](const std::string& s) {
        return !s.empty() && std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isdigit(c); });
    };
    const auto slash = text.find('/');
    if (slash != std::string::npos) {
        const std::string p = text.substr(0, slash);
        const std::string q = text.substr(slash + 1);
        if (!digits_only(p) || !digits_only(q))
            throw std::invalid_argument("malformed rational '" + text + "'");
        return Rational(BigInt(p), BigInt(q));
    }
    const auto dot = text.find('.');
    if (dot == std::string::npos) {
        if (!digits_only(text))
            throw std::invalid_argument("malformed rational '" + text + "'");
        return Rational(BigInt(text), BigInt(1));
    }
    const std::string whole = text.substr(0, dot);
    const std::string frac = text.substr(dot + 1);
    if ((!whole.empty() && !digits_only(whole)) || !digits_only(frac))
        throw std::invalid_argument("malformed rational '" + text + "'");
    const BigInt scale = mp::pow(BigInt(10), static_cast<unsigned>(frac.size()));
    return Rational(BigInt(whole.empty() ? "0" : whole) * scale + BigInt(frac), scale);
}

std::string Rational::str() const {
    if (den == 1)
        return num.str();
    return num.str() + "/" + den.str();
}

std::string to_string(BracketMode mode) {
    return mode == BracketMode::Hall ? "hall" : "all-trees";
}

BracketMode parse_bracket_mode(const std::string& text) {
    if (text == "hall")
        return BracketMode::Hall;
    if (text == "all-trees" || text == "all_trees")
        return BracketMode::AllTrees;
    throw std::invalid_argument("unknown bracket mode '" + text + "'");
}

std::string BigBound::inputs_string() const {
    std::string out;
    for (const auto& [k, v] : inputs) {
        if (!out.empty())
            out += ';';
        out += k + "=" + v;
    }
    return out;
}

double log10_of(const BigInt& v) {
    if (v <= 0)
        throw std::domain_error("log10 of a nonpositive integer");
    const unsigned bits = mp::msb(v);
    if (bits < 1000)
        return std::log10(v.convert_to<double>());
    const unsigned shift = bits - 62;
    const BigInt top = v >> shift;
    return std::log10(top.convert_to<double>()) + shift * std::log10(2.0);
}

namespace {

BigInt ceil_scaled(const BigInt& x, const Rational& C) {
    return (C.num * x + C.den - 1) / C.den;
}

BigInt power_of_two(long long e) {
    return BigInt(1) << static_cast<unsigned>(e);
}

BigInt ipow(const BigInt& base, long long e) {
    return mp::pow(base, static_cast<unsigned>(e));
}

std::string constant_tag(const char* symbol, const Rational& C) {
    return std::string(symbol) + "=" + C.str() + " (domain constant unspecified; value holds modulo " + symbol + ")";
}

BigBound finish(std::string formula, BigInt value, std::vector<std::pair<std::string, std::string>> inputs,
                std::string tag) {
    BigBound b;
    b.value = std::move(value);
    b.log10 = log10_of(b.value);
    b.formula = std::move(formula);
    b.inputs = std::move(inputs);
    b.constant_tag = std::move(tag);
    return b;
}

int mobius(int n) {
    int result = 1;
    for (int p = 2; p * p <= n; ++p) {
        if (n % p != 0)
            continue;
        n /= p;
        if (n % p == 0)
            return 0;
        result = -result;
    }
    if (n > 1)
        result = -result;
    return result;
}

} // namespace

BigBound zero_bound(int R, int L, const Rational& C) {
    if (R < 0 || L < 1)
        throw std::invalid_argument("zero_bound requires R >= 0 and L >= 1");
    const long long r = R;
    const BigInt x = power_of_two(r * (r + 1) / 2) * ipow(BigInt(1 + L), r + 1);
    return finish("zero_bound", ceil_scaled(x, C),
                  {{"R", std::to_string(R)}, {"L", std::to_string(L)}, {"C", C.str()}}, constant_tag("C_I", C));
}

BigBound betti_bound(int d, int R, int L, const Rational& C) {
    if (d < 1 || R < 0 || L < 1)
        throw std::invalid_argument("betti_bound requires d >= 1, R >= 0, L >= 1");
    const long long r = R;
    const BigInt base = BigInt(d) + BigInt(std::min(d, R)) * (1 + 2 * L);
    const BigInt x = power_of_two(r * (r - 1) / 2) * ipow(base, static_cast<long long>(d) + r);
    return finish("betti_bound", ceil_scaled(x, C),
                  {{"d", std::to_string(d)}, {"R", std::to_string(R)}, {"L", std::to_string(L)}, {"C", C.str()}},
                  constant_tag("C_V", C));
}

BigBound gv_bound(int d, const BigInt& s, int R, int alpha, int beta, const Rational& C) {
    if (d < 1 || R < 0 || alpha < 0 || beta < 0 || s < 1)
        throw std::invalid_argument("gv_bound requires d >= 1, s >= 1 and nonnegative R, alpha, beta");
    const long long r = R;
    const BigInt base = BigInt(d) * beta + BigInt(std::min(d, R)) * alpha;
    const BigInt x = power_of_two(r * (r - 1) / 2) * ipow(s, d) * ipow(base, static_cast<long long>(d) + r);
    return finish("gv_bound", ceil_scaled(x, C),
                  {{"d", std::to_string(d)},
                   {"s", s.str()},
                   {"R", std::to_string(R)},
                   {"alpha", std::to_string(alpha)},
                   {"beta", std::to_string(beta)},
                   {"C", C.str()}},
                  constant_tag("C_V", C));
}

BigInt binomial(const BigInt& n, int k) {
    if (k < 0 || n < 0 || BigInt(k) > n)
        return 0;
    BigInt out = 1;
    for (int i = 0; i < k; ++i)
        out = out * (n - i) / (i + 1);
    return out;
}

BigInt catalan(int n) {
    if (n < 0)
        throw std::invalid_argument("catalan index must be >= 0");
    return binomial(BigInt(2 * n), n) / (n + 1);
}

BigInt bracket_count(int m, int k, BracketMode mode) {
    if (m < 1 || k < 1)
        throw std::invalid_argument("bracket_count requires m >= 1 and k >= 1");
    BigInt total = 0;
    for (int n = 1; n <= k; ++n) {
        if (mode == BracketMode::Hall) {
            BigInt sum = 0;
            for (int e = 1; e <= n; ++e)
                if (n % e == 0)
                    sum += mobius(e) * ipow(BigInt(m), n / e);
            total += sum / n;
        } else {
            total += ipow(BigInt(m), n) * catalan(n - 1);
        }
    }
    return total;
}

BigInt s_count(int d, int rho, const BigInt& Bk) {
    if (d < 1 || rho < 0)
        throw std::invalid_argument("s_count requires d >= 1 and rho >= 0");
    return binomial(BigInt(d), rho + 1) * binomial(Bk, rho + 1);
}

RankDropFormat rankdrop_format(int d, int m, int k, int rho, const std::vector<int>& widths, int r, BracketMode mode) {
    if (d < 1 || m < 1 || k < 1 || rho < 0 || r < 0 || widths.empty())
        throw std::invalid_argument("rankdrop_format: invalid inputs");
    long long neurons = 0;
    for (int w : widths) {
        if (w < 1)
            throw std::invalid_argument("rankdrop_format: widths must be >= 1");
        neurons += w;
    }
    RankDropFormat f;
    const int L = static_cast<int>(widths.size());
    // one chain per coefficient network, concatenated
    f.R = static_cast<int>(static_cast<long long>(d) * m * (r + 2) * neurons);
    f.alpha = 1 + 2 * L;
    // bracket of length j over degree-1 coefficients has degree 1 + (j-1) alpha
    f.beta = (rho + 1) * (1 + (k - 1) * f.alpha);
    f.brackets = bracket_count(m, k, mode);
    f.minors = s_count(d, rho, f.brackets);
    return f;
}

BigBound rankdrop_bound(int d, int m, int k, int rho, const std::vector<int>& widths, int r, const Rational& C,
                        BracketMode mode) {
    const RankDropFormat f = rankdrop_format(d, m, k, rho, widths, r, mode);
    if (f.minors == 0)
        throw std::invalid_argument("rho + 1 exceeds min(d, |B_k|): every point is in the locus");
    BigBound b = gv_bound(d, f.minors, f.R, f.alpha, f.beta, C);
    b.formula = "rankdrop_bound";
    std::string w;
    for (int x : widths)
        w += (w.empty() ? "" : ",") + std::to_string(x);
    b.inputs = {{"d", std::to_string(d)},
                {"m", std::to_string(m)},
                {"k", std::to_string(k)},
                {"rho", std::to_string(rho)},
                {"widths", w},
                {"r", std::to_string(r)},
                {"mode", to_string(mode)},
                {"C", C.str()},
                {"B_k", f.brackets.str()},
                {"s", f.minors.str()},
                {"R_k", std::to_string(f.R)},
                {"alpha_k", std::to_string(f.alpha)},
                {"beta_k", std::to_string(f.beta)},
                {"format_source", "implementation-derived"}};
    return b;
}

} // namespace pfaffnet
