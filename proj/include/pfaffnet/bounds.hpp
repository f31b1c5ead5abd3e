#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <string>
#include <utility>
#include <vector>

namespace pfaffnet {

using BigInt = boost::multiprecision::cpp_int;

/// Positive rational p/q used for the domain constant.
struct Rational {
    BigInt num{1};
    BigInt den{1};

    Rational() = default;
    Rational(BigInt n, BigInt d);

    /// Accepts "p", "p/q" or a plain decimal such as "0.25".
    static Rational parse(const std::string& text);
    std::string str() const;
    bool is_one() const { return num == den; }
};

/// How iterated brackets of length <= k are counted.
enum class BracketMode {
    Hall,     ///< Hall/Lyndon basis of the free Lie algebra
    AllTrees, ///< every binary bracketing with labelled leaves
};

std::string to_string(BracketMode mode);
/// Accepts "hall", "all-trees" and "all_trees".
BracketMode parse_bracket_mode(const std::string& text);

/// Exact bound value with its provenance.
struct BigBound {
    BigInt value;
    double log10 = 0.0;
    std::string formula;
    std::vector<std::pair<std::string, std::string>> inputs;
    /// States the value of the unspecified domain constant used.
    std::string constant_tag;

    std::string decimal() const { return value.str(); }
    /// "name=value;name=value" in insertion order.
    std::string inputs_string() const;
};

/// log10 of a positive big integer, accurate to double rounding.
double log10_of(const BigInt& v);

/// ceil(C * 2^{R(R+1)/2} * (1+L)^{R+1}).
BigBound zero_bound(int R, int L, const Rational& C = {});

/// ceil(C * 2^{R(R-1)/2} * (d + min(d,R)(1+2L))^{d+R}).
BigBound betti_bound(int d, int R, int L, const Rational& C = {});

/// ceil(C * 2^{R(R-1)/2} * s^d * (d beta + min(d,R) alpha)^{d+R}).
BigBound gv_bound(int d, const BigInt& s, int R, int alpha, int beta, const Rational& C = {});

/// |B_k| under the given counting mode. Hall: sum over n <= k of the Witt
/// numbers (1/n) sum_{e | n} mu(e) m^{n/e}. AllTrees: sum_j m^j Catalan(j-1).
BigInt bracket_count(int m, int k, BracketMode mode);

/// C(d, rho+1) * C(Bk, rho+1).
BigInt s_count(int d, int rho, const BigInt& Bk);

/// Format of the minors used for the rank-drop bound:
/// R_k = d m (r+2) sum n_l, alpha_k = 1 + 2L, beta = (rho+1)(1 + (k-1) alpha_k).
struct RankDropFormat {
    int R = 0;
    int alpha = 1;
    int beta = 0;
    BigInt brackets;
    BigInt minors;
};

RankDropFormat rankdrop_format(int d, int m, int k, int rho, const std::vector<int>& widths, int r, BracketMode mode);

/// gv_bound(d, s_count(d, rho, |B_k|), R_k, alpha_k, beta_k, C). Throws
/// std::invalid_argument when rho + 1 > min(d, |B_k|): the locus is then the
/// whole domain and there are no minors.
BigBound rankdrop_bound(int d, int m, int k, int rho, const std::vector<int>& widths, int r, const Rational& C = {},
                        BracketMode mode = BracketMode::Hall);

BigInt binomial(const BigInt& n, int k);
BigInt catalan(int n);

} // namespace pfaffnet
