#pragma once

// Schoolbook base-1e9 unsigned integers, kept deliberately naive: powers are
// computed by repeated multiplication, never by squaring.

#include <algorithm>
#include <cstdint>
#include <string>
#include <vector>

namespace oracle {

class Decimal {
public:
    Decimal(std::uint64_t v = 0) {
        while (v) {
            limbs_.push_back(static_cast<std::uint32_t>(v % kBase));
            v /= kBase;
        }
    }

    bool is_zero() const { return limbs_.empty(); }

    friend Decimal operator*(const Decimal& a, const Decimal& b) {
        Decimal out;
        if (a.is_zero() || b.is_zero())
            return out;
        std::vector<std::uint64_t> acc(a.limbs_.size() + b.limbs_.size() + 1, 0);
        for (std::size_t i = 0; i < a.limbs_.size(); ++i) {
            std::uint64_t carry = 0;
            for (std::size_t j = 0; j < b.limbs_.size(); ++j) {
                const std::uint64_t cur = acc[i + j] + std::uint64_t(a.limbs_[i]) * b.limbs_[j] + carry;
                acc[i + j] = cur % kBase;
                carry = cur / kBase;
            }
            std::size_t k = i + b.limbs_.size();
            while (carry) {
                const std::uint64_t cur = acc[k] + carry;
                acc[k++] = cur % kBase;
                carry = cur / kBase;
            }
        }
        for (auto v : acc)
            out.limbs_.push_back(static_cast<std::uint32_t>(v));
        out.trim();
        return out;
    }

    friend Decimal operator+(const Decimal& a, const Decimal& b) {
        Decimal out;
        std::uint64_t carry = 0;
        for (std::size_t i = 0; i < std::max(a.limbs_.size(), b.limbs_.size()) || carry; ++i) {
            std::uint64_t cur = carry;
            if (i < a.limbs_.size())
                cur += a.limbs_[i];
            if (i < b.limbs_.size())
                cur += b.limbs_[i];
            out.limbs_.push_back(static_cast<std::uint32_t>(cur % kBase));
            carry = cur / kBase;
        }
        out.trim();
        return out;
    }

    friend bool operator==(const Decimal& a, const Decimal& b) { return a.limbs_ == b.limbs_; }

    std::string str() const {
        if (limbs_.empty())
            return "0";
        std::string out = std::to_string(limbs_.back());
        for (std::size_t i = limbs_.size() - 1; i-- > 0;) {
            std::string part = std::to_string(limbs_[i]);
            out += std::string(9 - part.size(), '0') + part;
        }
        return out;
    }

private:
    static constexpr std::uint64_t kBase = 1000000000ULL;

    void trim() {
        while (!limbs_.empty() && limbs_.back() == 0)
            limbs_.pop_back();
    }

    std::vector<std::uint32_t> limbs_;
};

inline Decimal naive_pow(const Decimal& base, long long e) {
    Decimal out(1);
    for (long long i = 0; i < e; ++i)
        out = out * base;
    return out;
}

// 2^{R(R+1)/2} (1+L)^{R+1}
inline Decimal zero_bound(long long R, long long L) {
    return naive_pow(2, R * (R + 1) / 2) * naive_pow(1 + L, R + 1);
}

// 2^{R(R-1)/2} s^d (d beta + min(d,R) alpha)^{d+R}
inline Decimal gv_bound(long long d, std::uint64_t s, long long R, long long alpha, long long beta) {
    const long long base = d * beta + std::min(d, R) * alpha;
    return naive_pow(2, R * (R - 1) / 2) * naive_pow(s, d) * naive_pow(static_cast<std::uint64_t>(base), d + R);
}

} // namespace oracle
