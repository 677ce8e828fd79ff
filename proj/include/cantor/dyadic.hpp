#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cmath>
#include <compare>
#include <cstdint>
#include <ostream>
#include <stdexcept>
#include <string>

namespace cantor {

using BigInt = boost::multiprecision::cpp_int;

// Exact k / 2^e, numerator odd or zero, zero has exponent 0.
class Dyadic {
public:
    Dyadic() = default;
    Dyadic(long long n) : num_(n), exp_(0) {}  // NOLINT: implicit from integers
    Dyadic(BigInt num, std::uint64_t exp) : num_(std::move(num)), exp_(exp) { canonicalize(); }

    static Dyadic pow2neg(std::uint64_t e) { return Dyadic(BigInt(1), e); }

    const BigInt& numerator() const { return num_; }
    std::uint64_t exponent() const { return exp_; }

    bool is_zero() const { return num_ == 0; }
    int sign() const { return num_.sign(); }

    Dyadic operator-() const { return Dyadic(-num_, exp_); }

    friend Dyadic operator+(const Dyadic& a, const Dyadic& b) {
        if (a.exp_ >= b.exp_) return Dyadic(a.num_ + (b.num_ << (a.exp_ - b.exp_)), a.exp_);
        return Dyadic((a.num_ << (b.exp_ - a.exp_)) + b.num_, b.exp_);
    }
    friend Dyadic operator-(const Dyadic& a, const Dyadic& b) { return a + (-b); }
    friend Dyadic operator*(const Dyadic& a, const Dyadic& b) {
        return Dyadic(a.num_ * b.num_, a.exp_ + b.exp_);
    }
    Dyadic& operator+=(const Dyadic& o) { return *this = *this + o; }
    Dyadic& operator-=(const Dyadic& o) { return *this = *this - o; }

    Dyadic half() const { return shifted(1); }
    // this / 2^k
    Dyadic shifted(std::uint64_t k) const { return num_ == 0 ? Dyadic() : Dyadic(num_, exp_ + k); }

    friend bool operator==(const Dyadic& a, const Dyadic& b) {
        return a.exp_ == b.exp_ && a.num_ == b.num_;
    }
    friend std::strong_ordering operator<=>(const Dyadic& a, const Dyadic& b) {
        std::uint64_t e = a.exp_ > b.exp_ ? a.exp_ : b.exp_;
        BigInt x = a.num_ << (e - a.exp_);
        BigInt y = b.num_ << (e - b.exp_);
        if (x < y) return std::strong_ordering::less;
        if (x > y) return std::strong_ordering::greater;
        return std::strong_ordering::equal;
    }

    std::string str() const { return num_.str() + "/2^" + std::to_string(exp_); }

    // Accepts "<num>/2^<exp>" or a plain integer.
    static Dyadic parse(const std::string& s) {
        auto slash = s.find('/');
        try {
            if (slash == std::string::npos) return Dyadic(BigInt(s), 0);
            if (s.compare(slash, 3, "/2^") != 0) throw std::invalid_argument("bad dyadic: " + s);
            std::string n = s.substr(0, slash);
            std::string e = s.substr(slash + 3);
            if (n.empty() || e.empty()) throw std::invalid_argument("bad dyadic: " + s);
            for (char c : e)
                if (c < '0' || c > '9') throw std::invalid_argument("bad dyadic: " + s);
            return Dyadic(BigInt(n), std::stoull(e));
        } catch (const std::runtime_error&) {
            throw std::invalid_argument("bad dyadic: " + s);
        }
    }

    double to_double() const {
        return static_cast<double>(num_) * std::ldexp(1.0, -static_cast<int>(exp_ > 100000 ? 100000 : exp_));
    }

private:
    void canonicalize() {
        if (num_ == 0) {
            exp_ = 0;
            return;
        }
        if (exp_ == 0) return;
        std::uint64_t tz = boost::multiprecision::lsb(num_ < 0 ? BigInt(-num_) : num_);
        std::uint64_t k = tz < exp_ ? tz : exp_;
        num_ >>= k;
        exp_ -= k;
    }

    BigInt num_ = 0;
    std::uint64_t exp_ = 0;
};

inline std::ostream& operator<<(std::ostream& os, const Dyadic& d) { return os << d.str(); }

inline Dyadic dyadic_add(const Dyadic& a, const Dyadic& b) { return a + b; }
inline std::strong_ordering dyadic_cmp(const Dyadic& a, const Dyadic& b) { return a <=> b; }

// Least n with 2^-n <= q, for 0 < q <= 1.
inline std::uint64_t ceil_neg_log2(const Dyadic& q) {
    if (q.sign() <= 0 || q > Dyadic(1)) throw std::domain_error("ceil_neg_log2: q must lie in (0,1]");
    // q = k / 2^e with k odd; 2^-n <= k/2^e  <=>  2^(e-n) <= k  <=>  e-n <= floor(log2 k)
    std::uint64_t fl = boost::multiprecision::msb(q.numerator());
    return q.exponent() > fl ? q.exponent() - fl : 0;
}

}  // namespace cantor
