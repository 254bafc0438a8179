#pragma once

#include <cstdint>
#include <numeric>
#include <string>

#include "madc/errors.hpp"

namespace madc {

namespace detail {

inline long long checked_narrow(__int128 v, const char* op) {
    if (v > static_cast<__int128>(INT64_MAX) || v < static_cast<__int128>(INT64_MIN))
        throw overflow_error(std::string("rational ") + op + " overflows 64 bits");
    return static_cast<long long>(v);
}

}  // namespace detail

// Exact rational number. Always normalized: lowest terms, positive denominator.
// Intermediate products run through 128 bits so in-range results never wrap.
class rational {
  public:
    constexpr rational() = default;
    rational(long long num) : num_(num), den_(1) {}
    rational(long long num, long long den) : num_(num), den_(den) { normalize(); }

    long long num() const { return num_; }
    long long den() const { return den_; }
    bool is_zero() const { return num_ == 0; }

    friend rational operator+(const rational& a, const rational& b) {
        return make(static_cast<__int128>(a.num_) * b.den_ + static_cast<__int128>(b.num_) * a.den_,
                    static_cast<__int128>(a.den_) * b.den_);
    }
    friend rational operator-(const rational& a, const rational& b) {
        return make(static_cast<__int128>(a.num_) * b.den_ - static_cast<__int128>(b.num_) * a.den_,
                    static_cast<__int128>(a.den_) * b.den_);
    }
    friend rational operator*(const rational& a, const rational& b) {
        return make(static_cast<__int128>(a.num_) * b.num_, static_cast<__int128>(a.den_) * b.den_);
    }
    friend rational operator/(const rational& a, const rational& b) {
        if (b.num_ == 0) throw param_error("rational division by zero");
        return make(static_cast<__int128>(a.num_) * b.den_, static_cast<__int128>(a.den_) * b.num_);
    }
    rational& operator+=(const rational& o) { return *this = *this + o; }
    rational& operator-=(const rational& o) { return *this = *this - o; }
    rational& operator*=(const rational& o) { return *this = *this * o; }
    rational& operator/=(const rational& o) { return *this = *this / o; }
    rational operator-() const {
        rational r;
        r.num_ = -num_;
        r.den_ = den_;
        return r;
    }

    friend bool operator==(const rational& a, const rational& b) {
        return a.num_ == b.num_ && a.den_ == b.den_;
    }
    friend bool operator!=(const rational& a, const rational& b) { return !(a == b); }
    friend bool operator<(const rational& a, const rational& b) {
        return static_cast<__int128>(a.num_) * b.den_ < static_cast<__int128>(b.num_) * a.den_;
    }
    friend bool operator>(const rational& a, const rational& b) { return b < a; }
    friend bool operator<=(const rational& a, const rational& b) { return !(b < a); }
    friend bool operator>=(const rational& a, const rational& b) { return !(a < b); }

    double to_double() const { return static_cast<double>(num_) / static_cast<double>(den_); }

    // "0", "7", "-1/18": integers drop the denominator.
    std::string str() const {
        if (den_ == 1) return std::to_string(num_);
        return std::to_string(num_) + "/" + std::to_string(den_);
    }

  private:
    static rational make(__int128 num, __int128 den) {
        if (den == 0) throw param_error("rational: zero denominator");
        if (den < 0) {
            num = -num;
            den = -den;
        }
        __int128 a = num < 0 ? -num : num;
        __int128 b = den;
        while (b != 0) {
            __int128 t = a % b;
            a = b;
            b = t;
        }
        if (a > 1) {
            num /= a;
            den /= a;
        }
        rational r;
        r.num_ = detail::checked_narrow(num, "result numerator");
        r.den_ = detail::checked_narrow(den, "result denominator");
        if (r.num_ == 0) r.den_ = 1;
        return r;
    }

    void normalize() { *this = make(num_, den_); }

    long long num_ = 0;
    long long den_ = 1;
};

inline rational abs(const rational& r) { return r < rational(0) ? -r : r; }

}  // namespace madc
