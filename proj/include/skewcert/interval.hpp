#pragma once

#include <algorithm>
#include <cmath>
#include <iosfwd>
#include <limits>

namespace skewcert {

// Directed rounding on top of round-to-nearest.
//
// Each primitive computes the nearest result and recovers the exact rounding
// error with an error-free transformation (TwoSum for addition, FMA for
// products and square roots). The result is stepped one ulp outward only when
// the error points outward, so exactly representable results stay exact.
namespace rounding {

inline constexpr double kInf = std::numeric_limits<double>::infinity();
inline constexpr double kMax = std::numeric_limits<double>::max();

// Below this magnitude an FMA residual may itself underflow; widen blindly.
inline constexpr double kTiny = 0x1p-960;

inline double next_down(double x) { return std::nextafter(x, -kInf); }
inline double next_up(double x) { return std::nextafter(x, kInf); }

inline double two_sum_err(double a, double b, double s) {
    const double bb = s - a;
    return (a - (s - bb)) + (b - bb);
}

inline double add_down(double a, double b) {
    const double s = a + b;
    if (std::isfinite(s)) {
        return two_sum_err(a, b, s) < 0 ? next_down(s) : s;
    }
    if (std::isnan(s)) return -kInf;
    if (std::isfinite(a) && std::isfinite(b) && s > 0) return kMax;
    return s;
}

inline double add_up(double a, double b) {
    const double s = a + b;
    if (std::isfinite(s)) {
        return two_sum_err(a, b, s) > 0 ? next_up(s) : s;
    }
    if (std::isnan(s)) return kInf;
    if (std::isfinite(a) && std::isfinite(b) && s < 0) return -kMax;
    return s;
}

inline double sub_down(double a, double b) { return add_down(a, -b); }
inline double sub_up(double a, double b) { return add_up(a, -b); }

// Endpoint products use the convention 0 * inf = 0.
inline double mul_down(double a, double b) {
    if (a == 0 || b == 0) return 0;
    const double p = a * b;
    if (std::isfinite(p)) {
        if (std::fabs(p) < kTiny) return next_down(p);
        return std::fma(a, b, -p) < 0 ? next_down(p) : p;
    }
    if (std::isfinite(a) && std::isfinite(b) && p > 0) return kMax;
    return p;
}

inline double mul_up(double a, double b) {
    if (a == 0 || b == 0) return 0;
    const double p = a * b;
    if (std::isfinite(p)) {
        if (std::fabs(p) < kTiny) return next_up(p);
        return std::fma(a, b, -p) > 0 ? next_up(p) : p;
    }
    if (std::isfinite(a) && std::isfinite(b) && p < 0) return -kMax;
    return p;
}

// Square roots of nonnegative arguments; negative input is clamped to zero.
inline double sqrt_down(double x) {
    if (!(x > 0)) return 0;
    if (x == kInf) return kInf;
    const double s = std::sqrt(x);
    if (s < kTiny) return next_down(s);
    return std::fma(s, s, -x) > 0 ? next_down(s) : s;
}

inline double sqrt_up(double x) {
    if (!(x > 0)) return 0;
    if (x == kInf) return kInf;
    const double s = std::sqrt(x);
    if (s < kTiny) return next_up(s);
    return std::fma(s, s, -x) < 0 ? next_up(s) : s;
}

}  // namespace rounding

/// Closed interval [lo, hi] of reals with double endpoints.
///
/// All arithmetic encloses the exact real result. An operation that leaves
/// the finite doubles produces an infinite endpoint; `overflow()` reports it
/// and it propagates through every later operation.
class Interval {
public:
    constexpr Interval() = default;
    constexpr explicit Interval(double x) : lo_(x), hi_(x) {}
    /// Throws std::invalid_argument unless lo <= hi (NaN rejected).
    Interval(double lo, double hi);

    static Interval hull(double a, double b) { return Interval(std::min(a, b), std::max(a, b)); }
    static Interval entire() { return Interval(-rounding::kInf, rounding::kInf); }

    constexpr double lo() const { return lo_; }
    constexpr double hi() const { return hi_; }

    /// Upper bound on hi - lo.
    double width() const { return rounding::sub_up(hi_, lo_); }
    double mid() const { return lo_ / 2 + hi_ / 2; }
    /// Smallest |x| over the interval.
    double mig() const;
    /// Largest |x| over the interval.
    double mag() const { return std::max(std::fabs(lo_), std::fabs(hi_)); }

    bool overflow() const { return std::isinf(lo_) || std::isinf(hi_); }
    bool is_point() const { return lo_ == hi_; }
    bool contains(double x) const { return lo_ <= x && x <= hi_; }
    bool contains(const Interval& o) const { return lo_ <= o.lo_ && o.hi_ <= hi_; }
    bool contains_zero() const { return lo_ <= 0 && 0 <= hi_; }
    bool intersects(const Interval& o) const { return lo_ <= o.hi_ && o.lo_ <= hi_; }

    /// Grows both ends outward by delta >= 0.
    Interval inflate(double delta) const;

    Interval operator-() const { return make(-hi_, -lo_); }

    friend Interval operator+(const Interval& a, const Interval& b) {
        return make(rounding::add_down(a.lo_, b.lo_), rounding::add_up(a.hi_, b.hi_));
    }
    friend Interval operator-(const Interval& a, const Interval& b) {
        return make(rounding::sub_down(a.lo_, b.hi_), rounding::sub_up(a.hi_, b.lo_));
    }
    friend Interval operator*(const Interval& a, const Interval& b);

    friend bool operator==(const Interval& a, const Interval& b) = default;

    /// Exact scaling by a power of two (no rounding unless it under/overflows).
    Interval ldexp(int e) const;

private:
    // Unchecked construction for results already known to be ordered.
    static Interval make(double lo, double hi) {
        Interval r;
        r.lo_ = lo;
        r.hi_ = hi;
        return r;
    }
    friend Interval sqr(const Interval& a);
    friend Interval sqrt(const Interval& a);
    friend Interval hull(const Interval& a, const Interval& b);

    double lo_ = 0;
    double hi_ = 0;
};

/// Tight square: [0, ...] when the interval straddles zero.
Interval sqr(const Interval& a);
/// Square root of the nonnegative part of a.
Interval sqrt(const Interval& a);
Interval hull(const Interval& a, const Interval& b);

enum class ArithOp { add, sub, mul };

Interval interval_arith(const Interval& a, const Interval& b, ArithOp op);

std::ostream& operator<<(std::ostream& os, const Interval& x);

}  // namespace skewcert
