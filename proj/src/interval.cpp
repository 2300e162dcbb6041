#include "skewcert/interval.hpp"

#include <ostream>
#include <stdexcept>

namespace skewcert {

using namespace rounding;

Interval::Interval(double lo, double hi) : lo_(lo), hi_(hi) {
    if (!(lo <= hi)) throw std::invalid_argument("Interval: lo must not exceed hi");
}

double Interval::mig() const {
    if (contains_zero()) return 0;
    return std::min(std::fabs(lo_), std::fabs(hi_));
}

Interval Interval::inflate(double delta) const {
    if (delta == 0) return *this;
    return make(sub_down(lo_, delta), add_up(hi_, delta));
}

Interval Interval::ldexp(int e) const {
    auto scale_down = [e](double x) {
        const double r = std::ldexp(x, e);
        return std::ldexp(r, -e) == x ? r : next_down(r);
    };
    auto scale_up = [e](double x) {
        const double r = std::ldexp(x, e);
        return std::ldexp(r, -e) == x ? r : next_up(r);
    };
    return make(scale_down(lo_), scale_up(hi_));
}

Interval operator*(const Interval& a, const Interval& b) {
    // Sign-case split keeps the common cases at two products per bound.
    if (a.lo_ >= 0) {
        if (b.lo_ >= 0) return Interval::make(mul_down(a.lo_, b.lo_), mul_up(a.hi_, b.hi_));
        if (b.hi_ <= 0) return Interval::make(mul_down(a.hi_, b.lo_), mul_up(a.lo_, b.hi_));
        return Interval::make(mul_down(a.hi_, b.lo_), mul_up(a.hi_, b.hi_));
    }
    if (a.hi_ <= 0) {
        if (b.lo_ >= 0) return Interval::make(mul_down(a.lo_, b.hi_), mul_up(a.hi_, b.lo_));
        if (b.hi_ <= 0) return Interval::make(mul_down(a.hi_, b.hi_), mul_up(a.lo_, b.lo_));
        return Interval::make(mul_down(a.lo_, b.hi_), mul_up(a.lo_, b.lo_));
    }
    if (b.lo_ >= 0) return Interval::make(mul_down(a.lo_, b.hi_), mul_up(a.hi_, b.hi_));
    if (b.hi_ <= 0) return Interval::make(mul_down(a.hi_, b.lo_), mul_up(a.lo_, b.lo_));
    return Interval::make(std::min(mul_down(a.lo_, b.hi_), mul_down(a.hi_, b.lo_)),
                          std::max(mul_up(a.lo_, b.lo_), mul_up(a.hi_, b.hi_)));
}

Interval sqr(const Interval& a) {
    if (a.lo_ >= 0) return Interval::make(mul_down(a.lo_, a.lo_), mul_up(a.hi_, a.hi_));
    if (a.hi_ <= 0) return Interval::make(mul_down(a.hi_, a.hi_), mul_up(a.lo_, a.lo_));
    const double m = a.mag();
    return Interval::make(0, mul_up(m, m));
}

Interval sqrt(const Interval& a) {
    return Interval::make(sqrt_down(a.lo_), sqrt_up(std::max(a.hi_, 0.0)));
}

Interval hull(const Interval& a, const Interval& b) {
    return Interval::make(std::min(a.lo_, b.lo_), std::max(a.hi_, b.hi_));
}

Interval interval_arith(const Interval& a, const Interval& b, ArithOp op) {
    switch (op) {
        case ArithOp::add: return a + b;
        case ArithOp::sub: return a - b;
        case ArithOp::mul: return a * b;
    }
    return Interval::entire();
}

std::ostream& operator<<(std::ostream& os, const Interval& x) {
    return os << '[' << x.lo() << ", " << x.hi() << ']';
}

}  // namespace skewcert
