#include "skewcert/box.hpp"

#include <ostream>

namespace skewcert {

ComplexBox operator+(const ComplexBox& a, const ComplexBox& b) { return {a.re + b.re, a.im + b.im}; }

ComplexBox operator-(const ComplexBox& a, const ComplexBox& b) { return {a.re - b.re, a.im - b.im}; }

ComplexBox operator*(const ComplexBox& a, const ComplexBox& b) {
    return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
}

ComplexBox operator*(const Interval& s, const ComplexBox& b) { return {s * b.re, s * b.im}; }

ComplexBox complex_sqr(const ComplexBox& b) {
    return {sqr(b.re) - sqr(b.im), (b.re * b.im).ldexp(1)};
}

ComplexBox hull(const ComplexBox& a, const ComplexBox& b) { return {hull(a.re, b.re), hull(a.im, b.im)}; }

AbsBounds abs_bounds(const ComplexBox& b) {
    using namespace rounding;
    const double xl = b.re.mig();
    const double yl = b.im.mig();
    const double xh = b.re.mag();
    const double yh = b.im.mag();
    const double lo2 = add_down(mul_down(xl, xl), mul_down(yl, yl));
    const double hi2 = add_up(mul_up(xh, xh), mul_up(yh, yh));
    return {sqrt_down(lo2), sqrt_up(hi2)};
}

bool intersects_inflated(const ComplexBox& a, const ComplexBox& b, double delta) {
    return a.inflate(delta).intersects(b);
}

bool intersects_inflated(const ProductBox& a, const ProductBox& b, double delta) {
    return intersects_inflated(a.z, b.z, delta) && intersects_inflated(a.w, b.w, delta);
}

std::ostream& operator<<(std::ostream& os, const ComplexBox& b) { return os << b.re << " x " << b.im << 'i'; }

}  // namespace skewcert
