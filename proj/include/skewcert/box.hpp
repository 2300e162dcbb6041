#pragma once

#include <complex>
#include <iosfwd>

#include "skewcert/interval.hpp"

namespace skewcert {

using Complex = std::complex<double>;

/// Closed box {x + iy : x in re, y in im} in C = R^2.
struct ComplexBox {
    Interval re;
    Interval im;

    static ComplexBox point(Complex z) { return {Interval(z.real()), Interval(z.imag())}; }

    bool contains(Complex z) const { return re.contains(z.real()) && im.contains(z.imag()); }
    bool contains(const ComplexBox& b) const { return re.contains(b.re) && im.contains(b.im); }
    bool intersects(const ComplexBox& b) const { return re.intersects(b.re) && im.intersects(b.im); }
    bool overflow() const { return re.overflow() || im.overflow(); }
    ComplexBox inflate(double delta) const { return {re.inflate(delta), im.inflate(delta)}; }
    Complex center() const { return {re.mid(), im.mid()}; }

    friend bool operator==(const ComplexBox&, const ComplexBox&) = default;
};

ComplexBox operator+(const ComplexBox& a, const ComplexBox& b);
ComplexBox operator-(const ComplexBox& a, const ComplexBox& b);
ComplexBox operator*(const ComplexBox& a, const ComplexBox& b);
ComplexBox operator*(const Interval& s, const ComplexBox& b);

/// Enclosure of {v^2 : v in b}: (re^2 - im^2) + i (2 re im).
ComplexBox complex_sqr(const ComplexBox& b);

ComplexBox hull(const ComplexBox& a, const ComplexBox& b);

struct AbsBounds {
    double lo;
    double hi;
};

/// lo <= |v| <= hi for every v in b; lo is 0 exactly when b touches the origin.
AbsBounds abs_bounds(const ComplexBox& b);

/// Closed box B^z x B^w in C^2.
struct ProductBox {
    ComplexBox z;
    ComplexBox w;

    bool contains(Complex zp, Complex wp) const { return z.contains(zp) && w.contains(wp); }
    bool overflow() const { return z.overflow() || w.overflow(); }
    friend bool operator==(const ProductBox&, const ProductBox&) = default;
};

/// True iff the closed boxes meet after every face of `a` is pushed out by delta.
bool intersects_inflated(const ComplexBox& a, const ComplexBox& b, double delta);
bool intersects_inflated(const ProductBox& a, const ProductBox& b, double delta);

std::ostream& operator<<(std::ostream& os, const ComplexBox& b);

}  // namespace skewcert
