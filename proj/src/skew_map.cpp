#include "skewcert/skew_map.hpp"

#include <cstdio>

namespace skewcert {

namespace {

ComplexBox half(Complex v) { return {Interval(v.real()).ldexp(-1), Interval(v.imag()).ldexp(-1)}; }

Interval abs_interval(const ComplexBox& b) {
    const AbsBounds ab = abs_bounds(b);
    return Interval(ab.lo, ab.hi);
}

}  // namespace

ComplexBox eval_p(const SkewMap& m, const ComplexBox& z) { return complex_sqr(z) + ComplexBox::point(m.a); }

ComplexBox eval_q(const SkewMap& m, const ComplexBox& z, const ComplexBox& w) {
    const ComplexBox hb = half(m.b);
    ComplexBox q = complex_sqr(w + hb) - complex_sqr(hb);
    q = q + ComplexBox::point(m.c) * z;
    return q + ComplexBox::point(m.e);
}

ProductBox eval_f(const SkewMap& m, const ProductBox& box) { return {eval_p(m, box.z), eval_q(m, box.z, box.w)}; }

double derivative_lower_base(const SkewMap&, const ComplexBox& z) {
    return abs_bounds({z.re.ldexp(1), z.im.ldexp(1)}).lo;
}

double derivative_lower_fiber(const SkewMap& m, const ComplexBox& w) {
    const ComplexBox d = ComplexBox{w.re.ldexp(1), w.im.ldexp(1)} + ComplexBox::point(m.b);
    return abs_bounds(d).lo;
}

double derivative_lower(const SkewMap& m, const ProductBox& box, DerivativeKind kind) {
    return kind == DerivativeKind::base ? derivative_lower_base(m, box.z) : derivative_lower_fiber(m, box.w);
}

EscapeRadii escape_radii(const SkewMap& m, double margin) {
    const Interval one(1.0);
    const Interval four(4.0);
    const Interval margin_i(margin);
    const Interval abs_a(abs_bounds(ComplexBox::point(m.a)).hi);
    const Interval r1 = (one + sqrt(one + four * abs_a)).ldexp(-1) + margin_i;

    const Interval abs_b(abs_bounds(ComplexBox::point(m.b)).hi);
    const Interval abs_c(abs_bounds(ComplexBox::point(m.c)).hi);
    const Interval abs_e(abs_bounds(ComplexBox::point(m.e)).hi);
    const Interval s = one + abs_b;
    const Interval disc = sqr(s) + four * (abs_c * Interval(r1.hi()) + abs_e);
    const Interval r2 = (s + sqrt(disc)).ldexp(-1) + margin_i;
    return {r1.hi(), r2.hi()};
}

ComplexBox complex_sqrt(const ComplexBox& d) {
    if (d.im.is_point() && d.im.lo() == 0) {
        if (d.re.lo() >= 0) return {sqrt(d.re), Interval(0.0)};
        if (d.re.hi() <= 0) return {Interval(0.0), sqrt(-d.re)};
    }
    const Interval mod = abs_interval(d);
    const Interval u = sqrt((mod + d.re).ldexp(-1));
    const Interval vmag = sqrt((mod - d.re).ldexp(-1));
    Interval v;
    if (d.im.lo() > 0) {
        v = vmag;
    } else if (d.im.hi() < 0) {
        v = -vmag;
    } else {
        v = Interval(-vmag.hi(), vmag.hi());
    }
    return {u, v};
}

FixedPoints base_fixed_points(const SkewMap& m) {
    // z = (1 +- sqrt(1 - 4a)) / 2
    const ComplexBox one = ComplexBox::point({1.0, 0.0});
    const ComplexBox four_a{Interval(m.a.real()).ldexp(2), Interval(m.a.imag()).ldexp(2)};
    const ComplexBox s = complex_sqrt(one - four_a);
    const ComplexBox plus = one + s;
    const ComplexBox minus = one - s;
    const ComplexBox r1{plus.re.ldexp(-1), plus.im.ldexp(-1)};
    const ComplexBox r2{minus.re.ldexp(-1), minus.im.ldexp(-1)};
    if (std::abs(r1.center()) >= std::abs(r2.center())) return {r2, r1};
    return {r1, r2};
}

std::string to_string(const SkewMap& m) {
    char buf[256];
    std::snprintf(buf, sizeof buf, "a=%.17g%+.17gi, b=%.17g%+.17gi, c=%.17g%+.17gi, e=%.17g%+.17gi", m.a.real(),
                  m.a.imag(), m.b.real(), m.b.imag(), m.c.real(), m.c.imag(), m.e.real(), m.e.imag());
    return buf;
}

}  // namespace skewcert
