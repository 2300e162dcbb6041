#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>
#include <gmpxx.h>

#include <cmath>
#include <numbers>
#include <random>

#include "skewcert/generators.hpp"
#include "skewcert/skew_map.hpp"

using namespace skewcert;

namespace {

struct Q {
    mpq_class re, im;
};

Q qmul(const Q& x, const Q& y) { return {x.re * y.re - x.im * y.im, x.re * y.im + x.im * y.re}; }
Q qadd(const Q& x, const Q& y) { return {x.re + y.re, x.im + y.im}; }
Q qof(Complex c) { return {mpq_class(c.real()), mpq_class(c.imag())}; }

bool encloses(const ComplexBox& b, const Q& v) {
    return mpq_class(b.re.lo()) <= v.re && v.re <= mpq_class(b.re.hi()) && mpq_class(b.im.lo()) <= v.im &&
           v.im <= mpq_class(b.im.hi());
}

ComplexBox box(double x0, double x1, double y0, double y1) { return {Interval(x0, x1), Interval(y0, y1)}; }

}  // namespace

TEST_CASE("eval_f of (z^2, w^2 + w/10 + z/100) at a point") {
    const SkewMap m{0, 0.1, 0.01, 0};
    const ProductBox img = eval_f(m, {ComplexBox::point(1), ComplexBox::point(0)});
    CHECK(img.z.re == Interval(1));
    CHECK(img.z.im == Interval(0));
    CHECK(img.w.re.contains(0.01));
    CHECK(img.w.re.width() < 1e-16);
    CHECK(img.w.im == Interval(0));
}

TEST_CASE("beta = 10 is fixed under z^2 - 90") {
    const SkewMap m{-90, 0, 0.25, 2.25};
    const ProductBox img = eval_f(m, {ComplexBox::point(10), ComplexBox::point({0.3, -0.7})});
    CHECK(img.z.re == Interval(10));
    CHECK(img.z.im == Interval(0));
}

TEST_CASE("eval_f containment on random points") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-1, 1);
    int failures = 0;
    for (int trial = 0; trial < 20; ++trial) {
        const SkewMap m{{3 * u(rng), 3 * u(rng)}, {u(rng), u(rng)}, {u(rng), u(rng)}, {2 * u(rng), 2 * u(rng)}};
        const double x = 2 * u(rng), y = 2 * u(rng), s = std::fabs(u(rng));
        const double p = 2 * u(rng), q = 2 * u(rng), t = std::fabs(u(rng));
        const ProductBox B{box(x, x + s, y, y + s), box(p, p + t, q, q + t)};
        const ProductBox F = eval_f(m, B);
        for (int i = 0; i < 1000; ++i) {
            auto pick = [&](const Interval& iv) {
                return std::clamp(iv.lo() + (u(rng) + 1) / 2 * (iv.hi() - iv.lo()), iv.lo(), iv.hi());
            };
            const Q z{mpq_class(pick(B.z.re)), mpq_class(pick(B.z.im))};
            const Q w{mpq_class(pick(B.w.re)), mpq_class(pick(B.w.im))};
            const Q pz = qadd(qmul(z, z), qof(m.a));
            const Q qw = qadd(qadd(qmul(w, w), qmul(qof(m.b), w)), qadd(qmul(qof(m.c), z), qof(m.e)));
            if (!encloses(F.z, pz) || !encloses(F.w, qw)) ++failures;
        }
    }
    CHECK(failures == 0);
}

TEST_CASE("derivative_lower examples") {
    const SkewMap m0{};
    CHECK(derivative_lower_base(m0, box(1, 2, 0, 0)) == 2);
    const SkewMap mb{0, 0.1, 0, 0};
    CHECK(derivative_lower_fiber(mb, ComplexBox::point(0)) == doctest::Approx(0.1).epsilon(1e-15));
    CHECK(derivative_lower_fiber(mb, ComplexBox::point(0)) <= 0.1);
    CHECK(derivative_lower_fiber(m0, box(-0.1, 0.2, -0.3, 0.1)) == 0);
    const ProductBox pb{box(1, 2, 0, 0), box(-0.1, 0.2, -0.3, 0.1)};
    CHECK(derivative_lower(m0, pb, DerivativeKind::base) == 2);
    CHECK(derivative_lower(m0, pb, DerivativeKind::fiber) == 0);
}

TEST_CASE("derivative lower bounds hold at sampled points") {
    std::mt19937_64 rng(12);
    std::uniform_real_distribution<double> u(-2, 2);
    int failures = 0;
    for (int i = 0; i < 1000; ++i) {
        const SkewMap m{0, {u(rng), u(rng)}, 0, 0};
        const double x = u(rng), y = u(rng);
        const ComplexBox b = box(x, x + 0.1, y, y + 0.1);
        const double lb = derivative_lower_fiber(m, b);
        for (int k = 0; k < 10; ++k) {
            const Complex w{x + 0.1 * (u(rng) + 2) / 4, y + 0.1 * (u(rng) + 2) / 4};
            if (std::abs(2.0 * w + m.b) < lb * (1 - 1e-12)) ++failures;
        }
    }
    CHECK(failures == 0);
}

TEST_CASE("escape radii of the worked examples") {
    CHECK(escape_radii({0, 0.1, 0.01, 0}).r1 == doctest::Approx(1.1).epsilon(1e-14));
    CHECK(escape_radii({2, 0, 0.1, 0}).r1 == doctest::Approx(2.1).epsilon(1e-14));
    CHECK(escape_radii({-90, 0, 0.25, 2.25}).r1 == doctest::Approx(10.1).epsilon(1e-14));
    CHECK(escape_radii({0, 0.1, 0.01, 0}).r1 >= 1.1);
    CHECK(escape_radii({-90, 0, 0.25, 2.25}).r1 >= 10.1);
    // (1 + sqrt(1 + 4 (0.25 * 10.1 + 2.25))) / 2 + 0.1
    CHECK(escape_radii({-90, 0, 0.25, 2.25}).r2 == doctest::Approx(2.8417).epsilon(1e-4));
}

TEST_CASE("escape validity at the radii") {
    std::mt19937_64 rng(13);
    std::uniform_real_distribution<double> ang(0, 2 * std::numbers::pi);
    std::uniform_real_distribution<double> rad(0, 1);
    const double margin = 0.1;
    for (const SkewMap& m : {SkewMap{0, 0.1, 0.01, 0}, SkewMap{2, 0, 0.1, 0}, SkewMap{-90, 0, 0.25, 2.25},
                             SkewMap{-90, 0, 1.0 / 6, {1.4, 0.75}}}) {
        const EscapeRadii r = escape_radii(m, margin);
        int failures = 0;
        for (int i = 0; i < 1000; ++i) {
            const double t = ang(rng);
            const Complex z = std::polar(r.r1, t);
            if (!(abs_bounds(eval_p(m, ComplexBox::point(z))).lo > std::abs(z) - margin)) ++failures;
            const Complex zi = std::polar(r.r1 * rad(rng), ang(rng));
            const Complex w = std::polar(r.r2, ang(rng));
            const ComplexBox q = eval_q(m, ComplexBox::point(zi), ComplexBox::point(w));
            if (!(abs_bounds(q).lo > std::abs(w) - margin)) ++failures;
        }
        CHECK(failures == 0);
    }
}

TEST_CASE("base fixed points") {
    const FixedPoints a = base_fixed_points({-90, 0, 0, 0});
    CHECK(a.alpha.contains(Complex(-9, 0)));
    CHECK(a.beta.contains(Complex(10, 0)));
    const FixedPoints b = base_fixed_points({});
    CHECK(b.alpha.contains(Complex(0, 0)));
    CHECK(b.beta.contains(Complex(1, 0)));
    const FixedPoints c = base_fixed_points({-9900, 0, 0, 0});
    CHECK(c.alpha.contains(Complex(-99, 0)));
    CHECK(c.beta.contains(Complex(100, 0)));
    for (const FixedPoints& f : {a, b, c}) {
        CHECK(f.beta.re.width() < 1e-12);
        CHECK(f.alpha.re.width() < 1e-12);
    }
}

TEST_CASE("fixed-point enclosures are consistent with p") {
    std::mt19937_64 rng(14);
    std::uniform_real_distribution<double> u(-3, 3);
    for (int i = 0; i < 200; ++i) {
        const SkewMap m{{u(rng), u(rng)}, 0, 0, 0};
        const FixedPoints fp = base_fixed_points(m);
        CHECK(eval_p(m, fp.beta).intersects(fp.beta));
        CHECK(eval_p(m, fp.alpha).intersects(fp.alpha));
        CHECK(abs_bounds(fp.beta).hi >= abs_bounds(fp.alpha).lo);
    }
    const FixedPoints z2 = base_fixed_points({2, 0, 0, 0});
    CHECK(std::abs(z2.beta.center().real() - 0.5) < 1e-12);
    CHECK(std::abs(std::abs(z2.beta.center().imag()) - 1.32288) < 1e-5);
}

TEST_CASE("interpolating generator from 0 to -1") {
    const SkewMap m = gen_interpolating(0, -1, 90);
    CHECK(m.a == Complex(-90, 0));
    CHECK(m.b == Complex(0, 0));
    CHECK(m.e == Complex(-0.5, 0));
    const double expect = -1 / (std::sqrt(80.0L) + 10.0L);
    CHECK(m.c.real() == doctest::Approx(expect).epsilon(1e-14));
    CHECK(m.c.imag() == 0);
    CHECK(m.c.real() == doctest::Approx(-0.0528).epsilon(1e-3));
}

TEST_CASE("interpolating generator from -1 to the rabbit parameter") {
    const SkewMap m = gen_interpolating(-1, {-0.12, 0.75}, 90);
    CHECK(m.e.real() == doctest::Approx(-0.56));
    CHECK(m.e.imag() == doctest::Approx(0.375));
    CHECK(m.c.real() == doctest::Approx(0.0465).epsilon(1e-3));
    CHECK(m.c.imag() == doctest::Approx(0.0396).epsilon(1e-3));
}

TEST_CASE("interpolating generator endpoints and degenerate case") {
    const Complex c1{-1, 0.2}, c2{0.3, -0.4};
    const SkewMap m = gen_interpolating(c1, c2, 90);
    const RealCantorGeometry g = real_cantor_geometry(Interval(90));
    const double as = g.a_shift.mid();
    const Complex l_lo = m.c * (-as) + m.e;
    const Complex l_hi = m.c * as + m.e;
    CHECK(std::abs(l_lo - c1) < 1e-14);
    CHECK(std::abs(l_hi - c2) < 1e-14);
    const SkewMap flat = gen_interpolating(c1, c1, 90);
    CHECK(flat.c == Complex(0, 0));
    CHECK(flat.e == c1);
    CHECK_THROWS(gen_interpolating(0, 1, 5));
}

TEST_CASE("real Cantor geometry of z^2 - 90") {
    const RealCantorGeometry g = real_cantor_geometry(Interval(90));
    CHECK(g.beta.contains(10));
    CHECK(g.alpha.contains(-9));
    CHECK(g.eta.contains(std::sqrt(80.0)));
    CHECK(g.a_shift.contains((std::sqrt(80.0) + 10) / 2));
}

TEST_CASE("gen_prop31 output re-verified in long double") {
    for (const auto& [c, sigma] : {std::pair<Complex, double>{0, 0.25}, {{-0.12, 0.75}, 0.1}, {-1, 0.05}}) {
        const Prop31Result r = gen_prop31(c, sigma);
        const long double R = r.params.R, S = r.params.S;
        CHECK(R > 6);
        CHECK(std::fmod(r.params.R, 10.0) == 0);
        CHECK(std::fmod(2 * r.params.S, 1.0) == 0);
        const long double beta = (1 + std::sqrt(1 + 4 * R)) / 2;
        const long double eta = std::sqrt(R - beta);
        CHECK((beta - eta) / (2 * S) < sigma);
        CHECK(c.real() + (3 * eta + beta) / (2 * S) >= 2);
        CHECK(r.map.a == Complex(-r.params.R, 0));
        CHECK(r.map.b == Complex(0, 0));
        CHECK(r.map.c.real() == doctest::Approx(static_cast<double>(1 / S)).epsilon(1e-15));
        const long double shift = (eta + beta) / 2;
        CHECK(r.map.e.real() == doctest::Approx(static_cast<double>(c.real() + shift / S)).epsilon(1e-14));
        CHECK(r.map.e.imag() == c.imag());
        CHECK(check_prop31(r.map, sigma).ok());
        // Minimality of S for the chosen R.
        if (S > 0.5) {
            const long double prev = S - 0.5L;
            const bool sep = (beta - eta) / (2 * prev) < sigma;
            const bool esc = c.real() + (3 * eta + beta) / (2 * prev) >= 2;
            CHECK_FALSE((sep && esc));
        }
    }
}

TEST_CASE("gen_prop31 fails for vanishing sigma") {
    CHECK_THROWS_AS(gen_prop31(0, 1e-9), GeneratorError);
    CHECK_THROWS_AS(gen_prop31(0, 0), std::invalid_argument);
}

TEST_CASE("(z^2 - 90, w^2 + z/6 + 1.4 + 0.75i) satisfies the three conditions") {
    const SkewMap m{-90, 0, 1.0 / 6, {1.4, 0.75}};
    const Prop31Check chk = check_prop31(m, 0.1);
    CHECK(chk.ok());
    CHECK(chk.r_ok);
    CHECK(chk.escaping);
    CHECK(chk.params.S == doctest::Approx(6));
    CHECK(chk.params.R == 90);
    CHECK_THROWS_AS(check_prop31(SkewMap{-90, 0.5, 1.0 / 6, 0}, 0.1), std::invalid_argument);
}
