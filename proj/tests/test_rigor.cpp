#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>
#include <gmpxx.h>

#include <cmath>
#include <random>

#include "skewcert/box.hpp"
#include "skewcert/interval.hpp"

using namespace skewcert;

namespace {

constexpr int kFuzz = 100000;

struct Gen {
    std::mt19937_64 rng;
    explicit Gen(std::uint64_t seed) : rng(seed) {}

    double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }

    // Mantissa times a random power of two, so endpoints span many binades.
    double number() {
        const double m = uniform(-1, 1);
        const int e = std::uniform_int_distribution<int>(-40, 40)(rng);
        return std::ldexp(m, e);
    }

    Interval interval() {
        const double x = number();
        const double w = std::uniform_int_distribution<int>(0, 4)(rng) == 0 ? 0.0 : std::fabs(number());
        return Interval(x, x + w);
    }

    double inside(const Interval& a) {
        switch (std::uniform_int_distribution<int>(0, 3)(rng)) {
            case 0: return a.lo();
            case 1: return a.hi();
            default: {
                const double t = uniform(0, 1);
                return std::clamp(a.lo() + t * (a.hi() - a.lo()), a.lo(), a.hi());
            }
        }
    }
};

bool encloses(const Interval& r, const mpq_class& v) { return mpq_class(r.lo()) <= v && v <= mpq_class(r.hi()); }

mpq_class exact(double x, double y, ArithOp op) {
    switch (op) {
        case ArithOp::add: return mpq_class(x) + mpq_class(y);
        case ArithOp::sub: return mpq_class(x) - mpq_class(y);
        case ArithOp::mul: return mpq_class(x) * mpq_class(y);
    }
    return 0;
}

}  // namespace

TEST_CASE("interval_arith examples") {
    CHECK(interval_arith(Interval(1, 2), Interval(3, 4), ArithOp::mul) == Interval(3, 8));
    CHECK(interval_arith(Interval(-1, 2), Interval(-3, 4), ArithOp::mul) == Interval(-6, 8));
    // [prev(0.1), 0.1] encloses the real number 1/10.
    const Interval tenth(std::nextafter(0.1, 0.0), 0.1);
    REQUIRE(encloses(tenth, mpq_class(1, 10)));
    const Interval p = interval_arith(tenth, tenth, ArithOp::mul);
    CHECK(encloses(p, mpq_class(1, 100)));
    CHECK(p.lo() < p.hi());
    double x = p.lo();
    for (int i = 0; i < 4; ++i) x = std::nextafter(x, 1.0);
    CHECK(p.hi() <= x);
    CHECK(interval_arith(Interval(1, 2), Interval(3, 4), ArithOp::add) == Interval(4, 6));
    CHECK(interval_arith(Interval(1, 2), Interval(3, 4), ArithOp::sub) == Interval(-3, -1));
}

TEST_CASE("invalid intervals are rejected") {
    CHECK_THROWS_AS(Interval(2, 1), std::invalid_argument);
    CHECK_THROWS_AS(Interval(std::nan(""), 1), std::invalid_argument);
}

TEST_CASE("overflow saturates to infinite endpoints and sticks") {
    const Interval big(1e300, 1e308);
    const Interval p = big * big;
    CHECK(p.overflow());
    CHECK(p.hi() == rounding::kInf);
    CHECK((p + Interval(1)).overflow());
    CHECK((p - p).overflow());
    CHECK(!(Interval(1e300) * Interval(1e-300)).overflow());
}

TEST_CASE("containment fuzz for add, sub, mul") {
    Gen g(1);
    for (ArithOp op : {ArithOp::add, ArithOp::sub, ArithOp::mul}) {
        int failures = 0;
        for (int i = 0; i < kFuzz; ++i) {
            const Interval a = g.interval();
            const Interval b = g.interval();
            const double x = g.inside(a);
            const double y = g.inside(b);
            if (!encloses(interval_arith(a, b, op), exact(x, y, op))) ++failures;
        }
        CHECK(failures == 0);
    }
}

TEST_CASE("containment fuzz for sqr and sqrt") {
    Gen g(2);
    int failures = 0;
    for (int i = 0; i < kFuzz; ++i) {
        const Interval a = g.interval();
        const double x = g.inside(a);
        if (!encloses(sqr(a), mpq_class(x) * mpq_class(x))) ++failures;
        const Interval pos = Interval::hull(std::fabs(a.lo()), std::fabs(a.hi()));
        const double y = g.inside(pos);
        const Interval r = sqrt(pos);
        const mpq_class lo(r.lo()), hi(r.hi());
        if (!(lo * lo <= mpq_class(y) && mpq_class(y) <= hi * hi)) ++failures;
    }
    CHECK(failures == 0);
}

TEST_CASE("exact results stay exact") {
    CHECK(Interval(0.5) * Interval(0.25) == Interval(0.125));
    CHECK(sqrt(Interval(4, 9)) == Interval(2, 3));
    CHECK(Interval(3) + Interval(4) == Interval(7));
}

TEST_CASE("inclusion monotonicity") {
    Gen g(3);
    int failures = 0;
    for (int i = 0; i < kFuzz / 10; ++i) {
        const Interval a = g.interval();
        const Interval b = g.interval();
        const Interval a2 = a.inflate(std::fabs(g.number()));
        const Interval b2 = b.inflate(std::fabs(g.number()));
        for (ArithOp op : {ArithOp::add, ArithOp::sub, ArithOp::mul}) {
            if (!interval_arith(a2, b2, op).contains(interval_arith(a, b, op))) ++failures;
        }
        if (!sqr(a2).contains(sqr(a))) ++failures;
    }
    CHECK(failures == 0);
}

TEST_CASE("complex_sqr examples") {
    const ComplexBox one = complex_sqr(ComplexBox::point({1, 0}));
    CHECK(one.re == Interval(1));
    CHECK(one.im == Interval(0));
    const ComplexBox i2 = complex_sqr(ComplexBox::point({0, 1}));
    CHECK(i2.re == Interval(-1));
    CHECK(i2.im == Interval(0));
    const ComplexBox sq = complex_sqr({Interval(-1, 1), Interval(-1, 1)});
    CHECK(sq.re.contains(Interval(-1, 1)));
    CHECK(sq.im.contains(Interval(-2, 2)));
}

TEST_CASE("complex_sqr point consistency") {
    Gen g(4);
    int failures = 0;
    for (int i = 0; i < 10000; ++i) {
        const double x = g.number(), y = g.number();
        const ComplexBox s = complex_sqr(ComplexBox::point({x, y}));
        const mpq_class re = mpq_class(x) * x - mpq_class(y) * y;
        const mpq_class im = 2 * mpq_class(x) * y;
        if (!encloses(s.re, re) || !encloses(s.im, im)) ++failures;
    }
    CHECK(failures == 0);
}

TEST_CASE("complex_sqr encloses squares of interior points") {
    Gen g(5);
    int failures = 0;
    for (int i = 0; i < 10000; ++i) {
        const ComplexBox b{g.interval(), g.interval()};
        const double x = g.inside(b.re), y = g.inside(b.im);
        const ComplexBox s = complex_sqr(b);
        const mpq_class re = mpq_class(x) * x - mpq_class(y) * y;
        const mpq_class im = 2 * mpq_class(x) * y;
        if (!encloses(s.re, re) || !encloses(s.im, im)) ++failures;
    }
    CHECK(failures == 0);
}

TEST_CASE("abs_bounds examples") {
    const AbsBounds a = abs_bounds(ComplexBox::point({3, 4}));
    CHECK(a.lo == 5);
    CHECK(a.hi == 5);
    const AbsBounds b = abs_bounds({Interval(-1, 1), Interval(-1, 1)});
    CHECK(b.lo == 0);
    CHECK(b.hi >= std::sqrt(2.0));
    CHECK(b.hi <= std::nextafter(std::sqrt(2.0), 2.0));
    const AbsBounds c = abs_bounds({Interval(1, 2), Interval(0)});
    CHECK(c.lo == 1);
    CHECK(c.hi == 2);
    CHECK(abs_bounds({Interval(0, 1), Interval(1, 2)}).lo == 1);
    CHECK(abs_bounds({Interval(0, 1), Interval(0, 2)}).lo == 0);
}

TEST_CASE("abs_bounds sandwich") {
    Gen g(6);
    int failures = 0;
    for (int i = 0; i < 10000; ++i) {
        const ComplexBox b{g.interval(), g.interval()};
        const AbsBounds ab = abs_bounds(b);
        const double x = g.inside(b.re), y = g.inside(b.im);
        const mpq_class r2 = mpq_class(x) * x + mpq_class(y) * y;
        if (!(mpq_class(ab.lo) * ab.lo <= r2 && r2 <= mpq_class(ab.hi) * ab.hi)) ++failures;
        const bool touches = b.re.contains_zero() && b.im.contains_zero();
        if ((ab.lo == 0) != touches) ++failures;
    }
    CHECK(failures == 0);
}

TEST_CASE("intersects_inflated examples") {
    const ComplexBox u{Interval(0, 1), Interval(0, 1)};
    const ComplexBox face{Interval(1, 2), Interval(0, 1)};
    const ComplexBox gap{Interval(1.5, 2.5), Interval(0, 1)};
    CHECK(intersects_inflated(u, face, 0));
    CHECK_FALSE(intersects_inflated(u, gap, 0.25));
    CHECK(intersects_inflated(u, gap, 0.5));
    const ProductBox pa{u, u};
    CHECK(intersects_inflated(pa, ProductBox{face, u}, 0));
    CHECK_FALSE(intersects_inflated(pa, ProductBox{u, gap}, 0.25));
    CHECK(intersects_inflated(pa, ProductBox{u, gap}, 0.5));
}

TEST_CASE("inflation is outward-rounded") {
    const Interval x = Interval(0.1, 0.2).inflate(0.1);
    CHECK(encloses(x, mpq_class(0.1) - mpq_class(0.1)));
    CHECK(encloses(x, mpq_class(0.2) + mpq_class(0.1)));
}
