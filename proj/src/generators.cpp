#include "skewcert/generators.hpp"

#include <cmath>

namespace skewcert {

RealCantorGeometry real_cantor_geometry(const Interval& R) {
    const Interval one(1.0);
    const Interval root = sqrt(one + R.ldexp(2));
    const Interval beta = (one + root).ldexp(-1);
    const Interval alpha = (one - root).ldexp(-1);
    const Interval eta = sqrt(R - beta);
    return {alpha, beta, eta, (eta + beta).ldexp(-1)};
}

Prop31Check check_prop31(const SkewMap& m, double sigma) {
    if (m.a.imag() != 0 || m.b != Complex{} || m.c.imag() != 0 || !(m.c.real() > 0) || !(m.a.real() < 0)) {
        throw std::invalid_argument("check_prop31: map is not of the form (z^2 - R, w^2 + z/S + e)");
    }
    Prop31Check out;
    const Interval R(-m.a.real());
    const Interval inv_s(m.c.real());
    const RealCantorGeometry g = real_cantor_geometry(R);

    // c = e - a_shift / S
    const Interval c_re = Interval(m.e.real()) - g.a_shift * inv_s;

    out.r_ok = R.lo() > 6;
    out.separation = ((g.beta - g.eta) * inv_s).ldexp(-1).hi() < sigma;
    const Interval three(3.0);
    out.escaping = (c_re + ((three * g.eta + g.beta) * inv_s).ldexp(-1)).lo() >= 2;

    Prop31Params& p = out.params;
    p.c = {c_re.mid(), m.e.imag()};
    p.sigma = sigma;
    p.R = R.lo();
    p.S = 1.0 / m.c.real();
    p.a_shift = g.a_shift.mid();
    p.alpha = g.alpha.mid();
    p.beta = g.beta.mid();
    p.eta = g.eta.mid();
    return out;
}

Prop31Result gen_prop31(Complex c, double sigma, const Prop31Caps& caps) {
    if (!(sigma > 0)) throw std::invalid_argument("gen_prop31: sigma must be positive");
    for (double R = 10; R <= caps.max_R; R += 10) {
        const RealCantorGeometry g = real_cantor_geometry(Interval(R));
        const double a_shift = g.a_shift.mid();
        // Smallest S = k/2 with (beta - eta) / (2S) < sigma.
        const double gap = g.beta.mid() - g.eta.mid();
        for (double k = std::max(1.0, std::floor(gap / sigma)); k / 2 <= caps.max_S; k += 1) {
            const double S = k / 2;
            SkewMap m;
            m.a = {-R, 0};
            m.c = {1.0 / S, 0};
            m.e = c + Complex{a_shift / S, 0};
            const Prop31Check chk = check_prop31(m, sigma);
            if (!chk.separation) continue;
            if (!chk.escaping) break;  // larger S only shrinks (3 eta + beta) / (2S)
            Prop31Params p = chk.params;
            p.c = c;
            p.S = S;
            return {m, p};
        }
    }
    throw GeneratorError("gen_prop31: no (R, S) within caps satisfies the conditions");
}

SkewMap gen_interpolating(Complex c1, Complex c2, double R) {
    if (!(R > 6)) throw std::invalid_argument("gen_interpolating: R must exceed 6");
    const RealCantorGeometry g = real_cantor_geometry(Interval(R));
    const double a_shift = g.a_shift.mid();
    SkewMap m;
    m.a = {-R, 0};
    m.c = (c2 - c1) / (2 * a_shift);
    m.e = (c1 + c2) / 2.0;
    return m;
}

}  // namespace skewcert
