#pragma once

#include <stdexcept>

#include "skewcert/skew_map.hpp"

namespace skewcert {

/// Geometry of p(z) = z^2 - R on the real line, for R > 2:
/// fixed points alpha < 0 < beta, eta = sqrt(R - beta), and the centre
/// a_shift = (eta + beta) / 2 of [eta, beta].
struct RealCantorGeometry {
    Interval alpha;
    Interval beta;
    Interval eta;
    Interval a_shift;
};

RealCantorGeometry real_cantor_geometry(const Interval& R);

/// Parameters of a map (z^2 - R, w^2 + c + (z + a_shift) / S).
struct Prop31Params {
    Complex c;
    double sigma = 0;
    double R = 0;
    double S = 0;
    double a_shift = 0;
    double alpha = 0;
    double beta = 0;
    double eta = 0;
};

struct Prop31Caps {
    double max_R = 1e6;
    double max_S = 1e3;
};

class GeneratorError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Outcome of checking the three sufficient conditions on a concrete map.
/// All inequalities are decided with interval arithmetic on the map's own
/// double coefficients.
struct Prop31Check {
    bool r_ok = false;        // R > 6
    bool separation = false;  // (beta - eta) / (2S) < sigma
    bool escaping = false;    // Re(c) + (3 eta + beta) / (2S) >= 2
    Prop31Params params;

    bool ok() const { return r_ok && separation && escaping; }
};

/// Reads R, S and c back out of a map of the form (z^2 - R, w^2 + z/S + e)
/// and checks the conditions for the trusted distance sigma.
/// Throws std::invalid_argument if the map is not of that form.
Prop31Check check_prop31(const SkewMap& m, double sigma);

struct Prop31Result {
    SkewMap map;
    Prop31Params params;
};

/// Searches R in {10, 20, ...} and S in {1/2, 1, 3/2, ...} for the smallest R
/// (and, for it, the smallest S) such that check_prop31 passes.
/// Throws GeneratorError when the caps are exhausted.
Prop31Result gen_prop31(Complex c, double sigma, const Prop31Caps& caps = {});

/// (z^2 - R, w^2 + l(z)) with l linear, l(-a_shift) = c1 and l(a_shift) = c2.
/// Requires R > 6.
SkewMap gen_interpolating(Complex c1, Complex c2, double R);

}  // namespace skewcert
