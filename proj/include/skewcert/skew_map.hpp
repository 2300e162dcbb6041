#pragma once

#include <string>

#include "skewcert/box.hpp"

namespace skewcert {

/// f(z, w) = (z^2 + a, w^2 + b w + c z + e).
///
/// Coefficients are exact doubles; every enclosure below is computed from
/// them with outward rounding.
struct SkewMap {
    Complex a{};
    Complex b{};
    Complex c{};
    Complex e{};

    friend bool operator==(const SkewMap&, const SkewMap&) = default;
};

/// Base polynomial p(z) = z^2 + a over a box.
ComplexBox eval_p(const SkewMap& m, const ComplexBox& z);

/// Fiber polynomial q(z, w), evaluated as (w + b/2)^2 - b^2/4 + c z + e so
/// that w occurs once.
ComplexBox eval_q(const SkewMap& m, const ComplexBox& z, const ComplexBox& w);

ProductBox eval_f(const SkewMap& m, const ProductBox& box);

enum class DerivativeKind { base, fiber };

/// Rounded-down lower bound of |p'(z)| = |2z| over z.
double derivative_lower_base(const SkewMap& m, const ComplexBox& z);
/// Rounded-down lower bound of |dq/dw| = |2w + b| over w.
double derivative_lower_fiber(const SkewMap& m, const ComplexBox& w);
/// Dispatches on kind: base reads box.z, fiber reads box.w.
double derivative_lower(const SkewMap& m, const ProductBox& box, DerivativeKind kind);

struct EscapeRadii {
    double r1;
    double r2;
};

/// Radii outside of which orbits provably escape, plus `margin`, rounded up.
///   r1 = (1 + sqrt(1 + 4|a|)) / 2 + margin
///   r2 = (1 + |b| + sqrt((1 + |b|)^2 + 4 (|c| r1 + |e|))) / 2 + margin
EscapeRadii escape_radii(const SkewMap& m, double margin = 0.1);

struct FixedPoints {
    ComplexBox alpha;
    ComplexBox beta;  // the root of larger modulus
};

/// Enclosures of both roots of z^2 + a = z.
FixedPoints base_fixed_points(const SkewMap& m);

/// Complex square root enclosure (principal branch) of every point of d.
ComplexBox complex_sqrt(const ComplexBox& d);

std::string to_string(const SkewMap& m);

}  // namespace skewcert
