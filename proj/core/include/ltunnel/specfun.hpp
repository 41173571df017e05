// Special functions: Faddeeva w(z), complex erfc, integer-order Bessel J, real gamma/erf.
#pragma once

#include "ltunnel/core_model.hpp"

namespace ltunnel {

struct AccuracySpec {
  double target_rel;
  double max_argument;
};

inline constexpr AccuracySpec kFaddeevaAccuracy{1e-12, 50.0};
inline constexpr AccuracySpec kBesselAccuracy{1e-10, 1e6};
inline constexpr AccuracySpec kGammaAccuracy{1e-12, 50.0};
inline constexpr AccuracySpec kErfAccuracy{1e-13, 30.0};

// w(z) = exp(-z^2) erfc(-iz). Bounded in the upper half-plane; the lower half-plane
// goes through w(z) = 2 exp(-z^2) - w(-z) and can overflow for large |z|.
cplx faddeeva(cplx z);

// erfc(z). Throws NumericError if exp(-z^2) overflows; use erfcx_complex there.
cplx erfc_complex(cplx z);
// exp(z^2) erfc(z), finite wherever erfc_complex would overflow for Re z >= 0.
cplx erfcx_complex(cplx z);

// J_l(x), 0 <= l <= 64, 0 <= x <= 1e6.
double bessel_j(int l, double x);

double gamma_real(double x);  // 0 < x <= 50
double erf_real(double x);
double erfc_real(double x);

}  // namespace ltunnel
