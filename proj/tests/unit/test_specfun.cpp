#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "ltunnel/specfun.hpp"
#include "oracle_values.hpp"

using namespace ltunnel;

namespace {
double rel(cplx a, cplx b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }
}  // namespace

TEST_CASE("faddeeva against high-precision values") {
  for (const auto& o : oracle::faddeeva) {
    INFO("z = " << o.z);
    CHECK(rel(faddeeva(o.z), o.w) < 1e-12);
  }
  CHECK(std::abs(faddeeva(cplx{}) - 1.0) < 1e-14);
  CHECK(faddeeva(cplx(0.0, 1.0)).real() == doctest::Approx(0.42758357615580700442).epsilon(1e-13));
  CHECK_THROWS_AS(faddeeva(cplx(NAN, 0.0)), InputError);
}

TEST_CASE("faddeeva Schwarz reflection") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-8.0, 8.0);
  for (int i = 0; i < 200; ++i) {
    const cplx z(u(rng), std::abs(u(rng)));
    CHECK(rel(faddeeva(-std::conj(z)), std::conj(faddeeva(z))) < 1e-14);
  }
}

TEST_CASE("erfc against high-precision values") {
  for (const auto& o : oracle::erfc) {
    INFO("z = " << o.z);
    CHECK(rel(erfc_complex(o.z), o.w) < 1e-12);
  }
  CHECK(std::abs(erfc_complex(cplx{}) - 1.0) < 1e-14);
  CHECK(erfc_complex(cplx(2.0, 0.0)).real() == doctest::Approx(0.004677734981047266).epsilon(1e-13));
}

TEST_CASE("erfc reflection identity and overflow handling") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-4.0, 4.0);
  for (int i = 0; i < 200; ++i) {
    const cplx z(u(rng), u(rng));
    CHECK(std::abs(erfc_complex(z) + erfc_complex(-z) - 2.0) < 1e-12 * std::max(1.0, std::abs(erfc_complex(z))));
  }
  // exp(-z^2) overflows here, the scaled form does not
  const cplx big(2.0, 40.0);
  CHECK_THROWS_AS(erfc_complex(big), NumericError);
  CHECK(std::isfinite(std::abs(erfcx_complex(big))));
  CHECK(rel(erfcx_complex(cplx(3.0, 1.0)), std::exp(cplx(3.0, 1.0) * cplx(3.0, 1.0)) * erfc_complex(cplx(3.0, 1.0))) <
        1e-12);
}

TEST_CASE("faddeeva and erfc agree on a grid") {
  double worst = 0.0;
  for (double a = -10.0; a <= 10.0; a += 0.5) {
    for (double b = -10.0; b <= 10.0; b += 0.5) {
      const cplx z(a, b);
      // w(z) = exp(-z^2) erfc(-iz); skip points where either side leaves double range
      const cplx e = std::exp(-z * z);
      if (!std::isfinite(std::abs(e)) || std::abs(e) > 1e250 || std::abs(e) < 1e-250) continue;
      cplx ec;
      try {
        ec = erfc_complex(cplx(0.0, -1.0) * z);
      } catch (const NumericError&) {
        continue;
      }
      const cplx lhs = faddeeva(z);
      const cplx rhs = e * ec;
      if (std::abs(lhs) < 1e-200) continue;
      worst = std::max(worst, rel(rhs, lhs));
    }
  }
  CHECK(worst < 1e-12);
}

TEST_CASE("bessel J against high-precision values") {
  for (const auto& o : oracle::bessel) {
    INFO("l = " << o.l << ", x = " << o.x);
    const double v = bessel_j(o.l, o.x);
    CHECK(std::abs(v - o.v) <= 1e-10 * std::max(std::abs(o.v), 1e-3));
  }
  CHECK(bessel_j(0, 0.0) == 1.0);
  CHECK(bessel_j(3, 0.0) == 0.0);
  CHECK(std::abs(bessel_j(0, 2.40482556)) < 1e-7);
  CHECK_THROWS_AS(bessel_j(-1, 1.0), InputError);
  CHECK_THROWS_AS(bessel_j(65, 1.0), InputError);
  CHECK_THROWS_AS(bessel_j(0, -1.0), InputError);
}

TEST_CASE("bessel three-term recurrence") {
  double worst = 0.0;
  for (int l = 1; l <= 20; ++l) {
    for (double x = 0.1; x <= 100.0; x *= 1.37) {
      const double lhs = bessel_j(l - 1, x) + bessel_j(l + 1, x);
      const double rhs = 2.0 * l / x * bessel_j(l, x);
      const double scale = std::max({std::abs(bessel_j(l - 1, x)), std::abs(bessel_j(l + 1, x)), 1e-300});
      worst = std::max(worst, std::abs(lhs - rhs) / scale);
    }
  }
  CHECK(worst < 1e-9);
}

TEST_CASE("gamma and erf") {
  CHECK(gamma_real(0.5) == doctest::Approx(std::sqrt(std::numbers::pi)).epsilon(1e-14));
  CHECK(gamma_real(5.0) == doctest::Approx(24.0).epsilon(1e-14));
  CHECK(gamma_real(0.25) == doctest::Approx(3.6256099082219083119).epsilon(1e-13));
  for (double x = 0.1; x < 40.0; x += 0.7) CHECK(gamma_real(x + 1.0) == doctest::Approx(x * gamma_real(x)).epsilon(1e-12));
  CHECK_THROWS_AS(gamma_real(0.0), InputError);
  CHECK_THROWS_AS(gamma_real(-1.5), InputError);

  CHECK(erf_real(0.0) == 0.0);
  for (double x = 0.05; x < 6.0; x += 0.31) CHECK(erf_real(-x) == -erf_real(x));
  CHECK(erf_real(20.0) == 1.0);
  CHECK(erfc_real(20.0) < std::exp(-400.0) / (20.0 * std::sqrt(std::numbers::pi)) * 1.0000001);
  CHECK_THROWS_AS(erf_real(NAN), InputError);
}
