#include "ltunnel/specfun.hpp"

#include <array>
#include <cmath>
#include <numbers>

namespace ltunnel {

namespace {

using std::numbers::pi;

// Weideman's rational approximation (SIAM J. Numer. Anal. 31, 1994) with N = 40 terms:
// w(z) = 2 p(Z) / (L - iz)^2 + 1/(sqrt(pi) (L - iz)),  Z = (L + iz)/(L - iz), Im z >= 0.
constexpr int kTerms = 40;

struct Weideman {
  double L;
  std::array<double, kTerms> c;  // p(Z) = sum_m c[m] Z^m
};

const Weideman& weideman() {
  static const Weideman table = [] {
    Weideman w{};
    constexpr int M = 2 * kTerms;
    constexpr int M2 = 2 * M;
    w.L = std::sqrt(kTerms / std::sqrt(2.0));
    // f sampled at theta_k = k pi / M, k = -M+1..M-1, with a leading zero (length M2).
    std::array<double, M2> f{};
    for (int k = -M + 1; k <= M - 1; ++k) {
      const double t = w.L * std::tan(0.5 * k * pi / M);
      f[k + M] = std::exp(-t * t) * (w.L * w.L + t * t);
    }
    // Real part of the DFT of fftshift(f); only bins 1..N are needed.
    std::array<double, M2> shifted{};
    for (int i = 0; i < M2; ++i) shifted[i] = f[(i + M) % M2];
    for (int m = 1; m <= kTerms; ++m) {
      double acc = 0.0;
      for (int n = 0; n < M2; ++n) acc += shifted[n] * std::cos(2.0 * pi * m * n / M2);
      w.c[m - 1] = acc / M2;
    }
    return w;
  }();
  return table;
}

cplx faddeeva_upper(cplx z) {
  const Weideman& w = weideman();
  const cplx iz{-z.imag(), z.real()};
  const cplx den = w.L - iz;
  const cplx Z = (w.L + iz) / den;
  cplx p = w.c[kTerms - 1];
  for (int m = kTerms - 2; m >= 0; --m) p = p * Z + w.c[m];
  return 2.0 * p / (den * den) + (1.0 / std::sqrt(pi)) / den;
}

bool finite(cplx z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

// ---- Bessel J_l ----

double bessel_series(int l, double x) {
  const double h = 0.5 * x;
  const double h2 = h * h;
  double term = std::exp(l * std::log(h) - std::lgamma(l + 1.0));
  double sum = term;
  for (int k = 1; k < 500; ++k) {
    term *= -h2 / (static_cast<double>(k) * (k + l));
    sum += term;
    if (std::abs(term) < 1e-18 * std::abs(sum)) break;
  }
  return sum;
}

double bessel_miller(int l, double x) {
  const double top = std::max<double>(l, x);
  int n = static_cast<int>(top + 40.0 + 15.0 * std::cbrt(top));
  n += n % 2;
  double jp1 = 0.0;
  double j = 1e-30;
  double norm = 0.0;  // 2 * sum of even-order terms, J_0 added at the end
  double saved = 0.0;
  for (int k = n; k >= 1; --k) {
    const double jm1 = (2.0 * k / x) * j - jp1;
    jp1 = j;
    j = jm1;  // J_{k-1}
    const int order = k - 1;
    if (order == l) saved = j;
    if (order > 0 && order % 2 == 0) norm += 2.0 * j;
    if (std::abs(j) > 1e250) {
      j *= 1e-250;
      jp1 *= 1e-250;
      norm *= 1e-250;
      saved *= 1e-250;
    }
  }
  norm += j;
  return saved / norm;
}

double bessel_hankel(int l, double x) {
  const double mu = 4.0 * l * l;
  double P = 1.0, Q = 0.0;
  double a = 1.0;
  double last = 1.0;
  for (int k = 1; k < 200; ++k) {
    const double odd = 2.0 * k - 1.0;
    a *= (mu - odd * odd) / (k * 8.0 * x);
    if (std::abs(a) > last && k > 2) break;  // asymptotic series started to diverge
    last = std::abs(a);
    switch (k % 4) {
      case 1: Q += a; break;
      case 2: P -= a; break;
      case 3: Q -= a; break;
      case 0: P += a; break;
    }
    if (std::abs(a) < 1e-17) break;
  }
  // chi = x - (2l+1) pi/4; expand to keep full precision for large x.
  static constexpr double r = std::numbers::sqrt2 / 2.0;
  static constexpr std::array<double, 8> cs{1, r, 0, -r, -1, -r, 0, r};
  static constexpr std::array<double, 8> sn{0, r, 1, r, 0, -r, -1, -r};
  const int m = (2 * l + 1) % 8;
  const double cx = std::cos(x), sx = std::sin(x);
  const double cchi = cx * cs[m] + sx * sn[m];
  const double schi = sx * cs[m] - cx * sn[m];
  return std::sqrt(2.0 / (pi * x)) * (P * cchi - Q * schi);
}

}  // namespace

cplx faddeeva(cplx z) {
  if (!finite(z)) throw InputError("faddeeva: non-finite argument");
  if (z.imag() >= 0.0) return faddeeva_upper(z);
  return 2.0 * std::exp(-z * z) - faddeeva_upper(-z);
}

cplx erfcx_complex(cplx z) {
  if (!finite(z)) throw InputError("erfcx: non-finite argument");
  // erfc(z) = exp(-z^2) w(iz); iz is in the upper half-plane when Re z >= 0.
  const cplx iz{-z.imag(), z.real()};
  if (z.real() >= 0.0) return faddeeva_upper(iz);
  return 2.0 * std::exp(z * z) - faddeeva_upper(-iz);
}

cplx erfc_complex(cplx z) {
  if (!finite(z)) throw InputError("erfc: non-finite argument");
  const cplx iz{-z.imag(), z.real()};
  cplx out;
  if (z.real() >= 0.0) {
    out = std::exp(-z * z) * faddeeva_upper(iz);
  } else {
    out = 2.0 - std::exp(-z * z) * faddeeva_upper(-iz);
  }
  if (!finite(out)) throw NumericError("erfc: exp(-z^2) overflows, use erfcx_complex");
  return out;
}

double bessel_j(int l, double x) {
  if (l < 0 || l > 64) throw InputError("bessel_j: order must be in [0, 64]");
  if (!(x >= 0.0) || x > 1e6) throw InputError("bessel_j: argument must be in [0, 1e6]");
  if (x == 0.0) return l == 0 ? 1.0 : 0.0;
  if (x <= 4.0 || x * x <= 4.0 * (l + 1)) return bessel_series(l, x);
  if (x >= std::max(25.0, 0.5 * l * l)) return bessel_hankel(l, x);
  return bessel_miller(l, x);
}

double gamma_real(double x) {
  if (!(x > 0.0) || x > 50.0) throw InputError("gamma_real: argument must be in (0, 50]");
  return std::tgamma(x);
}

double erf_real(double x) {
  if (!std::isfinite(x)) throw InputError("erf: non-finite argument");
  return std::erf(x);
}

double erfc_real(double x) {
  if (!std::isfinite(x)) throw InputError("erfc: non-finite argument");
  return std::erfc(x);
}

}  // namespace ltunnel
