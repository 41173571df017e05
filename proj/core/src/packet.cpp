#include "ltunnel/packet.hpp"

#include <array>
#include <cmath>
#include <numbers>

#include "ltunnel/specfun.hpp"

namespace ltunnel {

namespace {

using std::numbers::pi;
const double kSqrtPi = std::sqrt(pi);

// Q(L) = 105 - 120 L^2 + 72 L^4 - 32 L^6 + 16 L^8
double poly_q(double L) {
  const double s = L * L;
  return 105.0 + 8.0 * s * (-15.0 + s * (9.0 + s * (-4.0 + 2.0 * s)));
}

// -105 + 50 L^2 - 20 L^4 + 8 L^6
double poly_r(double L) {
  const double s = L * L;
  return -105.0 + s * (50.0 + s * (-20.0 + 8.0 * s));
}

// e^{-L^2} 2L r(L) + Q(L) sqrt(pi) erf(L); the normalization N is this over 16.
double norm_bracket(double L) {
  return 2.0 * std::exp(-L * L) * L * poly_r(L) + poly_q(L) * kSqrtPi * std::erf(L);
}

// B(L) = -2L r(L) + sqrt(pi) erfcx(L) Q(L), so that eps^2 = e^{-L^2} B / norm_bracket.
// The two terms cancel to O(L^{-1}) out of O(L^7); past L = 6 the cancellation is done
// analytically with the asymptotic series of sqrt(pi) erfcx(L) = sum_n c_n L^{-2n-1},
// c_n = (-1)^n (2n-1)!! / 2^n.
double eps_bracket(double L) {
  if (L <= 6.0) return -2.0 * L * poly_r(L) + kSqrtPi * std::exp(L * L) * std::erfc(L) * poly_q(L);
  static constexpr std::array<double, 5> q{105.0, -120.0, 72.0, -32.0, 16.0};
  // b_m = sum_j q_j c_{j+m}, m = 0, 1, ...; B = sum_m b_m L^{-2m-1}
  auto c = [](int n) {
    double v = 1.0;
    for (int i = 1; i <= n; ++i) v *= -(2.0 * i - 1.0) / 2.0;
    return v;
  };
  const double inv2 = 1.0 / (L * L);
  double sum = 0.0;
  double pw = 1.0 / L;
  double prev = INFINITY;
  for (int m = 0; m < 200; ++m) {
    double b = 0.0;
    for (int j = 0; j < 5; ++j) b += q[j] * c(j + m);
    const double term = b * pw;
    if (std::abs(term) > prev) break;  // smallest term reached
    sum += term;
    prev = std::abs(term);
    if (std::abs(term) < 1e-17 * std::abs(sum)) break;
    pw *= inv2;
  }
  return sum;
}

double tail_closed(double y, double L) {
  const double s = L * L;
  const double y2 = y * y;
  const double poly = -39.0 + 72.0 * s - 88.0 * s * s + 32.0 * s * s * s +
                      2.0 * y2 * (83.0 + 24.0 * s * (s - 3.0)) + 4.0 * y2 * y2 * (8.0 * s - 17.0) +
                      8.0 * y2 * y2 * y2;
  return (2.0 * std::exp(-y2) * y * poly + poly_q(L) * kSqrtPi * std::erfc(y)) / norm_bracket(L);
}

}  // namespace

PacketSpec::PacketSpec(double x0, double p0, double L) : x0_(x0), p0_(p0), L_(L) {
  if (!std::isfinite(x0) || !std::isfinite(p0) || !std::isfinite(L))
    throw InputError("packet: non-finite parameter");
  if (!(L > 2.0)) throw InputError("packet: L must exceed 2");
  if (!(p0 > 0.0)) throw InputError("packet: p0 must be positive");
  if (x0 + L > 0.0) throw InputError("packet: support x0 + L must lie left of the barrier (x0 + L <= 0)");
}

cplx GaussianPacket::value(double x) const { return evolved(x, 0.0); }

cplx GaussianPacket::momentum(double p) const {
  const double k = p - p0;
  return std::pow(2.0 * sigma * sigma / pi, 0.25) * std::exp(cplx(-sigma * sigma * k * k, -k * x0));
}

cplx GaussianPacket::evolved(double x, double t) const {
  const double s2 = sigma * sigma;
  const cplx s{s2, 0.5 * t};
  const double u = x - x0 - p0 * t;
  return std::pow(2.0 * pi * s2, -0.25) * std::sqrt(s2 / s) *
         std::exp(cplx(0.0, p0 * x - 0.5 * p0 * p0 * t) - u * u / (4.0 * s));
}

double normalization(double L) {
  if (!(L > 0.0)) throw InputError("normalization: L must be positive");
  return norm_bracket(L) / 16.0;
}

Variances variances(double L) {
  if (!(L > 0.0)) throw InputError("variances: L must be positive");
  const double s = L * L;
  const double e = std::exp(-s);
  const double erfl = kSqrtPi * std::erf(L);
  const double den = norm_bracket(L);
  const double xnum = 2.0 * L * (-945.0 + s * (210.0 + s * (-52.0 + 8.0 * s))) * e +
                      (945.0 + s * (-840.0 + s * (360.0 + s * (-96.0 + 16.0 * s)))) * erfl;
  const double pnum = 2.0 * L * (-225.0 + s * (18.0 + s * (12.0 + 8.0 * s))) * e +
                      (225.0 + 8.0 * s * (-21.0 + s * (5.0 + s * (4.0 + 2.0 * s)))) * erfl;
  return {xnum / (2.0 * den), pnum / (2.0 * den)};
}

EpsilonNorm epsilon_norm(double L) {
  if (!(L > 0.0)) throw InputError("epsilon_norm: L must be positive");
  const double log_eps = 0.5 * (-L * L + std::log(eps_bracket(L)) - std::log(norm_bracket(L)));
  return {std::exp(log_eps), log_eps};
}

double log_epsilon_bound(double L) {
  return 0.5 * std::log(24.0 / kSqrtPi) - 0.5 * L * L - 4.5 * std::log(L);
}

double epsilon_bound(double L) { return std::exp(log_epsilon_bound(L)); }

cplx packet_reference_value(double x, const PacketSpec& spec) {
  const double u = x - spec.x0();
  const double w = u * u - spec.L() * spec.L();
  const double amp = std::exp(-0.5 * u * u) * w * w / std::sqrt(normalization(spec.L()));
  return amp * std::exp(cplx(0.0, spec.p0() * x));
}

cplx packet_value(double x, const PacketSpec& spec) {
  if (std::abs(x - spec.x0()) >= spec.L()) return {0.0, 0.0};
  return packet_reference_value(x, spec);
}

cplx momentum_reference(double p, const PacketSpec& spec) {
  const double k = p - spec.p0();
  const double L = spec.L();
  const double s = L * L;
  const double k2 = k * k;
  const double poly = 3.0 + s * s + 2.0 * s * (k2 - 1.0) - 6.0 * k2 + k2 * k2;
  return 4.0 * poly / std::sqrt(norm_bracket(L)) * std::exp(cplx(-0.5 * k2, -k * spec.x0()));
}

cplx reference_free_evolution(double x, double t, const PacketSpec& spec) {
  if (!(t >= 0.0)) throw InputError("reference_free_evolution: t must be >= 0");
  const double p0 = spec.p0();
  const double s = spec.L() * spec.L();
  // int poly(k) e^{-a k^2 + i b k} dk over the line, poly as in momentum_reference
  const cplx a(0.5, 0.5 * t);
  const double b = x - spec.x0() - p0 * t;
  const cplx m0 = std::sqrt(pi / a) * std::exp(-b * b / (4.0 * a));
  const cplx I(0.0, 1.0);
  const cplx mu = I * b / (2.0 * a);
  const cplx var = 1.0 / (2.0 * a);
  const cplx mu2 = mu * mu;
  const cplx k2 = mu2 + var;
  const cplx k4 = mu2 * mu2 + 6.0 * mu2 * var + 3.0 * var * var;
  const cplx moments = (3.0 + s * s - 2.0 * s) + (2.0 * s - 6.0) * k2 + k4;
  const cplx phase = std::exp(I * (p0 * x - 0.5 * p0 * p0 * t));
  return 4.0 / std::sqrt(2.0 * pi * norm_bracket(spec.L())) * phase * m0 * moments;
}

MomentumFunction momentum_function(const PacketSpec& spec) {
  return [spec](double p) { return momentum_reference(p, spec); };
}

MomentumWindow::MomentumWindow(double p_min, double p_max) : p_min_(p_min), p_max_(p_max) {
  if (!std::isfinite(p_min) || !std::isfinite(p_max) || p_max < p_min)
    throw InputError("window: need finite p_min <= p_max");
}

MomentumWindow MomentumWindow::from_ratio(double p0, double K) {
  if (!(p0 > 0.0)) throw InputError("window: p0 must be positive");
  if (!(K >= 1.0)) throw InputError("window: K = p_max/p0 must be >= 1");
  return MomentumWindow(2.0 * p0 - K * p0, K * p0);
}

bool MomentumWindow::below_barrier(double V) const { return p_max_ < std::sqrt(2.0 * V); }

double tail_probability(const MomentumWindow& window, const PacketSpec& spec) {
  const double p0 = spec.p0();
  if (std::abs(window.center() - p0) > 1e-12 * p0) throw InputError("tail_probability: window not centred on p0");
  if (window.p_max() < p0) throw InputError("tail_probability: p_max must not be below p0");
  return tail_closed(window.p_max() - p0, spec.L());
}

double window_factor(double K, double k0) {
  const double r = 1.0 - K * K * k0;
  if (!(r > 0.0)) throw InputError("window factor: K^2 k0 must be < 1");
  return 1.0 / std::sqrt(r);
}

ConsistencyCheck consistency_condition(double D, int l, double P0, double k0, const MomentumWindow& window,
                                       double L) {
  if (!(k0 > 0.0 && k0 < 1.0)) throw InputError("consistency: k0 outside the tunneling regime");
  if (l < 0) throw InputError("consistency: l must be >= 0");
  if (std::abs(window.center() - P0) > 1e-12 * P0) throw InputError("consistency: window not centred on P0");
  if (!window.below_barrier(P0 * P0 / (2.0 * k0)))
    throw InputError("consistency: window reaches above the barrier (K^2 k0 >= 1)");
  ConsistencyCheck out{};
  out.lhs = D * P0 * (2.0 * l + 1.0) * std::sqrt((1.0 - k0) / k0);
  out.rhs = -std::log(epsilon_norm(L).eps + tail_closed(window.p_max() - P0, L));
  out.satisfied = out.lhs <= out.rhs + kConsistencySlack;
  out.strictly = out.lhs <= out.rhs;
  return out;
}

bool ReferenceShift::negligible_vs(double delta_x_l) const {
  // "much smaller": three orders of magnitude
  if (!std::isfinite(log_abs)) return true;
  return log_abs < std::log(std::abs(delta_x_l)) - 3.0 * std::log(10.0);
}

ReferenceShift reference_shift_bound(const PacketSpec& spec) {
  const double L = spec.L();
  const auto e = epsilon_norm(L);
  ReferenceShift out{};
  out.delta_x_ref = spec.x0() * e.eps * e.eps;
  const double lx = std::log(std::abs(spec.x0()));
  out.log_abs = lx + 2.0 * e.log_eps;
  out.log_bound = lx + std::log(24.0 / kSqrtPi) - L * L - 9.0 * std::log(L);
  out.bound = std::exp(out.log_bound);
  return out;
}

PacketDerived derive(const PacketSpec& spec) {
  const auto v = variances(spec.L());
  return {normalization(spec.L()), v.dx2, v.dp2, epsilon_norm(spec.L()).eps, momentum_function(spec)};
}

MomentumDomain momentum_domain(const PacketSpec& spec, double span_sigmas) {
  const double sp = std::sqrt(variances(spec.L()).dp2);
  return {spec.p0() - span_sigmas * sp, spec.p0() + span_sigmas * sp};
}

}  // namespace ltunnel
