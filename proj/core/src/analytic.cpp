#include "ltunnel/analytic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "ltunnel/specfun.hpp"

namespace ltunnel {

namespace {

using std::numbers::pi;
const double kInvSqrt2Pi = 1.0 / std::sqrt(2.0 * pi);
constexpr cplx I{0.0, 1.0};

int oscillation_panels(double lo, double hi, double t, double x) {
  // Total phase swept by exp(-i p^2 t/2 + i p x) over [lo, hi], about two oscillations per panel.
  const double slope = std::max(std::abs(x - lo * t), std::abs(x - hi * t));
  const double sweep = (hi - lo) * slope;
  return std::clamp(static_cast<int>(sweep / (4.0 * pi)) + 1, 1, 400);
}

cplx momentum_integral(const std::function<cplx(double)>& g, double lo, double hi, double t, double x,
                       quad::Tolerance tol = {}) {
  return quad::integrate_panels(g, lo, hi, oscillation_panels(lo, hi, t, x), tol).value;
}

void check_tunneling(double k0) {
  if (!(k0 > 0.0 && k0 < 1.0))
    throw InputError("outside the tunneling regime: need 0 < k0 < 1 (momenta below sqrt(2 m V))");
}

}  // namespace

cplx reflection_value(double k) {
  if (k <= 1.0) return {-1.0 + 2.0 * k, -2.0 * std::sqrt(k * (1.0 - k))};
  const double r = std::sqrt(k) - std::sqrt(k - 1.0);
  return {r * r, 0.0};
}

ReflectionFactor reflection_factor(double p, const Barrier& b) {
  if (!(p > 0.0)) throw InputError("reflection_factor: p must be positive");
  const double k = b.k(p);
  if (k == 1.0) throw InputError("reflection_factor: k = 1 is the square-root branch point");
  return {reflection_value(k), k};
}

cplx rho(cplx s, double V) {
  if (s == cplx{}) throw InputError("rho: s = 0");
  if (V == 0.0) return {0.0, 0.0};
  cplx z = 1.0 - V / (I * s);
  // On the imaginary s axis take the limit from Re s > 0; a signed zero would flip the root.
  if (z.imag() == 0.0) z.imag(0.0);
  return 2.0 / (1.0 + std::sqrt(z)) - 1.0;
}

cplx kernel_K(double x, double p, double t, const Barrier& b) {
  if (!(t > 0.0)) throw InputError("kernel_K: t must be positive");
  const double V = b.height();
  const cplx q = std::sqrt(cplx(p * p - 2.0 * V, 0.0));
  // Erfc arguments zeta = A -+ B q with A = -i sqrt(2i/t) x/2, B = i sqrt(i t/2).
  const cplx A = -I * std::sqrt(2.0 * I / t) * (0.5 * x);
  const cplx B = I * std::sqrt(I * t / 2.0);
  const cplx E = std::exp(I * (x * x / (2.0 * t) - V * t));
  // e^{-+ixq} e^{-iVt - itq^2/2} Erfc(zeta) = E w(i zeta) when Re zeta >= 0,
  // else 2 e^{-+ixq - ip^2 t/2} - E w(-i zeta).
  auto term = [&](cplx zeta, double sgn) -> cplx {
    if (zeta.real() >= 0.0) return E * faddeeva(I * zeta);
    return 2.0 * std::exp(-sgn * I * x * q - I * (0.5 * p * p * t)) - E * faddeeva(-I * zeta);
  };
  return 0.5 * kInvSqrt2Pi * (term(A - B * q, 1.0) + term(A + B * q, -1.0));
}

cplx kernel_U0(double x, double p, double t, const Barrier& b) {
  const double kap2 = 2.0 * b.height() - p * p;
  if (!(kap2 > 0.0)) throw InputError("kernel_U0: requires p^2 < 2V");
  return kInvSqrt2Pi * std::exp(cplx(-x * std::sqrt(kap2), -0.5 * p * p * t));
}

cplx free_evolution(const MomentumFunction& f, double x, double t, int sign, MomentumDomain dom,
                    quad::Tolerance tol) {
  if (!(t >= 0.0)) throw InputError("free_evolution: t must be >= 0");
  if (sign != 1 && sign != -1) throw InputError("free_evolution: sign must be +1 or -1");
  const double sx = sign * x;
  auto g = [&](double p) { return f(p) * std::exp(I * (p * sx - 0.5 * p * p * t)); };
  return kInvSqrt2Pi * momentum_integral(g, dom.lo, dom.hi, t, sx, tol);
}

Scenario make_scenario(const PacketSpec& packet, const Barrier& barrier, double K) {
  return Scenario{packet, barrier, MomentumWindow::from_ratio(packet.p0(), K)};
}

MomentumDomain term_domain(const Scenario& sc) {
  const auto d = momentum_domain(sc.packet, kTermSigmaSpan);
  return {std::max(d.lo, 1e-12), std::min(d.hi, std::sqrt(2.0 * sc.barrier.height()))};
}

MomentumDomain free_domain(const PacketSpec& packet) { return momentum_domain(packet, kFreeSigmaSpan); }

double attenuation(int l, const Scenario& sc) {
  return std::exp(-(2.0 * l + 1.0) * sc.barrier.width() * sc.gamma0());
}

TermValue transmitted_term(int l, double x, double t, const Scenario& sc, bool extend) {
  if (l < 0) throw InputError("transmitted_term: l must be >= 0");
  if (!(t > 0.0)) throw InputError("transmitted_term: t must be positive");
  if (!extend && !(x > sc.barrier.width())) throw InputError("transmitted_term: x must exceed d");
  check_tunneling(sc.k0());
  const double V = sc.barrier.height();
  const double xs = x - sc.barrier.width();
  const PacketSpec& pk = sc.packet;
  auto g = [&](double p) {
    const cplx R = reflection_value(p * p / (2.0 * V));
    const cplx R2 = R * R;
    cplx Rl = 1.0;
    for (int i = 0; i < l; ++i) Rl *= R2;
    return Rl * (1.0 - R2) * momentum_reference(p, pk) * std::exp(I * (p * xs - 0.5 * p * p * t));
  };
  const auto dom = term_domain(sc);
  const double pb = std::sqrt(2.0 * V);
  cplx integral;
  if (dom.hi < pb) {
    integral = momentum_integral(g, dom.lo, dom.hi, t, xs);
  } else {
    // gamma ~ sqrt(pb - p) at the branch point; p = pb - s^2 makes the last stretch smooth
    const double c = pb - std::min(1.0, 0.25 * (pb - dom.lo));
    integral = momentum_integral(g, dom.lo, c, t, xs);
    auto h = [&](double s) { return 2.0 * s * g(pb - s * s); };
    integral += quad::integrate(std::function<cplx(double)>(h), 0.0, std::sqrt(pb - c)).value;
  }
  TermValue out;
  out.value = attenuation(l, sc) * kInvSqrt2Pi * integral;
  const auto cc = consistency_condition(sc.barrier.width(), l, pk.p0(), sc.k0(), sc.window, pk.L());
  out.consistency_warning = !cc.satisfied;
  out.early_time_warning = t < validity_time(sc.barrier);
  return out;
}

Truncation truncation_order(const Scenario& sc) {
  const double step = 2.0 * sc.barrier.width() * sc.gamma0();  // -ln of attenuation ratio
  const int l_att = static_cast<int>(std::floor(15.0 * std::log(10.0) / step));
  int l_cons = -1;
  for (int l = 0; l <= l_att; ++l) {
    const auto cc = consistency_condition(sc.barrier.width(), l, sc.packet.p0(), sc.k0(), sc.window,
                                          sc.packet.L());
    if (!cc.satisfied) break;
    l_cons = l;
  }
  if (l_cons < l_att) return {std::max(l_cons, 0), TruncationRule::consistency};
  return {l_att, TruncationRule::attenuation};
}

cplx transmitted_factor(double k0, double dgamma) {
  check_tunneling(k0);
  const cplx R = reflection_value(k0);
  const double e = std::exp(-dgamma);
  return e * (1.0 - R * R) / (1.0 - e * e * R * R);
}

cplx transmitted_factor_series(double k0, double dgamma, int l_max) {
  check_tunneling(k0);
  const cplx R2 = reflection_value(k0) * reflection_value(k0);
  const double e2 = std::exp(-2.0 * dgamma);
  cplx sum{};
  cplx w = std::exp(-dgamma) * (1.0 - R2);
  for (int l = 0; l <= l_max; ++l) {
    sum += w;
    w *= e2 * R2;
  }
  return sum;
}

cplx reflected_factor(double k0, double dgamma) {
  check_tunneling(k0);
  const cplx R = reflection_value(k0);
  const double e2 = std::exp(-2.0 * dgamma);
  return R * (1.0 - e2) / (1.0 - e2 * R * R);
}

double conservation_check(double k0, double dgamma) {
  return std::norm(reflected_factor(k0, dgamma)) + std::norm(transmitted_factor(k0, dgamma));
}

WaveValue transmitted_wavefunction(double x, double t, const Scenario& sc, int l_max) {
  if (!(x >= sc.barrier.width())) throw InputError("transmitted_wavefunction: x must be >= d");
  if (!(t > 0.0)) throw InputError("transmitted_wavefunction: t must be positive");
  const double k0 = sc.k0();
  check_tunneling(k0);
  const double dg = sc.barrier.width() * sc.gamma0();
  WaveValue out;
  cplx factor;
  if (l_max == kClosedForm) {
    factor = transmitted_factor(k0, dg);
  } else {
    const int order = (l_max == kAutoOrder) ? truncation_order(sc).l_max : l_max;
    if (order < 0) throw InputError("transmitted_wavefunction: bad series order");
    factor = transmitted_factor_series(k0, dg, order);
    out.l_used = order;
    const auto cc = consistency_condition(sc.barrier.width(), order, sc.packet.p0(), k0, sc.window, sc.packet.L());
    out.consistency_warning = !cc.satisfied;
  }
  const auto f = momentum_function(sc.packet);
  out.value = factor * free_evolution(f, x - sc.barrier.width(), t, +1, term_domain(sc));
  out.early_time_warning = t < validity_time(sc.barrier);
  return out;
}

WaveValue reflected_wavefunction(double x, double t, const Scenario& sc) {
  if (!(x < 0.0)) throw InputError("reflected_wavefunction: x must be negative");
  if (!(t >= 0.0)) throw InputError("reflected_wavefunction: t must be >= 0");
  const double k0 = sc.k0();
  check_tunneling(k0);
  const auto f = momentum_function(sc.packet);
  const auto dom = free_domain(sc.packet);
  const cplx incoming = free_evolution(f, x, t, +1, dom);
  const cplx mirrored = free_evolution(f, x, t, -1, dom);
  WaveValue out;
  out.value = incoming + reflected_factor(k0, sc.barrier.width() * sc.gamma0()) * mirrored;
  out.early_time_warning = t < validity_time(sc.barrier);
  return out;
}

WaveValue barrier_wavefunction(double x, double t, const Scenario& sc) {
  const double d = sc.barrier.width();
  if (!(x >= 0.0 && x < d)) throw InputError("barrier_wavefunction: need 0 <= x < d");
  if (!(t >= 0.0)) throw InputError("barrier_wavefunction: t must be >= 0");
  check_tunneling(sc.k0());
  const double g = sc.gamma0();
  const cplx R = reflection_value(sc.k0());
  const cplx den = 1.0 - std::exp(-2.0 * d * g) * R * R;
  const cplx factor = (1.0 - std::exp(-2.0 * (d - x) * g) * R) / den * (R + 1.0) * std::exp(-x * g);
  const auto f = momentum_function(sc.packet);
  WaveValue out;
  out.value = factor * free_evolution(f, 0.0, t, +1, free_domain(sc.packet));
  out.early_time_warning = t < validity_time(sc.barrier);
  return out;
}

PhaseLinearization phase_linearization(double p0, const Barrier& b) {
  const double k0 = b.k(p0);
  if (!(k0 > 0.0 && k0 < 1.0)) throw InputError("phase_linearization: need 0 < k0 < 1");
  const cplx R = reflection_value(k0);
  return {std::arg(R), std::arg(1.0 - R * R), 2.0 / b.gamma(p0)};
}

PacketTermSummary delay_times(int l, double p0, const Barrier& b) {
  if (l < 0) throw InputError("delay_times: l must be >= 0");
  const double g = b.gamma(p0);
  PacketTermSummary s{};
  s.l = l;
  s.attenuation = std::exp(-(2.0 * l + 1.0) * b.width() * g);
  s.phase_slope = 2.0 * (1.0 + 2.0 * l) / g;
  s.delay = 2.0 * (1.0 + 2.0 * l) / (p0 * g);
  s.shift = s.delay * p0;
  return s;
}

double hartmann_time(double p0, const Barrier& b) { return delay_times(0, p0, b).delay; }

Distinguishability distinguishability_ratio(double p0, double dx, double dp, const Barrier& b) {
  const double k0 = b.k(p0);
  if (!(k0 > 0.0 && k0 < 1.0)) throw InputError("distinguishability: need 0 < k0 < 1");
  const double r = std::sqrt(k0 / (1.0 - k0));
  return {4.0 / (p0 * dx) * r, 8.0 * dp / p0 * r};
}

}  // namespace ltunnel
