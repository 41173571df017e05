// Reflection factor, Laplace symbol, propagation kernel and the region-wise approximate
// wavefunctions of a packet hitting a rectangular barrier (hbar = m = a = 1).
#pragma once

#include <vector>

#include "ltunnel/core_model.hpp"
#include "ltunnel/packet.hpp"
#include "ltunnel/quadrature.hpp"

namespace ltunnel {

struct ReflectionFactor {
  cplx value;
  double k;
};

// R = -1 + 2k - 2i sqrt(k(1-k)) below the barrier, real (sqrt k - sqrt(k-1))^2 above.
ReflectionFactor reflection_factor(double p, const Barrier& b);
// Same branch without argument checks; R(k = 1) = 1.
cplx reflection_value(double k);

// rho(s) = 2 / (1 + sqrt(1 - V/(i s))) - 1, principal root, continuous from Re s > 0. V = 0 is allowed.
cplx rho(cplx s, double V);
inline cplx rho(cplx s, const Barrier& b) { return rho(s, b.height()); }

// Propagation kernel K(x, p, t) through the scaled Faddeeva function.
cplx kernel_K(double x, double p, double t, const Barrier& b);
// Non-oscillating evanescent part U0 (k < 1).
cplx kernel_U0(double x, double p, double t, const Barrier& b);

// (2 pi)^{-1/2} int e^{-i p^2 t/2} e^{sign i p x} f(p) dp over [lo, hi].
cplx free_evolution(const MomentumFunction& f, double x, double t, int sign, MomentumDomain dom,
                    quad::Tolerance tol = {});

// Packet, barrier and momentum window of one scenario.
struct Scenario {
  PacketSpec packet;
  Barrier barrier;
  MomentumWindow window;

  double k0() const { return barrier.k(packet.p0()); }
  double gamma0() const { return barrier.gamma(packet.p0()); }
};

Scenario make_scenario(const PacketSpec& packet, const Barrier& barrier, double K);

inline constexpr double kTermSigmaSpan = 8.0;
inline constexpr double kFreeSigmaSpan = 10.0;

// Validity floor: results for t < 10/V carry a warning.
inline double validity_time(const Barrier& b) { return 10.0 / b.height(); }

struct TermValue {
  cplx value;
  bool consistency_warning = false;
  bool early_time_warning = false;
};

// l-th transmitted sub-packet, momentum integral with the exact R(p) factors.
// Defined for x > d; extend = true evaluates the same expression for any x (profiles, centroids).
TermValue transmitted_term(int l, double x, double t, const Scenario& sc, bool extend = false);
MomentumDomain term_domain(const Scenario& sc);
MomentumDomain free_domain(const PacketSpec& packet);
double attenuation(int l, const Scenario& sc);

enum class TruncationRule { attenuation, consistency, explicit_order };

struct Truncation {
  int l_max;
  TruncationRule rule;
};
Truncation truncation_order(const Scenario& sc);

// Closed geometric transmitted factor e^{-d g}(1 - R0^2)/(1 - e^{-2 d g} R0^2), with d g = dgamma.
cplx transmitted_factor(double k0, double dgamma);
cplx transmitted_factor_series(double k0, double dgamma, int l_max);
// R0 (1 - e^{-2 d g})/(1 - e^{-2 d g} R0^2)
cplx reflected_factor(double k0, double dgamma);

struct WaveValue {
  cplx value;
  bool early_time_warning = false;
  bool consistency_warning = false;
  int l_used = -1;  // series order actually summed, -1 for the closed form
};

inline constexpr int kClosedForm = -1;
inline constexpr int kAutoOrder = -2;

// x >= d. l_max = kClosedForm uses the geometric closed form, kAutoOrder picks truncation_order().
WaveValue transmitted_wavefunction(double x, double t, const Scenario& sc, int l_max = -1);
WaveValue reflected_wavefunction(double x, double t, const Scenario& sc);  // x < 0
WaveValue barrier_wavefunction(double x, double t, const Scenario& sc);    // 0 <= x < d

// |reflected factor|^2 + |transmitted factor|^2
double conservation_check(double k0, double dgamma);

struct PhaseLinearization {
  double arg_R;
  double arg_1mR2;
  double slope;  // d/dp Arg R = d/dp Arg(1 - R^2) = 2/sqrt(2V - p0^2)
  double term_slope(int l) const { return (1 + 2 * l) * slope; }
};
PhaseLinearization phase_linearization(double p0, const Barrier& b);

struct PacketTermSummary {
  int l;
  double attenuation;
  double phase_slope;
  double shift;  // delta x_l
  double delay;  // T_l
  double centroid = 0.0;
};
PacketTermSummary delay_times(int l, double p0, const Barrier& b);
double hartmann_time(double p0, const Barrier& b);
struct Distinguishability {
  double exact;   // (delta x_{l+1} - delta x_l) / Delta x = 4/(p0 Delta x) sqrt(k0/(1-k0))
  double approx;  // 8 Delta p / p0 sqrt(k0/(1-k0)), using Delta x Delta p ~ 1/2
};
Distinguishability distinguishability_ratio(double p0, double dx, double dp, const Barrier& b);

}  // namespace ltunnel
