// Compact-support Gaussian-polynomial packet (a = 1 units) and its closed forms:
//   psi(x) = N^{-1/2} e^{i p0 x} e^{-u^2/2} (u^2 - L^2)^2,  u = x - x0,  |u| < L.
// psi0 is the same expression on the whole line; eps = ||psi - psi0||.
#pragma once

#include <functional>

#include "ltunnel/core_model.hpp"

namespace ltunnel {

class PacketSpec {
 public:
  // Requires L > 2, p0 > 0 and x0 + L <= 0 (support left of the barrier).
  PacketSpec(double x0, double p0, double L);

  double x0() const { return x0_; }
  double p0() const { return p0_; }
  double L() const { return L_; }

 private:
  double x0_, p0_, L_;
};

// Plain Gaussian |psi|^2 ~ exp(-(x-x0)^2 / (2 sigma^2)); used by oracle tests.
struct GaussianPacket {
  double x0;
  double p0;
  double sigma;

  cplx value(double x) const;
  cplx momentum(double p) const;
  // Exact freely evolved wavefunction (hbar = m = 1).
  cplx evolved(double x, double t) const;
};

double normalization(double L);  // N with a = 1; the unnormalized norm of psi

struct Variances {
  double dx2;
  double dp2;
};
Variances variances(double L);

struct EpsilonNorm {
  double eps;      // underflows to 0 for large L
  double log_eps;  // always finite
};
EpsilonNorm epsilon_norm(double L);
// sqrt(24/sqrt(pi)) e^{-L^2/2} L^{-9/2}
double epsilon_bound(double L);
double log_epsilon_bound(double L);

cplx packet_value(double x, const PacketSpec& spec);
cplx packet_reference_value(double x, const PacketSpec& spec);  // psi0, whole line
cplx momentum_reference(double p, const PacketSpec& spec);       // f0 = FT of psi0
// psi0 evolved freely to time t, exact (Gaussian moments of the polynomial prefactor)
cplx reference_free_evolution(double x, double t, const PacketSpec& spec);

using MomentumFunction = std::function<cplx(double)>;
MomentumFunction momentum_function(const PacketSpec& spec);

class MomentumWindow {
 public:
  MomentumWindow(double p_min, double p_max);
  static MomentumWindow from_ratio(double p0, double K);

  double p_min() const { return p_min_; }
  double p_max() const { return p_max_; }
  double center() const { return 0.5 * (p_min_ + p_max_); }
  double K() const { return p_max_ / center(); }
  // p_max < sqrt(2V): the whole window tunnels.
  bool below_barrier(double V) const;

 private:
  double p_min_, p_max_;
};

// Probability of |f0|^2 outside the window. K = 1 gives 1.
double tail_probability(const MomentumWindow& window, const PacketSpec& spec);

// 1/sqrt(1 - K^2 k0)
double window_factor(double K, double k0);

struct ConsistencyCheck {
  double lhs;            // D P0 (2l+1) sqrt((1-k0)/k0)
  double rhs;            // -ln(eps + P_rest)
  bool satisfied;        // lhs <= rhs + kConsistencySlack
  bool strictly;         // lhs <= rhs
  double margin() const { return rhs - lhs; }
};

// Slack allowed by "lhs is at most of the order of rhs": one e-fold.
inline constexpr double kConsistencySlack = 1.0;

ConsistencyCheck consistency_condition(double D, int l, double P0, double k0, const MomentumWindow& window,
                                       double L);

struct ReferenceShift {
  double delta_x_ref;  // x0 eps^2, may underflow
  double log_abs;      // ln |delta_x_ref| (-inf when x0 = 0)
  double bound;        // |x0| (24/sqrt(pi)) e^{-L^2} L^{-9}
  double log_bound;
  bool negligible_vs(double delta_x_l) const;
};
ReferenceShift reference_shift_bound(const PacketSpec& spec);

struct PacketDerived {
  double N;
  double dx2;
  double dp2;
  double eps;
  MomentumFunction f0;
};
PacketDerived derive(const PacketSpec& spec);

// Integration range [p0 - span*sigma_p, p0 + span*sigma_p].
struct MomentumDomain {
  double lo;
  double hi;
};
MomentumDomain momentum_domain(const PacketSpec& spec, double span_sigmas);

}  // namespace ltunnel
