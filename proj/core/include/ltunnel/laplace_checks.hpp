// Time-domain coefficient functions of the rho(s) series, the Delta_l bound, the Bessel
// moment identity and a direct evaluation of the transmitted-wave time convolution.
#pragma once

#include <utility>
#include <vector>

#include "ltunnel/analytic.hpp"
#include "ltunnel/core_model.hpp"
#include "ltunnel/packet.hpp"

namespace ltunnel {

// L^{-1}(rho^l)(t) = l/(i^l t) J_l(V t/2) e^{-i V t/2}, l >= 1.
cplx inverse_rho_power(int l, double t, double V);

enum class CoefficientKind { a, b, c, g };

// delta_weight * delta(t) + sum_j coeff_j L^{-1}(rho^{power_j})(t)
class CoefficientFunction {
 public:
  CoefficientFunction(cplx delta_weight, std::vector<std::pair<int, double>> terms, double V);

  cplx delta_weight() const { return delta_; }
  const std::vector<std::pair<int, double>>& terms() const { return terms_; }
  double V() const { return V_; }

  cplx smooth(double t) const;     // t > 0
  cplx symbol(cplx s) const;       // the defining rho polynomial at s
  cplx forward_laplace(double s) const;  // numerical transform, delta part included

 private:
  cplx delta_;
  std::vector<std::pair<int, double>> terms_;
  double V_;
};

// a_l: rho^{2l+1} - rho^{2l+3}; b_l: rho^{2l} + rho^{2l+1}; c_l: rho^{2l+1} + rho^{2l+2};
// g_l: rho^{2l} - rho^{2l+2}.
CoefficientFunction coefficient_function(CoefficientKind kind, int l, double V);

// Numerical Laplace transform of L^{-1}(rho^l) at real s > 0.
cplx forward_laplace_rho_power(int l, double s, double V);

// l / sqrt(2 eps) (2/(V t))^eps (2^{2 eps} Gamma(1-2eps) / (2 Gamma(1-eps)^2))^{1/2}
double delta_l_bound(int l, double t, double V, double eps = 0.25);

struct UModulus {
  double value;
  double error;
};
// | int_t^inf e^{i p^2 tau/2 - i V tau/2} (l/tau) J_l(V tau/2) dtau |
UModulus u_modulus(int l, double t, double V, double p);

struct MomentIntegral {
  double closed;
  double quadrature;
};
// int_0^inf J_l(y)^2 y^{2 eps - 1} dy
MomentIntegral bessel_moment_integral(int l, double eps);
double bessel_moment_closed(int l, double eps);

struct ConvolutionAudit {
  cplx reference;     // int_0^t F(t - tau) g_l(tau) dtau, delta part included
  cplx delta_part;    // F(t), the free evolution shifted by d
  cplx product;       // (2 pi)^{-1/2} int e^{-ip^2t/2} e^{ip(x-d)} R^{2l}(1 - R^2) f dp
  double discrepancy; // |reference - product|
  double envelope;    // (2 pi)^{-1/2} ||f||_1 * (sum of Delta bounds of the smooth terms)
};

// Attenuation e^{-X_l gamma} is common to both sides and left out. Above-barrier momenta are
// allowed here (R real), so V may be small.
ConvolutionAudit convolution_reference(int l, double x, double t, const PacketSpec& packet, const Barrier& b);

}  // namespace ltunnel
