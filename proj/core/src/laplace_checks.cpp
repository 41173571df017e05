#include "ltunnel/laplace_checks.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "ltunnel/quadrature.hpp"
#include "ltunnel/specfun.hpp"

namespace ltunnel {

namespace {

using std::numbers::pi;
constexpr cplx I{0.0, 1.0};
const double kInvSqrt2Pi = 1.0 / std::sqrt(2.0 * pi);

cplx i_pow(int n) {
  static const cplx table[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
  return table[((n % 4) + 4) % 4];
}

int panels_for(double span, double omega) {
  return std::clamp(static_cast<int>(span * omega / (4.0 * pi)) + 1, 1, 20000);
}

// int_Y^inf h(y) e^{i kappa y} dy for h(y) = sum_j a_j y^{b_j}, by repeated integration by parts.
cplx oscillatory_tail(const std::vector<std::pair<double, double>>& h, double kappa, double Y, int order) {
  cplx sum{};
  const cplx ik = I * kappa;
  cplx denom = ik;
  for (int k = 0; k <= order; ++k) {
    double deriv = 0.0;
    for (const auto& [a, b] : h) {
      double c = a;
      for (int j = 0; j < k; ++j) c *= (b - j);
      deriv += c * std::pow(Y, b - k);
    }
    sum += ((k % 2 == 0) ? 1.0 : -1.0) * deriv / denom;
    denom *= ik;
  }
  return -std::exp(ik * Y) * sum;
}

}  // namespace

cplx inverse_rho_power(int l, double t, double V) {
  if (l < 1) throw InputError("inverse_rho_power: l must be >= 1 (rho^0 is a delta, see CoefficientFunction)");
  if (!(t > 0.0)) throw InputError("inverse_rho_power: t must be positive");
  const double y = 0.5 * V * t;
  return static_cast<double>(l) / (i_pow(l) * t) * bessel_j(l, y) * std::exp(cplx(0.0, -y));
}

CoefficientFunction::CoefficientFunction(cplx delta_weight, std::vector<std::pair<int, double>> terms, double V)
    : delta_(delta_weight), terms_(std::move(terms)), V_(V) {
  for (const auto& [n, c] : terms_)
    if (n < 1) throw InputError("CoefficientFunction: smooth powers must be >= 1");
  if (!(V > 0.0)) throw InputError("CoefficientFunction: V must be positive");
}

cplx CoefficientFunction::smooth(double t) const {
  cplx sum{};
  for (const auto& [n, c] : terms_) sum += c * inverse_rho_power(n, t, V_);
  return sum;
}

cplx CoefficientFunction::symbol(cplx s) const {
  const cplx r = rho(s, V_);
  cplx sum = delta_;
  for (const auto& [n, c] : terms_) sum += c * std::pow(r, n);
  return sum;
}

cplx CoefficientFunction::forward_laplace(double s) const {
  if (!(s > 0.0)) throw InputError("forward_laplace: s must be positive");
  // e^{-s T} = e^{-40}; the rest of the tail is below l sqrt(2/(pi V T/2)) e^{-sT}/(sT).
  const double T = 40.0 / s;
  auto g = [&](double t) { return std::exp(-s * t) * smooth(t); };
  const quad::Tolerance tol{1e-12, 1e-16};
  return delta_ + quad::integrate_panels(g, 0.0, T, panels_for(T, V_), tol).value;
}

CoefficientFunction coefficient_function(CoefficientKind kind, int l, double V) {
  if (l < 0) throw InputError("coefficient_function: l must be >= 0");
  std::vector<std::pair<int, double>> powers;
  switch (kind) {
    case CoefficientKind::a: powers = {{2 * l + 1, 1.0}, {2 * l + 3, -1.0}}; break;
    case CoefficientKind::b: powers = {{2 * l, 1.0}, {2 * l + 1, 1.0}}; break;
    case CoefficientKind::c: powers = {{2 * l + 1, 1.0}, {2 * l + 2, 1.0}}; break;
    case CoefficientKind::g: powers = {{2 * l, 1.0}, {2 * l + 2, -1.0}}; break;
  }
  cplx delta{};
  std::vector<std::pair<int, double>> smooth;
  for (const auto& [n, c] : powers) {
    if (n == 0) {
      delta += c;
    } else {
      smooth.emplace_back(n, c);
    }
  }
  return CoefficientFunction(delta, std::move(smooth), V);
}

cplx forward_laplace_rho_power(int l, double s, double V) {
  return CoefficientFunction(0.0, {{l, 1.0}}, V).forward_laplace(s);
}

double delta_l_bound(int l, double t, double V, double eps) {
  if (!(eps > 0.0 && eps < 0.5)) throw InputError("delta_l_bound: epsilon must lie in (0, 1/2)");
  if (!(t > 0.0) || !(V > 0.0)) throw InputError("delta_l_bound: t and V must be positive");
  if (l < 0) throw InputError("delta_l_bound: l must be >= 0");
  const double g1 = gamma_real(1.0 - eps);
  const double moment = std::pow(2.0, 2.0 * eps) * gamma_real(1.0 - 2.0 * eps) / (2.0 * g1 * g1);
  return l / std::sqrt(2.0 * eps) * std::pow(2.0 / (V * t), eps) * std::sqrt(moment);
}

UModulus u_modulus(int l, double t, double V, double p) {
  if (l < 1) throw InputError("u_modulus: l must be >= 1");
  if (!(t > 0.0) || !(V > 0.0)) throw InputError("u_modulus: t and V must be positive");
  const double omega = (p * p - V) / V;
  const double y0 = 0.5 * V * t;
  const double Y = y0 + 2.0e4;
  auto g = [&](double y) { return std::exp(I * (omega * y)) * (l * bessel_j(l, y) / y); };
  const auto body = quad::integrate_panels(g, y0, Y, panels_for(Y - y0, 1.0 + std::abs(omega)),
                                           quad::Tolerance{1e-10, 1e-16});
  // Tail with J_l(y) ~ sqrt(2/(pi y)) cos(y - (2l+1) pi/4).
  const double phi = (2.0 * l + 1.0) * pi / 4.0;
  const double amp = l * std::sqrt(2.0 / pi) / 2.0;
  cplx tail{};
  double tail_err = 0.0;
  for (int sgn : {1, -1}) {
    const double kappa = omega + sgn;
    const cplx ph = std::exp(cplx(0.0, -sgn * phi));
    if (std::abs(kappa) > 0.05) {
      tail += amp * ph * oscillatory_tail({{1.0, -1.5}}, kappa, Y, 3);
      tail_err += amp * std::pow(Y, -2.5) / (kappa * kappa);
    } else {
      tail_err += amp * 2.0 / std::sqrt(Y);  // no oscillation to exploit: plain bound
    }
  }
  return {std::abs(body.value + tail), body.error + tail_err + l * std::pow(Y, -2.5)};
}

double bessel_moment_closed(int l, double eps) {
  if (!(eps > 0.0 && eps < 0.5)) throw InputError("bessel_moment: epsilon must lie in (0, 1/2)");
  if (l < 0) throw InputError("bessel_moment: l must be >= 0");
  const double g1 = gamma_real(1.0 - eps);
  return std::pow(2.0, 2.0 * eps) * gamma_real(1.0 - 2.0 * eps) * gamma_real(l + eps) /
         (2.0 * g1 * g1 * gamma_real(1.0 + l - eps));
}

MomentIntegral bessel_moment_integral(int l, double eps) {
  const double closed = bessel_moment_closed(l, eps);
  const quad::Tolerance tol{1e-12, 1e-16};
  // [0, 1] with y = s^{1/(2 eps)}, which turns y^{2eps-1} dy into ds/(2 eps).
  auto head = [&](double s) {
    const double j = bessel_j(l, std::pow(s, 0.5 / eps));
    return j * j / (2.0 * eps);
  };
  double total = quad::integrate(std::function<double(double)>(head), 0.0, 1.0, tol).value;
  const double Y = 1000.0;
  const int panels = static_cast<int>((Y - 1.0) / pi) + 1;
  auto body = [&](double y) {
    const double j = bessel_j(l, y);
    return cplx(j * j * std::pow(y, 2.0 * eps - 1.0), 0.0);
  };
  total += quad::integrate_panels(body, 1.0, Y, panels, tol).value.real();
  // Tail from J^2 = (1/(pi y)) [P^2+Q^2 + (P^2-Q^2) cos 2chi - 2PQ sin 2chi], 2chi = 2y - (l+1/2) pi.
  const double mu = 4.0 * l * l;
  const double b = 2.0 * eps - 2.0;
  double tail = std::pow(Y, 2.0 * eps - 1.0) / (1.0 - 2.0 * eps) +
                (mu - 1.0) / 8.0 * std::pow(Y, 2.0 * eps - 3.0) / (3.0 - 2.0 * eps);
  // Re int h e^{i(2y + phi)}, h = y^b (1 - (mu-1)(2mu-10)/(64 y^2)) + i (mu-1)/4 y^{b-1}
  const std::vector<std::pair<double, double>> re_part{{1.0, b}, {-(mu - 1.0) * (2.0 * mu - 10.0) / 64.0, b - 2.0}};
  const std::vector<std::pair<double, double>> im_part{{(mu - 1.0) / 4.0, b - 1.0}};
  const cplx phase = std::exp(cplx(0.0, -(l + 0.5) * pi));
  const cplx osc = phase * (oscillatory_tail(re_part, 2.0, Y, 4) + I * oscillatory_tail(im_part, 2.0, Y, 4));
  tail += osc.real();
  total += tail / pi;
  return {closed, total};
}

ConvolutionAudit convolution_reference(int l, double x, double t, const PacketSpec& packet, const Barrier& b) {
  if (l < 0 || l > 2) throw InputError("convolution_reference: supported for l <= 2");
  if (!(x > b.width())) throw InputError("convolution_reference: x must exceed d");
  if (!(t > 0.0)) throw InputError("convolution_reference: t must be positive");
  const double V = b.height();
  const double xs = x - b.width();
  const auto dom = free_domain(packet);
  const double p_edge = std::sqrt(2.0 * V);
  const quad::Tolerance tol{1e-10, 1e-15};

  auto momentum = [&](const std::function<cplx(double)>& g) {
    // split at the barrier-top momentum where R(p) has a square-root kink
    const double lo = std::max(dom.lo, 0.0);
    auto piece = [&](double a, double c) {
      const double slope = std::max(std::abs(xs - a * t), std::abs(xs - c * t));
      const int n = std::clamp(static_cast<int>((c - a) * slope / (4.0 * pi)) + 1, 1, 400);
      return quad::integrate_panels(g, a, c, n, tol).value;
    };
    if (!(p_edge - 0.5 > lo && p_edge + 0.5 < dom.hi)) return piece(lo, dom.hi);
    // p = p_edge -+ u^2 next to the kink
    auto below = [&](double u) { return 2.0 * u * g(p_edge - u * u); };
    auto above = [&](double u) { return 2.0 * u * g(p_edge + u * u); };
    const double w = std::sqrt(0.5);
    return piece(lo, p_edge - 0.5) + quad::integrate_panels(below, 0.0, w, 4, tol).value +
           quad::integrate_panels(above, 0.0, w, 4, tol).value + piece(p_edge + 0.5, dom.hi);
  };

  // time side: the free packet in closed form, so the convolution needs no inner momentum integral
  auto free_at = [&](double s) { return reference_free_evolution(xs, s, packet); };

  const auto gl = coefficient_function(CoefficientKind::g, l, V);
  ConvolutionAudit out{};
  out.delta_part = gl.delta_weight() * free_at(t);
  auto conv = [&](double tau) { return free_at(t - tau) * gl.smooth(tau); };
  const double pmax = dom.hi;
  const int panels = panels_for(t, V + 0.5 * pmax * pmax);
  out.reference = out.delta_part + quad::integrate_panels(conv, 0.0, t, panels, tol).value;

  out.product = kInvSqrt2Pi * momentum([&](double p) {
                  const cplx R = reflection_value(p * p / (2.0 * V));
                  const cplx R2 = R * R;
                  return std::pow(R2, l) * (1.0 - R2) * momentum_reference(p, packet) *
                         std::exp(I * (p * xs - 0.5 * p * p * t));
                });
  out.discrepancy = std::abs(out.reference - out.product);

  const double f_l1 =
      quad::integrate(std::function<double(double)>([&](double p) { return std::abs(momentum_reference(p, packet)); }),
                      dom.lo, dom.hi, tol)
          .value;
  double bound = 0.0;
  for (const auto& [n, c] : gl.terms()) bound += std::abs(c) * delta_l_bound(n, t, V);
  out.envelope = kInvSqrt2Pi * f_l1 * bound;
  return out;
}

}  // namespace ltunnel
