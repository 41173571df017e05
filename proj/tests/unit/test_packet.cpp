#include <doctest.h>

#include <cmath>
#include <numbers>

#include "ltunnel/packet.hpp"
#include "ltunnel/quadrature.hpp"
#include "oracle_values.hpp"

using namespace ltunnel;
using Real = std::function<double(double)>;
using Complex = std::function<cplx(double)>;

TEST_CASE("packet invariants") {
  CHECK_THROWS_AS(PacketSpec(-20.0, 10.0, 2.0), InputError);
  CHECK_THROWS_AS(PacketSpec(-20.0, 0.0, 20.0), InputError);
  CHECK_THROWS_AS(PacketSpec(-5.0, 10.0, 20.0), InputError);
  CHECK_NOTHROW(PacketSpec(-20.0, 10.0, 20.0));
}

TEST_CASE("packet values and support") {
  const PacketSpec s(-20.0, 10.0, 20.0);
  CHECK(packet_value(-20.0 + 20.0, s) == cplx{});
  CHECK(packet_value(-40.0, s) == cplx{});
  const double L = 20.0;
  const cplx centre = packet_value(-20.0, s);
  CHECK(std::abs(centre) == doctest::Approx(std::pow(L, 4) / std::sqrt(normalization(L))).epsilon(1e-14));
  CHECK(std::arg(centre) == doctest::Approx(std::remainder(-200.0, 2 * std::numbers::pi)).epsilon(1e-9));
  for (double x = 0.0; x < 30.0; x += 0.37) CHECK(packet_value(x, s) == cplx{});

  // |psi| vanishes quadratically at the edge: the one-sided difference quotient is O(h)
  const PacketSpec s3(-10.0, 1.0, 3.0);
  const double edge = -10.0 + 3.0;
  double prev = INFINITY;
  for (double h : {1e-1, 1e-2, 1e-3}) {
    const double q = std::abs(packet_value(edge - h, s3)) / h;
    CHECK(q < prev);
    prev = q;
  }
  CHECK(prev < 1e-2);
}

TEST_CASE("closed forms against direct quadrature of the packet") {
  for (const auto& o : oracle::packet) {
    INFO("L = " << o.L);
    CHECK(normalization(o.L) == doctest::Approx(o.N).epsilon(1e-12));
    const auto v = variances(o.L);
    CHECK(std::abs(v.dx2 - o.dx2) <= 1e-8 * o.dx2);
    CHECK(std::abs(v.dp2 - o.dp2) <= 1e-8 * o.dp2);
    const auto e = epsilon_norm(o.L);
    CHECK(std::abs(2.0 * e.log_eps - std::log(o.eps2)) <= 1e-8);
  }
  CHECK(normalization(20.0) == doctest::Approx(4.515e10).epsilon(1e-3));
}

TEST_CASE("library quadrature reproduces the closed forms") {
  for (double L : {3.0, 5.0, 20.0}) {
    const double N = quad::integrate(Real([L](double u) { return std::pow(u * u - L * L, 4) * std::exp(-u * u); }),
                                     -L, L)
                         .value;
    CHECK(std::abs(N - normalization(L)) <= 1e-10 * N);
  }
  const PacketSpec s(-10.0, 2.0, 3.0);
  const double norm =
      quad::integrate(Real([&](double x) { return std::norm(packet_value(x, s)); }), -13.0, -7.0).value;
  CHECK(norm == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("variance values at the figure parameters and limits") {
  const auto v = variances(20.0);
  CHECK(std::abs(v.dx2 - 0.49) < 0.01);
  CHECK(std::abs(v.dp2 - 0.51) < 0.01);
  CHECK(variances(400.0).dx2 == doctest::Approx(0.5).epsilon(1e-4));
  CHECK(variances(400.0).dp2 == doctest::Approx(0.5).epsilon(1e-4));
  for (double L = 2.05; L < 60.0; L *= 1.1) {
    const auto w = variances(L);
    CHECK(w.dx2 <= 0.5);
    CHECK(w.dp2 <= 1.2);
  }
}

TEST_CASE("epsilon and its bound") {
  CHECK(epsilon_norm(3.0).eps <= epsilon_bound(3.0));
  CHECK(epsilon_norm(3.0).eps * epsilon_norm(3.0).eps == doctest::Approx(8.3347440027469e-8).epsilon(1e-9));
  CHECK(epsilon_norm(5.0).eps * epsilon_norm(5.0).eps == doctest::Approx(9.5030738957156e-17).epsilon(1e-9));
  CHECK(epsilon_norm(20.0).log_eps < std::log(1e-85));
  for (double L = 3.01; L < 40.0; L *= 1.05) CHECK(epsilon_norm(L).log_eps <= log_epsilon_bound(L));
  // both branches of the evaluation meet smoothly
  const double below = epsilon_norm(6.0 - 1e-9).log_eps, above = epsilon_norm(6.0 + 1e-9).log_eps;
  CHECK(std::abs(below - above) < 1e-7);
}

TEST_CASE("momentum representation") {
  const PacketSpec s(-20.0, 10.0, 20.0);
  const double L = 20.0;
  const cplx f = momentum_reference(10.0, s);
  const double den = std::sqrt(16.0 * normalization(L));
  CHECK(std::abs(f) == doctest::Approx(4.0 * (3.0 + std::pow(L, 4) - 2.0 * L * L) / den).epsilon(1e-13));
  CHECK(std::abs(std::arg(f)) < 1e-15);
  // off centre the phase is -(p - p0) x0
  CHECK(std::abs(std::arg(momentum_reference(11.0, s)) - std::remainder(20.0, 2 * std::numbers::pi)) < 1e-12);

  const PacketSpec s3(-10.0, 2.0, 3.0);
  const double e2 = std::pow(epsilon_norm(3.0).eps, 2);
  const auto dom = momentum_domain(s3, 40.0);
  const double n = quad::integrate(Real([&](double p) { return std::norm(momentum_reference(p, s3)); }), dom.lo,
                                   dom.hi)
                       .value;
  CHECK(std::abs(n - (1.0 + e2)) < 1e-8);
  const double mean = quad::integrate(Real([&](double p) { return p * std::norm(momentum_reference(p, s3)); }),
                                      dom.lo, dom.hi)
                          .value /
                      (1.0 + e2);
  CHECK(std::abs(mean - 2.0) < 1e-8);
}

TEST_CASE("Fourier transform of the compact packet stays within eps of f0") {
  const PacketSpec s(-10.0, 2.0, 3.0);
  const double eps = epsilon_norm(3.0).eps;
  const auto dom = momentum_domain(s, 12.0);
  // L2 distance between FT(psi) and f0 over the momentum range
  auto ft = [&](double p) {
    return quad::integrate(Complex([&](double x) { return packet_value(x, s) * std::exp(cplx(0.0, -p * x)); }),
                           -13.0, -7.0)
               .value /
           std::sqrt(2.0 * std::numbers::pi);
  };
  const double d2 = quad::integrate(Real([&](double p) { return std::norm(ft(p) - momentum_reference(p, s)); }),
                                    dom.lo, dom.hi, {1e-8, 1e-18, 12})
                        .value;
  CHECK(std::sqrt(d2) <= eps * 1.000001);
}

TEST_CASE("tail probability") {
  for (const auto& o : oracle::tail) {
    const double p0 = 10.0;
    const PacketSpec s(-40.0, p0, o.L);
    const MomentumWindow w(p0 - o.y, p0 + o.y);
    CHECK(tail_probability(w, s) == doctest::Approx(o.P).epsilon(1e-10));
  }
  const PacketSpec s(-20.0, 10.0, 20.0);
  CHECK(tail_probability(MomentumWindow::from_ratio(10.0, 1.0), s) == doctest::Approx(1.0).epsilon(1e-14));
  const double p14 = tail_probability(MomentumWindow::from_ratio(10.0, 1.4), s);
  CHECK(-std::log(p14) == doctest::Approx(17.83).epsilon(1e-3));
  double prev = 1.0;
  for (double K = 1.01; K < std::sqrt(2.0); K += 0.02) {
    const double t = tail_probability(MomentumWindow::from_ratio(10.0, K), s);
    CHECK(t < prev);
    prev = t;
  }
  CHECK_THROWS_AS(tail_probability(MomentumWindow(12.0, 14.0), s), InputError);
  CHECK_THROWS_AS(MomentumWindow::from_ratio(10.0, 0.9), InputError);
}

TEST_CASE("window coverage inequality at L = 3") {
  const PacketSpec s(-10.0, 5.0, 3.0);
  const auto w = MomentumWindow::from_ratio(5.0, 1.3);
  const double eps = epsilon_norm(3.0).eps;
  const double pr = tail_probability(w, s);
  auto ft = [&](double p) {
    return quad::integrate(Complex([&](double x) { return packet_value(x, s) * std::exp(cplx(0.0, -p * x)); }),
                           -13.0, -7.0)
               .value /
           std::sqrt(2.0 * std::numbers::pi);
  };
  const double inside =
      quad::integrate(Real([&](double p) { return std::norm(ft(p)); }), w.p_min(), w.p_max(), {1e-9, 1e-18, 12}).value;
  CHECK(1.0 - pr - eps * eps - 2.0 * std::sqrt(1.0 + eps * eps) * eps <= inside);
}

TEST_CASE("window factor") {
  CHECK(window_factor(1.4, 0.5) == doctest::Approx(7.0710678118654755).epsilon(1e-12));
  CHECK_THROWS_AS(window_factor(1.5, 0.5), InputError);
}

TEST_CASE("consistency condition") {
  const auto w = MomentumWindow::from_ratio(10.0, 1.4);
  const auto c0 = consistency_condition(1.0, 0, 10.0, 0.5, w, 20.0);
  CHECK(c0.lhs == doctest::Approx(10.0));
  CHECK(c0.rhs > 17.0);
  CHECK(c0.rhs < 19.0);
  CHECK(c0.satisfied);
  const auto edge = consistency_condition(1.8, 0, 10.0, 0.5, w, 20.0);
  CHECK(edge.lhs == doctest::Approx(18.0));
  CHECK(edge.satisfied);
  double prev = -1.0;
  for (int l = 0; l < 6; ++l) {
    const auto c = consistency_condition(0.7, l, 10.0, 0.5, w, 20.0);
    CHECK(c.lhs > prev);
    prev = c.lhs;
  }
  CHECK_THROWS_AS(consistency_condition(1.0, 0, 10.0, 0.6, w, 20.0), InputError);
}

TEST_CASE("reference shift") {
  const auto r = reference_shift_bound(PacketSpec(-20.0, 10.0, 20.0));
  CHECK(r.log_abs < std::log(1e-170));
  CHECK(r.negligible_vs(0.2));
  const auto r3 = reference_shift_bound(PacketSpec(-4.0, 10.0, 3.0));
  CHECK(std::abs(r3.delta_x_ref) <= r3.bound);
}

TEST_CASE("plain Gaussian closed forms") {
  const GaussianPacket g{-5.0, 3.0, 0.8};
  const double n = quad::integrate(Real([&](double x) { return std::norm(g.evolved(x, 1.7)); }), -40.0, 40.0).value;
  CHECK(n == doctest::Approx(1.0).epsilon(1e-12));
  // momentum amplitude is the Fourier transform of the t = 0 wavefunction
  for (double p : {1.0, 3.0, 4.5}) {
    const cplx ft = quad::integrate(Complex([&](double x) { return g.value(x) * std::exp(cplx(0.0, -p * x)); }),
                                    -25.0, 15.0)
                        .value /
                    std::sqrt(2.0 * std::numbers::pi);
    CHECK(std::abs(ft - g.momentum(p)) < 1e-12);
  }
}

TEST_CASE("closed free evolution of the reference packet") {
  const PacketSpec s(-4.0, 10.0, 4.0);
  for (double x : {-5.0, -4.0, -1.3, 0.7})
    CHECK(std::abs(reference_free_evolution(x, 0.0, s) - packet_reference_value(x, s)) < 1e-13);
  // against the momentum-space integral
  const MomentumDomain dom = momentum_domain(s, 14.0);
  auto f = momentum_function(s);
  for (double t : {0.3, 1.0, 2.5})
    for (double x : {-1.0, 3.0, 6.0}) {
      const cplx q =
          quad::integrate(std::function<cplx(double)>([&](double p) {
                            return f(p) * std::exp(cplx(0.0, p * x - 0.5 * p * p * t));
                          }),
                          dom.lo, dom.hi)
              .value /
          std::sqrt(2.0 * std::numbers::pi);
      CHECK(std::abs(reference_free_evolution(x, t, s) - q) < 1e-11);
    }
  CHECK_THROWS_AS(reference_free_evolution(0.0, -1.0, s), InputError);
}
