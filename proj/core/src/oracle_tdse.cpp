#include "ltunnel/oracle_tdse.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#if defined(__SSE2__)
#include <xmmintrin.h>
#endif

namespace ltunnel {

namespace {

constexpr cplx I{0.0, 1.0};

// Far tails of psi decay through the subnormal range, where arithmetic is two orders of magnitude
// slower. Flushing them to zero changes nothing above 1e-308.
class FlushSubnormals {
 public:
#if defined(__SSE2__)
  FlushSubnormals() : saved_(_mm_getcsr()) { _mm_setcsr(saved_ | 0x8040); }
  ~FlushSubnormals() { _mm_setcsr(saved_); }

 private:
  unsigned saved_;
#endif
};

bool on_grid(double x, const OracleConfig& c) {
  const double s = (x - c.x_min) / c.dx();
  return std::abs(s - std::round(s)) < 1e-6;
}

// Constant tridiagonal (1 + i dt H/2) with precomputed Thomas sweep factors.
class CrankNicolson {
 public:
  CrankNicolson(const std::vector<double>& potential, double dx, double dt)
      : pot_(potential), n_(potential.size()) {
    const double r = 1.0 / (dx * dx);
    off_ = -I * dt * 0.25 * r;  // both A and B share |off|; B has the opposite sign
    diag_a_.resize(n_);
    diag_b_.resize(n_);
    for (std::size_t i = 0; i < n_; ++i) {
      const cplx h = I * (0.5 * dt) * (r + pot_[i]);
      diag_a_[i] = 1.0 + h;
      diag_b_[i] = 1.0 - h;
    }
    // Interior unknowns 1..n-2, walls fixed at zero.
    cprime_.assign(n_, cplx{});
    inv_denom_.assign(n_, cplx{});
    for (std::size_t i = 1; i + 1 < n_; ++i) {
      inv_denom_[i] = 1.0 / (diag_a_[i] - (i > 1 ? off_ * cprime_[i - 1] : cplx{}));
      cprime_[i] = off_ * inv_denom_[i];
    }
    rhs_.resize(n_);
  }

  void step(std::vector<cplx>& psi) {
    for (std::size_t i = 1; i + 1 < n_; ++i)
      rhs_[i] = diag_b_[i] * psi[i] - off_ * (psi[i - 1] + psi[i + 1]);
    // forward sweep, stored in psi
    for (std::size_t i = 1; i + 1 < n_; ++i)
      psi[i] = (rhs_[i] - (i > 1 ? off_ * psi[i - 1] : cplx{})) * inv_denom_[i];
    for (std::size_t i = n_ - 2; i >= 2; --i) psi[i - 1] -= cprime_[i - 1] * psi[i];
    psi[0] = 0.0;
    psi[n_ - 1] = 0.0;
  }

 private:
  std::vector<double> pot_;
  std::size_t n_;
  cplx off_;
  std::vector<cplx> diag_a_, diag_b_, cprime_, inv_denom_, rhs_;
};

}  // namespace

void validate(const OracleConfig& c) {
  if (c.n_points < 3) throw InputError("oracle: need at least 3 grid points");
  if (!(c.x_max > c.x_min)) throw InputError("oracle: x_max must exceed x_min");
  if (!(c.dt > 0.0)) throw InputError("oracle: dt must be positive");
  if (!c.initial) throw InputError("oracle: no initial state");
  if (c.frame_times.empty()) throw InputError("oracle: no frame times");
  double prev = 0.0;
  for (double t : c.frame_times) {
    if (!(t >= prev)) throw InputError("oracle: frame times must be ascending and >= 0");
    prev = t;
  }
  if (!(c.p_max_effective > 0.0)) throw InputError("oracle: p_max_effective must be positive");
  const double limit = 2.0 * std::numbers::pi / (12.0 * c.p_max_effective);
  if (c.dx() > limit)
    throw InputError("oracle: dx = " + std::to_string(c.dx()) + " does not resolve p_max (need dx <= " +
                     std::to_string(limit) + ")");
  if (c.barrier) {
    const double d = c.barrier->width();
    if (!(c.x_min < 0.0 && d < c.x_max)) throw InputError("oracle: barrier must lie inside the domain");
    if (!on_grid(0.0, c) || !on_grid(d, c)) throw InputError("oracle: barrier edges 0 and d must be grid points");
  }
}

OracleConfig oracle_config_for(const PacketSpec& packet, std::optional<Barrier> barrier, double dx, double dt,
                               std::vector<double> frame_times, double x_min, double x_max) {
  OracleConfig c;
  c.x_min = x_min;
  c.x_max = x_max;
  c.n_points = static_cast<int>(std::llround((x_max - x_min) / dx)) + 1;
  c.dt = dt;
  c.frame_times = std::move(frame_times);
  c.barrier = barrier;
  c.initial = [packet](double x) { return packet_value(x, packet); };
  c.p_max_effective = momentum_domain(packet, 8.0).hi;
  return c;
}

std::vector<ComplexField> evolve(const OracleConfig& cfg) {
  validate(cfg);
  const FlushSubnormals ftz;
  const std::size_t n = static_cast<std::size_t>(cfg.n_points);
  const double dx = cfg.dx();
  const double d = cfg.barrier ? cfg.barrier->width() : 0.0;
  std::vector<double> grid(n), pot(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) grid[i] = cfg.x_min + static_cast<double>(i) * dx;
  if (cfg.barrier) {
    const double V = cfg.barrier->height();
    const double tol = 1e-6 * dx;
    for (std::size_t i = 0; i < n; ++i) {
      const double x = grid[i];
      if (std::abs(x) < tol || std::abs(x - d) < tol) {
        pot[i] = 0.5 * V;  // edge points carry half the step
      } else if (x > 0.0 && x < d) {
        pot[i] = V;
      }
    }
  }
  std::vector<cplx> psi(n);
  for (std::size_t i = 0; i < n; ++i) psi[i] = cfg.initial(grid[i]);
  psi.front() = psi.back() = 0.0;

  std::vector<ComplexField> frames;
  frames.reserve(cfg.frame_times.size());
  double t = 0.0;
  std::optional<CrankNicolson> cn;
  double cn_dt = -1.0;
  for (double tf : cfg.frame_times) {
    const double span = tf - t;
    if (span > 0.0) {
      const long steps = std::max(1L, static_cast<long>(std::ceil(span / cfg.dt - 1e-9)));
      const double h = span / static_cast<double>(steps);
      if (!cn || std::abs(h - cn_dt) > 1e-15 * h) {
        cn.emplace(pot, dx, h);
        cn_dt = h;
      }
      for (long s = 0; s < steps; ++s) cn->step(psi);
    }
    t = tf;
    frames.emplace_back(grid, psi, tf, d);
  }
  return frames;
}

ObservableSet observables(const ComplexField& f) {
  const auto& x = f.grid();
  const auto& v = f.values();
  const auto& reg = f.regions();
  const std::size_t n = f.size();
  ObservableSet o{};
  double xsum = 0.0, xright = 0.0, pright = 0.0, peak = -1.0;
  for (std::size_t i = 0; i < n; ++i) {
    double w = 0.0;
    if (i > 0) w += 0.5 * (x[i] - x[i - 1]);
    if (i + 1 < n) w += 0.5 * (x[i + 1] - x[i]);
    const double rho = std::norm(v[i]) * w;
    o.norm += rho;
    xsum += x[i] * rho;
    switch (reg[i]) {
      case Region::left: o.P_left += rho; break;
      case Region::barrier: o.P_barrier += rho; break;
      case Region::right:
        o.P_right += rho;
        xright += x[i] * rho;
        if (i > 0 && i + 1 < n) {
          const cplx dpsi = (v[i + 1] - v[i - 1]) / (x[i + 1] - x[i - 1]);
          pright += (std::conj(v[i]) * dpsi).imag() * w;
        }
        break;
    }
    if (std::norm(v[i]) > peak) {
      peak = std::norm(v[i]);
      o.peak_position = x[i];
    }
  }
  o.centroid = xsum / o.norm;
  o.right_centroid = o.P_right > 0.0 ? xright / o.P_right : 0.0;
  o.right_momentum = o.P_right > 0.0 ? pright / o.P_right : 0.0;
  return o;
}

ArrivalAnalysis arrival_analysis(const std::vector<ComplexField>& frames, double x0, double p0) {
  if (frames.empty()) throw InputError("arrival_analysis: no frames");
  if (!(p0 > 0.0)) throw InputError("arrival_analysis: p0 must be positive");
  const double d = frames.front().barrier_width();
  std::vector<double> ts, cs;
  ArrivalAnalysis out{};
  double v1 = 0.0;
  for (const auto& f : frames) {
    const auto o = observables(f);
    if (!(o.P_right > 1e-8))
      throw NumericError("arrival_analysis: transmitted probability " + std::to_string(o.P_right) +
                         " too small at t = " + std::to_string(f.time()));
    ts.push_back(f.time());
    cs.push_back(o.right_centroid);
    out.P_right = o.P_right;
    v1 = o.right_momentum;
  }
  double intercept;
  if (ts.size() >= 2) {
    const double n = static_cast<double>(ts.size());
    double st = 0, sc = 0, stt = 0, stc = 0;
    for (std::size_t i = 0; i < ts.size(); ++i) {
      st += ts[i];
      sc += cs[i];
      stt += ts[i] * ts[i];
      stc += ts[i] * cs[i];
    }
    out.velocity = (n * stc - st * sc) / (n * stt - st * st);
    intercept = (sc - out.velocity * st) / n;
  } else {
    out.velocity = v1;
    intercept = cs[0] - v1 * ts[0];
  }
  out.centroid_lag = x0 + d - intercept;
  out.inferred_delay = out.centroid_lag / p0;
  return out;
}

}  // namespace ltunnel
