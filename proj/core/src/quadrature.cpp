#include "ltunnel/quadrature.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <sstream>

namespace ltunnel::quad {

namespace {

template <class T, class F>
Result<T> raw(const F& f, double a, double b, const Tolerance& tol) {
  if (std::isnan(a) || std::isnan(b)) throw InputError("quadrature: NaN bound");
  double err = 0.0;
  double l1 = 0.0;
  const T v = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, a, b, tol.max_depth,
                                                                            tol.rel, &err, &l1);
  return {v, err, l1};
}

template <class T>
void check(const Result<T>& r, double a, double b, const Tolerance& tol) {
  const double target = std::max({tol.abs, tol.rel * r.l1, tol.rel * std::abs(r.value)});
  if (!(r.error <= target) || !std::isfinite(std::abs(r.value))) {
    std::ostringstream msg;
    msg << "quadrature did not converge on [" << a << ", " << b << "]: error estimate " << r.error
        << " > target " << target << " (L1 " << r.l1 << ")";
    throw NumericError(msg.str());
  }
}

template <class T, class F>
Result<T> run(const F& f, double a, double b, const Tolerance& tol) {
  const auto r = raw<T>(f, a, b, tol);
  check(r, a, b, tol);
  return r;
}

}  // namespace

Result<double> integrate(const std::function<double(double)>& f, double a, double b, Tolerance tol) {
  return run<double>(f, a, b, tol);
}

Result<cplx> integrate(const std::function<cplx(double)>& f, double a, double b, Tolerance tol) {
  return run<cplx>(f, a, b, tol);
}

Result<cplx> integrate_panels(const std::function<cplx(double)>& f, double a, double b, int panels,
                              Tolerance tol) {
  if (panels < 1) throw InputError("quadrature: panels must be >= 1");
  Result<cplx> total{cplx{}, 0.0, 0.0};
  const double h = (b - a) / panels;
  for (int i = 0; i < panels; ++i) {
    const double lo = a + i * h;
    const double hi = (i + 1 == panels) ? b : a + (i + 1) * h;
    const auto r = raw<cplx>(f, lo, hi, tol);
    total.value += r.value;
    total.error += r.error;
    total.l1 += r.l1;
  }
  // judged on the whole interval: a tiny panel next to a branch point may miss its own target
  check(total, a, b, tol);
  return total;
}

}  // namespace ltunnel::quad
