// Adaptive Gauss-Kronrod (7-15 nested into 15-31) quadrature, real and complex integrands.
// Bounds may be +-infinity. Throws NumericError when the error estimate misses the target.
#pragma once

#include <functional>

#include "ltunnel/core_model.hpp"

namespace ltunnel::quad {

struct Tolerance {
  double rel = 1e-11;
  double abs = 1e-15;
  unsigned max_depth = 18;
};

template <class T>
struct Result {
  T value;
  double error;
  double l1;  // integral of |f|, the scale the error is measured against
};

Result<double> integrate(const std::function<double(double)>& f, double a, double b, Tolerance tol = {});
Result<cplx> integrate(const std::function<cplx(double)>& f, double a, double b, Tolerance tol = {});

// Sum over equal panels (useful for oscillatory integrands); the tolerance applies to the total.
Result<cplx> integrate_panels(const std::function<cplx(double)>& f, double a, double b, int panels,
                              Tolerance tol = {});

}  // namespace ltunnel::quad
