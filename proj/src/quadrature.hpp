#pragma once

#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace occutime::detail {

// Adaptive 15-point Gauss-Kronrod. The default tolerance sits above the
// ~1e-11 noise floor of inverted densities so refinement terminates.
template <class F>
double integrate(F&& f, double a, double b, double rel_tol = 1e-10,
                 unsigned max_depth = 12) {
  if (!(b > a)) return 0.0;
  return boost::math::quadrature::gauss_kronrod<double, 15>::integrate(
      f, a, b, max_depth, rel_tol);
}

}  // namespace occutime::detail
