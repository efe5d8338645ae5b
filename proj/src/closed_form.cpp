#include "occutime/closed_form.hpp"

#include <cmath>
#include <string>

#include "occutime/bessel.hpp"
#include "occutime/error.hpp"

namespace occutime {
namespace {

void require_positive(double v, const char* name) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw Error(ErrorCode::InvalidArgument,
                std::string(name) + " must be positive and finite");
  }
}

// e^{-z} I_1(z) / z, equal to 1/2 at z = 0.
double scaled_i1_over_z(double z) {
  if (z == 0.0) return 0.5;
  return bessel_i_scaled(1, z) / z;
}

OccupationDensity sampled(double t, double atom, std::size_t grid_points,
                          std::function<double(double)> evaluator) {
  OccupationDensity density;
  density.t = t;
  density.atom_at_t = atom;
  density.grid = cosine_grid(t, grid_points);
  density.values.reserve(grid_points);
  for (double x : density.grid) density.values.push_back(evaluator(x));
  density.evaluator = std::move(evaluator);
  return density;
}

}  // namespace

double two_state_density_at(double lambda, double mu, double t, double x) {
  if (x < 0.0 || x > t) return 0.0;
  const double z = 2.0 * std::sqrt(lambda * mu * x * (t - x));
  // sqrt(lambda mu x/(t-x)) I_1(z) = 2 lambda mu x I_1(z)/z.
  const double bracket = lambda * bessel_i_scaled(0, z) +
                         2.0 * lambda * mu * x * scaled_i1_over_z(z);
  return std::exp(-lambda * x - mu * (t - x) + z) * bracket;
}

OccupationDensity two_state_density(double lambda, double mu, double t,
                                    std::size_t grid_points) {
  require_positive(lambda, "lambda");
  require_positive(mu, "mu");
  require_positive(t, "t");
  return sampled(t, std::exp(-lambda * t), grid_points,
                 [lambda, mu, t](double x) {
                   return two_state_density_at(lambda, mu, t, x);
                 });
}

Complex two_state_transform(double lambda, double mu, Complex s1, double x) {
  const Complex p = s1 + mu;
  if (std::abs(p) <= 1e-14 * std::max(1.0, mu)) {
    throw Error(ErrorCode::PoleAtS, "s1 coincides with -mu");
  }
  return std::exp(-x * (s1 + lambda) + lambda * mu * x / p) *
         (1.0 + lambda / p);
}

double equal_rate_bd_density_at(double r, double t, double x) {
  if (x < 0.0 || x > t) return 0.0;
  const double u = (t - x) * (t + (r - 1.0) * x);
  const double root = std::sqrt(std::max(u, 0.0));
  const double z = 2.0 * root;
  // (r t / sqrt(u)) I_1(2 sqrt(u)) = 2 r t I_1(z)/z.
  const double bracket =
      r * bessel_i_scaled(0, z) + 2.0 * r * t * scaled_i1_over_z(z);
  return std::exp((2.0 - r) * x - 2.0 * t + z) * bracket;
}

OccupationDensity equal_rate_bd_density(double r, double t,
                                        std::size_t grid_points) {
  require_positive(r, "r");
  require_positive(t, "t");
  return sampled(t, std::exp(-r * t), grid_points, [r, t](double x) {
    return equal_rate_bd_density_at(r, t, x);
  });
}

Complex equal_rate_bd_transform(double r, Complex s1, double x) {
  const Complex d = (2.0 - r) * s1 + r * std::sqrt(s1) * std::sqrt(s1 + 4.0);
  return d / (2.0 * s1) * std::exp(-0.5 * x * d);
}

}  // namespace occutime
