#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "occutime/chain.hpp"

namespace occutime {

// Law of the occupation time of state 0 on [0, t]: a point mass at t plus a
// continuous density on (0, t).
struct OccupationDensity {
  double t = 0.0;
  double atom_at_t = 0.0;
  std::vector<double> grid;    // strictly increasing, inside (0, t)
  std::vector<double> values;  // continuous density at grid points
  // Pointwise continuous density on (0, t); empty for grid-only densities.
  std::function<double(double)> evaluator;

  // Evaluator when present, else linear interpolation of the grid.
  double continuous_at(double x) const;
  double continuous_integral(double a, double b) const;
  // atom + integral of the continuous part.
  double mass() const;
  // atom * t + integral of x f(x).
  double mean() const;
  // P(occupation <= x).
  double cdf(double x) const;
  // atom + trapezoid(grid, values), the two end gaps closed by the nearest
  // grid value.
  double trapezoid_mass() const;
};

double trapezoid_mass(double t, double atom_at_t, std::span<const double> grid,
                      std::span<const double> values);

// n points x_i = (a+b)/2 - (b-a)/2 cos(pi i/(n+1)), i = 1..n, clustered
// at both ends of (a, b).
std::vector<double> cosine_grid(double a, double b, std::size_t n);
inline std::vector<double> cosine_grid(double t, std::size_t n) {
  return cosine_grid(0.0, t, n);
}

// (1/(s1 h(s1))) exp(-x / h(s1)). Throws Error(ZeroH).
Complex laplace_f0(const HEvaluator& h, Complex s1, double x);

// (1/s1) / (1 - i s2 h(s1)).
Complex fourier_laplace_f0(const HEvaluator& h, Complex s1, double s2);

// Transform in t of F_0(t, x) = P(occupation >= x): (1/s1) exp(-x/h(s1)).
Complex survival_transform(const HEvaluator& h, Complex s1, double x);

// Vector of Laplace-Fourier transforms for every starting state, solving
// (Q - s1 I + i s2 e_0 e_0^T) v = -1.
Eigen::VectorXcd fourier_laplace_vector(const GeneratorMatrix& q, Complex s1,
                                        double s2);

using LaplaceFunction = std::function<Complex(Complex)>;

inline constexpr int kDefaultTalbotNodes = 64;

// Inverse Laplace transform at t > 0 on a Talbot-type cotangent contour
// (Weideman-Trefethen parameters), midpoint rule with `nodes` points over the
// full contour; conjugate symmetry halves the evaluations. F must satisfy
// F(conj s) = conj F(s). Throws Error(NonFiniteResult).
double invert_laplace(const LaplaceFunction& transform, double t,
                      int nodes = kDefaultTalbotNodes);

// Continuous part of f_0(t, x) for 0 < x < t, from the excursion transform
// d(s) = s + q_0 - 1/h(s): inverts the atom-free transform shifted to t - x,
// so each x gets a contour scaled to its remaining time.
double excursion_density_at(const HEvaluator& excursion, double exit_rate0,
                            double t, double x,
                            int nodes = kDefaultTalbotNodes);

// Same, with d formed as s + q_0 - 1/h(s); loses digits as x -> t where the
// contour reaches large |s|.
double inversion_density_at(const HEvaluator& h, double exit_rate0, double t,
                            double x, int nodes = kDefaultTalbotNodes);

OccupationDensity density_via_excursion(const HEvaluator& excursion,
                                        double exit_rate0, double t,
                                        std::span<const double> grid,
                                        int nodes = kDefaultTalbotNodes);

OccupationDensity density_via_inversion(const HEvaluator& h, double exit_rate0,
                                        double t, std::span<const double> grid,
                                        int nodes = kDefaultTalbotNodes);

// Uses the excursion transform of q.
OccupationDensity density_via_inversion(const GeneratorMatrix& q, double t,
                                        std::span<const double> grid,
                                        int nodes = kDefaultTalbotNodes);

}  // namespace occutime
