#include "occutime/transforms.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "occutime/error.hpp"
#include "quadrature.hpp"

namespace occutime {
namespace {

constexpr Complex kI(0.0, 1.0);

// Cotangent contour z(theta) = (N/t)(sigma + mu theta cot(alpha theta)
// + i nu theta).
constexpr double kSigma = -0.6122;
constexpr double kMu = 0.5017;
constexpr double kAlpha = 0.6407;
constexpr double kNu = 0.2645;

Complex checked_h(const HEvaluator& h, Complex s1) {
  const Complex value = h(s1);
  if (std::abs(value) < 1e-300) {
    throw Error(ErrorCode::ZeroH, "h(s1) vanishes");
  }
  return value;
}

}  // namespace

double OccupationDensity::continuous_at(double x) const {
  if (evaluator) return evaluator(x);
  if (grid.empty()) return 0.0;
  if (x <= grid.front()) return values.front();
  if (x >= grid.back()) return values.back();
  const auto it = std::upper_bound(grid.begin(), grid.end(), x);
  const auto i = static_cast<std::size_t>(it - grid.begin());
  const double w = (x - grid[i - 1]) / (grid[i] - grid[i - 1]);
  return (1.0 - w) * values[i - 1] + w * values[i];
}

double OccupationDensity::continuous_integral(double a, double b) const {
  a = std::max(a, 0.0);
  b = std::min(b, t);
  if (!(b > a)) return 0.0;
  if (evaluator) return detail::integrate(evaluator, a, b);
  // Exact integral of the piecewise-linear interpolant.
  std::vector<double> knots{a};
  for (double g : grid) {
    if (g > a && g < b) knots.push_back(g);
  }
  knots.push_back(b);
  double sum = 0.0;
  for (std::size_t i = 1; i < knots.size(); ++i) {
    sum += 0.5 * (knots[i] - knots[i - 1]) *
           (continuous_at(knots[i]) + continuous_at(knots[i - 1]));
  }
  return sum;
}

double OccupationDensity::mass() const {
  return atom_at_t + continuous_integral(0.0, t);
}

double OccupationDensity::mean() const {
  double continuous = 0.0;
  if (evaluator) {
    continuous = detail::integrate(
        [this](double x) { return x * evaluator(x); }, 0.0, t);
  } else {
    std::vector<double> xf(values.size());
    for (std::size_t i = 0; i < grid.size(); ++i) xf[i] = grid[i] * values[i];
    OccupationDensity weighted{t, 0.0, grid, std::move(xf), {}};
    continuous = weighted.continuous_integral(0.0, t);
  }
  return atom_at_t * t + continuous;
}

double OccupationDensity::cdf(double x) const {
  if (x < 0.0) return 0.0;
  if (x >= t) return 1.0;
  return continuous_integral(0.0, x);
}

double OccupationDensity::trapezoid_mass() const {
  return occutime::trapezoid_mass(t, atom_at_t, grid, values);
}

double trapezoid_mass(double t, double atom_at_t, std::span<const double> grid,
                      std::span<const double> values) {
  if (grid.size() != values.size()) {
    throw Error(ErrorCode::InvalidArgument, "grid/value length mismatch");
  }
  if (grid.empty()) return atom_at_t;
  double sum = grid.front() * values.front() +
               (t - grid.back()) * values.back();
  for (std::size_t i = 1; i < grid.size(); ++i) {
    sum += 0.5 * (grid[i] - grid[i - 1]) * (values[i] + values[i - 1]);
  }
  return atom_at_t + sum;
}

std::vector<double> cosine_grid(double a, double b, std::size_t n) {
  if (!(b > a) || n == 0) {
    throw Error(ErrorCode::InvalidArgument,
                "cosine grid needs a < b and at least one point");
  }
  std::vector<double> grid(n);
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  for (std::size_t i = 0; i < n; ++i) {
    const double theta =
        std::numbers::pi * static_cast<double>(i + 1) / static_cast<double>(n + 1);
    grid[i] = mid - half * std::cos(theta);
  }
  return grid;
}

Complex laplace_f0(const HEvaluator& h, Complex s1, double x) {
  const Complex hv = checked_h(h, s1);
  return std::exp(-x / hv) / (s1 * hv);
}

Complex fourier_laplace_f0(const HEvaluator& h, Complex s1, double s2) {
  return (1.0 / s1) / (1.0 - kI * s2 * h(s1));
}

Complex survival_transform(const HEvaluator& h, Complex s1, double x) {
  const Complex hv = checked_h(h, s1);
  return std::exp(-x / hv) / s1;
}

Eigen::VectorXcd fourier_laplace_vector(const GeneratorMatrix& q, Complex s1,
                                        double s2) {
  const Eigen::Index n = q.rates().rows();
  Eigen::MatrixXcd system = q.rates().cast<Complex>();
  system.diagonal().array() -= s1;
  system(0, 0) += kI * s2;
  Eigen::PartialPivLU<Eigen::MatrixXcd> lu(system);
  if (!(lu.matrixLU().diagonal().cwiseAbs().minCoeff() >= 1e-300)) {
    throw Error(ErrorCode::SingularSystem, "Laplace-Fourier system is singular");
  }
  return lu.solve(Eigen::VectorXcd::Constant(n, Complex(-1.0)));
}

double invert_laplace(const LaplaceFunction& transform, double t, int nodes) {
  if (!(t > 0.0) || !std::isfinite(t)) {
    throw Error(ErrorCode::InvalidArgument, "inversion time must be positive");
  }
  if (nodes < 2 || nodes % 2 != 0) {
    throw Error(ErrorCode::InvalidArgument,
                "Talbot node count must be even and >= 2");
  }
  const double scale = nodes / t;
  const double step = 2.0 * std::numbers::pi / nodes;
  double sum = 0.0;
  for (int k = nodes / 2; k < nodes; ++k) {
    const double theta = -std::numbers::pi + (k + 0.5) * step;
    const double at = kAlpha * theta;
    const double cot = std::cos(at) / std::sin(at);
    const Complex z = scale * Complex(kSigma + kMu * theta * cot, kNu * theta);
    const Complex dz =
        scale * Complex(kMu * (cot - at / (std::sin(at) * std::sin(at))), kNu);
    sum += (std::exp(z * t) * transform(z) * dz).imag();
  }
  const double result = 2.0 * sum / nodes;
  if (!std::isfinite(result)) {
    throw Error(ErrorCode::NonFiniteResult,
                "Laplace inversion produced a non-finite value at t = " +
                    std::to_string(t));
  }
  return result;
}

namespace {

// e^w - 1 without cancellation at small |w|.
Complex expm1(Complex w) { return 2.0 * std::exp(0.5 * w) * std::sinh(0.5 * w); }

void check_grid_point(double t, double x) {
  if (!(x > 0.0 && x < t)) {
    throw Error(ErrorCode::InvalidArgument,
                "inversion grid point " + std::to_string(x) +
                    " outside (0, t)");
  }
}

HEvaluator excursion_from_h(const HEvaluator& h, double exit_rate0) {
  return [h, exit_rate0](Complex s) {
    return s + exit_rate0 - 1.0 / checked_h(h, s);
  };
}

}  // namespace

double excursion_density_at(const HEvaluator& excursion, double exit_rate0,
                            double t, double x, int nodes) {
  if (!(t > 0.0) || !std::isfinite(t)) {
    throw Error(ErrorCode::InvalidArgument, "horizon must be positive");
  }
  check_grid_point(t, x);
  // e^{s x} (L_f0(s, x) - e^{-(s + q0) x}) is the transform of the continuous
  // part in the remaining time t - x; with 1/h = s + q0 - d it reads
  // e^{-q0 x} (expm1(x d) + e^{x d} (q0 - d) / s).
  auto shifted = [&](Complex s) {
    const Complex d = excursion(s);
    return expm1(x * d) + std::exp(x * d) * (exit_rate0 - d) / s;
  };
  return std::exp(-exit_rate0 * x) * invert_laplace(shifted, t - x, nodes);
}

double inversion_density_at(const HEvaluator& h, double exit_rate0, double t,
                            double x, int nodes) {
  return excursion_density_at(excursion_from_h(h, exit_rate0), exit_rate0, t,
                              x, nodes);
}

OccupationDensity density_via_excursion(const HEvaluator& excursion,
                                        double exit_rate0, double t,
                                        std::span<const double> grid,
                                        int nodes) {
  if (!(t > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "horizon must be positive");
  }
  OccupationDensity density;
  density.t = t;
  density.atom_at_t = std::exp(-exit_rate0 * t);
  density.grid.assign(grid.begin(), grid.end());
  density.values.reserve(grid.size());
  for (double x : grid) {
    density.values.push_back(
        excursion_density_at(excursion, exit_rate0, t, x, nodes));
  }
  density.evaluator = [excursion, exit_rate0, t, nodes](double x) {
    return excursion_density_at(excursion, exit_rate0, t, x, nodes);
  };
  return density;
}

OccupationDensity density_via_inversion(const HEvaluator& h, double exit_rate0,
                                        double t, std::span<const double> grid,
                                        int nodes) {
  return density_via_excursion(excursion_from_h(h, exit_rate0), exit_rate0, t,
                               grid, nodes);
}

OccupationDensity density_via_inversion(const GeneratorMatrix& q, double t,
                                        std::span<const double> grid,
                                        int nodes) {
  return density_via_excursion(make_excursion_evaluator(q), q.exit_rate(0), t,
                               grid, nodes);
}

}  // namespace occutime
