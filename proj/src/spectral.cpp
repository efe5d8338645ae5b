#include "occutime/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <Eigen/Eigenvalues>

#include "occutime/bessel.hpp"
#include "occutime/error.hpp"

namespace occutime {

std::vector<double> log_pi_weights(const BirthDeathSpec& spec,
                                   std::size_t kmax) {
  std::vector<double> logs(kmax + 1);
  logs[0] = 0.0;
  for (std::size_t k = 1; k <= kmax; ++k) {
    logs[k] = logs[k - 1] + std::log(spec.birth(k - 1)) - std::log(spec.death(k));
  }
  return logs;
}

std::vector<double> pi_weights(const BirthDeathSpec& spec, std::size_t kmax) {
  const auto logs = log_pi_weights(spec, kmax);
  const double limit = std::log(std::numeric_limits<double>::max());
  std::vector<double> weights(logs.size());
  for (std::size_t k = 0; k < logs.size(); ++k) {
    if (std::abs(logs[k]) >= limit) {
      throw Error(ErrorCode::Overflow,
                  "pi_" + std::to_string(k) + " is outside the double range");
    }
    weights[k] = std::exp(logs[k]);
  }
  return weights;
}

std::vector<double> PolynomialRecurrence::evaluate(double s,
                                                   std::size_t kmax) const {
  std::vector<double> p(kmax + 1);
  p[0] = 1.0;
  if (kmax == 0) return p;
  const double lambda0 = spec_.birth(0);
  p[1] = (lambda0 + s) / lambda0;
  for (std::size_t j = 1; j < kmax; ++j) {
    const double lambda = spec_.birth(j);
    const double mu = spec_.death(j);
    p[j + 1] = ((lambda + mu + s) * p[j] - mu * p[j - 1]) / lambda;
  }
  return p;
}

std::vector<double> eval_polynomials(const PolynomialRecurrence& rec, double s,
                                     std::size_t kmax) {
  return rec.evaluate(s, kmax);
}

SpectralData discrete_spectral_measure(const BirthDeathSpec& spec,
                                       std::size_t n,
                                       std::size_t moment_order) {
  if (n < 2) {
    throw Error(ErrorCode::InvalidArgument, "truncation level must be >= 2");
  }
  const auto size = static_cast<Eigen::Index>(n);
  Eigen::VectorXd diagonal(size);
  Eigen::VectorXd off(size - 1);
  for (Eigen::Index k = 0; k < size; ++k) {
    const auto j = static_cast<std::size_t>(k);
    const double up = k + 1 < size ? spec.birth(j) : 0.0;
    const double down = k > 0 ? spec.death(j) : 0.0;
    diagonal[k] = -(up + down);
    if (k + 1 < size) off[k] = std::sqrt(spec.birth(j) * spec.death(j + 1));
  }

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
  solver.computeFromTridiagonal(diagonal, off, Eigen::ComputeEigenvectors);
  if (solver.info() != Eigen::Success) {
    throw Error(ErrorCode::EigFailure,
                "tridiagonal eigensolver did not converge");
  }

  SpectralData data;
  data.support.assign(solver.eigenvalues().data(),
                      solver.eigenvalues().data() + size);
  data.weights.resize(n);
  for (Eigen::Index i = 0; i < size; ++i) {
    const double first = solver.eigenvectors()(0, i);
    data.weights[static_cast<std::size_t>(i)] = first * first;
  }
  for (double x : data.support) {
    data.support_bound = std::max(data.support_bound, std::abs(x));
  }
  data.moments.assign(moment_order + 1, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double power = 1.0;
    for (std::size_t j = 0; j <= moment_order; ++j) {
      data.moments[j] += data.weights[i] * power;
      power *= -data.support[i];
    }
  }
  return data;
}

Complex cauchy_transform(const SpectralData& measure, Complex s) {
  Complex sum = 0.0;
  for (std::size_t i = 0; i < measure.support.size(); ++i) {
    const Complex gap = measure.support[i] - s;
    if (std::abs(gap) < 1e-12) {
      throw Error(ErrorCode::PoleAtS, "s lies on the spectral support");
    }
    sum += measure.weights[i] / gap;
  }
  return sum;
}

std::vector<double> moments(const GeneratorMatrix& q, std::size_t jmax) {
  const std::size_t n = q.size();
  std::vector<double> v(n, 0.0), next(n);
  v[0] = 1.0;
  std::vector<double> m(jmax + 1);
  m[0] = 1.0;
  for (std::size_t j = 1; j <= jmax; ++j) {
    for (std::size_t i = 0; i < n; ++i) {
      double acc = q.exit_rate(i) * v[i];
      for (const auto& tr : q.transitions(i)) acc -= tr.rate * v[tr.target];
      next[i] = acc;
    }
    v.swap(next);
    m[j] = v[0];
  }
  return m;
}

SeriesCoefficients phi_coefficients(std::span<const double> moments,
                                    std::size_t order) {
  const std::size_t needed = order + 4;
  if (moments.size() < needed) {
    throw Error(ErrorCode::InsufficientMoments,
                "need moments m_0..m_" + std::to_string(order + 3) + ", got " +
                    std::to_string(moments.size()));
  }
  // z h(z) = sum_j (-1)^j m_j w^j with w = 1/z; its reciprocal g(w) gives
  // 1/h = g_0 z + g_1 + g_2 w + ..., so phi_j = g_{j+3}.
  std::vector<double> alternating(needed);
  for (std::size_t j = 0; j < needed; ++j) {
    alternating[j] = (j % 2 == 0 ? 1.0 : -1.0) * moments[j];
  }
  std::vector<double> g(needed, 0.0);
  g[0] = 1.0 / alternating[0];
  for (std::size_t k = 1; k < needed; ++k) {
    double acc = 0.0;
    for (std::size_t j = 1; j <= k; ++j) acc += alternating[j] * g[k - j];
    g[k] = -acc / alternating[0];
  }
  SeriesCoefficients out;
  out.order = order;
  out.phi.assign(g.begin() + 3, g.end());
  return out;
}

std::vector<double> v_coefficients(const SeriesCoefficients& phi, double x,
                                   std::size_t order) {
  if (order < 2) return {};
  if (phi.phi.size() < order - 1) {
    throw Error(ErrorCode::InsufficientMoments,
                "phi coefficients do not reach order " + std::to_string(order));
  }
  // a_k: coefficients of A(w) = -x phi(w) w^2; b = exp(A) via k b_k =
  // sum_{j=1..k} j a_j b_{k-j}.
  std::vector<double> a(order + 1, 0.0), b(order + 1, 0.0);
  for (std::size_t k = 2; k <= order; ++k) a[k] = -x * phi.phi[k - 2];
  b[0] = 1.0;
  for (std::size_t k = 1; k <= order; ++k) {
    double acc = 0.0;
    for (std::size_t j = 2; j <= k; ++j) {
      acc += static_cast<double>(j) * a[j] * b[k - j];
    }
    b[k] = acc / static_cast<double>(k);
  }
  return {b.begin() + 2, b.end()};
}

double bessel_series_F0(std::span<const double> moments,
                        const SeriesCoefficients& phi, double t, double x,
                        std::size_t order) {
  if (moments.size() < 3) {
    throw Error(ErrorCode::InsufficientMoments, "series needs m_0, m_1, m_2");
  }
  if (!(t > 0.0) || x < 0.0 || x > t) {
    throw Error(ErrorCode::InvalidArgument, "series requires 0 <= x <= t");
  }
  const double m1 = moments[1];
  const double spread = moments[2] - m1 * m1;
  if (spread <= 1e-14) {
    throw Error(ErrorCode::DegenerateMeasure, "m_2 - m_1^2 vanishes");
  }
  if (x == 0.0) return 1.0;
  const double beta = spread * (t - x) * x;
  if (beta == 0.0) return std::exp(-m1 * x);

  const double root = std::sqrt(beta);
  const double z = 2.0 * root;
  const double base = z - m1 * x;
  const double log_ratio = std::log(root / (spread * x));
  const auto v = v_coefficients(phi, x, order);

  double sum = std::exp(base) * bessel_i_scaled(0, z);
  double last = 0.0;
  for (std::size_t k = 2; k <= order; ++k) {
    const double vk = v[k - 2];
    const double bessel = bessel_i_scaled(static_cast<int>(k), z);
    last = 0.0;
    if (vk != 0.0 && bessel > 0.0) {
      last = vk * std::exp(base + static_cast<double>(k) * log_ratio +
                           std::log(bessel));
    }
    sum += last;
  }
  if (std::abs(last) > 1e-10 * std::max(std::abs(sum), 1e-300)) {
    throw Error(ErrorCode::NonConverged,
                "Bessel series tail " + std::to_string(last) +
                    " too large at order " + std::to_string(order));
  }
  return sum;
}

double f0_from_series(std::span<const double> moments,
                      const SeriesCoefficients& phi, double t, double x,
                      std::size_t order) {
  const double margin = 1e-4 * t;
  if (!(x > margin && x < t - margin)) {
    throw Error(ErrorCode::InvalidArgument,
                "series density needs x inside (1e-4 t, t - 1e-4 t)");
  }
  const double step = 1e-5 * t;
  return (bessel_series_F0(moments, phi, t, x - step, order) -
          bessel_series_F0(moments, phi, t, x + step, order)) /
         (2.0 * step);
}

BesselSeries::BesselSeries(const GeneratorMatrix& q, std::size_t order)
    : moments_(occutime::moments(q, order + 3)),
      phi_(phi_coefficients(moments_, order)),
      order_(order) {}

double BesselSeries::survival(double t, double x) const {
  return bessel_series_F0(moments_, phi_, t, x, order_);
}

double BesselSeries::density(double t, double x) const {
  return f0_from_series(moments_, phi_, t, x, order_);
}

}  // namespace occutime
