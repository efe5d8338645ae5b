#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "occutime/chain.hpp"

namespace occutime {

// Discrete spectral measure of a finite reversible chain seen from state 0.
struct SpectralData {
  std::vector<double> support;  // eigenvalues x_i <= 0
  std::vector<double> weights;  // w_i, summing to 1
  std::vector<double> moments;  // m_j = sum_i w_i (-x_i)^j, j = 0..J
  double support_bound = 0.0;   // K = max |x_i|
};

// P_0..P_k with (Q - sI) P[s] = 0 read row by row.
class PolynomialRecurrence {
 public:
  explicit PolynomialRecurrence(BirthDeathSpec spec) : spec_(std::move(spec)) {}

  std::vector<double> evaluate(double s, std::size_t kmax) const;

  const BirthDeathSpec& spec() const noexcept { return spec_; }

 private:
  BirthDeathSpec spec_;
};

// Coefficients phi_j of phi(w) in 1/h(z) = z + m_1 - (m_2 - m_1^2)/z
// + phi(1/z)/z^2, through order `order`.
struct SeriesCoefficients {
  std::vector<double> phi;
  std::size_t order = 0;
};

// log pi_k = sum_{i<k} log lambda_i - sum_{i=1..k} log mu_i, k = 0..kmax.
std::vector<double> log_pi_weights(const BirthDeathSpec& spec, std::size_t kmax);
// Throws Error(Overflow) when some pi_k leaves the double range.
std::vector<double> pi_weights(const BirthDeathSpec& spec, std::size_t kmax);

std::vector<double> eval_polynomials(const PolynomialRecurrence& rec, double s,
                                     std::size_t kmax);

// Eigendecomposition of the sqrt(pi)-symmetrized N-level truncation.
// Moments are filled through `moment_order`. Throws Error(EigFailure).
SpectralData discrete_spectral_measure(const BirthDeathSpec& spec,
                                       std::size_t n,
                                       std::size_t moment_order = 12);

// sum_i w_i / (x_i - s); h(s) is its negative. Throws Error(PoleAtS).
Complex cauchy_transform(const SpectralData& measure, Complex s);

// m_j = e_0^T (-Q)^j e_0, j = 0..jmax.
std::vector<double> moments(const GeneratorMatrix& q, std::size_t jmax);

// Needs moments m_0..m_{order+3}; throws Error(InsufficientMoments).
SeriesCoefficients phi_coefficients(std::span<const double> moments,
                                    std::size_t order);

// v_2(x)..v_order(x), where exp(-x phi(w) w^2) = 1 + sum_{k>=2} v_k w^k.
// Element i of the result is v_{i+2}.
std::vector<double> v_coefficients(const SeriesCoefficients& phi, double x,
                                   std::size_t order);

inline constexpr std::size_t kDefaultSeriesOrder = 40;

// F_0(t, x) = P(occupation >= x) from the moment Bessel series.
// Throws Error(DegenerateMeasure) when m_2 - m_1^2 <= 1e-14 and
// Error(NonConverged) when the last term exceeds 1e-10 of the sum.
double bessel_series_F0(std::span<const double> moments,
                        const SeriesCoefficients& phi, double t, double x,
                        std::size_t order);

// -dF_0/dx by central difference with step 1e-5 t; x must lie in
// (1e-4 t, t - 1e-4 t).
double f0_from_series(std::span<const double> moments,
                      const SeriesCoefficients& phi, double t, double x,
                      std::size_t order);

// Moments and phi coefficients of one chain, bundled for repeated use.
class BesselSeries {
 public:
  BesselSeries(const GeneratorMatrix& q, std::size_t order = kDefaultSeriesOrder);

  double survival(double t, double x) const;
  double density(double t, double x) const;

  std::span<const double> moments() const noexcept { return moments_; }
  const SeriesCoefficients& phi() const noexcept { return phi_; }
  std::size_t order() const noexcept { return order_; }

 private:
  std::vector<double> moments_;
  SeriesCoefficients phi_;
  std::size_t order_;
};

}  // namespace occutime
