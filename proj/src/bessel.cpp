#include "occutime/bessel.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "occutime/error.hpp"

namespace occutime {
namespace {

constexpr double kSeriesLimit = 30.0;
constexpr int kMaxSeriesTerms = 500;
constexpr double kSeriesRelTol = 1e-18;

void check_argument(double z) {
  if (!(z >= 0.0) || !std::isfinite(z)) {
    throw Error(ErrorCode::InvalidArgument,
                "Bessel argument must be finite and nonnegative, got " +
                    std::to_string(z));
  }
}

// Power series sum_k (z/2)^{2k+n} / (k! (k+n)!).
double power_series(int n, double z) {
  const double half = 0.5 * z;
  double term = 1.0;
  for (int j = 1; j <= n; ++j) term *= half / j;
  if (term == 0.0) return 0.0;
  const double q = half * half;
  double sum = term;
  for (int k = 0; k < kMaxSeriesTerms; ++k) {
    term *= q / ((k + 1.0) * (k + n + 1.0));
    sum += term;
    if (term < kSeriesRelTol * sum) break;
  }
  return sum;
}

// Hankel expansion of e^{-z} I_n(z). Returns NaN when the asymptotic terms
// start growing before reaching double precision.
double hankel_scaled(int n, double z) {
  const double mu = 4.0 * n * n;
  const double eightz = 8.0 * z;
  double term = 1.0;
  double sum = 1.0;
  double prev = std::numeric_limits<double>::infinity();
  for (int k = 1; k < 200; ++k) {
    const double odd = 2.0 * k - 1.0;
    term *= -(mu - odd * odd) / (k * eightz);
    const double mag = std::abs(term);
    if (mag > prev) return std::numeric_limits<double>::quiet_NaN();
    sum += term;
    if (mag < 1e-17 * std::abs(sum)) {
      return sum / std::sqrt(2.0 * std::numbers::pi * z);
    }
    prev = mag;
  }
  return std::numeric_limits<double>::quiet_NaN();
}

// I_{n+1}(z) / I_n(z) from the continued fraction
// 1 / (2(n+1)/z + 1 / (2(n+2)/z + ...)), modified Lentz evaluation.
double ratio_continued_fraction(int n, double z) {
  constexpr double tiny = 1e-300;
  const double inv = 2.0 / z;
  double f = (n + 1) * inv;
  double c = f;
  double d = 0.0;
  for (int j = 2; j < 100000; ++j) {
    const double b = (n + j) * inv;
    d = b + d;
    if (d == 0.0) d = tiny;
    c = b + 1.0 / c;
    if (c == 0.0) c = tiny;
    d = 1.0 / d;
    const double delta = c * d;
    f *= delta;
    if (std::abs(delta - 1.0) < 1e-16) return 1.0 / f;
  }
  throw Error(ErrorCode::NonConverged,
              "Bessel ratio continued fraction did not converge");
}

double large_argument_scaled(int n, double z) {
  const double direct = hankel_scaled(n, z);
  if (!std::isnan(direct)) return direct;

  // Backward recurrence I_{k-1} = (2k/z) I_k + I_{k+1} from order n down to
  // 0, seeded with the exact ratio at the top, normalized against I_0.
  double upper = ratio_continued_fraction(n, z);
  double current = 1.0;
  double top = 1.0;  // running value of I_n in the recurrence's scale
  for (int k = n; k >= 1; --k) {
    const double lower = (2.0 * k / z) * current + upper;
    upper = current;
    current = lower;
    if (current > 1e250) {
      upper /= current;
      top /= current;
      current = 1.0;
    }
  }
  return hankel_scaled(0, z) * (top / current);
}

}  // namespace

BesselOrder::BesselOrder(int n) : n_(n) {
  if (n < 0 || n > kMaxOrder) {
    throw Error(ErrorCode::InvalidArgument,
                "Bessel order out of range [0, 150]: " + std::to_string(n));
  }
}

double bessel_i_scaled(BesselOrder order, double z) {
  check_argument(z);
  const int n = order.value();
  if (z == 0.0) return n == 0 ? 1.0 : 0.0;
  if (z <= kSeriesLimit) return std::exp(-z) * power_series(n, z);
  return large_argument_scaled(n, z);
}

double bessel_i(BesselOrder order, double z) {
  check_argument(z);
  const int n = order.value();
  if (z == 0.0) return n == 0 ? 1.0 : 0.0;
  if (z <= kSeriesLimit) return power_series(n, z);
  const double scaled = large_argument_scaled(n, z);
  if (scaled == 0.0) return 0.0;
  const double log_value = std::log(scaled) + z;
  if (log_value >= std::log(std::numeric_limits<double>::max())) {
    throw Error(ErrorCode::Overflow,
                "I_" + std::to_string(n) + "(" + std::to_string(z) +
                    ") exceeds the double range; use bessel_i_scaled");
  }
  if (z < 700.0) return scaled * std::exp(z);
  return std::exp(log_value);
}

}  // namespace occutime
