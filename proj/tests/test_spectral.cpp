#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <vector>

#include "occutime/chain.hpp"
#include "occutime/closed_form.hpp"
#include "occutime/error.hpp"
#include "occutime/spectral.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

using namespace occutime;
using testutil::code_of;
using testutil::rel_err;

namespace {

std::vector<double> equal_rate_moments(double r, std::size_t jmax) {
  return moments(truncate_birth_death(BirthDeathSpec::equal_rate(r), jmax + 2),
                 jmax);
}

// phi read off the literal expansion z (1 + sum_k u(w)^k), with
// u(w) = m_1 w - m_2 w^2 + m_3 w^3 - ..., by repeated truncated products.
std::vector<double> geometric_phi(const std::vector<double>& m,
                                  std::size_t order) {
  const std::size_t len = order + 4;
  std::vector<double> u(len, 0.0), power(len, 0.0), total(len, 0.0);
  for (std::size_t j = 1; j < len; ++j) u[j] = (j % 2 == 1 ? 1.0 : -1.0) * m[j];
  power[0] = 1.0;
  total[0] = 1.0;
  for (std::size_t k = 1; k < len; ++k) {
    std::vector<double> next(len, 0.0);
    for (std::size_t a = 0; a < len; ++a)
      for (std::size_t b = 1; a + b < len; ++b) next[a + b] += power[a] * u[b];
    power = next;
    for (std::size_t j = 0; j < len; ++j) total[j] += power[j];
  }
  return {total.begin() + 3, total.end()};
}

double poly_eval(const std::vector<double>& c, double w) {
  double sum = 0.0;
  for (std::size_t j = c.size(); j-- > 0;) sum = sum * w + c[j];
  return sum;
}

}  // namespace

TEST_CASE("pi weights") {
  const BirthDeathSpec ones([](std::size_t) { return 1.0; },
                            [](std::size_t) { return 1.0; }, 10);
  for (double p : pi_weights(ones, 20)) CHECK(p == 1.0);
  const auto w = pi_weights(BirthDeathSpec::equal_rate(1.7), 20);
  CHECK(w[0] == 1.0);
  for (std::size_t k = 1; k <= 20; ++k) CHECK(rel_err(w[k], 1.7) < 1e-15);
  const auto spec = BirthDeathSpec::from_lists({0.5, 2.0, 3.0}, {1.5, 0.7}, 10);
  const auto logs = log_pi_weights(spec, 30);
  for (std::size_t k = 0; k < 30; ++k) {
    CHECK(std::abs(logs[k] + std::log(spec.birth(k)) - logs[k + 1] -
                   std::log(spec.death(k + 1))) < 1e-13);
  }
  const auto huge = BirthDeathSpec::from_lists({1e200}, {1e-200}, 10);
  CHECK(code_of([&] { pi_weights(huge, 3); }) == ErrorCode::Overflow);
  CHECK(std::isfinite(log_pi_weights(huge, 3)[3]));
}

TEST_CASE("orthogonal polynomials") {
  const PolynomialRecurrence rec(BirthDeathSpec::equal_rate(2.5));
  for (double s : {-3.0, -0.5, 0.0, 1.7}) {
    const auto p = eval_polynomials(rec, s, 10);
    CHECK(p[0] == 1.0);
    CHECK(rel_err(p[1], (2.5 + s) / 2.5) < 1e-15);
  }
  // Leading coefficient 1/(lambda_0 ... lambda_{k-1}).
  const auto big = eval_polynomials(rec, 1e6, 6);
  for (std::size_t k = 1; k <= 6; ++k) {
    CHECK(rel_err(big[k] / std::pow(1e6, static_cast<double>(k)), 1.0 / 2.5) <
          1e-4);
  }
  // Constant-coefficient solution for lambda_0 = 1: A u^k + B d^k with
  // u, d = (2 + s +- R)/2, R = sqrt(s^2 + 4s), and A, B = 1/2 +- s/(2R)
  // fixed by P_0 = 1, P_1 = 1 + s.
  const PolynomialRecurrence unit(BirthDeathSpec::equal_rate(1.0));
  for (double s : {-3.9, -2.0, -0.3, 0.4, 1.0, 1.9}) {
    const Complex root = std::sqrt(Complex(s * s + 4.0 * s));
    const Complex up = (2.0 + s + root) / 2.0, down = (2.0 + s - root) / 2.0;
    const auto p = eval_polynomials(unit, s, 10);
    for (int k = 0; k <= 10; ++k) {
      const Complex want = (0.5 + 0.5 * s / root) * std::pow(up, k) +
                           (0.5 - 0.5 * s / root) * std::pow(down, k);
      CHECK(std::abs(p[static_cast<std::size_t>(k)] - want.real()) <= 1e-9);
      CHECK(std::abs(want.imag()) <= 1e-9);
    }
  }
}

TEST_CASE("two-state measure") {
  const auto m = discrete_spectral_measure(
      BirthDeathSpec::from_lists({1.0}, {1.0}, 2), 2);
  REQUIRE(m.support.size() == 2);
  std::vector<double> x = m.support;
  std::sort(x.begin(), x.end());
  CHECK(std::abs(x[0] + 2.0) < 1e-14);
  CHECK(std::abs(x[1]) < 1e-14);
  CHECK(std::abs(m.weights[0] - 0.5) < 1e-14);
  CHECK(std::abs(m.weights[1] - 0.5) < 1e-14);
  CHECK(std::abs(cauchy_transform(m, 1.0) + 2.0 / 3.0) < 1e-14);
  CHECK(std::abs(m.support_bound - 2.0) < 1e-14);
}

TEST_CASE("measure invariants") {
  const std::vector<BirthDeathSpec> specs = {
      BirthDeathSpec::equal_rate(1.0), BirthDeathSpec::equal_rate(0.4),
      BirthDeathSpec::from_lists({0.5, 2.0, 3.0}, {1.5, 0.7, 4.0}, 10)};
  for (const auto& spec : specs) {
    for (std::size_t n : {2u, 10u, 50u, 200u}) {
      const auto m = discrete_spectral_measure(spec, n);
      double total = 0.0;
      for (double w : m.weights) total += w;
      CHECK(std::abs(total - 1.0) <= 1e-12);
      CHECK(m.moments[0] == doctest::Approx(1.0).epsilon(1e-12));
      for (double x : m.support) CHECK(x <= 1e-10);
      for (std::size_t j = 0; j < m.moments.size(); ++j) {
        CHECK(m.moments[j] <=
              std::pow(m.support_bound, static_cast<double>(j)) * (1 + 1e-12));
      }
    }
  }
  const auto m = discrete_spectral_measure(BirthDeathSpec::equal_rate(1.0), 200);
  for (double x : m.support) {
    CHECK(x >= -4.0 - 1e-8);
    CHECK(x <= 1e-10);
  }
}

TEST_CASE("orthogonality under the measure") {
  for (double r : {1.0, 1.5, 0.6}) {
    const auto spec = BirthDeathSpec::equal_rate(r);
    const auto m = discrete_spectral_measure(spec, 50);
    const auto pi = pi_weights(spec, 10);
    const PolynomialRecurrence rec(spec);
    std::vector<std::vector<double>> p;
    for (double x : m.support) p.push_back(eval_polynomials(rec, x, 10));
    double worst = 0.0;
    for (std::size_t k = 0; k <= 10; ++k) {
      for (std::size_t j = 0; j <= 10; ++j) {
        double sum = 0.0;
        for (std::size_t i = 0; i < m.support.size(); ++i)
          sum += m.weights[i] * p[i][k] * p[i][j];
        worst = std::max(worst, std::abs(sum - (k == j ? 1.0 / pi[k] : 0.0)));
      }
    }
    CHECK(worst <= 1e-8);
  }
}

TEST_CASE("cauchy transform is the resolvent") {
  const std::vector<BirthDeathSpec> specs = {
      BirthDeathSpec::equal_rate(1.0), BirthDeathSpec::equal_rate(2.3),
      BirthDeathSpec::from_lists({0.5, 2.0, 3.0}, {1.5, 0.7, 4.0}, 10)};
  for (const auto& spec : specs) {
    for (std::size_t n : {5u, 50u}) {
      const auto m = discrete_spectral_measure(spec, n);
      const auto q = truncate_birth_death(spec, n);
      for (Complex s : {Complex(0.11), Complex(1), Complex(0.5, 4),
                        Complex(20, -3)}) {
        CHECK(std::abs(-cauchy_transform(m, s) - h_value(q, s)) <= 1e-10);
      }
      CHECK(std::abs(-1e9 * cauchy_transform(m, 1e9) - 1.0) < 1e-6);
      CHECK(code_of([&] { cauchy_transform(m, m.support[1]); }) ==
            ErrorCode::PoleAtS);
    }
  }
}

TEST_CASE("moments") {
  for (double r : {0.5, 1.0, 2.0}) {
    const auto m = equal_rate_moments(r, 12);
    CHECK(m[0] == 1.0);
    CHECK(rel_err(m[1], r) < 1e-15);
    CHECK(rel_err(m[2], r * r + r) < 1e-15);
    const auto spec = BirthDeathSpec::equal_rate(r);
    const auto measure = discrete_spectral_measure(spec, 50, 12);
    const auto direct = moments(truncate_birth_death(spec, 50), 12);
    for (std::size_t j = 0; j <= 12; ++j) {
      CHECK(rel_err(measure.moments[j], direct[j]) <= 1e-10);
    }
  }
  // A truncation at level N carries the infinite chain's m_j for j < 2(N-1).
  const auto spec = BirthDeathSpec::from_lists({0.5, 2.0, 3.0}, {1.5, 0.7}, 10);
  const auto small = moments(truncate_birth_death(spec, 10), 17);
  const auto large = moments(truncate_birth_death(spec, 400), 17);
  for (std::size_t j = 0; j <= 17; ++j) CHECK(rel_err(small[j], large[j]) < 1e-14);
}

TEST_CASE("phi coefficients") {
  std::vector<double> point(24, 0.0);
  point[0] = 1.0;
  for (double c : phi_coefficients(point, 20).phi) CHECK(c == 0.0);
  CHECK(code_of([&] { phi_coefficients(point, 21); }) ==
        ErrorCode::InsufficientMoments);

  for (double r : {0.5, 1.0, 2.0}) {
    const std::size_t order = 20;
    const auto m = equal_rate_moments(r, order + 3);
    const auto phi = phi_coefficients(m, order);
    REQUIRE(phi.phi.size() == order + 1);
    const auto literal = geometric_phi(m, order);
    for (std::size_t j = 0; j <= order; ++j) {
      CHECK(std::abs(phi.phi[j] - literal[j]) <=
            1e-10 * std::max(1.0, std::abs(literal[j])));
    }
    // Reconstruction: (1 + m1 w - c w^2 + phi(w) w^3) * sum (-1)^j m_j w^j = 1.
    std::vector<double> recon(order + 4, 0.0);
    recon[0] = 1.0;
    recon[1] = m[1];
    recon[2] = -(m[2] - m[1] * m[1]);
    for (std::size_t j = 0; j <= order; ++j) recon[j + 3] = phi.phi[j];
    for (std::size_t k = 0; k < order + 4; ++k) {
      double acc = 0.0, scale = 0.0;
      for (std::size_t j = 0; j <= k; ++j) {
        const double term = (j % 2 == 0 ? 1.0 : -1.0) * m[j] * recon[k - j];
        acc += term;
        scale += std::abs(term);
      }
      CHECK(std::abs(acc - (k == 0 ? 1.0 : 0.0)) <= 1e-10 * std::max(1.0, scale));
    }
  }
  // 1/h at z = 10 from the truncated expansion.
  const auto m = equal_rate_moments(1.0, 23);
  const auto phi = phi_coefficients(m, 20);
  const double z = 10.0, w = 1.0 / z;
  const double recon = z + m[1] - (m[2] - m[1] * m[1]) * w +
                       poly_eval(phi.phi, w) * w * w;
  CHECK(rel_err(recon, (1.0 / h_equal_rate(1.0, z)).real()) <= 1e-8);
}

TEST_CASE("v coefficients") {
  const auto m = equal_rate_moments(1.3, 43);
  const auto phi = phi_coefficients(m, 40);
  for (double v : v_coefficients(phi, 0.0, 40)) CHECK(v == 0.0);
  for (double x : {0.1, 0.7, 2.0}) {
    const auto v = v_coefficients(phi, x, 40);
    REQUIRE(v.size() == 39);  // v_2 .. v_40: there is no w^1 term
    CHECK(rel_err(v[0], -x * phi.phi[0]) < 1e-15);
    CHECK(rel_err(v[1], -x * phi.phi[1]) < 1e-15);
    const auto& f = phi.phi;
    CHECK(rel_err(v[2], -x * f[2] + 0.5 * x * x * f[0] * f[0]) < 1e-13);
    CHECK(rel_err(v[4], -x * f[4] + 0.5 * x * x * (2.0 * f[0] * f[2] + f[1] * f[1]) -
                            x * x * x * f[0] * f[0] * f[0] / 6.0) < 1e-12);
    const double w = 0.05;
    std::vector<double> truncated(phi.phi.begin(), phi.phi.begin() + 39);
    const double direct = std::exp(-x * poly_eval(truncated, w) * w * w);
    double series = 1.0;
    for (std::size_t k = 0; k < v.size(); ++k)
      series += v[k] * std::pow(w, static_cast<double>(k + 2));
    CHECK(std::abs(series - direct) <= 1e-12);
  }
}

TEST_CASE("bessel series survival matches the integrated closed form") {
  for (double r : {0.5, 1.0, 2.0}) {
    const BesselSeries series(truncate_birth_death(BirthDeathSpec::equal_rate(r),
                                                   60));
    for (double t : {0.5, 1.0, 2.0}) {
      const auto closed = equal_rate_bd_density(r, t);
      CHECK(series.survival(t, 0.0) == 1.0);
      CHECK(rel_err(series.survival(t, t), std::exp(-r * t)) < 1e-14);
      double worst = 0.0;
      for (int i = 1; i <= 50; ++i) {
        const double x = t * i / 51.0;
        worst = std::max(worst,
                         std::abs(series.survival(t, x) - (1.0 - closed.cdf(x))));
      }
      CHECK(worst <= 1e-6);
    }
  }
  const auto m = equal_rate_moments(1.0, 43);
  const auto phi = phi_coefficients(m, 40);
  CHECK(std::abs(bessel_series_F0(m, phi, 1.0, 0.5, 40) -
                 (1.0 - equal_rate_bd_density(1.0, 1.0).cdf(0.5))) <= 1e-6);
}

TEST_CASE("bessel series density") {
  for (double r : {0.5, 1.0, 2.0}) {
    const BesselSeries series(truncate_birth_death(BirthDeathSpec::equal_rate(r),
                                                   60));
    for (double t : {0.5, 1.0, 2.0}) {
      double worst = 0.0;
      for (int i = 0; i <= 60; ++i) {
        const double x = t * (0.01 + 0.98 * i / 60.0);
        const double f = series.density(t, x);
        CHECK(f >= -1e-6);
        worst = std::max(worst, std::abs(f - equal_rate_bd_density_at(r, t, x)));
      }
      CHECK(worst <= 1e-5);
      const double delta = 1e-4 * t;
      const double integral = oracle::gauss_panels(
          [&](double x) { return series.density(t, x); }, 2.0 * delta,
          t - 2.0 * delta, 40);
      CHECK(std::abs(integral - (series.survival(t, 2.0 * delta) -
                                 series.survival(t, t - 2.0 * delta))) <= 1e-5);
    }
  }
  const BesselSeries two(two_state_generator(2, 3));
  for (double x : {0.2, 0.5, 0.8}) {
    CHECK(std::abs(two.density(1.0, x) - two_state_density_at(2, 3, 1.0, x)) <=
          1e-5);
  }
}

TEST_CASE("bessel series error paths") {
  std::vector<double> point(44, 0.0);
  point[0] = 1.0;
  const auto phi0 = phi_coefficients(point, 40);
  CHECK(code_of([&] { bessel_series_F0(point, phi0, 1.0, 0.5, 40); }) ==
        ErrorCode::DegenerateMeasure);
  const auto m = equal_rate_moments(1.0, 13);
  const auto phi = phi_coefficients(m, 10);
  CHECK(code_of([&] { bessel_series_F0(m, phi, 20.0, 10.0, 10); }) ==
        ErrorCode::NonConverged);
  CHECK(code_of([&] { bessel_series_F0(m, phi, 1.0, 1.5, 10); }) ==
        ErrorCode::InvalidArgument);
  CHECK(code_of([&] { f0_from_series(m, phi, 1.0, 1e-5, 10); }) ==
        ErrorCode::InvalidArgument);
  CHECK(code_of([&] { v_coefficients(phi, 1.0, 20); }) ==
        ErrorCode::InsufficientMoments);
}
