#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <set>
#include <thread>

#include "occutime/chain.hpp"
#include "occutime/closed_form.hpp"
#include "occutime/error.hpp"
#include "occutime/simulate.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

using namespace occutime;
using testutil::code_of;

TEST_CASE("random streams") {
  auto a = RandomStream::for_replica(7, 0);
  auto b = RandomStream::for_replica(7, 0);
  auto c = RandomStream::for_replica(7, 1);
  auto d = RandomStream::for_replica(8, 0);
  std::set<std::uint64_t> firsts;
  for (auto* s : {&a, &c, &d}) firsts.insert((*s)());
  CHECK(firsts.size() == 3);
  CHECK(b() == RandomStream::for_replica(7, 0)());
  double lo = 1.0, hi = 0.0, sum = 0.0;
  auto u = RandomStream::for_replica(1, 2);
  for (int i = 0; i < 100000; ++i) {
    const double x = u.uniform_open_left();
    lo = std::min(lo, x);
    hi = std::max(hi, x);
    sum += x;
  }
  CHECK(lo > 0.0);
  CHECK(hi <= 1.0);
  CHECK(std::abs(sum / 100000 - 0.5) < 4.0 * std::sqrt(1.0 / 12.0 / 100000));
}

TEST_CASE("single trajectories") {
  // No departure within the horizon: the whole horizon is spent in state 0.
  const auto lazy = two_state_generator(1e-12, 1.0);
  auto stream = RandomStream::for_replica(3, 0);
  CHECK(sample_occupation(lazy, 0, 2.5, stream) == 2.5);
  // Fast mixing: the occupation fraction approaches pi_0 = mu/(lambda+mu).
  const auto fast = two_state_generator(300.0, 100.0);
  auto s2 = RandomStream::for_replica(3, 1);
  const double fraction = sample_occupation(fast, 0, 10.0, s2) / 10.0;
  CHECK(std::abs(fraction - 0.25) < 0.1);
  // Starting elsewhere, the occupation is strictly below t.
  auto s3 = RandomStream::for_replica(3, 2);
  CHECK(sample_occupation(two_state_generator(1, 1), 1, 1.0, s3) < 1.0);
}

TEST_CASE("atom fraction at 4 sigma") {
  const auto r = monte_carlo(two_state_generator(2, 3), 0, 1.0, 100000, 11);
  const double p = std::exp(-2.0);
  CHECK(std::abs(r.atom_fraction - p) <= 4.0 * std::sqrt(p * (1 - p) / 1e5));
  CHECK(r.samples.size() == 100000);
  std::size_t atoms = 0;
  for (double x : r.samples) {
    CHECK(x >= 0.0);
    CHECK(x <= 1.0);
    if (x == 1.0) ++atoms;
  }
  CHECK(static_cast<double>(atoms) / 1e5 == r.atom_fraction);
  std::uint64_t in_buckets = 0;
  for (auto c : r.histogram) in_buckets += c;
  CHECK(r.histogram.size() == kHistogramBuckets);
  CHECK(in_buckets == 100000 - atoms);
}

TEST_CASE("two-state atom and mean together") {
  const auto r = monte_carlo(two_state_generator(1, 1), 0, 1.0, 1000000, 5);
  const double p = std::exp(-1.0);
  CHECK(std::abs(r.atom_fraction - p) <= 4.0 * std::sqrt(p * (1 - p) / 1e6));
  const double mean = oracle::two_state_mean(1, 1, 1);
  CHECK(std::abs(mean - 0.7162) < 1e-4);
  CHECK(std::abs(r.mean - mean) <= 3.0 * r.standard_error());
  CHECK(std::abs(r.mean - occupation_mean(two_state_generator(1, 1), 1.0)) <=
        3.0 * r.standard_error());
}

TEST_CASE("equal-rate mean at 3 sigma") {
  const auto q = truncate_birth_death(BirthDeathSpec::equal_rate(1.0), 200);
  const auto r = monte_carlo(q, 0, 1.0, 1000000, 9);
  CHECK(std::abs(r.mean - occupation_mean(q, 1.0)) <= 3.0 * r.standard_error());
}

TEST_CASE("results do not depend on the worker count") {
  const auto q = truncate_birth_death(BirthDeathSpec::equal_rate(1.5), 50);
  const std::size_t n = 200000;  // spans several fixed-size blocks
  const auto one = monte_carlo(q, 0, 2.0, n, 42, 1);
  for (unsigned w : {2u, 3u, 8u}) {
    const auto many = monte_carlo(q, 0, 2.0, n, 42, w);
    CHECK(many.samples == one.samples);
    CHECK(many.mean == one.mean);
    CHECK(many.variance == one.variance);
    CHECK(many.histogram == one.histogram);
  }
  const auto other = monte_carlo(q, 0, 2.0, n, 43, 1);
  CHECK(other.samples != one.samples);
}

TEST_CASE("KS distance") {
  const auto good = monte_carlo(two_state_generator(1, 1), 0, 1.0, 1000000, 1);
  CHECK(ks_distance(good, two_state_density(1, 1, 1.0)) <= 0.0017);
  CHECK(ks_two_sample(good, good) == 0.0);
  // Swapped rates: the sample is from (1, 3), the density from (3, 1).
  const auto sample = monte_carlo(two_state_generator(1, 3), 0, 1.0, 1000000, 2);
  CHECK(ks_distance(sample, two_state_density(1, 3, 1.0)) <= 0.0017);
  CHECK(ks_distance(sample, two_state_density(3, 1, 1.0)) >= 0.01);
  CHECK(code_of([&] { ks_distance(good, two_state_density(1, 1, 2.0)); }) ==
        ErrorCode::HorizonMismatch);
}

TEST_CASE("KS distance against a grid-only density") {
  auto density = two_state_density(2, 3, 1.0, 2000);
  density.evaluator = nullptr;
  const auto r = monte_carlo(two_state_generator(2, 3), 0, 1.0, 200000, 4);
  CHECK(ks_distance(r, density) <= 1.36 / std::sqrt(2e5) * 2.0);
}

TEST_CASE("truncation level is immaterial at short horizons") {
  const std::size_t n = 200000;
  const auto a = monte_carlo(
      truncate_birth_death(BirthDeathSpec::equal_rate(1.0), 100), 0, 1.0, n, 21);
  const auto b = monte_carlo(
      truncate_birth_death(BirthDeathSpec::equal_rate(1.0), 400), 0, 1.0, n, 22);
  CHECK(ks_two_sample(a, b) <= 1.36 * std::sqrt(2.0 / static_cast<double>(n)));
}

TEST_CASE("monte carlo argument checks") {
  const auto q = two_state_generator(1, 1);
  CHECK(code_of([&] { monte_carlo(q, 0, 1.0, 0, 1); }) ==
        ErrorCode::InvalidArgument);
  CHECK(code_of([&] { monte_carlo(q, 0, -1.0, 10, 1); }) ==
        ErrorCode::InvalidArgument);
  CHECK(code_of([&] { monte_carlo(q, 5, 1.0, 10, 1); }) ==
        ErrorCode::InvalidArgument);
  CHECK(default_worker_count() >= 1);
}

TEST_CASE("OCCUTIME_THREADS caps the worker count") {
  const unsigned hardware = std::max(1u, std::thread::hardware_concurrency());
  ::setenv("OCCUTIME_THREADS", "3", 1);
  CHECK(default_worker_count() == std::min(3u, hardware));
  ::setenv("OCCUTIME_THREADS", "1", 1);
  CHECK(default_worker_count() == 1);
  ::setenv("OCCUTIME_THREADS", "junk", 1);
  CHECK(default_worker_count() >= 1);
  ::unsetenv("OCCUTIME_THREADS");
}
