#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "occutime/chain.hpp"
#include "occutime/transforms.hpp"

namespace occutime {

// SplitMix64 stream; satisfies UniformRandomBitGenerator.
class RandomStream {
 public:
  using result_type = std::uint64_t;

  explicit RandomStream(std::uint64_t state) : state_(state) {}

  // Stream for replica `index` of a run seeded with `seed`.
  static RandomStream for_replica(std::uint64_t seed, std::uint64_t index);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return ~result_type{0}; }
  result_type operator()();

  // Uniform on (0, 1].
  double uniform_open_left();

 private:
  std::uint64_t state_;
};

inline constexpr std::size_t kMaxRetainedSamples = 10'000'000;
inline constexpr std::size_t kHistogramBuckets = 1024;

struct SimulationResult {
  std::vector<double> samples;  // replica order; empty beyond kMaxRetainedSamples
  std::size_t n = 0;
  std::uint64_t seed = 0;
  double t = 0.0;
  double atom_fraction = 0.0;   // fraction of samples equal to t
  double mean = 0.0;
  double variance = 0.0;        // unbiased sample variance
  // Counts of samples below t in kHistogramBuckets equal buckets of [0, t).
  std::vector<std::uint64_t> histogram;

  double standard_error() const;
};

// Time spent in state 0 during [0, t] along one exact trajectory.
double sample_occupation(const GeneratorMatrix& q, std::size_t start, double t,
                         RandomStream& stream);

// `workers` = 0 reads OCCUTIME_THREADS, falling back to the hardware count.
// Bit-identical for every worker count.
SimulationResult monte_carlo(const GeneratorMatrix& q, std::size_t start,
                             double t, std::size_t n, std::uint64_t seed,
                             unsigned workers = 0);

unsigned default_worker_count();

// sup_x |F_n(x) - F(x)| with the atom treated as a jump at t.
// Throws Error(HorizonMismatch) or Error(InvalidArgument) when samples were
// not retained.
double ks_distance(const SimulationResult& result,
                   const OccupationDensity& analytic);

// Two-sample statistic sup_x |F_a(x) - F_b(x)|.
double ks_two_sample(const SimulationResult& a, const SimulationResult& b);

}  // namespace occutime
