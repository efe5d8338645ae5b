#include "occutime/simulate.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdlib>
#include <string>
#include <thread>

#include "occutime/error.hpp"

namespace occutime {
namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ull;

std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

// Replicas are accumulated in fixed-size blocks merged in block order, so
// floating-point sums do not depend on the worker count.
constexpr std::size_t kBlock = 1 << 16;

struct BlockStats {
  double sum = 0.0;
  double sum_sq = 0.0;
  std::size_t atoms = 0;
  std::vector<std::uint64_t> histogram;
};

// Piecewise Gauss-Legendre model of the analytic CDF: 8 interior nodes per
// panel, Legendre expansion integrated in closed form within a panel.
class CdfTable {
 public:
  static constexpr int kNodes = 8;

  CdfTable(const OccupationDensity& density, std::size_t panels)
      : t_(density.t), panels_(panels), coeffs_(panels), start_(panels + 1) {
    static constexpr std::array<double, kNodes> xi = {
        -0.9602898564975363, -0.7966664774136267, -0.5255324099163290,
        -0.1834346424956498, 0.1834346424956498,  0.5255324099163290,
        0.7966664774136267,  0.9602898564975363};
    static constexpr std::array<double, kNodes> w = {
        0.1012285362903763, 0.2223810344533745, 0.3137066458778873,
        0.3626837833783620, 0.3626837833783620, 0.3137066458778873,
        0.2223810344533745, 0.1012285362903763};
    const double width = t_ / static_cast<double>(panels_);
    start_[0] = 0.0;
    for (std::size_t p = 0; p < panels_; ++p) {
      const double a = width * static_cast<double>(p);
      std::array<double, kNodes> c{};
      for (int i = 0; i < kNodes; ++i) {
        const double f = density.continuous_at(a + 0.5 * width * (xi[i] + 1.0));
        const auto legendre = legendre_values(xi[i]);
        for (int j = 0; j < kNodes; ++j) c[j] += w[i] * f * legendre[j];
      }
      for (int j = 0; j < kNodes; ++j) c[j] *= (2.0 * j + 1.0) / 2.0;
      coeffs_[p] = c;
      start_[p + 1] = start_[p] + width * c[0];
    }
  }

  // Integral of the continuous part over [0, x], 0 <= x <= t.
  double operator()(double x) const {
    const double width = t_ / static_cast<double>(panels_);
    auto p = static_cast<std::size_t>(x / width);
    if (p >= panels_) return start_[panels_];
    const double local = 2.0 * (x - width * static_cast<double>(p)) / width - 1.0;
    const auto legendre = legendre_values(local, kNodes + 1);
    const auto& c = coeffs_[p];
    // int_{-1}^{xi} P_0 = xi + 1, int_{-1}^{xi} P_j = (P_{j+1} - P_{j-1})/(2j+1).
    double integral = c[0] * (local + 1.0);
    for (int j = 1; j < kNodes; ++j) {
      integral += c[j] * (legendre[j + 1] - legendre[j - 1]) / (2.0 * j + 1.0);
    }
    return start_[p] + 0.5 * width * integral;
  }

  double total() const { return start_[panels_]; }

 private:
  static std::array<double, kNodes + 1> legendre_values(double x,
                                                        int count = kNodes) {
    std::array<double, kNodes + 1> p{};
    p[0] = 1.0;
    if (count > 1) p[1] = x;
    for (int j = 1; j + 1 < count; ++j) {
      p[j + 1] = ((2.0 * j + 1.0) * x * p[j] - j * p[j - 1]) / (j + 1.0);
    }
    return p;
  }

  double t_;
  std::size_t panels_;
  std::vector<std::array<double, kNodes>> coeffs_;
  std::vector<double> start_;
};

std::vector<double> sorted_samples(const SimulationResult& result) {
  if (result.samples.size() != result.n || result.n == 0) {
    throw Error(ErrorCode::InvalidArgument,
                "KS distance needs retained samples");
  }
  std::vector<double> sorted = result.samples;
  std::sort(sorted.begin(), sorted.end());
  return sorted;
}

}  // namespace

RandomStream RandomStream::for_replica(std::uint64_t seed,
                                       std::uint64_t index) {
  return RandomStream(mix64(seed) ^ mix64((index + 1) * kGolden));
}

RandomStream::result_type RandomStream::operator()() {
  state_ += kGolden;
  return mix64(state_);
}

double RandomStream::uniform_open_left() {
  return (static_cast<double>((*this)() >> 11) + 1.0) * 0x1.0p-53;
}

double SimulationResult::standard_error() const {
  return n > 0 ? std::sqrt(variance / static_cast<double>(n)) : 0.0;
}

double sample_occupation(const GeneratorMatrix& q, std::size_t start, double t,
                         RandomStream& stream) {
  double time = 0.0;
  double occupation = 0.0;
  std::size_t state = start;
  for (;;) {
    const double rate = q.exit_rate(state);
    const double hold = -std::log(stream.uniform_open_left()) / rate;
    if (hold >= t - time) {
      if (state == 0) occupation += t - time;
      return occupation;
    }
    if (state == 0) occupation += hold;
    time += hold;
    double target = (1.0 - stream.uniform_open_left()) * rate;
    const auto moves = q.transitions(state);
    std::size_t next = moves.back().target;
    for (const auto& move : moves) {
      target -= move.rate;
      if (target < 0.0) {
        next = move.target;
        break;
      }
    }
    state = next;
  }
}

unsigned default_worker_count() {
  unsigned hardware = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("OCCUTIME_THREADS")) {
    const long cap = std::strtol(env, nullptr, 10);
    if (cap > 0) return std::min<unsigned>(hardware, static_cast<unsigned>(cap));
  }
  return hardware;
}

SimulationResult monte_carlo(const GeneratorMatrix& q, std::size_t start,
                             double t, std::size_t n, std::uint64_t seed,
                             unsigned workers) {
  if (n == 0) throw Error(ErrorCode::InvalidArgument, "sample count must be >= 1");
  if (!(t > 0.0) || !std::isfinite(t)) {
    throw Error(ErrorCode::InvalidArgument, "horizon must be positive");
  }
  if (start >= q.size()) {
    throw Error(ErrorCode::InvalidArgument, "start state out of range");
  }
  if (workers == 0) workers = default_worker_count();

  SimulationResult result;
  result.n = n;
  result.seed = seed;
  result.t = t;
  const bool retain = n <= kMaxRetainedSamples;
  if (retain) result.samples.resize(n);

  const std::size_t blocks = (n + kBlock - 1) / kBlock;
  std::vector<BlockStats> stats(blocks);
  auto run_block = [&](std::size_t b) {
    BlockStats& s = stats[b];
    s.histogram.assign(kHistogramBuckets, 0);
    const std::size_t end = std::min(n, (b + 1) * kBlock);
    for (std::size_t i = b * kBlock; i < end; ++i) {
      auto stream = RandomStream::for_replica(seed, i);
      const double x = sample_occupation(q, start, t, stream);
      if (retain) result.samples[i] = x;
      s.sum += x;
      s.sum_sq += x * x;
      if (x >= t) {
        ++s.atoms;
      } else {
        const auto bucket = std::min(
            kHistogramBuckets - 1,
            static_cast<std::size_t>(x / t * static_cast<double>(kHistogramBuckets)));
        ++s.histogram[bucket];
      }
    }
  };

  workers = static_cast<unsigned>(std::min<std::size_t>(workers, blocks));
  if (workers <= 1) {
    for (std::size_t b = 0; b < blocks; ++b) run_block(b);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        for (std::size_t b = w; b < blocks; b += workers) run_block(b);
      });
    }
    for (auto& th : pool) th.join();
  }

  double sum = 0.0, sum_sq = 0.0;
  std::size_t atoms = 0;
  result.histogram.assign(kHistogramBuckets, 0);
  for (const auto& s : stats) {
    sum += s.sum;
    sum_sq += s.sum_sq;
    atoms += s.atoms;
    for (std::size_t k = 0; k < kHistogramBuckets; ++k) {
      result.histogram[k] += s.histogram[k];
    }
  }
  const double count = static_cast<double>(n);
  result.mean = sum / count;
  result.variance =
      n > 1 ? std::max(0.0, (sum_sq - count * result.mean * result.mean) /
                                (count - 1.0))
            : 0.0;
  result.atom_fraction = static_cast<double>(atoms) / count;
  return result;
}

double ks_distance(const SimulationResult& result,
                   const OccupationDensity& analytic) {
  if (std::abs(result.t - analytic.t) > 1e-12 * std::max(1.0, analytic.t)) {
    throw Error(ErrorCode::HorizonMismatch,
                "simulation horizon " + std::to_string(result.t) +
                    " differs from density horizon " + std::to_string(analytic.t));
  }
  const auto sorted = sorted_samples(result);
  const CdfTable cdf(analytic, 1024);
  const double count = static_cast<double>(sorted.size());
  double distance = 0.0;
  std::size_t below = 0;
  for (; below < sorted.size() && sorted[below] < result.t; ++below) {
    const double g = cdf(sorted[below]);
    const double i = static_cast<double>(below);
    distance = std::max({distance, std::abs((i + 1.0) / count - g),
                         std::abs(g - i / count)});
  }
  // Just below t, before both atoms.
  distance = std::max(distance,
                      std::abs(static_cast<double>(below) / count - cdf.total()));
  return distance;
}

double ks_two_sample(const SimulationResult& a, const SimulationResult& b) {
  const auto xa = sorted_samples(a);
  const auto xb = sorted_samples(b);
  const double na = static_cast<double>(xa.size());
  const double nb = static_cast<double>(xb.size());
  std::size_t i = 0, j = 0;
  double distance = 0.0;
  while (i < xa.size() && j < xb.size()) {
    const double x = std::min(xa[i], xb[j]);
    while (i < xa.size() && xa[i] == x) ++i;
    while (j < xb.size() && xb[j] == x) ++j;
    distance = std::max(distance, std::abs(static_cast<double>(i) / na -
                                           static_cast<double>(j) / nb));
  }
  return distance;
}

}  // namespace occutime
