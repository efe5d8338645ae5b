#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "occutime/chain_spec.hpp"
#include "occutime/transforms.hpp"

namespace occutime::cli {

enum class Method { ClosedForm, Inversion, Series, MonteCarlo };

enum ExitCode : int {
  kOk = 0,
  kToleranceFailed = 1,
  kConfigError = 2,
  kNumericError = 3,
};

std::string to_string(Method method);
// Throws Error(InvalidArgument) for unknown names.
Method parse_method(const std::string& name);

struct RunConfig {
  ChainSpec chain;
  Method method = Method::ClosedForm;
  double t = 1.0;
  std::size_t grid = 200;
  std::string out;
  std::uint64_t seed = 1;
  std::size_t n = 100'000;
  std::size_t series_order = 40;
  int nodes = kDefaultTalbotNodes;
};

// Throws Error(InvalidArgument) when the method cannot handle the chain.
void validate(const RunConfig& config);

// Grid shared by every method in `methods`: cosine points on (0, t), pulled
// in to [1e-3 t, t - 1e-3 t] when the series method is involved.
std::vector<double> density_grid(double t, std::size_t points,
                                 std::span<const Method> methods);

OccupationDensity compute_density(const RunConfig& config,
                                  std::span<const double> grid);

// Writes "x,density" rows with 17 significant digits.
void write_density_csv(std::ostream& out, const OccupationDensity& density);

// Full command-line entry point; returns an ExitCode.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);
int run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err);

}  // namespace occutime::cli
