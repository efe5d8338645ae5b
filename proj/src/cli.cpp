#include "occutime/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "occutime/bessel.hpp"
#include "occutime/closed_form.hpp"
#include "occutime/error.hpp"
#include "occutime/simulate.hpp"
#include "occutime/spectral.hpp"

namespace occutime::cli {
namespace {

using nlohmann::json;

std::string format_double(double v) {
  char buffer[32];
  std::snprintf(buffer, sizeof buffer, "%.17g", v);
  return buffer;
}

// Series evaluation stays inside the finite-difference band.
constexpr double kSeriesMargin = 1e-3;

OccupationDensity series_density(const RunConfig& config,
                                 std::span<const double> grid) {
  auto series = std::make_shared<BesselSeries>(config.chain.generator(),
                                               config.series_order);
  const double t = config.t;
  OccupationDensity density;
  density.t = t;
  density.atom_at_t = std::exp(-config.chain.exit_rate0() * t);
  density.grid.assign(grid.begin(), grid.end());
  density.evaluator = [series, t](double x) {
    const double lo = 2e-4 * t;
    return series->density(t, std::clamp(x, lo, t - lo));
  };
  for (double x : grid) density.values.push_back(density.evaluator(x));
  return density;
}

OccupationDensity monte_carlo_density(const RunConfig& config,
                                      std::span<const double> grid) {
  const auto result =
      monte_carlo(config.chain.generator(), 0, config.t, config.n, config.seed);
  const std::size_t bins = std::max<std::size_t>(config.grid, 1);
  const double width = config.t / static_cast<double>(bins);
  auto counts = std::make_shared<std::vector<double>>(bins, 0.0);
  if (!result.samples.empty()) {
    for (double x : result.samples) {
      if (x >= config.t) continue;
      const auto b = std::min(bins - 1, static_cast<std::size_t>(x / width));
      (*counts)[b] += 1.0;
    }
  } else {
    // Streaming run: regroup the fixed histogram.
    for (std::size_t k = 0; k < kHistogramBuckets; ++k) {
      const double centre = (k + 0.5) * config.t / kHistogramBuckets;
      const auto b = std::min(bins - 1, static_cast<std::size_t>(centre / width));
      (*counts)[b] += static_cast<double>(result.histogram[k]);
    }
  }
  for (auto& c : *counts) c /= static_cast<double>(result.n) * width;

  OccupationDensity density;
  density.t = config.t;
  density.atom_at_t = result.atom_fraction;
  density.grid.assign(grid.begin(), grid.end());
  density.evaluator = [counts, width, bins](double x) {
    const auto b = std::min(bins - 1, static_cast<std::size_t>(std::max(x, 0.0) / width));
    return (*counts)[b];
  };
  for (double x : grid) density.values.push_back(density.evaluator(x));
  return density;
}

OccupationDensity closed_form_density(const RunConfig& config,
                                      std::span<const double> grid) {
  const auto& chain = config.chain;
  OccupationDensity density;
  const double t = config.t;
  if (chain.kind == ChainSpec::Kind::TwoState) {
    density.atom_at_t = std::exp(-chain.lambda * t);
    density.evaluator = [l = chain.lambda, m = chain.mu, t](double x) {
      return two_state_density_at(l, m, t, x);
    };
  } else {
    density.atom_at_t = std::exp(-chain.r * t);
    density.evaluator = [r = chain.r, t](double x) {
      return equal_rate_bd_density_at(r, t, x);
    };
  }
  density.t = t;
  density.grid.assign(grid.begin(), grid.end());
  for (double x : grid) density.values.push_back(density.evaluator(x));
  return density;
}

std::vector<double> clamped_values(const OccupationDensity& density) {
  std::vector<double> v(density.values);
  for (auto& x : v) x = std::max(x, 0.0);
  return v;
}

json density_sidecar(const RunConfig& config, const OccupationDensity& density) {
  const auto values = clamped_values(density);
  return {
      {"t", density.t},
      {"atom_at_t", density.atom_at_t},
      {"method", to_string(config.method)},
      {"chain", config.chain.source},
      {"grid", density.grid.size()},
      {"normalization",
       trapezoid_mass(density.t, density.atom_at_t, density.grid, values)},
  };
}

json complex_json(Complex z) { return json::array({z.real(), z.imag()}); }

struct CommonOptions {
  std::string chain;
  std::string method = "closed-form";
  double t = 1.0;
  std::size_t grid = 200;
  std::string out;
  std::uint64_t seed = 1;
  std::size_t n = 100'000;
  std::optional<std::size_t> truncate;
  std::size_t series_order = kDefaultSeriesOrder;
  int nodes = kDefaultTalbotNodes;
};

void add_chain_options(CLI::App& cmd, CommonOptions& o) {
  cmd.add_option("--chain", o.chain, "chain spec file or inline JSON")->required();
  cmd.add_option("--truncate", o.truncate, "truncation level for birth-death chains");
}

RunConfig make_config(const CommonOptions& o, const std::string& chain,
                      const std::string& method) {
  RunConfig config;
  config.chain = load_chain_spec(chain);
  if (o.truncate) {
    if (*o.truncate < 2) {
      throw Error(ErrorCode::InvalidArgument, "--truncate must be >= 2");
    }
    config.chain.truncate = *o.truncate;
  }
  config.method = parse_method(method);
  config.t = o.t;
  config.grid = o.grid;
  config.out = o.out;
  config.seed = o.seed;
  config.n = o.n;
  config.series_order = o.series_order;
  config.nodes = o.nodes;
  validate(config);
  return config;
}

int cmd_density(const CommonOptions& o, std::ostream& out) {
  const auto config = make_config(o, o.chain, o.method);
  const std::array methods{config.method};
  const auto grid = density_grid(config.t, config.grid, methods);
  const auto density = compute_density(config, grid);
  if (config.out.empty()) {
    write_density_csv(out, density);
    return kOk;
  }
  std::ofstream csv(config.out);
  if (!csv) {
    throw Error(ErrorCode::InvalidArgument, "cannot write '" + config.out + "'");
  }
  write_density_csv(csv, density);
  std::ofstream sidecar(config.out + ".json");
  sidecar << density_sidecar(config, density).dump(2) << "\n";
  out << density_sidecar(config, density).dump() << "\n";
  return kOk;
}

int cmd_compare(const CommonOptions& o, const std::string& chain_b,
                const std::string& method_a, const std::string& method_b,
                double tol, std::ostream& out) {
  const auto a = make_config(o, o.chain, method_a);
  const auto b = make_config(o, chain_b.empty() ? o.chain : chain_b, method_b);
  const std::array methods{a.method, b.method};
  const auto grid = density_grid(a.t, a.grid, methods);
  const auto da = compute_density(a, grid);
  const auto db = compute_density(b, grid);
  double sup = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    sup = std::max(sup, std::abs(da.values[i] - db.values[i]));
  }
  const json report = {
      {"sup_abs_diff", sup},
      {"atom_abs_diff", std::abs(da.atom_at_t - db.atom_at_t)},
      {"grid", grid.size()},
      {"method_a", to_string(a.method)},
      {"method_b", to_string(b.method)},
      {"tol", tol},
  };
  out << report.dump() << "\n";
  return sup <= tol ? kOk : kToleranceFailed;
}

int cmd_simulate(const CommonOptions& o, std::ostream& out) {
  auto config = make_config(o, o.chain, "monte-carlo");
  const auto result =
      monte_carlo(config.chain.generator(), 0, config.t, config.n, config.seed);
  if (!config.out.empty()) {
    if (result.samples.empty()) {
      throw Error(ErrorCode::InvalidArgument,
                  "raw samples are not retained beyond 10^7 replicas");
    }
    std::ofstream csv(config.out);
    if (!csv) {
      throw Error(ErrorCode::InvalidArgument, "cannot write '" + config.out + "'");
    }
    csv << "occupation_time\n";
    for (double x : result.samples) csv << format_double(x) << "\n";
  }
  const json summary = {
      {"n", result.n},
      {"seed", result.seed},
      {"t", result.t},
      {"mean", result.mean},
      {"variance", result.variance},
      {"standard_error", result.standard_error()},
      {"atom_fraction", result.atom_fraction},
      {"histogram", result.histogram},
      {"chain", config.chain.source},
  };
  out << summary.dump() << "\n";
  return kOk;
}

int cmd_spectral(const CommonOptions& o, std::ostream& out) {
  auto chain = load_chain_spec(o.chain);
  if (o.truncate) chain.truncate = *o.truncate;
  const auto bd = chain.birth_death();
  if (!bd) {
    throw Error(ErrorCode::InvalidArgument,
                "spectral report needs a birth-death chain (two-state, "
                "equal-rate-bd or birth-death)");
  }
  const std::size_t n = chain.kind == ChainSpec::Kind::TwoState ? 2 : chain.truncate;
  const auto data = discrete_spectral_measure(*bd, n, o.series_order + 3);
  const json report = {
      {"support", data.support},
      {"weights", data.weights},
      {"moments", data.moments},
      {"support_bound", data.support_bound},
  };
  out << report.dump() << "\n";
  return kOk;
}

int cmd_transform(const CommonOptions& o, double s1_re, double s1_im, double x,
                  std::optional<double> s2, std::ostream& out) {
  auto chain = load_chain_spec(o.chain);
  if (o.truncate) chain.truncate = *o.truncate;
  HEvaluator h = chain.h();
  if (chain.kind == ChainSpec::Kind::EqualRateBd) {
    h = [r = chain.r](Complex s) { return h_equal_rate(r, s); };
  }
  const Complex s1(s1_re, s1_im);
  json report = {{"s1", complex_json(s1)}};
  if (s2) {
    report["mode"] = "fourier-laplace";
    report["s2"] = *s2;
    report["value"] = complex_json(fourier_laplace_f0(h, s1, *s2));
  } else {
    report["mode"] = "laplace";
    report["x"] = x;
    report["value"] = complex_json(laplace_f0(h, s1, x));
  }
  out << report.dump() << "\n";
  return kOk;
}

}  // namespace

std::string to_string(Method method) {
  switch (method) {
    case Method::ClosedForm: return "closed-form";
    case Method::Inversion: return "inversion";
    case Method::Series: return "series";
    case Method::MonteCarlo: return "monte-carlo";
  }
  return "unknown";
}

Method parse_method(const std::string& name) {
  if (name == "closed-form") return Method::ClosedForm;
  if (name == "inversion") return Method::Inversion;
  if (name == "series") return Method::Series;
  if (name == "monte-carlo") return Method::MonteCarlo;
  throw Error(ErrorCode::InvalidArgument, "unknown method '" + name + "'");
}

void validate(const RunConfig& config) {
  if (!(config.t > 0.0) || !std::isfinite(config.t)) {
    throw Error(ErrorCode::InvalidArgument, "--t must be positive");
  }
  if (config.grid == 0) {
    throw Error(ErrorCode::InvalidArgument, "--grid must be at least 1");
  }
  if (config.method == Method::ClosedForm && !config.chain.has_closed_form()) {
    throw Error(ErrorCode::InvalidArgument,
                "closed-form unavailable for this chain type (" +
                    config.chain.type_name() + ")");
  }
  if (config.method == Method::MonteCarlo && config.n == 0) {
    throw Error(ErrorCode::InvalidArgument, "--n must be at least 1");
  }
  if (config.nodes < 2 || config.nodes % 2 != 0) {
    throw Error(ErrorCode::InvalidArgument, "--nodes must be even and >= 2");
  }
  if (config.series_order < 2 ||
      config.series_order > static_cast<std::size_t>(BesselOrder::kMaxOrder)) {
    throw Error(ErrorCode::InvalidArgument, "--series-order must be in [2, 150]");
  }
}

std::vector<double> density_grid(double t, std::size_t points,
                                 std::span<const Method> methods) {
  const bool series =
      std::find(methods.begin(), methods.end(), Method::Series) != methods.end();
  if (series) return cosine_grid(kSeriesMargin * t, t - kSeriesMargin * t, points);
  return cosine_grid(t, points);
}

OccupationDensity compute_density(const RunConfig& config,
                                  std::span<const double> grid) {
  validate(config);
  switch (config.method) {
    case Method::ClosedForm: return closed_form_density(config, grid);
    case Method::Inversion:
      return density_via_excursion(config.chain.excursion(),
                                   config.chain.exit_rate0(), config.t, grid,
                                   config.nodes);
    case Method::Series: return series_density(config, grid);
    case Method::MonteCarlo: return monte_carlo_density(config, grid);
  }
  throw Error(ErrorCode::InvalidArgument, "unknown method");
}

void write_density_csv(std::ostream& out, const OccupationDensity& density) {
  const auto values = clamped_values(density);
  out << "x,density\n";
  for (std::size_t i = 0; i < density.grid.size(); ++i) {
    out << format_double(density.grid[i]) << "," << format_double(values[i])
        << "\n";
  }
}

int run(int argc, const char* const* argv, std::ostream& out,
        std::ostream& err) {
  CLI::App app{"Occupation-time densities of continuous-time Markov chains",
               "occutime"};
  app.require_subcommand(1);
  CommonOptions o;

  auto* density = app.add_subcommand("density", "density grid as CSV + JSON sidecar");
  add_chain_options(*density, o);
  density->add_option("--method", o.method,
                      "closed-form | inversion | series | monte-carlo");
  density->add_option("--t", o.t, "horizon");
  density->add_option("--grid", o.grid, "number of grid points");
  density->add_option("--out", o.out, "CSV output path (sidecar at <out>.json)");
  density->add_option("--seed", o.seed);
  density->add_option("--n", o.n, "Monte Carlo sample count");
  density->add_option("--series-order", o.series_order);
  density->add_option("--nodes", o.nodes, "Talbot contour nodes");

  std::string chain_b, method_a = "closed-form", method_b = "inversion";
  double tol = 1e-4;
  auto* compare = app.add_subcommand("compare", "sup-norm difference of two methods");
  add_chain_options(*compare, o);
  compare->add_option("--chain-b", chain_b, "second chain (defaults to --chain)");
  compare->add_option("--method-a", method_a);
  compare->add_option("--method-b", method_b);
  compare->add_option("--t", o.t);
  compare->add_option("--grid", o.grid);
  compare->add_option("--tol", tol);
  compare->add_option("--seed", o.seed);
  compare->add_option("--n", o.n);
  compare->add_option("--series-order", o.series_order);
  compare->add_option("--nodes", o.nodes);

  auto* simulate = app.add_subcommand("simulate", "Monte Carlo occupation times");
  add_chain_options(*simulate, o);
  simulate->add_option("--t", o.t);
  simulate->add_option("--n", o.n);
  simulate->add_option("--seed", o.seed);
  simulate->add_option("--out", o.out, "raw sample CSV path");

  auto* spectral = app.add_subcommand("spectral", "discrete spectral measure");
  add_chain_options(*spectral, o);
  spectral->add_option("--series-order", o.series_order,
                       "moments are reported through order series-order + 3");

  double s1_re = 1.0, s1_im = 0.0, x = 0.0;
  std::optional<double> s2;
  auto* transform = app.add_subcommand("transform", "evaluate L_f0(s1, x)");
  add_chain_options(*transform, o);
  transform->add_option("--s1", s1_re, "real part of s1");
  transform->add_option("--s1-imag", s1_im, "imaginary part of s1");
  transform->add_option("--x", x, "occupation value");
  transform->add_option("--s2", s2, "Fourier variable; switches to L_f0_hat(s1, s2)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kConfigError;
  }

  try {
    if (*density) return cmd_density(o, out);
    if (*compare) return cmd_compare(o, chain_b, method_a, method_b, tol, out);
    if (*simulate) return cmd_simulate(o, out);
    if (*spectral) return cmd_spectral(o, out);
    if (*transform) return cmd_transform(o, s1_re, s1_im, x, s2, out);
  } catch (const Error& e) {
    err << "occutime: " << e.what() << "\n";
    return is_config_error(e.code()) ? kConfigError : kNumericError;
  } catch (const nlohmann::json::exception& e) {
    err << "occutime: " << e.what() << "\n";
    return kConfigError;
  } catch (const std::exception& e) {
    err << "occutime: " << e.what() << "\n";
    return kNumericError;
  }
  return kConfigError;
}

int run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err) {
  std::vector<const char*> argv;
  argv.push_back("occutime");
  for (const auto& a : args) argv.push_back(a.c_str());
  return run(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace occutime::cli
