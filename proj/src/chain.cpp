#include "occutime/chain.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <string>


#include "occutime/error.hpp"

namespace occutime {

struct GeneratorMatrix::Data {
  Eigen::MatrixXd rates;
  std::vector<std::vector<Transition>> out;
  bool tridiagonal = false;
};

namespace {

bool all_reachable(const std::vector<std::vector<std::size_t>>& adjacency) {
  std::vector<bool> seen(adjacency.size(), false);
  std::queue<std::size_t> frontier;
  frontier.push(0);
  seen[0] = true;
  std::size_t count = 1;
  while (!frontier.empty()) {
    const auto v = frontier.front();
    frontier.pop();
    for (auto w : adjacency[v]) {
      if (!seen[w]) {
        seen[w] = true;
        ++count;
        frontier.push(w);
      }
    }
  }
  return count == adjacency.size();
}

std::string entry_name(Eigen::Index i, Eigen::Index j) {
  return "(" + std::to_string(i) + "," + std::to_string(j) + ")";
}

}  // namespace

GeneratorMatrix::GeneratorMatrix(std::shared_ptr<const Data> data)
    : data_(std::move(data)) {}

GeneratorMatrix GeneratorMatrix::validate(const Eigen::MatrixXd& raw) {
  if (raw.rows() != raw.cols() || raw.rows() < 2) {
    throw Error(ErrorCode::InvalidArgument,
                "generator must be square with at least 2 states");
  }
  const Eigen::Index n = raw.rows();
  if (!raw.allFinite()) {
    throw Error(ErrorCode::InvalidArgument, "generator has non-finite entries");
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      if (i != j && raw(i, j) < 0.0) {
        throw Error(ErrorCode::NegativeRate,
                    "off-diagonal entry " + entry_name(i, j) + " is negative");
      }
    }
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    const double scale = std::max(1.0, raw.row(i).cwiseAbs().maxCoeff());
    const double sum = raw.row(i).sum();
    if (std::abs(sum) > 1e-12 * scale) {
      throw Error(ErrorCode::NonConservative,
                  "row " + std::to_string(i) + " sums to " + std::to_string(sum));
    }
  }

  auto data = std::make_shared<Data>();
  data->rates = raw;
  data->out.resize(static_cast<std::size_t>(n));
  std::vector<std::vector<std::size_t>> forward(n), backward(n);
  bool tridiagonal = true;
  for (Eigen::Index i = 0; i < n; ++i) {
    // Store the exact negative off-diagonal sum on the diagonal.
    double exit = 0.0;
    for (Eigen::Index j = 0; j < n; ++j) {
      if (i == j || raw(i, j) == 0.0) continue;
      exit += raw(i, j);
      data->out[i].push_back({static_cast<std::size_t>(j), raw(i, j)});
      forward[i].push_back(j);
      backward[j].push_back(i);
      if (std::abs(i - j) > 1) tridiagonal = false;
    }
    data->rates(i, i) = -exit;
  }
  if (!all_reachable(forward) || !all_reachable(backward)) {
    throw Error(ErrorCode::Reducible,
                "positive rates do not form a strongly connected graph");
  }
  data->tridiagonal = tridiagonal;
  return GeneratorMatrix(std::move(data));
}

std::size_t GeneratorMatrix::size() const noexcept {
  return static_cast<std::size_t>(data_->rates.rows());
}

const Eigen::MatrixXd& GeneratorMatrix::rates() const noexcept {
  return data_->rates;
}

double GeneratorMatrix::rate(std::size_t from, std::size_t to) const {
  return data_->rates(static_cast<Eigen::Index>(from),
                      static_cast<Eigen::Index>(to));
}

double GeneratorMatrix::exit_rate(std::size_t state) const {
  return -rate(state, state);
}

std::span<const Transition> GeneratorMatrix::transitions(
    std::size_t state) const {
  return data_->out.at(state);
}

bool GeneratorMatrix::is_tridiagonal() const noexcept {
  return data_->tridiagonal;
}

GeneratorMatrix validate_generator(const Eigen::MatrixXd& raw) {
  return GeneratorMatrix::validate(raw);
}

GeneratorMatrix two_state_generator(double lambda, double mu) {
  Eigen::MatrixXd raw(2, 2);
  raw << -lambda, lambda, mu, -mu;
  return GeneratorMatrix::validate(raw);
}

BirthDeathSpec::BirthDeathSpec(RateRule birth, RateRule death,
                               std::size_t truncation_hint)
    : birth_(std::move(birth)),
      death_(std::move(death)),
      truncation_hint_(truncation_hint) {
  if (!birth_ || !death_) {
    throw Error(ErrorCode::InvalidArgument, "birth-death rules must be set");
  }
  if (truncation_hint_ < 2) {
    throw Error(ErrorCode::InvalidArgument, "truncation level must be >= 2");
  }
}

BirthDeathSpec BirthDeathSpec::equal_rate(double r,
                                          std::size_t truncation_hint) {
  if (!(r > 0.0) || !std::isfinite(r)) {
    throw Error(ErrorCode::InvalidArgument, "equal-rate r must be positive");
  }
  return BirthDeathSpec([r](std::size_t k) { return k == 0 ? r : 1.0; },
                        [](std::size_t) { return 1.0; }, truncation_hint);
}

BirthDeathSpec BirthDeathSpec::from_lists(std::vector<double> birth,
                                          std::vector<double> death,
                                          std::size_t truncation_hint) {
  if (birth.empty() || death.empty()) {
    throw Error(ErrorCode::InvalidArgument,
                "birth and death lists must be non-empty");
  }
  auto birth_rule = [b = std::move(birth)](std::size_t k) {
    return b[std::min(k, b.size() - 1)];
  };
  auto death_rule = [d = std::move(death)](std::size_t k) {
    // d[0] holds mu_1.
    return d[std::min(k == 0 ? 0 : k - 1, d.size() - 1)];
  };
  return BirthDeathSpec(std::move(birth_rule), std::move(death_rule),
                        truncation_hint);
}

double BirthDeathSpec::birth(std::size_t k) const {
  const double v = birth_(k);
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw Error(ErrorCode::InvalidArgument,
                "birth rate lambda_" + std::to_string(k) + " must be positive");
  }
  return v;
}

double BirthDeathSpec::death(std::size_t k) const {
  if (k == 0) {
    throw Error(ErrorCode::InvalidArgument, "death rates start at mu_1");
  }
  const double v = death_(k);
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw Error(ErrorCode::InvalidArgument,
                "death rate mu_" + std::to_string(k) + " must be positive");
  }
  return v;
}

GeneratorMatrix truncate_birth_death(const BirthDeathSpec& spec,
                                     std::size_t n) {
  if (n < 2) {
    throw Error(ErrorCode::InvalidArgument, "truncation level must be >= 2");
  }
  const auto size = static_cast<Eigen::Index>(n);
  Eigen::MatrixXd raw = Eigen::MatrixXd::Zero(size, size);
  for (Eigen::Index k = 0; k + 1 < size; ++k) {
    raw(k, k + 1) = spec.birth(static_cast<std::size_t>(k));
    raw(k + 1, k) = spec.death(static_cast<std::size_t>(k + 1));
  }
  for (Eigen::Index k = 0; k < size; ++k) raw(k, k) = -raw.row(k).sum();
  return GeneratorMatrix::validate(raw);
}

double exit_rate(const GeneratorMatrix& q, std::size_t state) {
  return q.exit_rate(state);
}

namespace {

constexpr double kPivotFloor = 1e-300;

// Solves (A - sI) y = b for tridiagonal A by elimination without pivoting;
// accepts the result only when the residual is clean.
template <class Matrix>
bool thomas_solve(const Matrix& a, Complex s, const Eigen::VectorXcd& b,
                  Eigen::VectorXcd& y) {
  const Eigen::Index n = a.rows();
  std::vector<Complex> c_prime(n), d_prime(n);
  Complex pivot = a(0, 0) - s;
  if (std::abs(pivot) < kPivotFloor) return false;
  c_prime[0] = n > 1 ? a(0, 1) / pivot : Complex(0.0);
  d_prime[0] = b[0] / pivot;
  for (Eigen::Index i = 1; i < n; ++i) {
    pivot = (a(i, i) - s) - a(i, i - 1) * c_prime[i - 1];
    if (std::abs(pivot) < kPivotFloor) return false;
    c_prime[i] = i + 1 < n ? a(i, i + 1) / pivot : Complex(0.0);
    d_prime[i] = (b[i] - a(i, i - 1) * d_prime[i - 1]) / pivot;
  }
  y.resize(n);
  y[n - 1] = d_prime[n - 1];
  for (Eigen::Index i = n - 2; i >= 0; --i) {
    y[i] = d_prime[i] - c_prime[i] * y[i + 1];
  }
  double residual = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    Complex r = (a(i, i) - s) * y[i] - b[i];
    if (i > 0) r += a(i, i - 1) * y[i - 1];
    if (i + 1 < n) r += a(i, i + 1) * y[i + 1];
    residual += std::norm(r);
  }
  return std::isfinite(residual) &&
         std::sqrt(residual) <= 1e-12 * std::max(b.norm(), y.norm());
}

// Solution of (A - sI) y = b: tridiagonal fast path, then dense LU.
template <class Matrix>
Eigen::VectorXcd shifted_solve(const Matrix& a, bool tridiagonal, Complex s,
                               const Eigen::VectorXcd& b) {
  if (!std::isfinite(s.real()) || !std::isfinite(s.imag())) {
    throw Error(ErrorCode::InvalidArgument, "non-finite Laplace variable");
  }
  Eigen::VectorXcd y;
  if (tridiagonal && thomas_solve(a, s, b, y)) return y;

  Eigen::MatrixXcd system = a.template cast<Complex>();
  system.diagonal().array() -= s;
  Eigen::PartialPivLU<Eigen::MatrixXcd> lu(system);
  const double min_pivot = lu.matrixLU().diagonal().cwiseAbs().minCoeff();
  if (!(min_pivot >= kPivotFloor)) {
    throw Error(ErrorCode::SingularSystem,
                "Q - sI is singular at s = (" + std::to_string(s.real()) +
                    ", " + std::to_string(s.imag()) + ")");
  }
  y = lu.solve(b);
  if (!y.allFinite()) {
    throw Error(ErrorCode::SingularSystem,
                "resolvent solve produced non-finite values");
  }
  return y;
}

}  // namespace

Eigen::VectorXcd resolvent_e0(const GeneratorMatrix& q, Complex s) {
  Eigen::VectorXcd rhs = Eigen::VectorXcd::Zero(q.rates().rows());
  rhs[0] = 1.0;
  return shifted_solve(q.rates(), q.is_tridiagonal(), s, rhs);
}

Complex h_value(const GeneratorMatrix& q, Complex s) {
  return -resolvent_e0(q, s)[0];
}

HEvaluator make_h_evaluator(const GeneratorMatrix& q) {
  return [q](Complex s) { return h_value(q, s); };
}

Complex excursion_value(const GeneratorMatrix& q, Complex s) {
  const auto& a = q.rates();
  const Eigen::Index m = a.rows() - 1;
  const auto rest = a.bottomRightCorner(m, m);
  // (Q_rest - sI) w = -c with c_j = lambda_{j,0}; d = sum_j lambda_{0,j} w_j.
  const Eigen::VectorXcd c = -a.col(0).tail(m).cast<Complex>();
  const Eigen::VectorXcd w = shifted_solve(rest, q.is_tridiagonal(), s, c);
  return a.row(0).tail(m).cast<Complex>().dot(w);
}

HEvaluator make_excursion_evaluator(const GeneratorMatrix& q) {
  return [q](Complex s) { return excursion_value(q, s); };
}

Complex h_three_state(double gamma1, double gamma2, double beta1, double beta2,
                      Complex s, double exit_rate) {
  auto pole_check = [&](double beta) {
    if (std::abs(s + beta) <= 1e-14 * std::max(1.0, beta)) {
      throw Error(ErrorCode::PoleAtS, "s coincides with -beta");
    }
  };
  pole_check(beta1);
  pole_check(beta2);
  const Complex p1 = gamma1 / (s + beta1);
  const Complex p2 = gamma2 / (s + beta2);
  const Complex reciprocal = s + exit_rate - p1 - p2;
  const double scale = std::abs(s) + exit_rate + std::abs(p1) + std::abs(p2);
  if (std::abs(reciprocal) <= 1e-14 * scale) {
    throw Error(ErrorCode::ZeroDenominator, "1/h vanishes at s");
  }
  return 1.0 / reciprocal;
}

GeneratorMatrix three_state_generator(double gamma1, double gamma2,
                                      double beta1, double beta2) {
  if (!(gamma1 > 0 && gamma2 > 0 && beta1 > 0 && beta2 > 0)) {
    throw Error(ErrorCode::InvalidArgument,
                "three-state gamma and beta must be positive");
  }
  const double to1 = gamma1 / beta1;
  const double to2 = gamma2 / beta2;
  Eigen::MatrixXd raw(3, 3);
  raw << -(to1 + to2), to1, to2,
         beta1, -beta1, 0.0,
         beta2, 0.0, -beta2;
  return GeneratorMatrix::validate(raw);
}

Complex h_equal_rate(double r, Complex s) {
  const Complex root = std::sqrt(s) * std::sqrt(s + 4.0);
  return 2.0 / ((2.0 - r) * s + r * root);
}

Complex excursion_three_state(double gamma1, double gamma2, double beta1,
                              double beta2, Complex s) {
  // Poles are rejected exactly as in h_three_state.
  (void)h_three_state(gamma1, gamma2, beta1, beta2, s,
                      gamma1 / beta1 + gamma2 / beta2);
  return gamma1 / (s + beta1) + gamma2 / (s + beta2);
}

Complex excursion_equal_rate(double r, Complex s) {
  return 2.0 * r / (s + 2.0 + std::sqrt(s) * std::sqrt(s + 4.0));
}

double occupation_mean(const GeneratorMatrix& q, double t) {
  if (!(t > 0.0) || !std::isfinite(t)) {
    throw Error(ErrorCode::InvalidArgument, "horizon must be positive");
  }
  const std::size_t n = q.size();
  double uniform_rate = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    uniform_rate = std::max(uniform_rate, q.exit_rate(j));
  }
  const double lt = uniform_rate * t;
  const auto terms =
      static_cast<std::size_t>(std::ceil(lt + 10.0 * std::sqrt(lt) + 30.0));

  // return_prob[k] = (P^k)_{00} with P = I + Q / uniform_rate.
  std::vector<double> return_prob(terms + 1);
  std::vector<double> v(n, 0.0), next(n);
  v[0] = 1.0;
  return_prob[0] = 1.0;
  for (std::size_t k = 1; k <= terms; ++k) {
    for (std::size_t i = 0; i < n; ++i) {
      double acc = v[i] * (1.0 - q.exit_rate(i) / uniform_rate);
      for (const auto& tr : q.transitions(i)) {
        acc += tr.rate / uniform_rate * v[tr.target];
      }
      next[i] = acc;
    }
    v.swap(next);
    return_prob[k] = v[0];
  }

  // Integral over [0, t] of Poisson(k; uniform_rate u) is
  // P(N > k) / uniform_rate with N ~ Poisson(lt): suffix sums of the pmf.
  const std::size_t tail_terms =
      terms + static_cast<std::size_t>(std::ceil(10.0 * std::sqrt(lt) + 30.0));
  std::vector<double> pmf(tail_terms + 1);
  const double log_lt = std::log(lt);
  for (std::size_t j = 0; j <= tail_terms; ++j) {
    const double jd = static_cast<double>(j);
    pmf[j] = std::exp(-lt + jd * log_lt - std::lgamma(jd + 1.0));
  }
  double tail = 0.0, mean = 0.0;
  for (std::size_t j = tail_terms; j >= 1; --j) {
    tail += pmf[j];  // P(N >= j)
    if (j - 1 <= terms) mean += return_prob[j - 1] * tail;
  }
  return mean / uniform_rate;
}

}  // namespace occutime
