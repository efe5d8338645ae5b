#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace occutime {

using Complex = std::complex<double>;

// Any callable s -> h(s), where h is the Laplace transform of p_t(0,0).
using HEvaluator = std::function<Complex(Complex)>;

struct Transition {
  std::size_t target;
  double rate;
};

// Finite, conservative, irreducible rate matrix. Immutable; copies share
// storage.
class GeneratorMatrix {
 public:
  // Validates off-diagonal signs, zero row sums (1e-12) and strong
  // connectivity. Throws Error(NegativeRate | NonConservative | Reducible |
  // InvalidArgument).
  static GeneratorMatrix validate(const Eigen::MatrixXd& raw);

  std::size_t size() const noexcept;
  const Eigen::MatrixXd& rates() const noexcept;
  double rate(std::size_t from, std::size_t to) const;
  // q_j = sum_{m != j} lambda_{j,m}
  double exit_rate(std::size_t state) const;
  // Positive off-diagonal rates leaving `state`.
  std::span<const Transition> transitions(std::size_t state) const;
  bool is_tridiagonal() const noexcept;

 private:
  struct Data;
  explicit GeneratorMatrix(std::shared_ptr<const Data> data);
  std::shared_ptr<const Data> data_;
};

GeneratorMatrix validate_generator(const Eigen::MatrixXd& raw);

GeneratorMatrix two_state_generator(double lambda, double mu);

// Birth rates lambda_k (k >= 0) and death rates mu_k (k >= 1) of a possibly
// infinite birth-death chain, materialized only through truncation.
class BirthDeathSpec {
 public:
  using RateRule = std::function<double(std::size_t)>;

  BirthDeathSpec(RateRule birth, RateRule death, std::size_t truncation_hint);

  // lambda_0 = r, every other rate 1.
  static BirthDeathSpec equal_rate(double r, std::size_t truncation_hint = 400);

  // birth = {lambda_0, lambda_1, ...}, death = {mu_1, mu_2, ...}; the last
  // entry of each list repeats beyond its end.
  static BirthDeathSpec from_lists(std::vector<double> birth,
                                   std::vector<double> death,
                                   std::size_t truncation_hint);

  // Both throw Error(InvalidArgument) unless the rate is finite and > 0.
  double birth(std::size_t k) const;
  double death(std::size_t k) const;

  std::size_t truncation_hint() const noexcept { return truncation_hint_; }

 private:
  RateRule birth_;
  RateRule death_;
  std::size_t truncation_hint_;
};

// N x N reflecting finite section: last diagonal entry is -mu_{N-1}.
GeneratorMatrix truncate_birth_death(const BirthDeathSpec& spec, std::size_t n);

double exit_rate(const GeneratorMatrix& q, std::size_t state);

// Solution y of (Q - sI) y = e_0. Throws Error(SingularSystem).
Eigen::VectorXcd resolvent_e0(const GeneratorMatrix& q, Complex s);

// h(s) = -((Q - sI)^{-1} e_0, e_0).
Complex h_value(const GeneratorMatrix& q, Complex s);

HEvaluator make_h_evaluator(const GeneratorMatrix& q);

// Excursion transform d(s) = s + q_0 - 1/h(s) = r^T (sI - Q_rest)^{-1} c,
// with r, c the rates out of and into state 0 and Q_rest the generator with
// state 0 removed. Free of the cancellation in s - 1/h(s) at large |s|.
Complex excursion_value(const GeneratorMatrix& q, Complex s);

HEvaluator make_excursion_evaluator(const GeneratorMatrix& q);

// h(s) = 1 / (s + exit_rate - gamma1/(s+beta1) - gamma2/(s+beta2)).
// exit_rate = 0 gives the bare partial-fraction form; the chain-consistent
// value is gamma1/beta1 + gamma2/beta2.
// Throws Error(PoleAtS) at s = -beta_i and Error(ZeroDenominator) when 1/h
// vanishes.
Complex h_three_state(double gamma1, double gamma2, double beta1, double beta2,
                      Complex s, double exit_rate = 0.0);

// Star chain 0 <-> 1, 0 <-> 2 whose h is h_three_state with the
// chain-consistent exit rate.
GeneratorMatrix three_state_generator(double gamma1, double gamma2,
                                      double beta1, double beta2);

// gamma1/(s+beta1) + gamma2/(s+beta2): excursion transform of the star chain.
Complex excursion_three_state(double gamma1, double gamma2, double beta1,
                              double beta2, Complex s);

// 2 / ((2-r)s + r sqrt(s) sqrt(s+4)), analytic off [-4, 0].
Complex h_equal_rate(double r, Complex s);

// 2r / (s + 2 + sqrt(s) sqrt(s+4)), the excursion transform matching
// h_equal_rate.
Complex excursion_equal_rate(double r, Complex s);

// E[occupation of state 0 on [0,t]] = int_0^t p_u(0,0) du, uniformization
// plus adaptive quadrature.
double occupation_mean(const GeneratorMatrix& q, double t);

}  // namespace occutime
