#pragma once

#include <cstddef>

#include "occutime/transforms.hpp"

namespace occutime {

inline constexpr std::size_t kDefaultGridPoints = 400;

// Two-state chain, 0 -> 1 at rate lambda and 1 -> 0 at rate mu.
// Continuous part on [0, t], continuous extension at both ends.
double two_state_density_at(double lambda, double mu, double t, double x);

OccupationDensity two_state_density(double lambda, double mu, double t,
                                    std::size_t grid_points = kDefaultGridPoints);

// e^{-x(s1+lambda)} e^{lambda mu x/(s1+mu)} (1 + lambda/(s1+mu)).
// Throws Error(PoleAtS) at s1 = -mu.
Complex two_state_transform(double lambda, double mu, Complex s1, double x);

// Birth-death chain with lambda_0 = r and every other rate 1, infinite state
// space. Continuous part on [0, t].
double equal_rate_bd_density_at(double r, double t, double x);

OccupationDensity equal_rate_bd_density(double r, double t,
                                        std::size_t grid_points = kDefaultGridPoints);

// D/(2 s1) exp(-x D/2), D = (2-r) s1 + r sqrt(s1) sqrt(s1+4).
Complex equal_rate_bd_transform(double r, Complex s1, double x);

}  // namespace occutime
