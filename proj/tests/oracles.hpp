#pragma once

#include <functional>

#include "sdbbm/fractional_volterra.hpp"

// Test-only oracles, independent of the implementation paths they check.

namespace sdbbm::testing {

// Adaptive Simpson with absolute tolerance; recursion depth capped.
double adaptive_simpson(const std::function<double(double)>& f, double a,
                        double b, double tol = 1e-12, int max_depth = 48);

// e^{-z^2} int_0^z e^{t^2} dt by adaptive quadrature of exp(t^2 - z^2).
double dawson_quadrature_oracle(double z, double tol = 1e-14);

// sqrt(x) e^{-x} int_0^x e^y / sqrt(y) dy integrating the singular form
// directly: series on [0, eps], adaptive quadrature on [eps, x].
double q_quadrature_oracle(double x, double tol = 1e-12);

// Forcing integral sum_k theta_k int_0^s 1_{[0,t_k]}(1-u)/sqrt(2pi(s-u)) du
// integrating the raw integrand (discontinuous indicator, endpoint
// singularity handled by an exact kernel tail on [s - tail, s]).
double forcing_quadrature_oracle(const LaplaceSpec& spec, double s);

}  // namespace sdbbm::testing
