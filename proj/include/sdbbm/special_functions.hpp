#pragma once

// Scaled-exponential integrals behind the occupation-time limit law.
//
//   dawson_core(z) = e^{-z^2} \int_0^z e^{t^2} dt            (z >= 0)
//   q_function(x)  = sqrt(x) e^{-x} \int_0^x e^y / sqrt(y) dy (x >= 0)
//
// The substitution y = t^2 turns the singular integrand of q_function into
// the Dawson integral: q_function(x) = 2 sqrt(x) dawson_core(sqrt(x)).
// Absolute accuracy: dawson_core <= 1e-12, q_function <= 1e-10.
// q_function is bounded (max ~1.2847 near x ~ 2.256) and tends to 1.

namespace sdbbm {

// Throws std::domain_error for negative or non-finite input.
double dawson_core(double z);
double q_function(double x);

}  // namespace sdbbm
