#pragma once

#include <cstdint>

namespace qtwist {

inline constexpr double euler_gamma = 0.57721566490153286060651209008240243;

// Exponential integral E1(x), x > 0.  Series below 1, modified-Lentz
// continued fraction above; relative accuracy ~1e-15.
double expint_e1(double x);

// Regularized upper incomplete gamma Q(a,x) = Gamma(a,x)/Gamma(a), a > 0,
// x >= 0.  Series for x < a+1, continued fraction otherwise.
double gamma_q(double a, double x);

// Unnormalized upper incomplete gamma Gamma(a,x).
double upper_gamma(double a, double x);

// Riemann zeta at integer s >= 2.
double zeta_int(int s);

// Euler beta function B(a,b) = Gamma(a)Gamma(b)/Gamma(a+b).
double beta_function(double a, double b);

}  // namespace qtwist
