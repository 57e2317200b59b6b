#pragma once

#include <complex>
#include <functional>

#include "qtwist/arith.hpp"

namespace qtwist {

// Value of the character sum G_k(n).  The closed form is always real
// (an integer or an integer multiple of sqrt(p)); the direct sum is
// evaluated in complex arithmetic and its imaginary part must vanish.
struct GaussSumValue {
    double re = 0.0;
    double im = 0.0;
};

// G_k(n) = ((1-i)/2 + (-1|n)(1+i)/2) * sum_{a mod n} (a|n) e(ak/n),
// evaluated literally.  n odd, 1 <= n <= 10^6.
GaussSumValue gauss_sum_direct(i64 k, i64 n);

// G_k(n) via the multiplicative prime-power case table; O(log n) after
// trial-division factorization.
GaussSumValue gauss_sum_closed(i64 k, i64 n);

enum class PoissonVariant { all_d, odd_d };

// |LHS - RHS| of the twisted Poisson identity with F(x) = e^{-pi x^2}
// (so F-check(y) = e^{-pi y^2}).  n odd, n <= 999.
double poisson_check(i64 n, double Z, PoissonVariant variant);

// F-check(y) = int (cos(2 pi x y) + sin(2 pi x y)) F(x) dx by adaptive
// quadrature, absolute accuracy ~1e-10.  F must decay rapidly.
double fourier_cos_sin_transform(const std::function<double(double)>& F, double y,
                                 double support_radius = 8.0);

}  // namespace qtwist
