#pragma once

#include <vector>

namespace qtwist {

// G_r(x) = int_1^inf (log y)^r e^{-x y} dy, x > 0.
// r = 0,1 in closed form (e^{-x}/x and E1(x)/x); r >= 2 by adaptive
// Gauss-Legendre on [1, 1 + (40+10r)/x] with a certified tail bound,
// relative accuracy ~1e-12.
double g_r_weight(int r, double x);

// Off-center kernel int_1^inf y^{s-1} e^{-x y} dy = x^{-s} Gamma(s, x),
// 0 < s < 2.  Used by the functional-equation residual probe.
double g_s_weight(double s, double x);

// W_gamma(x) of the approximate functional equation at the critical value:
// Gamma(1+gamma, 2 pi x / sqrt(q)) / Gamma(1+gamma).
double incomplete_gamma_weight(double gamma_shift, double x, long long q);

// Memoized G_r on a log-spaced grid (cubic interpolation of log G_r against
// log x).  Built once before parallel fan-out, read-only afterwards.
// Interpolation error budget 1e-9 relative.
class GrGrid {
  public:
    GrGrid(int r, double x_min, double x_max);
    double operator()(double x) const;
    int order() const { return r_; }

  private:
    int r_;
    double u0_, du_;
    std::vector<double> logg_;
};

}  // namespace qtwist
