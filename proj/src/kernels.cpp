#include "qtwist/kernels.hpp"

#include <cmath>

#include "qtwist/errors.hpp"
#include "qtwist/special.hpp"

namespace qtwist {

namespace {

// 15-point Gauss-Legendre nodes/weights on [-1,1].
constexpr int GLN = 15;
constexpr double gl_x[GLN] = {
    0.0000000000000000,  -0.2011940939974345, 0.2011940939974345,
    -0.3941513470775634, 0.3941513470775634,  -0.5709721726085388,
    0.5709721726085388,  -0.7244177313601701, 0.7244177313601701,
    -0.8482065834104272, 0.8482065834104272,  -0.9372733924007060,
    0.9372733924007060,  -0.9879925180204854, 0.9879925180204854};
constexpr double gl_w[GLN] = {
    0.2025782419255613, 0.1984314853271116, 0.1984314853271116,
    0.1861610000155622, 0.1861610000155622, 0.1662692058169939,
    0.1662692058169939, 0.1395706779261543, 0.1395706779261543,
    0.1071592204671719, 0.1071592204671719, 0.0703660474881081,
    0.0703660474881081, 0.0307532419961173, 0.0307532419961173};

// integrand in u = log y:  u^r * exp(u - x e^u)
double gr_integrand(int r, double x, double u) {
    double v = u - x * std::exp(u);
    if (v < -745.0) return 0.0;
    return std::pow(u, r) * std::exp(v);
}

double gl15(int r, double x, double a, double b) {
    double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    double s = 0.0;
    for (int i = 0; i < GLN; ++i) s += gl_w[i] * gr_integrand(r, x, mid + half * gl_x[i]);
    return s * half;
}

double adapt(int r, double x, double a, double b, double whole, double tol, int depth) {
    double m = 0.5 * (a + b);
    double left = gl15(r, x, a, m), right = gl15(r, x, m, b);
    if (depth > 40 || std::fabs(left + right - whole) <= tol)
        return left + right;
    return adapt(r, x, a, m, left, 0.5 * tol, depth + 1) +
           adapt(r, x, m, b, right, 0.5 * tol, depth + 1);
}

}  // namespace

double g_r_weight(int r, double x) {
    if (x <= 0) throw math_error("g_r_weight: x must be positive");
    if (r < 0) throw math_error("g_r_weight: r must be nonnegative");
    if (r == 0) return std::exp(-x) / x;
    if (r == 1) {
        if (x > 700.0) return 0.0;
        return expint_e1(x) / x;
    }
    double T = 1.0 + (40.0 + 10.0 * r) / x;
    double ub = std::log(T);
    // coarse pass to get a scale, then adaptive refinement
    double coarse = 0.0;
    const int segs = 8;
    for (int i = 0; i < segs; ++i)
        coarse += gl15(r, x, ub * i / segs, ub * (i + 1) / segs);
    if (coarse == 0.0) return 0.0;
    double tol = 1e-13 * std::fabs(coarse);
    double total = 0.0;
    for (int i = 0; i < segs; ++i) {
        double a = ub * i / segs, b = ub * (i + 1) / segs;
        total += adapt(r, x, a, b, gl15(r, x, a, b), tol / segs, 0);
    }
    return total;
}

double g_s_weight(double s, double x) {
    if (x <= 0) throw math_error("g_s_weight: x must be positive");
    if (s <= 0 || s >= 2) throw math_error("g_s_weight: s must lie in (0,2)");
    if (x > 700.0) return 0.0;
    return std::pow(x, -s) * upper_gamma(s, x);
}

double incomplete_gamma_weight(double gamma_shift, double x, long long q) {
    if (x <= 0) throw math_error("incomplete_gamma_weight: x must be positive");
    if (std::fabs(gamma_shift) > 0.5)
        throw math_error("incomplete_gamma_weight: |gamma_shift| must be <= 1/2");
    double z = 2.0 * M_PI * x / std::sqrt(static_cast<double>(q));
    if (z > 700.0) return 0.0;
    return gamma_q(1.0 + gamma_shift, z);
}

GrGrid::GrGrid(int r, double x_min, double x_max) : r_(r) {
    if (r < 2) throw math_error("GrGrid: grid only serves r >= 2");
    if (!(x_min > 0) || !(x_max > x_min)) throw math_error("GrGrid: bad range");
    du_ = 1.0 / 256.0;
    u0_ = std::log(x_min) - 2 * du_;
    double u1 = std::log(x_max) + 2 * du_;
    size_t npts = static_cast<size_t>((u1 - u0_) / du_) + 4;
    logg_.resize(npts);
    for (size_t i = 0; i < npts; ++i)
        logg_[i] = std::log(g_r_weight(r_, std::exp(u0_ + du_ * static_cast<double>(i))));
}

double GrGrid::operator()(double x) const {
    double u = std::log(x);
    double t = (u - u0_) / du_;
    auto k = static_cast<long>(t);
    if (k < 1 || static_cast<size_t>(k) + 2 >= logg_.size())
        return g_r_weight(r_, x);  // outside the grid: fall back to quadrature
    double f = t - static_cast<double>(k);
    // Catmull-Rom through the four surrounding samples
    double y0 = logg_[static_cast<size_t>(k) - 1], y1 = logg_[static_cast<size_t>(k)],
           y2 = logg_[static_cast<size_t>(k) + 1], y3 = logg_[static_cast<size_t>(k) + 2];
    double a0 = -0.5 * y0 + 1.5 * y1 - 1.5 * y2 + 0.5 * y3;
    double a1 = y0 - 2.5 * y1 + 2.0 * y2 - 0.5 * y3;
    double a2 = -0.5 * y0 + 0.5 * y2;
    return std::exp(((a0 * f + a1) * f + a2) * f + y1);
}

}  // namespace qtwist
