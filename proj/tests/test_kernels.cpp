#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>

#include "qtwist/errors.hpp"
#include "qtwist/kernels.hpp"
#include "qtwist/special.hpp"

using namespace qtwist;

namespace {

// Richardson-refined Simpson oracle for G_r(x) = int_1^T (log y)^r e^{-xy} dy
double gr_brute(int r, double x) {
    double T = 1.0 + (60.0 + 12.0 * r) / x;
    auto once = [&](int n) {
        double h = (T - 1.0) / n;
        double s = 0.0;
        for (int i = 0; i <= n; ++i) {
            double y = 1.0 + h * i;
            double f = std::pow(std::log(y), r) * std::exp(-x * y);
            s += (i == 0 || i == n) ? f : (i % 2 ? 4 * f : 2 * f);
        }
        return s * h / 3.0;
    };
    int n = 1 << 12;
    double v1 = once(n), v2 = once(2 * n);
    while (std::fabs(v1 - v2) > 1e-14 * std::fabs(v2) && n < (1 << 23)) {
        n *= 2;
        v1 = v2;
        v2 = once(2 * n);
    }
    return v2;
}

// complex gamma via Lanczos (test-only, for the contour oracle)
std::complex<double> cgamma(std::complex<double> z) {
    static const double c[9] = {0.99999999999980993,  676.5203681218851,
                                -1259.1392167224028,  771.32342877765313,
                                -176.61502916214059,  12.507343278686905,
                                -0.13857109526572012, 9.9843695780195716e-6,
                                1.5056327351493116e-7};
    if (z.real() < 0.5)
        return M_PI / (std::sin(M_PI * z) * cgamma(1.0 - z));
    z -= 1.0;
    std::complex<double> xx = c[0];
    for (int i = 1; i < 9; ++i) xx += c[i] / (z + static_cast<double>(i));
    std::complex<double> t = z + 7.5;
    return std::sqrt(2 * M_PI) * std::pow(t, z + 0.5) * std::exp(-t) * xx;
}

// direct contour integration of the W_gamma Mellin integral on Re s = 1
double w_contour(double gam, double x, long long q) {
    auto integrand = [&](double t) {
        std::complex<double> s(1.0, t);
        std::complex<double> gs = std::pow(2 * M_PI / std::sqrt((double)q), -s) *
                                  cgamma(1.0 + gam + s) / std::tgamma(1.0 + gam);
        return (gs / s * std::pow(x, -s)).real();
    };
    double T = 60.0, h = 1e-3;
    int n = static_cast<int>(2 * T / h);
    double s = 0.0;
    for (int i = 0; i <= n; ++i) {
        double t = -T + h * i;
        double f = integrand(t);
        s += (i == 0 || i == n) ? f : (i % 2 ? 4 * f : 2 * f);
    }
    return s * h / 3.0 / (2 * M_PI);
}

}  // namespace

TEST_CASE("g_r_weight closed forms and oracle") {
    CHECK(g_r_weight(0, 1.0) == doctest::Approx(std::exp(-1.0)).epsilon(1e-14));
    CHECK(g_r_weight(1, 1.0) == doctest::Approx(expint_e1(1.0)).epsilon(1e-14));
    for (int r : {2, 3, 5, 8, 11}) {
        for (double x : {0.02, 0.5, 3.0, 10.0, 25.0, 43.0}) {
            double ref = gr_brute(r, x);
            CHECK(g_r_weight(r, x) == doctest::Approx(ref).epsilon(1e-10));
        }
    }
    CHECK(g_r_weight(2, 10.0) == doctest::Approx(gr_brute(2, 10.0)).epsilon(1e-10));
    CHECK_THROWS_AS(g_r_weight(0, -1.0), math_error);
}

TEST_CASE("g_s_weight ties to incomplete gamma") {
    for (double s : {0.7, 1.0, 1.3}) {
        for (double x : {0.4, 1.0, 6.0}) {
            // oracle: int_1^inf y^{s-1} e^{-xy} dy by substitution z = xy
            double ref = std::pow(x, -s) * upper_gamma(s, x);
            CHECK(g_s_weight(s, x) == doctest::Approx(ref).epsilon(1e-13));
        }
    }
    // s = 1 reduces to G_0
    CHECK(g_s_weight(1.0, 2.0) == doctest::Approx(g_r_weight(0, 2.0)).epsilon(1e-13));
}

TEST_CASE("incomplete_gamma_weight") {
    // gamma = 0: W_0(x) = e^{-2 pi x / sqrt(q)}
    for (double x : {0.1, 1.0, 3.0})
        CHECK(incomplete_gamma_weight(0.0, x, 11) ==
              doctest::Approx(std::exp(-2 * M_PI * x / std::sqrt(11.0))).epsilon(1e-13));
    // x -> 0+ limit is 1 (deviation ~ z^{1+gamma}, z = 2 pi x / sqrt(q))
    CHECK(std::fabs(incomplete_gamma_weight(0.23, 1e-8, 11) - 1.0) < 1e-9);
    CHECK(std::fabs(incomplete_gamma_weight(0.23, 1e-12, 11) - 1.0) < 1e-10);
    // contour-integral oracle
    CHECK(incomplete_gamma_weight(0.1, 1.0, 11) ==
          doctest::Approx(w_contour(0.1, 1.0, 11)).epsilon(1e-8));
    CHECK(incomplete_gamma_weight(-0.2, 0.5, 32) ==
          doctest::Approx(w_contour(-0.2, 0.5, 32)).epsilon(1e-8));
    CHECK_THROWS_AS(incomplete_gamma_weight(0.0, -1.0, 11), math_error);
}

TEST_CASE("GrGrid interpolation accuracy") {
    GrGrid grid2(2, 1e-4, 50.0);
    GrGrid grid3(3, 1e-4, 50.0);
    for (double x = 2e-4; x < 45.0; x *= 1.77) {
        CHECK(grid2(x) == doctest::Approx(g_r_weight(2, x)).epsilon(1e-9));
        CHECK(grid3(x) == doctest::Approx(g_r_weight(3, x)).epsilon(1e-9));
    }
    // outside the grid: falls back to quadrature
    CHECK(grid2(60.0) == doctest::Approx(g_r_weight(2, 60.0)).epsilon(1e-11));
}
