#include "qtwist/gauss.hpp"

#include <cmath>
#include <vector>

#include "qtwist/errors.hpp"

namespace qtwist {

namespace {

void require_odd_positive(i64 n) {
    if (n < 1 || n % 2 == 0)
        throw math_error("gauss sum: modulus must be odd and positive");
}

i64 euler_phi(i64 n) {
    i64 r = 1;
    for (i64 p = 2; p * p <= n; ++p) {
        if (n % p == 0) {
            i64 pk = 1;
            while (n % p == 0) {
                n /= p;
                pk *= p;
            }
            r *= pk - pk / p;
        }
    }
    if (n > 1) r *= n - 1;
    return r;
}

}  // namespace

GaussSumValue gauss_sum_direct(i64 k, i64 n) {
    require_odd_positive(n);
    if (n > 1000000) throw math_error("gauss_sum_direct: n too large (O(n) cost)");
    std::vector<signed char> jac(static_cast<size_t>(n));
    for (i64 a = 0; a < n; ++a) jac[static_cast<size_t>(a)] = static_cast<signed char>(kronecker(a, n));
    std::complex<double> s(0.0, 0.0);
    const double w = 2.0 * M_PI / static_cast<double>(n);
    i64 km = ((k % n) + n) % n;
    for (i64 a = 0; a < n; ++a) {
        int j = jac[static_cast<size_t>(a)];
        if (j == 0) continue;
        double ang = w * static_cast<double>(a * km % n);
        s += std::complex<double>(j * std::cos(ang), j * std::sin(ang));
    }
    std::complex<double> pref =
        std::complex<double>(0.5, -0.5) +
        static_cast<double>(kronecker(-1, n)) * std::complex<double>(0.5, 0.5);
    std::complex<double> v = pref * s;
    return {v.real(), v.imag()};
}

namespace {

// G_k(p^beta) per the five-case prime-power table (alpha = v_p(k)).
double gauss_prime_power(i64 k, i64 p, int beta) {
    int alpha;
    i64 kfree = 0;
    if (k == 0) {
        alpha = beta + 2;  // effectively infinity
    } else {
        alpha = 0;
        i64 kk = k;
        while (kk % p == 0) {
            kk /= p;
            ++alpha;
        }
        kfree = kk;
    }
    if (beta <= alpha) {
        if (beta % 2 == 1) return 0.0;
        i64 pb = 1;
        for (int i = 0; i < beta; ++i) pb *= p;
        return static_cast<double>(euler_phi(pb));
    }
    if (beta == alpha + 1) {
        double pa = std::pow(static_cast<double>(p), alpha);
        if (beta % 2 == 0) return -pa;
        return kronecker(kfree, p) * pa * std::sqrt(static_cast<double>(p));
    }
    return 0.0;  // beta >= alpha + 2
}

}  // namespace

GaussSumValue gauss_sum_closed(i64 k, i64 n) {
    require_odd_positive(n);
    double val = 1.0;
    i64 m = n;
    for (i64 p = 3; p * p <= m && val != 0.0; p += 2) {
        if (m % p) continue;
        int beta = 0;
        while (m % p == 0) {
            m /= p;
            ++beta;
        }
        val *= gauss_prime_power(k, p, beta);
    }
    if (m > 1 && val != 0.0) val *= gauss_prime_power(k, m, 1);
    return {val, 0.0};
}

double fourier_cos_sin_transform(const std::function<double(double)>& F, double y,
                                 double support_radius) {
    // Simpson on a fixed fine grid, then one refinement as a convergence check.
    auto integrate = [&](int nseg) {
        double a = -support_radius, b = support_radius;
        double h = (b - a) / nseg;
        double s = 0.0;
        for (int i = 0; i <= nseg; ++i) {
            double x = a + h * i;
            double ang = 2.0 * M_PI * x * y;
            double f = (std::cos(ang) + std::sin(ang)) * F(x);
            double wgt = (i == 0 || i == nseg) ? 1.0 : (i % 2 ? 4.0 : 2.0);
            s += wgt * f;
        }
        return s * h / 3.0;
    };
    int n = 1 << 12;
    double v1 = integrate(n), v2 = integrate(2 * n);
    while (std::fabs(v2 - v1) > 1e-11 && n < (1 << 20)) {
        n *= 2;
        v1 = v2;
        v2 = integrate(2 * n);
    }
    return v2;
}

double poisson_check(i64 n, double Z, PoissonVariant variant) {
    require_odd_positive(n);
    if (n > 999) throw math_error("poisson_check: n must be <= 999");
    if (Z <= 0) throw math_error("poisson_check: Z must be positive");
    auto F = [](double x) { return std::exp(-M_PI * x * x); };
    auto Fc = [](double y) { return std::exp(-M_PI * y * y); };
    const double reach = 3.8;  // e^{-pi t^2} < 1e-16 beyond |t| = 3.8
    i64 dmax = static_cast<i64>(reach * Z) + 1;
    double lhs = 0.0, rhs = 0.0;
    if (variant == PoissonVariant::all_d) {
        for (i64 d = -dmax; d <= dmax; ++d)
            lhs += kronecker(d, n) * F(static_cast<double>(d) / Z);
        i64 kmax = static_cast<i64>(reach * static_cast<double>(n) / Z) + 1;
        for (i64 k = -kmax; k <= kmax; ++k)
            rhs += gauss_sum_closed(k, n).re * Fc(static_cast<double>(k) * Z / static_cast<double>(n));
        rhs *= Z / static_cast<double>(n);
    } else {
        for (i64 d = -dmax; d <= dmax; ++d)
            if (d % 2 != 0) lhs += kronecker(d, n) * F(static_cast<double>(d) / Z);
        i64 kmax = static_cast<i64>(2.0 * reach * static_cast<double>(n) / Z) + 1;
        for (i64 k = -kmax; k <= kmax; ++k) {
            double sgn = (k % 2 == 0) ? 1.0 : -1.0;
            rhs += sgn * gauss_sum_closed(k, n).re *
                   Fc(static_cast<double>(k) * Z / (2.0 * static_cast<double>(n)));
        }
        rhs *= Z / (2.0 * static_cast<double>(n)) * kronecker(2, n);
    }
    return std::fabs(lhs - rhs);
}

}  // namespace qtwist
