#include "qtwist/special.hpp"

#include <cmath>
#include <limits>

#include "qtwist/errors.hpp"

namespace qtwist {

double expint_e1(double x) {
    if (x <= 0) throw math_error("expint_e1: argument must be positive");
    if (x < 1.0) {
        // E1(x) = -gamma - log x + sum_{k>=1} (-1)^{k+1} x^k / (k * k!)
        double sum = 0.0, term = 1.0;
        for (int k = 1; k <= 40; ++k) {
            term *= -x / k;
            double add = -term / k;
            sum += add;
            if (std::fabs(add) < 1e-18 * std::fabs(sum) + 1e-300) break;
        }
        return sum - euler_gamma - std::log(x);
    }
    // E1(x) = e^{-x} * 1/(x+1- 1/(x+3- 4/(x+5- 9/(x+7- ...))))  (Lentz)
    const double tiny = 1e-300;
    double b = x + 1.0, c = 1.0 / tiny, d = 1.0 / b, h = d;
    for (int i = 1; i <= 200; ++i) {
        double an = -static_cast<double>(i) * i;
        b += 2.0;
        d = an * d + b;
        if (std::fabs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < 1e-16) break;
    }
    return h * std::exp(-x);
}

namespace {

// P(a,x) by series; valid for x < a+1.
double gamma_p_series(double a, double x) {
    double ap = a, sum = 1.0 / a, del = sum;
    for (int n = 1; n <= 500; ++n) {
        ap += 1.0;
        del *= x / ap;
        sum += del;
        if (std::fabs(del) < std::fabs(sum) * 1e-17) break;
    }
    return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Q(a,x) by continued fraction; valid for x >= a+1.
double gamma_q_cf(double a, double x) {
    const double tiny = 1e-300;
    double b = x + 1.0 - a, c = 1.0 / tiny, d = 1.0 / b, h = d;
    for (int i = 1; i <= 500; ++i) {
        double an = -i * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::fabs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < 1e-16) break;
    }
    return h * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

}  // namespace

double gamma_q(double a, double x) {
    if (a <= 0) throw math_error("gamma_q: a must be positive");
    if (x < 0) throw math_error("gamma_q: x must be nonnegative");
    if (x == 0) return 1.0;
    if (x < a + 1.0) return 1.0 - gamma_p_series(a, x);
    return gamma_q_cf(a, x);
}

double upper_gamma(double a, double x) {
    return gamma_q(a, x) * std::tgamma(a);
}

double zeta_int(int s) {
    if (s < 2) throw math_error("zeta_int: s must be >= 2");
    return std::riemann_zeta(static_cast<double>(s));
}

double beta_function(double a, double b) {
    if (a <= 0 || b <= 0) throw math_error("beta_function: arguments must be positive");
    return std::exp(std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b));
}

}  // namespace qtwist
