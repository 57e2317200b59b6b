#include "qtwist/bump.hpp"

#include <cmath>

namespace qtwist {

double bump_J(double x) {
    if (x <= 0.5 || x >= 2.0) return 0.0;
    return std::exp(-1.0 / ((x - 0.5) * (2.0 - x)));
}

namespace {

// smoothstep 0 -> 1 on [0,1], flat to all orders at both ends
double flat_step(double t) {
    if (t <= 0.0) return 0.0;
    if (t >= 1.0) return 1.0;
    double a = std::exp(-1.0 / t);
    double b = std::exp(-1.0 / (1.0 - t));
    return a / (a + b);
}

}  // namespace

double partition_G(double x) {
    if (x <= 0.75 || x >= 2.0) return 0.0;
    if (x < 1.0) return flat_step(4.0 * x - 3.0);
    if (x <= 1.5) return 1.0;
    return 1.0 - flat_step(2.0 * x - 3.0);  // forces G(x) + G(x/2) = 1 on [1,3]
}

double window_V(double x) {
    return partition_G(2.0 * x) + partition_G(x) + partition_G(x / 2.0);
}

double BumpFunction::operator()(double x) const {
    switch (kind) {
        case BumpKind::J_bump: return bump_J(x);
        case BumpKind::G_partition: return partition_G(x);
        case BumpKind::V_window: return window_V(x);
    }
    return 0.0;
}

double mellin_J(double w) {
    // Gauss-Legendre with panel doubling on [1/2,2]; integrand is smooth and
    // flat at both endpoints.
    static const double gx[8] = {-0.9602898564975363, -0.7966664774136267,
                                 -0.5255324099163290, -0.1834346424956498,
                                 0.1834346424956498,  0.5255324099163290,
                                 0.7966664774136267,  0.9602898564975363};
    static const double gw[8] = {0.1012285362903763, 0.2223810344533745,
                                 0.3137066458778873, 0.3626837833783620,
                                 0.3626837833783620, 0.3137066458778873,
                                 0.2223810344533745, 0.1012285362903763};
    auto pass = [&](int panels) {
        double total = 0.0;
        double a = 0.5, b = 2.0;
        double h = (b - a) / panels;
        for (int i = 0; i < panels; ++i) {
            double lo = a + h * i, mid = lo + 0.5 * h;
            for (int j = 0; j < 8; ++j) {
                double x = mid + 0.5 * h * gx[j];
                total += 0.5 * h * gw[j] * bump_J(x) * std::pow(x, w - 1.0);
            }
        }
        return total;
    };
    int panels = 16;
    double v1 = pass(panels), v2 = pass(2 * panels);
    while (std::fabs(v2 - v1) > 1e-13 * std::fabs(v2) && panels < 4096) {
        panels *= 2;
        v1 = v2;
        v2 = pass(2 * panels);
    }
    return v2;
}

}  // namespace qtwist
