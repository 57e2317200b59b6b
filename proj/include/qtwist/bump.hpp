#pragma once

namespace qtwist {

// Smooth compactly supported weights used by the family sums.
//
// J(x)  = exp(-1/((x-1/2)(2-x))) on (1/2,2), zero elsewhere.
// G(x)  = flat-bump smoothstep: supported on [3/4,2], = 1 on [1,3/2],
//         G(x) + G(x/2) = 1 on [1,3].
// V(x)  = G(2x) + G(x) + G(x/2), = 1 on [1/2,3].

double bump_J(double x);

// Mellin transform J~(w) = int_0^inf J(x) x^{w-1} dx, quadrature to ~1e-12.
double mellin_J(double w);

double partition_G(double x);
double window_V(double x);

enum class BumpKind { J_bump, G_partition, V_window };

struct BumpFunction {
    BumpKind kind = BumpKind::J_bump;
    double support_lo = 0.5;
    double support_hi = 2.0;

    static BumpFunction j_bump() { return {BumpKind::J_bump, 0.5, 2.0}; }
    static BumpFunction g_partition() { return {BumpKind::G_partition, 0.75, 2.0}; }
    static BumpFunction v_window() { return {BumpKind::V_window, 0.375, 4.0}; }

    double operator()(double x) const;
};

}  // namespace qtwist
