#include "qtwist/arith.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "qtwist/errors.hpp"

namespace qtwist {

i64 gcd64(i64 a, i64 b) { return std::gcd(a, b); }

WeierstrassCurve::WeierstrassCurve(i64 a1_, i64 a2_, i64 a3_, i64 a4_, i64 a6_,
                                   i64 q, std::optional<int> eta)
    : a1(a1_), a2(a2_), a3(a3_), a4(a4_), a6(a6_), conductor_q(q), fricke_eta(eta) {
    if (q <= 0) throw config_error("WeierstrassCurve: conductor must be positive");
    if (eta && *eta != 1 && *eta != -1)
        throw config_error("WeierstrassCurve: fricke_eta must be +-1");
    // discriminant of the model, in 128-bit to dodge overflow
    using w = __int128;
    w b2v = b2(), b4v = b4(), b6v = b6();
    w b8v = static_cast<w>(a1) * a1 * a6 + 4 * static_cast<w>(a2) * a6 -
            static_cast<w>(a1) * a3 * a4 + static_cast<w>(a2) * a3 * a3 -
            static_cast<w>(a4) * a4;
    w disc = -b2v * b2v * b8v - 8 * b4v * b4v * b4v - 27 * b6v * b6v + 9 * b2v * b4v * b6v;
    if (disc == 0) throw config_error("WeierstrassCurve: singular model (discriminant 0)");
}

int kronecker(i64 m, i64 n) {
    if (n == 0) return (m == 1 || m == -1) ? 1 : 0;
    if (m % 2 == 0 && n % 2 == 0) return 0;
    int k = 1;
    int v = 0;
    while (n % 2 == 0) {
        n /= 2;
        ++v;
    }
    if (v % 2 == 1) {
        i64 r = ((m % 8) + 8) % 8;
        if (r == 3 || r == 5) k = -k;
    }
    if (n < 0) {
        n = -n;
        if (m < 0) k = -k;
    }
    // n odd positive: Jacobi with reciprocity
    m %= n;
    if (m < 0) m += n;
    while (m != 0) {
        while (m % 2 == 0) {
            m /= 2;
            i64 r = n % 8;
            if (r == 3 || r == 5) k = -k;
        }
        std::swap(m, n);
        if (m % 4 == 3 && n % 4 == 3) k = -k;
        m %= n;
    }
    return n == 1 ? k : 0;
}

namespace {

i64 mod_pos(i64 a, i64 p) {
    i64 r = a % p;
    return r < 0 ? r + p : r;
}

i64 count_points_exhaustive(const WeierstrassCurve& c, i64 p) {
    i64 cnt = 1;  // point at infinity
    for (i64 x = 0; x < p; ++x)
        for (i64 y = 0; y < p; ++y) {
            i64 lhs = mod_pos(y * y + c.a1 * x * y + c.a3 * y, p);
            i64 rhs = mod_pos(((x * x % p) * x % p) + c.a2 * x % p * x + c.a4 * x + c.a6, p);
            if (lhs == mod_pos(rhs, p)) ++cnt;
        }
    return cnt;
}

}  // namespace

i64 count_points_mod_p(const WeierstrassCurve& c, i64 p) {
    if (p < 2) throw math_error("count_points_mod_p: p must be prime");
    if (p <= 3) return count_points_exhaustive(c, p);
    // Complete the square: (2y + a1 x + a3)^2 = 4x^3 + b2 x^2 + 2 b4 x + b6.
    // #affine = sum_x (1 + chi_p(g(x))), chi from a residue table.
    i64 b2v = mod_pos(c.b2(), p), b4v = mod_pos(2 * c.b4(), p), b6v = mod_pos(c.b6(), p);
    std::vector<signed char> chi(static_cast<size_t>(p), -1);
    chi[0] = 0;
    {
        i64 sq = 0;  // y^2 incrementally: (y+1)^2 = y^2 + 2y + 1
        for (i64 y = 0; y <= p / 2; ++y) {
            chi[static_cast<size_t>(sq)] = 1;
            sq += 2 * y + 1;
            if (sq >= p) sq -= p;
            if (sq >= p) sq -= p;
        }
        chi[0] = 0;
    }
    // g(x) by finite differences: g(x+1)-g(x) = 12x^2+(12+2b2)x+(4+b2+2b4)
    // second difference 24x + 24 + 2 b2, third difference 24.
    i64 g = b6v;                                // g(0)
    i64 d1 = mod_pos(4 + b2v + b4v, p);         // g(1)-g(0)
    i64 d2 = mod_pos(24 + 2 * b2v, p);          // second difference at 0
    const i64 d3 = 24 % p;
    i64 sum = 0;
    for (i64 x = 0; x < p; ++x) {
        sum += chi[static_cast<size_t>(g)];
        g += d1;
        if (g >= p) g -= p;
        d1 += d2;
        if (d1 >= p) d1 -= p;
        d2 += d3;
        if (d2 >= p) d2 -= p;
    }
    return p + 1 + sum;
}

i64 ap(const WeierstrassCurve& curve, i64 p) {
    return p + 1 - count_points_mod_p(curve, p);
}

namespace {

i64 checked_mul(i64 a, i64 b) {
    i64 r;
    if (__builtin_mul_overflow(a, b, &r))
        throw math_error("coefficient_table: 64-bit overflow in a_n");
    return r;
}

i64 checked_sub(i64 a, i64 b) {
    i64 r;
    if (__builtin_sub_overflow(a, b, &r))
        throw math_error("coefficient_table: 64-bit overflow in a_n");
    return r;
}

}  // namespace

CoefficientTable coefficient_table(const WeierstrassCurve& curve, i64 n_max) {
    if (n_max < 1) throw config_error("coefficient_table: n_max must be >= 1");
    CoefficientTable t;
    t.n_max = n_max;
    t.a.assign(static_cast<size_t>(n_max) + 1, 0);
    t.a[1] = 1;
    if (n_max >= 2) {
        // smallest prime factor sieve
        std::vector<i64> spf(static_cast<size_t>(n_max) + 1, 0);
        for (i64 i = 2; i <= n_max; ++i) {
            if (spf[static_cast<size_t>(i)] == 0)
                for (i64 j = i; j <= n_max; j += i)
                    if (spf[static_cast<size_t>(j)] == 0) spf[static_cast<size_t>(j)] = i;
        }
        for (i64 p = 2; p <= n_max; ++p) {
            if (spf[static_cast<size_t>(p)] != p) continue;
            i64 apv = ap(curve, p);
            t.a[static_cast<size_t>(p)] = apv;
            i64 pk = p, prev2 = 1, prev1 = apv;
            while (pk <= n_max / p) {
                pk *= p;
                i64 cur = curve.conductor_q % p == 0
                              ? checked_mul(apv, prev1)
                              : checked_sub(checked_mul(apv, prev1), checked_mul(p, prev2));
                t.a[static_cast<size_t>(pk)] = cur;
                prev2 = prev1;
                prev1 = cur;
            }
        }
        for (i64 n = 2; n <= n_max; ++n) {
            i64 p = spf[static_cast<size_t>(n)];
            i64 m = n, pk = 1;
            while (m % p == 0) {
                m /= p;
                pk *= p;
            }
            if (m > 1)
                t.a[static_cast<size_t>(n)] =
                    checked_mul(t.a[static_cast<size_t>(pk)], t.a[static_cast<size_t>(m)]);
        }
    }
    t.lambda.assign(static_cast<size_t>(n_max) + 1, 0.0);
    for (i64 n = 1; n <= n_max; ++n)
        t.lambda[static_cast<size_t>(n)] =
            static_cast<double>(t.a[static_cast<size_t>(n)]) / std::sqrt(static_cast<double>(n));
    return t;
}

bool is_squarefree(i64 n) {
    if (n == 0) return false;
    n = std::llabs(n);
    if (n % 4 == 0) return false;
    for (i64 p = 2; p * p <= n; ++p)
        if (n % (p * p) == 0) return false;
    return true;
}

bool is_fundamental_discriminant(i64 d) {
    if (d == 0) return false;
    i64 r = mod_pos(d, 4);
    if (r == 1) return is_squarefree(d);
    if (r == 0) {
        i64 m = d / 4;
        i64 mr = mod_pos(m, 4);
        return (mr == 2 || mr == 3) && is_squarefree(m);
    }
    return false;
}

bool admissible_twist(i64 d, i64 q) {
    if (!is_fundamental_discriminant(d)) return false;
    if (gcd64(std::llabs(d), q) != 1) return false;
    if (q % 2 == 0 && d % 2 == 0) return false;
    return true;
}

void require_admissible_twist(i64 d, i64 q) {
    if (!admissible_twist(d, q))
        throw math_error("inadmissible twist d=" + std::to_string(d) +
                         " for level q=" + std::to_string(q) +
                         ": d must be a fundamental discriminant coprime to q"
                         " (and odd when q is even)");
}

std::vector<TwistDescriptor> enumerate_fundamental_discriminants(
    i64 lo, i64 hi, const FamilyConstraints& c, i64 q, int eta) {
    std::vector<TwistDescriptor> out;
    if (lo > hi) return out;
    auto admit = [&](i64 D) {
        if (D < lo || D > hi || D == 1) return false;
        if (c.sign == 1 && D < 0) return false;
        if (c.sign == -1 && D > 0) return false;
        if (c.family_8d) {
            if (D <= 0 || D % 8 != 0) return false;
            i64 d8 = D / 8;
            if (d8 % 2 == 0 || !is_squarefree(d8)) return false;
            if (gcd64(d8, c.coprime_to) != 1) return false;
        } else {
            if (!is_fundamental_discriminant(D)) return false;
            if (gcd64(std::llabs(D), c.coprime_to) != 1) return false;
        }
        return true;
    };
    auto push = [&](i64 D) {
        TwistDescriptor td;
        td.d = D;
        td.sign_of_d = D > 0 ? 1 : -1;
        td.twisted_conductor = q * D * D;
        td.omega = -eta * kronecker(D, -q);
        out.push_back(td);
    };
    i64 amax = std::max(std::llabs(lo), std::llabs(hi));
    for (i64 a = 1; a <= amax; ++a) {
        if (admit(a)) push(a);
        if (admit(-a)) push(-a);
    }
    return out;
}

CoefficientTable twisted_coefficients(const CoefficientTable& table, i64 d, i64 q) {
    if (d == 1) return table;
    require_admissible_twist(d, q);
    i64 ad = std::llabs(d);
    // chi_d is periodic mod |d|
    std::vector<signed char> chi(static_cast<size_t>(ad));
    for (i64 r = 0; r < ad; ++r) chi[static_cast<size_t>(r)] = static_cast<signed char>(kronecker(d, r));
    CoefficientTable t;
    t.n_max = table.n_max;
    t.a.assign(table.a.size(), 0);
    t.lambda.assign(table.lambda.size(), 0.0);
    for (i64 n = 1; n <= table.n_max; ++n) {
        int ch = chi[static_cast<size_t>(n % ad)];
        t.a[static_cast<size_t>(n)] = table.a[static_cast<size_t>(n)] * ch;
        t.lambda[static_cast<size_t>(n)] = table.lambda[static_cast<size_t>(n)] * ch;
    }
    return t;
}

i64 twisted_conductor(i64 q, i64 d) {
    if (q <= 0) throw config_error("twisted_conductor: q must be positive");
    if (gcd64(std::llabs(d), q) != 1)
        throw math_error("twisted_conductor: gcd(d,q) > 1");
    return q * d * d;
}

std::vector<i64> primes_up_to(i64 n) {
    std::vector<i64> out;
    if (n < 2) return out;
    std::vector<bool> comp(static_cast<size_t>(n) + 1, false);
    for (i64 i = 2; i <= n; ++i) {
        if (!comp[static_cast<size_t>(i)]) {
            out.push_back(i);
            for (i64 j = i * i; j <= n; j += i) comp[static_cast<size_t>(j)] = true;
        }
    }
    return out;
}

}  // namespace qtwist
