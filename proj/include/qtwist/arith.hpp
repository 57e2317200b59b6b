#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace qtwist {

using i64 = std::int64_t;

// Long Weierstrass model y^2 + a1 xy + a3 y = x^3 + a2 x^2 + a4 x + a6.
// The model must be nonsingular over Q; minimality is the caller's business
// and the conductor is an input, not computed.
struct WeierstrassCurve {
    i64 a1 = 0, a2 = 0, a3 = 0, a4 = 0, a6 = 0;
    i64 conductor_q = 0;
    std::optional<int> fricke_eta;  // +1 or -1 when known

    WeierstrassCurve(i64 a1_, i64 a2_, i64 a3_, i64 a4_, i64 a6_, i64 q,
                     std::optional<int> eta = std::nullopt);

    // b-invariants of the model (exact).
    i64 b2() const { return a1 * a1 + 4 * a2; }
    i64 b4() const { return 2 * a4 + a1 * a3; }
    i64 b6() const { return a3 * a3 + 4 * a6; }

    bool same_model(const WeierstrassCurve& o) const {
        return a1 == o.a1 && a2 == o.a2 && a3 == o.a3 && a4 == o.a4 &&
               a6 == o.a6 && conductor_q == o.conductor_q;
    }
};

// a_n and lambda[n] = a_n/sqrt(n) for 1 <= n <= n_max.  a is multiplicative,
// a[p^k] follows the Hecke recursion at good p and a[p]^k at bad p.
struct CoefficientTable {
    i64 n_max = 0;
    std::vector<i64> a;        // index 0 unused, a[1] = 1
    std::vector<double> lambda;

    i64 an(i64 n) const { return a[static_cast<size_t>(n)]; }
};

struct TwistDescriptor {
    i64 d = 0;                 // fundamental discriminant
    i64 twisted_conductor = 0; // q * d^2
    int omega = 0;             // root number of f (x) chi_d
    int sign_of_d = 0;
};

// Full Kronecker symbol (m|n); n may be zero, negative or even.
int kronecker(i64 m, i64 n);

// Number of projective points of the reduced model over F_p, singular point
// included.  p=2,3 by exhaustive enumeration of the long form, p>=5 by
// completing the square and counting quadratic-residue fibers.
i64 count_points_mod_p(const WeierstrassCurve& curve, i64 p);

// a_p = p + 1 - #E(F_p).  The same formula at bad p yields 0 / +1 / -1 for
// additive / split / nonsplit reduction.
i64 ap(const WeierstrassCurve& curve, i64 p);

// Hecke coefficient table up to n_max; throws math_error on 64-bit overflow.
CoefficientTable coefficient_table(const WeierstrassCurve& curve, i64 n_max);

// true iff d is the discriminant of a quadratic field (d=1 counts as the
// degenerate unit discriminant and is excluded from family enumeration).
bool is_fundamental_discriminant(i64 d);

struct FamilyConstraints {
    i64 coprime_to = 1;
    int sign = 0;           // +1, -1 or 0 for either
    bool family_8d = false; // D = 8d, d odd squarefree positive
};

// Fundamental discriminants D in [lo,hi] meeting the constraints, ascending
// by |D| (ties: positive first).  d = 1 is never emitted.
std::vector<TwistDescriptor> enumerate_fundamental_discriminants(
    i64 lo, i64 hi, const FamilyConstraints& constraints, i64 q = 1, int eta = 1);

// Admissibility of a twist discriminant for level q: d fundamental,
// gcd(d,q) = 1, and d odd whenever q is even.  (For odd q the even
// discriminants 8d of the main family are admissible.)
bool admissible_twist(i64 d, i64 q);
void require_admissible_twist(i64 d, i64 q);

// Entrywise a'[n] = a[n] * chi_d(n).
CoefficientTable twisted_coefficients(const CoefficientTable& table, i64 d, i64 q);

// q * d^2; throws if gcd(d,q) > 1.
i64 twisted_conductor(i64 q, i64 d);

i64 gcd64(i64 a, i64 b);
bool is_squarefree(i64 n);

// Primes up to n (simple sieve).
std::vector<i64> primes_up_to(i64 n);

}  // namespace qtwist
