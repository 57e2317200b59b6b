#pragma once

#include "qtwist/arith.hpp"

namespace qtwist {

// Arithmetic constants of the family moments, as regularized Euler products.
//
// All regularizations divide local-by-local against the COMPLETE zeta and
// symmetric-square L-factors (including p = 2, where the underlying odd-n
// sums contribute the empty local 1).  With this convention the products
// that appear in predictions, L(1,sym^2 f) * Z_{q'}(0) and the like, equal
// the defining Dirichlet sums identically.

enum class EulerKind { sym_square_L1, Z_qprime, Zstar_qprime, Z_alpha };

struct EulerProductValue {
    EulerKind kind = EulerKind::sym_square_L1;
    i64 qprime = 1;
    double shift_u = 0.0, shift_v = 0.0;  // (u,v) or (alpha, 0)
    i64 prime_cutoff = 0;
    double value = 0.0;
    double tail_estimate = 0.0;
    bool flagged = false;  // cutoff too small for the tail target
};

// Satake-power table lambda(p^i), i <= 40, for all p <= cutoff.
class LocalFactorTable {
  public:
    LocalFactorTable(const CoefficientTable& table, i64 q, i64 prime_cutoff);
    static constexpr int max_power = 40;

    size_t prime_count() const { return primes_.size(); }
    i64 prime(size_t idx) const { return primes_[idx]; }
    bool bad(size_t idx) const { return q_ % primes_[idx] == 0; }
    double lambda_power(size_t idx, int i) const {
        return lam_pow_[idx * static_cast<size_t>(max_power + 1) + static_cast<size_t>(i)];
    }
    double lambda(size_t idx) const { return lambda_power(idx, 1); }
    i64 level() const { return q_; }

    // local factor inverse of L(s, sym^2 f):
    //   good p: (1 - (lambda^2-2) y + y^2)(1 - y),  y = p^{-s}
    //   bad  p: (1 - lambda^2 y)
    double sym2_local_inv(size_t idx, double y) const;

  private:
    i64 q_ = 0;
    std::vector<i64> primes_;
    std::vector<double> lam_pow_;
};

// L(1+2s, sym^2 f) by direct Euler product over p <= cutoff.
double sym_square_L(const LocalFactorTable& loc, double s_shift, i64 cutoff);

EulerProductValue sym_square_L1(const CoefficientTable& table, i64 q, i64 prime_cutoff);

// Z*_{q'}(1/2+u, 1/2+v): all-prime regularized local product.
// weight_index_qprime switches the Open-Question reading of the
// prod_{p|q n1 n2}(1-1/(p+1)) factor to index q' instead of q (default
// follows the text: index q).
EulerProductValue zstar_uv(i64 qprime, double u, double v, const CoefficientTable& table,
                           i64 q, i64 prime_cutoff, bool weight_index_qprime = false);

EulerProductValue Zstar_halfhalf(i64 qprime, const CoefficientTable& table, i64 q,
                                 i64 prime_cutoff, bool weight_index_qprime = false);

// Z_{q'}(alpha) of the first-moment formula:
// L(1+2a, sym^2 f) Z_{q'}(a) = sum_{q'n = square, n odd} lambda(n) n^{-1/2-a}
//                              prod_{p | qn} p/(p+1).
EulerProductValue Z_alpha(i64 qprime, double alpha, const CoefficientTable& table,
                          i64 q, i64 prime_cutoff, bool weight_index_qprime = false);

// Leading coefficient C_{l1+l2+1} of the second-moment asymptotic,
// implemented verbatim from the stated closed form.
double predicted_second_moment_constant(int l1, int l2, i64 q, int eta, double Jtilde1,
                                        double L1sym, double Zstar1, double Zstarq);

}  // namespace qtwist
