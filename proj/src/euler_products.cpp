#include "qtwist/euler_products.hpp"

#include <cmath>

#include "qtwist/errors.hpp"
#include "qtwist/special.hpp"

namespace qtwist {

LocalFactorTable::LocalFactorTable(const CoefficientTable& table, i64 q, i64 cutoff)
    : q_(q) {
    if (cutoff < 2) throw config_error("LocalFactorTable: cutoff too small");
    if (table.n_max < cutoff)
        throw math_error("LocalFactorTable: coefficient table covers n <= " +
                         std::to_string(table.n_max) + ", cutoff needs " +
                         std::to_string(cutoff));
    primes_ = primes_up_to(cutoff);
    lam_pow_.resize(primes_.size() * static_cast<size_t>(max_power + 1));
    for (size_t idx = 0; idx < primes_.size(); ++idx) {
        i64 p = primes_[idx];
        double lp = table.lambda[static_cast<size_t>(p)];
        double* row = &lam_pow_[idx * static_cast<size_t>(max_power + 1)];
        row[0] = 1.0;
        row[1] = lp;
        bool is_bad = q_ % p == 0;
        // read lambda(p^i) off the table while it reaches, recurse beyond
        i64 pk = p;
        for (int i = 2; i <= max_power; ++i) {
            if (pk <= table.n_max / p) {
                pk *= p;
                row[i] = table.lambda[static_cast<size_t>(pk)];
            } else {
                row[i] = is_bad ? row[i - 1] * lp : lp * row[i - 1] - row[i - 2];
            }
        }
    }
}

double LocalFactorTable::sym2_local_inv(size_t idx, double y) const {
    double lp = lambda(idx);
    if (bad(idx)) return 1.0 - lp * lp * y;
    return (1.0 - (lp * lp - 2.0) * y + y * y) * (1.0 - y);
}

namespace {

// dyadic-window tail estimator: tracks the log-local sum over the last two
// octaves below the cutoff and extrapolates the remainder
struct TailWindows {
    double last = 0.0, prev = 0.0;
    i64 cutoff;
    explicit TailWindows(i64 cut) : cutoff(cut) {}
    void add(i64 p, double log_local) {
        if (2 * p > cutoff)
            last += log_local;
        else if (4 * p > cutoff)
            prev += log_local;
    }
    double estimate(double value) const {
        double w = std::max(std::fabs(last), 0.5 * std::fabs(prev));
        return std::fabs(value) * 2.0 * w;
    }
};

}  // namespace

double sym_square_L(const LocalFactorTable& loc, double s_shift, i64 cutoff) {
    double tot = 0.0;
    for (size_t i = 0; i < loc.prime_count(); ++i) {
        i64 p = loc.prime(i);
        if (p > cutoff) break;
        tot -= std::log(loc.sym2_local_inv(i, std::pow(static_cast<double>(p), -(1.0 + 2.0 * s_shift))));
    }
    return std::exp(tot);
}

EulerProductValue sym_square_L1(const CoefficientTable& table, i64 q, i64 cutoff) {
    if (cutoff < 1000) throw config_error("sym_square_L1: cutoff must be >= 1000");
    LocalFactorTable loc(table, q, cutoff);
    TailWindows tw(cutoff);
    double tot = 0.0;
    for (size_t i = 0; i < loc.prime_count(); ++i) {
        i64 p = loc.prime(i);
        double ll = -std::log(loc.sym2_local_inv(i, 1.0 / static_cast<double>(p)));
        tot += ll;
        tw.add(p, ll);
    }
    EulerProductValue out;
    out.kind = EulerKind::sym_square_L1;
    out.prime_cutoff = cutoff;
    out.value = std::exp(tot);
    out.tail_estimate = tw.estimate(out.value);
    out.flagged = out.tail_estimate > 0.02 * std::fabs(out.value);
    return out;
}

namespace {

// local double sum S_p = sum_{i+j = par mod 2} lambda(p^i) lambda(p^j)
// xu^i xv^j with the (1 - 1/(p+1)) weight scheme
double z_local_sum(const LocalFactorTable& loc, size_t idx, double xu, double xv,
                   int parity, bool weight_always) {
    i64 p = loc.prime(idx);
    double w = 1.0 - 1.0 / static_cast<double>(p + 1);
    double S = 0.0;
    for (int i = 0; i <= LocalFactorTable::max_power; ++i) {
        double xui = std::pow(xu, i);
        if (xui == 0.0) break;
        for (int j = 0; i + j <= LocalFactorTable::max_power; ++j) {
            if ((i + j) % 2 != parity) continue;
            double t = loc.lambda_power(idx, i) * loc.lambda_power(idx, j) * xui * std::pow(xv, j);
            if (i + j == 0)
                S += weight_always ? w * t : t;
            else
                S += w * t;
        }
    }
    return S;
}

}  // namespace

EulerProductValue zstar_uv(i64 qprime, double u, double v, const CoefficientTable& table,
                           i64 q, i64 cutoff, bool weight_index_qprime) {
    if (qprime != 1 && qprime != q)
        throw config_error("zstar_uv: qprime must be 1 or q");
    LocalFactorTable loc(table, q, cutoff);
    TailWindows tw(cutoff);
    double tot = 0.0;
    for (size_t idx = 0; idx < loc.prime_count(); ++idx) {
        i64 p = loc.prime(idx);
        double pd = static_cast<double>(p);
        double reg = std::log(1.0 - std::pow(pd, -(1.0 + u + v))) +
                     std::log(loc.sym2_local_inv(idx, std::pow(pd, -(1.0 + 2.0 * u)))) +
                     std::log(loc.sym2_local_inv(idx, std::pow(pd, -(1.0 + 2.0 * v)))) +
                     std::log(loc.sym2_local_inv(idx, std::pow(pd, -(1.0 + u + v))));
        double ll;
        if (p == 2) {
            ll = reg;  // odd-n sum: empty local, regularizers only
        } else {
            bool is_bad = loc.bad(idx);
            int parity = 0;
            bool weight_always;
            if (is_bad) {
                parity = (qprime % p == 0) ? 1 : 0;
                // literal reading: p | q always carries the weight; the
                // q'-indexed variant weights the i+j=0 term only when p | q'
                weight_always = weight_index_qprime ? (qprime % p == 0) : true;
            } else {
                weight_always = false;
            }
            double S = z_local_sum(loc, idx, std::pow(pd, -(0.5 + u)),
                                   std::pow(pd, -(0.5 + v)), parity, weight_always);
            ll = std::log(S) + reg;
        }
        tot += ll;
        tw.add(p, ll);
    }
    EulerProductValue out;
    out.kind = EulerKind::Zstar_qprime;
    out.qprime = qprime;
    out.shift_u = u;
    out.shift_v = v;
    out.prime_cutoff = cutoff;
    out.value = std::exp(tot);
    out.tail_estimate = tw.estimate(out.value);
    out.flagged = out.tail_estimate > 0.02 * std::fabs(out.value);
    return out;
}

EulerProductValue Zstar_halfhalf(i64 qprime, const CoefficientTable& table, i64 q,
                                 i64 cutoff, bool weight_index_qprime) {
    return zstar_uv(qprime, 0.0, 0.0, table, q, cutoff, weight_index_qprime);
}

EulerProductValue Z_alpha(i64 qprime, double alpha, const CoefficientTable& table,
                          i64 q, i64 cutoff, bool weight_index_qprime) {
    if (std::fabs(alpha) > 0.25 - 1e-3)
        throw config_error("Z_alpha: |alpha| must be <= 1/4 - 1e-3");
    if (qprime != 1 && qprime != q)
        throw config_error("Z_alpha: qprime must be 1 or q");
    LocalFactorTable loc(table, q, cutoff);
    TailWindows tw(cutoff);
    double tot = 0.0;
    for (size_t idx = 0; idx < loc.prime_count(); ++idx) {
        i64 p = loc.prime(idx);
        double pd = static_cast<double>(p);
        double reg = std::log(loc.sym2_local_inv(idx, std::pow(pd, -(1.0 + 2.0 * alpha))));
        double ll;
        if (p == 2) {
            ll = reg;
        } else {
            double xs = std::pow(pd, -(0.5 + alpha));
            double w = 1.0 - 1.0 / static_cast<double>(p + 1);
            double S = 0.0;
            if (loc.bad(idx)) {
                int parity = (qprime % p == 0) ? 1 : 0;
                bool weight_always = weight_index_qprime ? (qprime % p == 0) : true;
                for (int i = parity; i <= LocalFactorTable::max_power; i += 2) {
                    double t = loc.lambda_power(idx, i) * std::pow(xs, i);
                    S += (i == 0 && !weight_always) ? t : w * t;
                }
            } else {
                S = 1.0;
                for (int i = 2; i <= LocalFactorTable::max_power; i += 2)
                    S += w * loc.lambda_power(idx, i) * std::pow(xs, i);
            }
            ll = std::log(S) + reg;
        }
        tot += ll;
        tw.add(p, ll);
    }
    EulerProductValue out;
    out.kind = EulerKind::Z_alpha;
    out.qprime = qprime;
    out.shift_u = alpha;
    out.prime_cutoff = cutoff;
    out.value = std::exp(tot);
    out.tail_estimate = tw.estimate(out.value);
    out.flagged = out.tail_estimate > 0.02 * std::fabs(out.value);
    return out;
}

double predicted_second_moment_constant(int l1, int l2, i64 /*q*/, int eta, double Jtilde1,
                                        double L1sym, double Zstar1, double Zstarq) {
    int L = l1 + l2;
    double pref = std::pow(-2.0, L + 1) / (2.0 * M_PI * M_PI);
    double L3 = L1sym * L1sym * L1sym;
    double brace = ((std::pow(-1.0, l2 + 1) - 1.0) / 2.0 + (std::pow(-1.0, l2) - 1.0) / 2.0);
    double first = pref * (-1.0 / (L + 1)) * Jtilde1 * L3 * Zstar1;
    double second = Jtilde1 * L3 * (-eta) * Zstarq * pref * brace *
                    beta_function(l1 + 1, l2 + 1);
    return first + second;
}

}  // namespace qtwist
