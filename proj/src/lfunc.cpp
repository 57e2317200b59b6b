#include "qtwist/lfunc.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "qtwist/cache.hpp"
#include "qtwist/errors.hpp"
#include "qtwist/special.hpp"

namespace qtwist {

namespace {

struct Kahan {
    double sum = 0.0, comp = 0.0;
    void add(double v) {
        double y = v - comp;
        double t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
};

double factorial(int n) {
    double f = 1.0;
    for (int i = 2; i <= n; ++i) f *= i;
    return f;
}

// Certified bound for the dropped tail of 2 sum_{n>M} a_n G_r(x_n), using
// |a_n| <= 2n, G_0, G_1 <= e^{-x}/x and G_r <= 1.25 (4r/e)^r e^{-x}/x.
double tail_bound(i64 M, double c, int R) {
    double K = 4.0;
    if (R >= 2) K = 5.0 * std::pow(4.0 * R / M_E, R);
    double xM1 = c * static_cast<double>(M + 1);
    if (xM1 > 700.0) return 0.0;
    return K * std::exp(-xM1) / (c * (-std::expm1(-c)));
}

}  // namespace

i64 truncation_length(i64 N, int R) {
    if (N <= 0) throw math_error("truncation_length: N must be positive");
    if (R < 0) throw math_error("truncation_length: R must be nonnegative");
    double v = std::sqrt(static_cast<double>(N)) / (2.0 * M_PI) * (38.0 + 5.0 * R);
    return static_cast<i64>(std::ceil(v));
}

double inverse_gamma_derivative(int t) {
    if (t < 0 || t > 30) throw math_error("inverse_gamma_derivative: t must lie in [0,30]");
    if (t == 0) return 1.0;
    // zeta(2..t)
    std::vector<double> zv(static_cast<size_t>(t) + 1, 0.0);
    for (int j = 2; j <= t; ++j) zv[static_cast<size_t>(j)] = zeta_int(j);
    double total = 0.0;
    // enumerate k1..kt >= 0 with k1 + 2 k2 + ... + t kt = t
    std::vector<int> ks(static_cast<size_t>(t) + 1, 0);
    auto rec = [&](auto&& self, int j, int rem) -> void {
        if (j > t) {
            if (rem != 0) return;
            int K = 0;
            double term = factorial(t);
            for (int i = 1; i <= t; ++i) {
                int ki = ks[static_cast<size_t>(i)];
                K += ki;
                term /= factorial(ki);
                for (int rep = 0; rep < ki; ++rep)
                    term *= (i == 1) ? euler_gamma : zv[static_cast<size_t>(i)] / i;
            }
            total += ((K + t) % 2 == 0 ? term : -term);
            return;
        }
        for (int kj = 0; kj * j <= rem; ++kj) {
            ks[static_cast<size_t>(j)] = kj;
            self(self, j + 1, rem - kj * j);
        }
        ks[static_cast<size_t>(j)] = 0;
    };
    rec(rec, 1, t);
    return total;
}

InverseGammaTable inverse_gamma_table(int t_max) {
    InverseGammaTable tab;
    tab.t_max = t_max;
    tab.g.resize(static_cast<size_t>(t_max) + 1);
    for (int t = 0; t <= t_max; ++t) tab.g[static_cast<size_t>(t)] = inverse_gamma_derivative(t);
    return tab;
}

DerivativeVector lambda_derivatives(const CompletedSeries& series, int R,
                                    const std::vector<const GrGrid*>* grids) {
    const i64 N = series.conductor_N;
    const i64 need = truncation_length(N, R);
    const i64 M = series.coefficients.n_max;
    if (M < need)
        throw math_error("lambda_derivatives: table n_max=" + std::to_string(M) +
                         " insufficient, need n_max >= " + std::to_string(need));
    const double c = 2.0 * M_PI / std::sqrt(static_cast<double>(N));
    DerivativeVector out;
    out.R = R;
    out.values.assign(static_cast<size_t>(R) + 1, 0.0);
    for (int r = 0; r <= R; ++r) {
        int parity = 1 + (r % 2 == 0 ? series.omega : -series.omega);
        if (parity == 0) continue;  // exact zero by the functional equation
        const GrGrid* grid = nullptr;
        if (grids && r >= 2 && static_cast<size_t>(r) < grids->size())
            grid = (*grids)[static_cast<size_t>(r)];
        Kahan acc;
        for (i64 n = 1; n <= M; ++n) {
            i64 an = series.coefficients.a[static_cast<size_t>(n)];
            if (an == 0) continue;
            double x = c * static_cast<double>(n);
            double ker;
            if (r == 0) {
                ker = x > 700.0 ? 0.0 : std::exp(-x) / x;
            } else if (r == 1) {
                ker = x > 700.0 ? 0.0 : expint_e1(x) / x;
            } else {
                ker = grid ? (*grid)(x) : g_r_weight(r, x);
            }
            acc.add(static_cast<double>(an) * ker);
        }
        out.values[static_cast<size_t>(r)] = parity * acc.sum;
    }
    out.truncation_error_bound = tail_bound(M, c, R);
    return out;
}

std::vector<double> l_derivatives_from_lambda(const DerivativeVector& vec, i64 N,
                                              int m_max) {
    if (vec.R < m_max)
        throw math_error("l_derivatives_from_lambda: vector order too small");
    const double root = std::sqrt(static_cast<double>(N)) / (2.0 * M_PI);
    const double ell = std::log(root);
    static const InverseGammaTable ig = inverse_gamma_table(30);

    // Leibniz / Faa di Bruno path
    std::vector<double> L(static_cast<size_t>(m_max) + 1, 0.0);
    for (int m = 0; m <= m_max; ++m) {
        Kahan s;
        for (int k = 0; k <= m; ++k) {
            if (vec.values[static_cast<size_t>(k)] == 0.0) continue;
            for (int t = 0; t <= m - k; ++t) {
                int u = m - k - t;
                double coef = factorial(m) / (factorial(k) * factorial(t) * factorial(u));
                s.add(coef * vec.values[static_cast<size_t>(k)] *
                      std::pow(-ell, u) * ig.g[static_cast<size_t>(t)]);
            }
        }
        L[static_cast<size_t>(m)] = s.sum / root;
    }

    // power-series multiplication of the three jets (oracle path)
    std::vector<double> lam_jet(static_cast<size_t>(m_max) + 1),
        pw_jet(static_cast<size_t>(m_max) + 1), ig_jet(static_cast<size_t>(m_max) + 1);
    for (int k = 0; k <= m_max; ++k) {
        lam_jet[static_cast<size_t>(k)] = vec.values[static_cast<size_t>(k)] / factorial(k);
        pw_jet[static_cast<size_t>(k)] = std::pow(-ell, k) / factorial(k) / root;
        ig_jet[static_cast<size_t>(k)] = ig.g[static_cast<size_t>(k)] / factorial(k);
    }
    std::vector<double> tmp(static_cast<size_t>(m_max) + 1, 0.0),
        prod(static_cast<size_t>(m_max) + 1, 0.0);
    for (int i = 0; i <= m_max; ++i)
        for (int j = 0; i + j <= m_max; ++j)
            tmp[static_cast<size_t>(i + j)] += lam_jet[static_cast<size_t>(i)] * pw_jet[static_cast<size_t>(j)];
    for (int i = 0; i <= m_max; ++i)
        for (int j = 0; i + j <= m_max; ++j)
            prod[static_cast<size_t>(i + j)] += tmp[static_cast<size_t>(i)] * ig_jet[static_cast<size_t>(j)];

    double scale = 0.0;
    for (int m = 0; m <= m_max; ++m) scale = std::max(scale, std::fabs(L[static_cast<size_t>(m)]));
    for (int m = 0; m <= m_max; ++m) {
        double oracle = prod[static_cast<size_t>(m)] * factorial(m);
        if (std::fabs(oracle - L[static_cast<size_t>(m)]) > 1e-9 * std::max(1.0, scale))
            throw math_error("l_derivatives_from_lambda: Leibniz path disagrees with the "
                             "series-multiplication oracle at m=" + std::to_string(m));
    }
    return L;
}

double lambda_at(const CompletedSeries& series, double s, bool reverse_order) {
    const double c = 2.0 * M_PI / std::sqrt(static_cast<double>(series.conductor_N));
    const i64 M = series.coefficients.n_max;
    Kahan acc;
    auto term = [&](i64 n) {
        i64 an = series.coefficients.a[static_cast<size_t>(n)];
        if (an == 0) return;
        double x = c * static_cast<double>(n);
        double v = g_s_weight(s, x) + series.omega * g_s_weight(2.0 - s, x);
        acc.add(static_cast<double>(an) * v);
    };
    if (reverse_order)
        for (i64 n = M; n >= 1; --n) term(n);
    else
        for (i64 n = 1; n <= M; ++n) term(n);
    return acc.sum;
}

double functional_equation_residual(const CompletedSeries& series) {
    double a = lambda_at(series, 1.3, false);
    double b = lambda_at(series, 0.7, true);
    return std::fabs(a - series.omega * b) / (1.0 + std::fabs(a));
}

SignThreshold sign_threshold(int h, i64 q) {
    if (h < 1) throw math_error("sign_threshold: h must be >= 1");
    if (q < 1) throw math_error("sign_threshold: q must be positive");
    if (h >= 2) return {std::numeric_limits<double>::infinity(), true};
    double expo = std::exp(euler_gamma + 1.0);  // h = 1: h^3 e^{gamma+1}
    return {2.0 * M_PI / std::sqrt(static_cast<double>(q)) * std::exp(expo), false};
}

std::vector<SuperPositivityEntry> superpositivity_check(const DerivativeVector& vec,
                                                        int r_d, int j_max) {
    if (r_d > vec.R) throw math_error("superpositivity_check: r_d exceeds vector order");
    double scale = 1.0;
    for (double v : vec.values) scale = std::max(scale, std::fabs(v));
    std::vector<SuperPositivityEntry> out;
    for (int j = 0; j <= j_max && r_d + 2 * j <= vec.R; ++j) {
        int r = r_d + 2 * j;
        double v = vec.values[static_cast<size_t>(r)];
        out.push_back({r, v > -1e-10 * scale, v > 1e-10 * scale});
    }
    return out;
}

namespace {

// sum_{n<=M} a_n e^{-c n y}
double theta_sum(const CoefficientTable& t, double c, double y) {
    Kahan acc;
    for (i64 n = 1; n <= t.n_max; ++n) {
        i64 an = t.a[static_cast<size_t>(n)];
        if (an == 0) continue;
        double e = c * static_cast<double>(n) * y;
        if (e > 745.0) break;
        acc.add(static_cast<double>(an) * std::exp(-e));
    }
    return acc.sum;
}

// int_{y_min}^1 g(y) y^{s-1} dy by composite Gauss-Legendre with doubling
double mellin_01(const CoefficientTable& t, double c, double y_min, double s) {
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
        double h = (1.0 - y_min) / panels;
        for (int i = 0; i < panels; ++i) {
            double mid = y_min + h * (i + 0.5);
            for (int j = 0; j < 8; ++j) {
                double y = mid + 0.5 * h * gx[j];
                total += 0.5 * h * gw[j] * theta_sum(t, c, y) * std::pow(y, s - 1.0);
            }
        }
        return total;
    };
    int panels = 8;
    double v1 = pass(panels), v2 = pass(2 * panels);
    while (std::fabs(v2 - v1) > 1e-11 * (1.0 + std::fabs(v2)) && panels < 512) {
        panels *= 2;
        v1 = v2;
        v2 = pass(2 * panels);
    }
    return v2;
}

}  // namespace

int detect_fricke_eta(const WeierstrassCurve& curve) {
    if (curve.fricke_eta) return *curve.fricke_eta;
    const i64 q = curve.conductor_q;
    const double c = 2.0 * M_PI / std::sqrt(static_cast<double>(q));
    const double y_min = std::min(0.5, c / 38.0);
    // table long enough that the theta sum converges for y >= y_min
    i64 n_eta = static_cast<i64>(std::ceil(38.0 / (c * y_min))) + 8;
    CoefficientTable tab = coefficient_table(curve, n_eta);

    double resid[2];  // candidate omega = +1, -1
    for (int idx = 0; idx < 2; ++idx) {
        int omega = idx == 0 ? 1 : -1;
        double worst = 0.0;
        for (double s : {1.3, 1.7}) {
            double i01 = mellin_01(tab, c, y_min, s);
            Kahan acc;
            for (i64 n = 1; n <= n_eta; ++n) {
                i64 an = tab.a[static_cast<size_t>(n)];
                if (an == 0) continue;
                acc.add(static_cast<double>(an) * g_s_weight(2.0 - s, c * static_cast<double>(n)));
            }
            double reflected = acc.sum;
            double lam = i01 + reflected;  // scale reference
            double r = std::fabs(i01 - omega * reflected) / (1.0 + std::fabs(lam));
            worst = std::max(worst, r);
        }
        resid[idx] = worst;
    }
    int best = resid[0] < resid[1] ? 0 : 1;
    if (resid[best] >= 1e-8 || resid[1 - best] <= 1e-3)
        throw math_error("detect_fricke_eta: ambiguous functional-equation fit "
                         "(residuals " + std::to_string(resid[0]) + ", " +
                         std::to_string(resid[1]) + "); increase n_max");
    int omega_untwisted = best == 0 ? 1 : -1;
    return -omega_untwisted;
}

TwistEngine::TwistEngine(const WeierstrassCurve& curve, std::string cache_dir)
    : curve_(curve), cache_dir_(std::move(cache_dir)) {
    eta_ = curve.fricke_eta ? *curve.fricke_eta : detect_fricke_eta(curve);
}

void TwistEngine::ensure_coverage(i64 n_max) {
    if (base_.n_max >= n_max) return;
    if (!cache_dir_.empty()) {
        if (auto cached = load_coefficient_cache(cache_dir_, curve_, n_max)) {
            base_ = std::move(*cached);
            ++cache_hits_;
            return;
        }
    }
    base_ = coefficient_table(curve_, n_max);
    if (!cache_dir_.empty()) save_coefficient_cache(cache_dir_, curve_, base_);
}

CompletedSeries TwistEngine::series_for_twist(i64 d, int R) {
    require_admissible_twist(d, curve_.conductor_q);
    i64 N = curve_.conductor_q * d * d;
    ensure_coverage(truncation_length(N, R));
    CompletedSeries s;
    s.coefficients = twisted_coefficients(base_, d, curve_.conductor_q);
    s.conductor_N = N;
    s.omega = omega_of(d);
    return s;
}

TwistEngine::TwistValues TwistEngine::evaluate(i64 d, int R,
                                               const std::vector<const GrGrid*>* grids,
                                               bool fe_probe) const {
    require_admissible_twist(d, curve_.conductor_q);
    const i64 N = curve_.conductor_q * d * d;
    const i64 need = truncation_length(N, R);
    if (base_.n_max < need)
        throw math_error("TwistEngine::evaluate: base table covers n_max=" +
                         std::to_string(base_.n_max) + ", need " + std::to_string(need));
    const i64 ad = std::llabs(d);
    std::vector<signed char> chi(static_cast<size_t>(ad));
    for (i64 r = 0; r < ad; ++r) chi[static_cast<size_t>(r)] = static_cast<signed char>(kronecker(d, r));

    TwistValues tv;
    tv.d = d;
    tv.conductor_N = N;
    tv.omega = omega_of(d);
    const double c = 2.0 * M_PI / std::sqrt(static_cast<double>(N));
    tv.lambda.R = R;
    tv.lambda.values.assign(static_cast<size_t>(R) + 1, 0.0);
    for (int r = 0; r <= R; ++r) {
        int parity = 1 + (r % 2 == 0 ? tv.omega : -tv.omega);
        if (parity == 0) continue;
        const GrGrid* grid = nullptr;
        if (grids && r >= 2 && static_cast<size_t>(r) < grids->size())
            grid = (*grids)[static_cast<size_t>(r)];
        Kahan acc;
        for (i64 n = 1; n <= need; ++n) {
            i64 an = base_.a[static_cast<size_t>(n)];
            if (an == 0) continue;
            int ch = chi[static_cast<size_t>(n % ad)];
            if (ch == 0) continue;
            double x = c * static_cast<double>(n);
            double ker;
            if (r == 0)
                ker = x > 700.0 ? 0.0 : std::exp(-x) / x;
            else if (r == 1)
                ker = x > 700.0 ? 0.0 : expint_e1(x) / x;
            else
                ker = grid ? (*grid)(x) : g_r_weight(r, x);
            acc.add(static_cast<double>(an * ch) * ker);
        }
        tv.lambda.values[static_cast<size_t>(r)] = parity * acc.sum;
    }
    tv.lambda.truncation_error_bound = tail_bound(need, c, R);
    tv.l_derivs = l_derivatives_from_lambda(tv.lambda, N, R);
    tv.taylor.c.resize(static_cast<size_t>(R) + 1);
    for (int m = 0; m <= R; ++m)
        tv.taylor.c[static_cast<size_t>(m)] = tv.l_derivs[static_cast<size_t>(m)] / factorial(m);
    tv.taylor.analytic_rank = analytic_rank_estimate(tv.taylor.c, &tv.taylor.rank_tolerance);

    if (fe_probe) {
        // independent kernel evaluations at s = 1.3 / 0.7 (reversed order)
        auto sum_at = [&](double s, bool rev) {
            Kahan acc;
            auto term = [&](i64 n) {
                i64 an = base_.a[static_cast<size_t>(n)];
                if (an == 0) return;
                int ch = chi[static_cast<size_t>(n % ad)];
                if (ch == 0) return;
                double x = c * static_cast<double>(n);
                acc.add(static_cast<double>(an * ch) *
                        (g_s_weight(s, x) + tv.omega * g_s_weight(2.0 - s, x)));
            };
            if (rev)
                for (i64 n = need; n >= 1; --n) term(n);
            else
                for (i64 n = 1; n <= need; ++n) term(n);
            return acc.sum;
        };
        double a = sum_at(1.3, false), b = sum_at(0.7, true);
        tv.fe_residual = std::fabs(a - tv.omega * b) / (1.0 + std::fabs(a));
    }
    return tv;
}

int analytic_rank_estimate(const std::vector<double>& c, double* tol_out) {
    double sup = 0.0;
    for (double v : c) sup = std::max(sup, std::fabs(v));
    double tol = 1e-6 * std::max(1.0, sup);
    if (tol_out) *tol_out = tol;
    for (size_t i = 0; i < c.size(); ++i)
        if (std::fabs(c[i]) > tol) return static_cast<int>(i);
    return static_cast<int>(c.size());  // vanishing to working precision through order R
}

TaylorCoefficients taylor_coefficients(const WeierstrassCurve& curve, i64 d, int R) {
    if (R > 15) throw config_error("taylor_coefficients: R must be <= 15");
    TwistEngine engine(curve);
    engine.ensure_coverage(truncation_length(curve.conductor_q * d * d, R));
    return engine.evaluate(d, R).taylor;
}

}  // namespace qtwist
