#pragma once

#include <memory>
#include <string>
#include <vector>

#include "qtwist/arith.hpp"
#include "qtwist/kernels.hpp"

namespace qtwist {

// The engine works at s = 1 with Gamma(s) (arithmetic normalization):
//   Lambda(s) = (sqrt(N)/2pi)^s Gamma(s) L(E^{(d)}, s),  Lambda(s) = omega Lambda(2-s).
// The analytic normalization L(s,f) = L(E, s+1/2) is the same object with the
// center relabeled; derivative values at the centers coincide order by order.
enum class CenterConvention { arithmetic_s1, analytic_half };

struct CompletedSeries {
    CoefficientTable coefficients;  // twisted table
    i64 conductor_N = 0;            // q d^2
    int omega = 0;
    CenterConvention center = CenterConvention::arithmetic_s1;
};

struct DerivativeVector {
    int R = 0;
    std::vector<double> values;  // values[r] = Lambda^{(r)}(1); forced parity zeros exact
    double truncation_error_bound = 0.0;
};

struct TaylorCoefficients {
    std::vector<double> c;  // c[i] = L^{(i)}(1)/i!
    int analytic_rank = 0;
    double rank_tolerance = 0.0;
};

struct InverseGammaTable {
    int t_max = 0;
    std::vector<double> g;  // g[t] = (1/Gamma)^{(t)}(1)
};

// n_max = ceil(sqrt(N)/(2 pi) * (38 + 5R)); makes the dropped tail of
// sum a_n G_r(2 pi n / sqrt(N)) certifiably below ~1e-10 for all r <= R.
i64 truncation_length(i64 N, int R);

// (1/Gamma)^{(t)} at s=1 by the exhaustive partition sum
//   sum_{k1+2k2+...+t kt = t} (-1)^{k1+...+kt+t} t!/(k1!...kt!)
//       gamma^{k1} (zeta(2)/2)^{k2} ... (zeta(t)/t)^{kt},   t <= 30.
double inverse_gamma_derivative(int t);
InverseGammaTable inverse_gamma_table(int t_max);

// Lambda^{(r)}(1) = (1 + (-1)^r omega) sum_n a_n G_r(2 pi n / sqrt(N)),
// r = 0..R.  Grids (optional) serve r >= 2 on the family hot path.
DerivativeVector lambda_derivatives(const CompletedSeries& series, int R,
                                    const std::vector<const GrGrid*>* grids = nullptr);

// Leibniz / Faa di Bruno conversion to L^{(m)}(1), m = 0..m_max.  The result
// is cross-checked against power-series multiplication of the three jets;
// a relative disagreement beyond 1e-9 throws (transcription bug guard).
std::vector<double> l_derivatives_from_lambda(const DerivativeVector& vec, i64 N,
                                              int m_max);

// Split-integral evaluation of Lambda(s) off center, kernel
// int_1^inf (y^{s-1} + omega y^{1-s}) e^{-x y} dy.
double lambda_at(const CompletedSeries& series, double s, bool reverse_order = false);

// |Lambda(1.3) - omega Lambda(0.7)| / (1 + |Lambda(1.3)|).
double functional_equation_residual(const CompletedSeries& series);

struct SignThreshold {
    double value = 0.0;
    bool overflow = false;  // h >= 2: reported as +infinity by policy
};
SignThreshold sign_threshold(int h, i64 q);

inline int predicted_sign(int m, int omega) { return m % 2 == 0 ? omega : -omega; }

struct SuperPositivityEntry {
    int order = 0;
    bool nonneg = false;
    bool strict = false;
};
std::vector<SuperPositivityEntry> superpositivity_check(const DerivativeVector& vec,
                                                        int r_d, int j_max);

// Fricke eigenvalue by functional-equation fit: both candidate signs are
// tested at s in {1.3, 1.7}; the winner must fit below 1e-8 and the loser
// must miss above 1e-3, else a precision error is thrown.
int detect_fricke_eta(const WeierstrassCurve& curve);

inline int root_number_twist(int eta, i64 d, i64 q) {
    require_admissible_twist(d, q);
    return -eta * kronecker(d, -q);
}

// Shared per-curve state for evaluating many twists: base coefficient table
// (grown on demand, optionally disk-cached) and the detected eta.
class TwistEngine {
  public:
    explicit TwistEngine(const WeierstrassCurve& curve, std::string cache_dir = "");

    const WeierstrassCurve& curve() const { return curve_; }
    int eta() const { return eta_; }
    int omega_of(i64 d) const { return -eta_ * kronecker(d, -curve_.conductor_q); }
    i64 cache_hits() const { return cache_hits_; }

    void ensure_coverage(i64 n_max);
    const CoefficientTable& base_table() const { return base_; }

    CompletedSeries series_for_twist(i64 d, int R);

    struct TwistValues {
        i64 d = 0;
        i64 conductor_N = 0;
        int omega = 0;
        DerivativeVector lambda;
        std::vector<double> l_derivs;
        TaylorCoefficients taylor;
        double fe_residual = -1.0;  // < 0 when the probe was not run
    };
    // Full per-twist evaluation without materializing a twisted table.
    TwistValues evaluate(i64 d, int R, const std::vector<const GrGrid*>* grids = nullptr,
                         bool fe_probe = false) const;

  private:
    WeierstrassCurve curve_;
    int eta_ = 0;
    CoefficientTable base_;
    std::string cache_dir_;
    i64 cache_hits_ = 0;
};

TaylorCoefficients taylor_coefficients(const WeierstrassCurve& curve, i64 d, int R);

// rank from coefficients: least i with |c_i| > tol, tol = 1e-6 max(1, sup|c|)
int analytic_rank_estimate(const std::vector<double>& c, double* tol_out = nullptr);

}  // namespace qtwist
