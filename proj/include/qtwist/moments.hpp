#pragma once

#include <optional>
#include <string>
#include <vector>

#include "qtwist/arith.hpp"
#include "qtwist/bump.hpp"
#include "qtwist/euler_products.hpp"
#include "qtwist/lfunc.hpp"

namespace qtwist {

enum class FamilyKind { eight_d, all_fundamental };

struct FamilySpec {
    WeierstrassCurve curve;
    std::vector<double> X_grid;  // ascending; each >= 100
    FamilyKind family = FamilyKind::eight_d;
    int l1 = 0, l2 = 0;
    BumpFunction weight = BumpFunction::j_bump();
    double weight_scale = 1.0;

    FamilySpec(WeierstrassCurve c) : curve(std::move(c)) {}
    void validate() const;
};

struct HarnessOptions {
    int workers = 1;
    std::string cache_dir;
    std::string checkpoint_path;  // empty: no checkpointing
    i64 prime_cutoff = 100000;
    bool fe_check = true;             // functional-equation residual probe per twist
    bool weight_index_qprime = false; // Z-weight indexing variant
};

struct RuntimeStats {
    double wall_seconds = 0.0;
    int workers = 1;
    i64 twists_evaluated = 0;
    double max_fe_residual = 0.0;
    i64 checkpoint_resumed_at = 0;  // 0: cold start
};

struct MomentReport {
    std::vector<double> X_values;
    std::vector<double> empirical;
    std::vector<double> predicted_leading;
    std::vector<double> ratios;
    double exponent_fit = 0.0;
    int l1 = 0, l2 = 0;
    i64 prime_cutoff = 0;
    RuntimeStats runtime_stats;
};

struct NonvanishReport {
    double X = 0.0;
    int i = 0;
    std::optional<int> joint_j;
    double tol = 0.0;
    i64 family_size = 0;
    i64 count = 0;        // |c_i| > tol
    i64 count_joint = 0;  // |c_i| > tol and |c_j| > tol
    double baseline = 0.0;  // X / log X
    RuntimeStats runtime_stats;
};

// Weighted family first moment of L^{(i)} with predicted leading term.
MomentReport first_moment_run(const FamilySpec& spec, int i, const HarnessOptions& opts);

// Weighted family moment of L^{(l1)} L^{(l2)} against the Theorem-4.1 shape.
MomentReport second_moment_run(const FamilySpec& spec, const HarnessOptions& opts);

// Nonvanishing counters (and joint pairs) at each X of the grid.
std::vector<NonvanishReport> nonvanishing_count(const FamilySpec& spec, int i, double tol,
                                                const HarnessOptions& opts,
                                                std::optional<int> joint_j = std::nullopt);

// The twist discriminants a family touches at scale X.
std::vector<TwistDescriptor> family_members(const FamilySpec& spec, double X, int eta);

}  // namespace qtwist
