#include "qtwist/moments.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <thread>

#include "qtwist/errors.hpp"

namespace qtwist {

void FamilySpec::validate() const {
    if (X_grid.empty()) throw config_error("FamilySpec: empty X grid");
    for (double x : X_grid)
        if (!(x >= 100.0)) throw config_error("FamilySpec: every X must be >= 100");
    if (!std::is_sorted(X_grid.begin(), X_grid.end()))
        throw config_error("FamilySpec: X grid must ascend");
    if (family == FamilyKind::eight_d && curve.conductor_q % 2 == 0)
        throw config_error("FamilySpec: the 8d family requires odd conductor");
    if (l1 < 0 || l2 < 0 || l1 > 2 || l2 > 2)
        throw config_error("FamilySpec: per-twist derivative orders are capped at 2");
    if (weight_scale <= 0) throw config_error("FamilySpec: weight_scale must be positive");
}

std::vector<TwistDescriptor> family_members(const FamilySpec& spec, double X, int eta) {
    FamilyConstraints fc;
    const i64 q = spec.curve.conductor_q;
    if (spec.family == FamilyKind::eight_d) {
        fc.family_8d = true;
        fc.coprime_to = q;
        // J support: X/2 < D < 2X
        i64 lo = static_cast<i64>(X / 2.0) + 1;
        i64 hi = static_cast<i64>(2.0 * X) - 1;
        return enumerate_fundamental_discriminants(lo, hi, fc, q, eta);
    }
    fc.coprime_to = 2 * q;
    i64 hi = static_cast<i64>(X);
    return enumerate_fundamental_discriminants(-hi, hi, fc, q, eta);
}

namespace {

struct TwistSlot {
    i64 d = 0;
    std::vector<double> l_derivs;
    std::vector<double> c;
    double fe_residual = -1.0;
    bool done = false;
};

// Evaluate slots [resume_from..n) in parallel, one twist per task; values are
// independent of the schedule, so worker count never changes results.
template <typename F>
void run_pool(std::vector<TwistSlot>& slots, size_t resume_from, int workers, F&& eval) {
    std::atomic<size_t> next{resume_from};
    auto worker = [&] {
        for (;;) {
            size_t i = next.fetch_add(1);
            if (i >= slots.size()) return;
            eval(slots[i]);
            slots[i].done = true;
        }
    };
    int nw = std::max(1, workers);
    std::vector<std::thread> threads;
    for (int w = 0; w < nw - 1; ++w) threads.emplace_back(worker);
    worker();
    for (auto& t : threads) t.join();
}

std::string hex_double(double v) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%a", v);
    return buf;
}

double parse_hex_double(const std::string& s) { return std::strtod(s.c_str(), nullptr); }

// Checkpoint: config tag, last completed slot index, and the running sums in
// hex so a resumed run reduces to bit-identical totals.
struct Checkpoint {
    std::string tag;
    i64 next_slot = 0;
    std::vector<double> sums;

    void save(const std::string& path) const {
        if (path.empty()) return;
        std::ofstream out(path + ".tmp", std::ios::trunc);
        if (!out) throw io_error("cannot write checkpoint: " + path);
        out << tag << "\n" << next_slot << "\n" << sums.size() << "\n";
        for (double s : sums) out << hex_double(s) << "\n";
        out.close();
        std::rename((path + ".tmp").c_str(), path.c_str());
    }
    static std::optional<Checkpoint> load(const std::string& path, const std::string& tag) {
        if (path.empty()) return std::nullopt;
        std::ifstream in(path);
        if (!in) return std::nullopt;
        Checkpoint cp;
        std::getline(in, cp.tag);
        if (cp.tag != tag) return std::nullopt;
        size_t n = 0;
        in >> cp.next_slot >> n;
        std::string s;
        std::getline(in, s);
        for (size_t i = 0; i < n; ++i) {
            std::getline(in, s);
            if (!in) return std::nullopt;
            cp.sums.push_back(parse_hex_double(s));
        }
        return cp;
    }
};

double slope_fit(const std::vector<double>& xs, const std::vector<double>& ys) {
    size_t n = xs.size();
    if (n < 2) return 0.0;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (size_t i = 0; i < n; ++i) {
        sx += xs[i];
        sy += ys[i];
        sxx += xs[i] * xs[i];
        sxy += xs[i] * ys[i];
    }
    double den = n * sxx - sx * sx;
    return den == 0 ? 0.0 : (n * sxy - sx * sy) / den;
}

struct FamilyRun {
    TwistEngine engine;
    std::vector<TwistSlot> slots;
    RuntimeStats stats;
    std::vector<const GrGrid*> grid_ptrs;
    std::vector<std::unique_ptr<GrGrid>> grids;

    FamilyRun(const FamilySpec& spec, const HarnessOptions& opts, int R)
        : engine(spec.curve, opts.cache_dir) {
        auto members = collect(spec);
        slots.resize(members.size());
        for (size_t i = 0; i < members.size(); ++i) slots[i].d = members[i].d;
        i64 d_max = 0;
        for (auto& m : members) d_max = std::max<i64>(d_max, std::llabs(m.d));
        if (d_max == 0) return;
        const i64 q = spec.curve.conductor_q;
        const i64 N_max = q * d_max * d_max;
        engine.ensure_coverage(truncation_length(N_max, R));
        if (R >= 2) {
            double x_min = 2.0 * M_PI / std::sqrt(static_cast<double>(N_max));
            double x_max = 40.0 + 5.0 * R + 2.0;
            grids.reserve(static_cast<size_t>(R) + 1);
            grid_ptrs.assign(static_cast<size_t>(R) + 1, nullptr);
            for (int r = 2; r <= R; ++r) {
                grids.push_back(std::make_unique<GrGrid>(r, x_min, x_max));
                grid_ptrs[static_cast<size_t>(r)] = grids.back().get();
            }
        }
    }

    std::vector<TwistDescriptor> collect(const FamilySpec& spec) {
        std::vector<TwistDescriptor> all;
        for (double X : spec.X_grid) {
            auto v = family_members(spec, X, engine.eta());
            all.insert(all.end(), v.begin(), v.end());
        }
        std::sort(all.begin(), all.end(), [](const TwistDescriptor& a, const TwistDescriptor& b) {
            i64 aa = std::llabs(a.d), ab = std::llabs(b.d);
            return aa != ab ? aa < ab : a.d > b.d;
        });
        all.erase(std::unique(all.begin(), all.end(),
                              [](const TwistDescriptor& a, const TwistDescriptor& b) {
                                  return a.d == b.d;
                              }),
                  all.end());
        return all;
    }
};

}  // namespace

MomentReport first_moment_run(const FamilySpec& spec, int i, const HarnessOptions& opts) {
    FamilySpec sp = spec;
    sp.l1 = i;
    sp.l2 = 0;
    sp.validate();
    if (spec.family != FamilyKind::eight_d)
        throw config_error("first_moment_run: requires the 8d family");
    auto t0 = std::chrono::steady_clock::now();
    const int R = i;
    FamilyRun run(sp, opts, R);

    std::string tag = "first_moment i=" + std::to_string(i) + " q=" +
                      std::to_string(spec.curve.conductor_q) + " nslots=" +
                      std::to_string(run.slots.size());
    size_t resume = 0;
    std::vector<double> sums(spec.X_grid.size(), 0.0);
    if (auto cp = Checkpoint::load(opts.checkpoint_path, tag)) {
        resume = static_cast<size_t>(cp->next_slot);
        sums = cp->sums;
        run.stats.checkpoint_resumed_at = cp->next_slot;
    }

    const auto* grids = run.grid_ptrs.empty() ? nullptr : &run.grid_ptrs;
    run_pool(run.slots, resume, opts.workers, [&](TwistSlot& s) {
        auto tv = run.engine.evaluate(s.d, R, grids, opts.fe_check);
        s.l_derivs = tv.l_derivs;
        s.fe_residual = tv.fe_residual;
    });

    // canonical d-ascending reduction
    for (size_t k = resume; k < run.slots.size(); ++k) {
        const auto& s = run.slots[k];
        for (size_t xi = 0; xi < spec.X_grid.size(); ++xi) {
            double w = spec.weight_scale * spec.weight(static_cast<double>(s.d) / spec.X_grid[xi]);
            if (w != 0.0) sums[xi] += s.l_derivs[static_cast<size_t>(i)] * w;
        }
        run.stats.max_fe_residual = std::max(run.stats.max_fe_residual, s.fe_residual);
        if (!opts.checkpoint_path.empty() && (k + 1) % 32 == 0) {
            Checkpoint cp{tag, static_cast<i64>(k + 1), sums};
            cp.save(opts.checkpoint_path);
        }
    }
    if (!opts.checkpoint_path.empty()) {
        Checkpoint cp{tag, static_cast<i64>(run.slots.size()), sums};
        cp.save(opts.checkpoint_path);
    }

    // predicted leading term; at i = 0 both alpha -> 0 main terms contribute
    const i64 q = spec.curve.conductor_q;
    const int eta = run.engine.eta();
    const double Jt1 = spec.weight_scale * mellin_J(1.0);
    auto L1 = sym_square_L1(run.engine.base_table(), q, opts.prime_cutoff);
    auto Zq0 = Z_alpha(q, 0.0, run.engine.base_table(), q, opts.prime_cutoff,
                       opts.weight_index_qprime);
    double z1_term = 0.0;
    if (i == 0) {
        auto Z10 = Z_alpha(1, 0.0, run.engine.base_table(), q, opts.prime_cutoff,
                           opts.weight_index_qprime);
        z1_term = L1.value * Z10.value;
    }

    MomentReport rep;
    rep.l1 = i;
    rep.X_values = spec.X_grid;
    rep.prime_cutoff = opts.prime_cutoff;
    for (size_t xi = 0; xi < spec.X_grid.size(); ++xi) {
        double X = spec.X_grid[xi];
        double lead = std::pow(-2.0, i) * (-eta) / (2.0 * M_PI * M_PI) * Jt1 * L1.value *
                          Zq0.value * X * std::pow(std::log(X), i) +
                      X / (2.0 * M_PI * M_PI) * Jt1 * z1_term;
        rep.empirical.push_back(sums[xi]);
        rep.predicted_leading.push_back(lead);
        rep.ratios.push_back(lead != 0.0 ? sums[xi] / lead : 0.0);
    }
    std::vector<double> lx, ly;
    for (size_t xi = 0; xi < spec.X_grid.size(); ++xi) {
        if (rep.empirical[xi] > 0) {
            lx.push_back(std::log(std::log(spec.X_grid[xi])));
            ly.push_back(std::log(rep.empirical[xi] / spec.X_grid[xi]));
        }
    }
    rep.exponent_fit = slope_fit(lx, ly);
    rep.runtime_stats.workers = opts.workers;
    rep.runtime_stats.twists_evaluated = static_cast<i64>(run.slots.size() - resume);
    rep.runtime_stats.max_fe_residual = run.stats.max_fe_residual;
    rep.runtime_stats.checkpoint_resumed_at = run.stats.checkpoint_resumed_at;
    rep.runtime_stats.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return rep;
}

MomentReport second_moment_run(const FamilySpec& spec, const HarnessOptions& opts) {
    spec.validate();
    if (spec.family != FamilyKind::eight_d)
        throw config_error("second_moment_run: requires the 8d family");
    if (spec.l1 + spec.l2 > 4)
        throw config_error("second_moment_run: l1 + l2 must be <= 4");
    auto t0 = std::chrono::steady_clock::now();
    const int R = std::max(spec.l1, spec.l2);
    FamilyRun run(spec, opts, R);

    std::string tag = "second_moment l1=" + std::to_string(spec.l1) + " l2=" +
                      std::to_string(spec.l2) + " q=" +
                      std::to_string(spec.curve.conductor_q) + " nslots=" +
                      std::to_string(run.slots.size());
    size_t resume = 0;
    std::vector<double> sums(spec.X_grid.size(), 0.0);
    if (auto cp = Checkpoint::load(opts.checkpoint_path, tag)) {
        resume = static_cast<size_t>(cp->next_slot);
        sums = cp->sums;
        run.stats.checkpoint_resumed_at = cp->next_slot;
    }

    const auto* grids = run.grid_ptrs.empty() ? nullptr : &run.grid_ptrs;
    run_pool(run.slots, resume, opts.workers, [&](TwistSlot& s) {
        auto tv = run.engine.evaluate(s.d, R, grids, opts.fe_check);
        s.l_derivs = tv.l_derivs;
        s.fe_residual = tv.fe_residual;
    });

    for (size_t k = resume; k < run.slots.size(); ++k) {
        const auto& s = run.slots[k];
        double prod = s.l_derivs[static_cast<size_t>(spec.l1)] *
                      s.l_derivs[static_cast<size_t>(spec.l2)];
        for (size_t xi = 0; xi < spec.X_grid.size(); ++xi) {
            double w = spec.weight_scale * spec.weight(static_cast<double>(s.d) / spec.X_grid[xi]);
            if (w != 0.0) sums[xi] += prod * w;
        }
        run.stats.max_fe_residual = std::max(run.stats.max_fe_residual, s.fe_residual);
        if (!opts.checkpoint_path.empty() && (k + 1) % 32 == 0) {
            Checkpoint cp{tag, static_cast<i64>(k + 1), sums};
            cp.save(opts.checkpoint_path);
        }
    }
    if (!opts.checkpoint_path.empty()) {
        Checkpoint cp{tag, static_cast<i64>(run.slots.size()), sums};
        cp.save(opts.checkpoint_path);
    }

    const i64 q = spec.curve.conductor_q;
    const int eta = run.engine.eta();
    const double Jt1 = spec.weight_scale * mellin_J(1.0);
    auto L1 = sym_square_L1(run.engine.base_table(), q, opts.prime_cutoff);
    auto Z1s = Zstar_halfhalf(1, run.engine.base_table(), q, opts.prime_cutoff,
                              opts.weight_index_qprime);
    auto Zqs = Zstar_halfhalf(q, run.engine.base_table(), q, opts.prime_cutoff,
                              opts.weight_index_qprime);
    double C = predicted_second_moment_constant(spec.l1, spec.l2, q, eta, Jt1, L1.value,
                                                Z1s.value, Zqs.value);

    MomentReport rep;
    rep.l1 = spec.l1;
    rep.l2 = spec.l2;
    rep.X_values = spec.X_grid;
    rep.prime_cutoff = opts.prime_cutoff;
    for (size_t xi = 0; xi < spec.X_grid.size(); ++xi) {
        double X = spec.X_grid[xi];
        double lead = C * X * std::pow(std::log(X), spec.l1 + spec.l2 + 1);
        rep.empirical.push_back(sums[xi]);
        rep.predicted_leading.push_back(lead);
        rep.ratios.push_back(lead != 0.0 ? sums[xi] / lead : 0.0);
    }
    std::vector<double> lx, ly;
    for (size_t xi = 0; xi < spec.X_grid.size(); ++xi) {
        if (rep.empirical[xi] > 0) {
            lx.push_back(std::log(std::log(spec.X_grid[xi])));
            ly.push_back(std::log(rep.empirical[xi] / spec.X_grid[xi]));
        }
    }
    rep.exponent_fit = slope_fit(lx, ly);
    rep.runtime_stats.workers = opts.workers;
    rep.runtime_stats.twists_evaluated = static_cast<i64>(run.slots.size() - resume);
    rep.runtime_stats.max_fe_residual = run.stats.max_fe_residual;
    rep.runtime_stats.checkpoint_resumed_at = run.stats.checkpoint_resumed_at;
    rep.runtime_stats.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return rep;
}

std::vector<NonvanishReport> nonvanishing_count(const FamilySpec& spec, int i, double tol,
                                                const HarnessOptions& opts,
                                                std::optional<int> joint_j) {
    spec.validate();
    auto t0 = std::chrono::steady_clock::now();
    const int R = std::max(i, joint_j.value_or(0));
    TwistEngine engine(spec.curve, opts.cache_dir);

    std::vector<NonvanishReport> out;
    for (double X : spec.X_grid) {
        auto members = family_members(spec, X, engine.eta());
        // counting families run over D (or 8d) up to X, not the J window
        if (spec.family == FamilyKind::eight_d) {
            FamilyConstraints fc;
            fc.family_8d = true;
            fc.coprime_to = spec.curve.conductor_q;
            members = enumerate_fundamental_discriminants(1, static_cast<i64>(X), fc,
                                                          spec.curve.conductor_q, engine.eta());
        }
        i64 d_max = 0;
        for (auto& m : members) d_max = std::max<i64>(d_max, std::llabs(m.d));
        if (d_max > 0)
            engine.ensure_coverage(
                truncation_length(spec.curve.conductor_q * d_max * d_max, R));

        std::vector<TwistSlot> slots(members.size());
        for (size_t k = 0; k < members.size(); ++k) slots[k].d = members[k].d;
        RuntimeStats stats;
        run_pool(slots, 0, opts.workers, [&](TwistSlot& s) {
            auto tv = engine.evaluate(s.d, R, nullptr, opts.fe_check);
            s.c = tv.taylor.c;
            s.fe_residual = tv.fe_residual;
        });

        NonvanishReport rep;
        rep.X = X;
        rep.i = i;
        rep.joint_j = joint_j;
        rep.tol = tol;
        rep.family_size = static_cast<i64>(members.size());
        rep.baseline = X / std::log(X);
        for (auto& s : slots) {
            bool ci = std::fabs(s.c[static_cast<size_t>(i)]) > tol;
            if (ci) ++rep.count;
            if (joint_j && ci && std::fabs(s.c[static_cast<size_t>(*joint_j)]) > tol)
                ++rep.count_joint;
            stats.max_fe_residual = std::max(stats.max_fe_residual, s.fe_residual);
        }
        rep.runtime_stats = stats;
        rep.runtime_stats.workers = opts.workers;
        rep.runtime_stats.twists_evaluated = static_cast<i64>(members.size());
        rep.runtime_stats.wall_seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        out.push_back(rep);
    }
    return out;
}

}  // namespace qtwist
