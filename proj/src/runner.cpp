#include "qtwist/runner.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "qtwist/bump.hpp"
#include "qtwist/errors.hpp"
#include "qtwist/gauss.hpp"
#include "qtwist/moments.hpp"
#include "qtwist/special.hpp"

namespace qtwist {

namespace fs = std::filesystem;
using nlohmann::json;

std::string qtwist_version() { return "0.1.0"; }

namespace {

std::string fmt12(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_text_atomic(const std::string& path, const std::string& body) {
    fs::path p(path);
    if (p.has_parent_path()) {
        std::error_code ec;
        fs::create_directories(p.parent_path(), ec);
    }
    std::ofstream out(path + ".tmp", std::ios::trunc | std::ios::binary);
    if (!out) throw io_error("cannot write artifact: " + path);
    out << body;
    out.close();
    if (!out) throw io_error("short write: " + path);
    std::error_code ec;
    fs::rename(path + ".tmp", path, ec);
    if (ec) throw io_error("cannot finalize artifact: " + path);
}

void write_manifest(const JobConfig& cfg, const RunResult& res, double wall_s,
                    i64 cache_hits, const std::string& out_path) {
    json m;
    m["task"] = task_name(cfg.task);
    m["config"] = cfg.echo;
    m["versions"] = {{"qtwist", qtwist_version()},
                     {"compiler", __VERSION__}};
    m["wall_time_s"] = wall_s;
    m["cache_hits"] = cache_hits;
    m["workers"] = cfg.workers;
    m["artifacts"] = res.artifacts;
    write_text_atomic(out_path, m.dump(2) + "\n");
}

std::string default_out(const JobConfig& cfg) {
    return cfg.out.empty() ? (task_name(cfg.task) + "." + cfg.format) : cfg.out;
}

// ---------- taylor ----------

RunResult run_taylor(const JobConfig& cfg) {
    auto t0 = std::chrono::steady_clock::now();
    WeierstrassCurve curve = cfg.curve();
    TwistEngine engine(curve, cfg.cache_dir);
    std::vector<i64> ds;
    if (cfg.d) {
        ds.push_back(*cfg.d);
    } else {
        FamilyConstraints fc;
        fc.coprime_to = 2 * curve.conductor_q;
        for (auto& t : enumerate_fundamental_discriminants(*cfg.d_min, *cfg.d_max, fc,
                                                           curve.conductor_q, engine.eta()))
            ds.push_back(t.d);
    }
    i64 dmax = 0;
    for (i64 d : ds) dmax = std::max<i64>(dmax, std::llabs(d));
    engine.ensure_coverage(truncation_length(curve.conductor_q * dmax * dmax, cfg.R));

    std::vector<TwistEngine::TwistValues> rows;
    rows.reserve(ds.size());
    for (i64 d : ds) rows.push_back(engine.evaluate(d, cfg.R, nullptr, cfg.fe_check));

    RunResult res;
    std::string out = default_out(cfg);
    if (cfg.format == "csv") {
        std::ostringstream csv;
        csv << "d,N,omega,r_d";
        for (int i = 0; i <= cfg.R; ++i) csv << ",c" << i;
        csv << "\n";
        for (auto& r : rows) {
            csv << r.d << "," << r.conductor_N << "," << r.omega << ","
                << r.taylor.analytic_rank;
            for (double c : r.taylor.c) csv << "," << fmt12(c);
            csv << "\n";
        }
        write_text_atomic(out, csv.str());
    } else {
        json j = json::array();
        for (auto& r : rows) {
            json row;
            row["d"] = r.d;
            row["N"] = r.conductor_N;
            row["omega"] = r.omega;
            row["r_d"] = r.taylor.analytic_rank;
            row["rank_tolerance"] = r.taylor.rank_tolerance;
            json cs = json::array();
            for (double c : r.taylor.c) cs.push_back(fmt17(c));
            row["c"] = cs;
            row["truncation_error_bound"] = r.lambda.truncation_error_bound;
            row["n_max"] = truncation_length(r.conductor_N, cfg.R);
            if (r.fe_residual >= 0) row["fe_residual"] = r.fe_residual;
            j.push_back(row);
        }
        write_text_atomic(out, j.dump(2) + "\n");
    }
    res.artifacts.push_back(out);
    double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    write_manifest(cfg, res, wall, engine.cache_hits(), out + ".manifest.json");
    res.artifacts.push_back(out + ".manifest.json");
    res.summary = "taylor: " + std::to_string(rows.size()) + " twist(s)";
    return res;
}

}  // namespace

// ---------- sign survey ----------

SignSurveyReport sign_survey(const JobConfig& cfg) {
    WeierstrassCurve curve = cfg.curve();
    TwistEngine engine(curve, cfg.cache_dir);
    const int h = cfg.h;
    const int R = std::max(1, h);
    auto thr = sign_threshold(1, curve.conductor_q);

    FamilyConstraints fc;
    fc.coprime_to = 2 * curve.conductor_q;
    auto members = enumerate_fundamental_discriminants(*cfg.d_min, *cfg.d_max, fc,
                                                       curve.conductor_q, engine.eta());
    i64 dmax = 0;
    for (auto& m : members) dmax = std::max<i64>(dmax, std::llabs(m.d));
    SignSurveyReport rep;
    rep.threshold = thr.value;
    if (dmax == 0) return rep;
    engine.ensure_coverage(truncation_length(curve.conductor_q * dmax * dmax, R));

    rep.rows.resize(members.size());
    std::atomic<size_t> next{0};
    auto worker = [&] {
        for (;;) {
            size_t k = next.fetch_add(1);
            if (k >= members.size()) return;
            i64 d = members[k].d;
            auto tv = engine.evaluate(d, R, nullptr, cfg.fe_check);
            SignSurveyRow row;
            row.d = d;
            row.N = tv.conductor_N;
            row.omega = tv.omega;
            row.assertion_zone = std::llabs(d) >= thr.value;
            row.c.assign(tv.taylor.c.begin(), tv.taylor.c.begin() + h + 1);
            row.r_d = std::min(tv.taylor.analytic_rank, h + 1);
            row.fe_residual = tv.fe_residual;
            for (int m = row.r_d; m <= h; ++m) {
                double cm = row.c[static_cast<size_t>(m)];
                if (std::fabs(cm) <= 1e-6) row.nonvanishing = false;
                int want = predicted_sign(m, tv.omega);
                if (std::fabs(cm) <= 1e-6 || (cm > 0 ? 1 : -1) != want) row.sign_ok = false;
            }
            rep.rows[k] = row;
        }
    };
    std::vector<std::thread> threads;
    for (int w = 0; w < cfg.workers - 1; ++w) threads.emplace_back(worker);
    worker();
    for (auto& t : threads) t.join();

    for (auto& row : rep.rows)
        if (row.assertion_zone && !row.sign_ok) rep.violations.push_back(row.d);
    return rep;
}

namespace {

RunResult run_sign_survey(const JobConfig& cfg) {
    auto t0 = std::chrono::steady_clock::now();
    auto rep = sign_survey(cfg);
    RunResult res;
    std::string out = default_out(cfg);
    std::ostringstream csv;
    csv << "d,N,omega,r_d,zone";
    for (int i = 0; i <= cfg.h; ++i) csv << ",c" << i;
    csv << ",sign_ok,nonvanishing\n";
    for (auto& r : rep.rows) {
        csv << r.d << "," << r.N << "," << r.omega << ","
            << (r.r_d > cfg.h ? ">" + std::to_string(cfg.h) : std::to_string(r.r_d)) << ","
            << (r.assertion_zone ? "assert" : "report");
        for (double c : r.c) csv << "," << fmt12(c);
        csv << "," << (r.sign_ok ? 1 : 0) << "," << (r.nonvanishing ? 1 : 0) << "\n";
    }
    write_text_atomic(out, csv.str());
    res.artifacts.push_back(out);
    double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    write_manifest(cfg, res, wall, 0, out + ".manifest.json");
    res.artifacts.push_back(out + ".manifest.json");
    if (!rep.violations.empty()) {
        res.exit_code = 2;
        std::ostringstream msg;
        msg << "sign-survey: " << rep.violations.size()
            << " assertion-zone violation(s), first at d=" << rep.violations.front();
        res.summary = msg.str();
    } else {
        res.summary = "sign-survey: " + std::to_string(rep.rows.size()) +
                      " twists, zero assertion-zone violations (threshold |d| >= " +
                      fmt12(rep.threshold) + ")";
    }
    return res;
}

// ---------- moments / nonvanish ----------

FamilySpec family_spec_from(const JobConfig& cfg) {
    FamilySpec spec(cfg.curve());
    spec.X_grid = cfg.X_grid;
    spec.family = cfg.family == "8d" ? FamilyKind::eight_d : FamilyKind::all_fundamental;
    spec.l1 = cfg.l1;
    spec.l2 = cfg.l2;
    return spec;
}

HarnessOptions harness_options_from(const JobConfig& cfg) {
    HarnessOptions o;
    o.workers = cfg.workers;
    o.cache_dir = cfg.cache_dir;
    o.checkpoint_path = cfg.checkpoint;
    o.prime_cutoff = cfg.prime_cutoff;
    o.fe_check = cfg.fe_check;
    o.weight_index_qprime = cfg.weight_index_qprime;
    return o;
}

RunResult run_moments(const JobConfig& cfg) {
    auto t0 = std::chrono::steady_clock::now();
    FamilySpec spec = family_spec_from(cfg);
    HarnessOptions opts = harness_options_from(cfg);
    MomentReport rep;
    if (cfg.moment_kind == "first")
        rep = first_moment_run(spec, cfg.i_order, opts);
    else
        rep = second_moment_run(spec, opts);

    RunResult res;
    std::string out = default_out(cfg);
    // wall_time lives in the manifest: the CSV body must be byte-identical
    // across worker counts and cache states
    if (cfg.format == "csv") {
        std::ostringstream csv;
        csv << "X,l1,l2,empirical,predicted,ratio,exponent_fit,prime_cutoff\n";
        for (size_t k = 0; k < rep.X_values.size(); ++k) {
            csv << fmt12(rep.X_values[k]) << ","
                << (cfg.moment_kind == "first" ? cfg.i_order : rep.l1) << ","
                << (cfg.moment_kind == "first" ? -1 : rep.l2) << ","
                << fmt12(rep.empirical[k]) << "," << fmt12(rep.predicted_leading[k]) << ","
                << fmt12(rep.ratios[k]) << "," << fmt12(rep.exponent_fit) << ","
                << rep.prime_cutoff << "\n";
        }
        write_text_atomic(out, csv.str());
    } else {
        json j;
        j["X"] = rep.X_values;
        j["l1"] = cfg.moment_kind == "first" ? cfg.i_order : rep.l1;
        j["l2"] = cfg.moment_kind == "first" ? -1 : rep.l2;
        json e = json::array(), p = json::array(), r = json::array();
        for (size_t k = 0; k < rep.X_values.size(); ++k) {
            e.push_back(fmt17(rep.empirical[k]));
            p.push_back(fmt17(rep.predicted_leading[k]));
            r.push_back(fmt17(rep.ratios[k]));
        }
        j["empirical"] = e;
        j["predicted"] = p;
        j["ratio"] = r;
        j["exponent_fit"] = rep.exponent_fit;
        j["prime_cutoff"] = rep.prime_cutoff;
        j["max_fe_residual"] = rep.runtime_stats.max_fe_residual;
        write_text_atomic(out, j.dump(2) + "\n");
    }
    res.artifacts.push_back(out);
    double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    write_manifest(cfg, res, wall, 0, out + ".manifest.json");
    res.artifacts.push_back(out + ".manifest.json");
    std::ostringstream sum;
    sum << "moments(" << cfg.moment_kind << "): ratio at largest X = "
        << (rep.ratios.empty() ? 0.0 : rep.ratios.back())
        << ", exponent_fit = " << rep.exponent_fit;
    res.summary = sum.str();
    return res;
}

RunResult run_nonvanish(const JobConfig& cfg) {
    auto t0 = std::chrono::steady_clock::now();
    FamilySpec spec = family_spec_from(cfg);
    HarnessOptions opts = harness_options_from(cfg);
    auto reps = nonvanishing_count(spec, cfg.i_order, cfg.tol, opts, cfg.j_order);

    RunResult res;
    std::string out = default_out(cfg);
    std::ostringstream csv;
    csv << "X,i,j,tol,family_size,count,count_joint,baseline\n";
    for (auto& r : reps) {
        csv << fmt12(r.X) << "," << r.i << ","
            << (r.joint_j ? std::to_string(*r.joint_j) : std::string("-")) << ","
            << fmt12(r.tol) << "," << r.family_size << "," << r.count << ","
            << (r.joint_j ? std::to_string(r.count_joint) : std::string("-")) << ","
            << fmt12(r.baseline) << "\n";
    }
    write_text_atomic(out, csv.str());
    res.artifacts.push_back(out);
    double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    write_manifest(cfg, res, wall, 0, out + ".manifest.json");
    res.artifacts.push_back(out + ".manifest.json");
    std::ostringstream sum;
    sum << "nonvanish: ";
    for (auto& r : reps)
        sum << "X=" << r.X << " count=" << r.count << " baseline=" << r.baseline << "; ";
    res.summary = sum.str();
    return res;
}

}  // namespace

// ---------- selftest ----------

std::vector<std::pair<std::string, bool>> run_selftests() {
    std::vector<std::pair<std::string, bool>> table;
    // gauss closed form == direct definition
    {
        bool ok = true;
        for (i64 n = 1; n <= 299 && ok; n += 2)
            for (i64 k = -10; k <= 10 && ok; ++k) {
                auto d = gauss_sum_direct(k, n);
                auto c = gauss_sum_closed(k, n);
                if (std::fabs(d.im) > 1e-8 || std::fabs(d.re - c.re) > 1e-6) ok = false;
            }
        table.emplace_back("gauss closed == direct (n<300, |k|<=10)", ok);
    }
    // poisson identities on a fixed pseudorandom sample
    {
        bool ok = true;
        std::mt19937 rng(20240817);
        for (int t = 0; t < 50 && ok; ++t) {
            i64 n = 2 * (rng() % 499) + 1;
            double Z = 1.0 + 19.0 * (rng() % 1000) / 1000.0;
            auto variant = (rng() % 2) ? PoissonVariant::all_d : PoissonVariant::odd_d;
            if (poisson_check(n, Z, variant) >= 1e-8) ok = false;
        }
        table.emplace_back("poisson residual < 1e-8 (50 samples)", ok);
    }
    // partition of unity
    {
        bool ok = true;
        for (int i = 0; i <= 200 && ok; ++i) {
            double x = 1.0 + 2.0 * i / 200.0;
            if (std::fabs(partition_G(x) + partition_G(x / 2) - 1.0) > 1e-12) ok = false;
        }
        for (int i = 0; i <= 200 && ok; ++i) {
            double x = 0.5 + 2.5 * i / 200.0;
            if (std::fabs(window_V(x) - 1.0) > 1e-12) ok = false;
        }
        table.emplace_back("partition identities G/V", ok);
    }
    // functional-equation residual on two small curves
    {
        bool ok = true;
        for (auto [q, a1, a2, a3, a4, a6] :
             {std::tuple<i64, i64, i64, i64, i64, i64>{32, 0, 0, 0, -1, 0},
              std::tuple<i64, i64, i64, i64, i64, i64>{11, 0, -1, 1, -10, -20}}) {
            WeierstrassCurve curve(a1, a2, a3, a4, a6, q);
            TwistEngine engine(curve, "");
            i64 d = q % 2 == 0 ? 5 : 8;
            engine.ensure_coverage(truncation_length(q * d * d, 1));
            auto tv = engine.evaluate(d, 1, nullptr, true);
            if (!(tv.fe_residual >= 0 && tv.fe_residual < 1e-8)) ok = false;
        }
        table.emplace_back("functional-equation residual < 1e-8", ok);
    }
    return table;
}

namespace {

RunResult run_selftest_task(const JobConfig& cfg) {
    auto t0 = std::chrono::steady_clock::now();
    auto table = run_selftests();
    RunResult res;
    std::ostringstream out;
    bool all = true;
    for (auto& [name, ok] : table) {
        out << (ok ? "PASS" : "FAIL") << "  " << name << "\n";
        all = all && ok;
    }
    res.summary = out.str();
    res.exit_code = all ? 0 : 2;
    if (!cfg.out.empty()) {
        write_text_atomic(cfg.out, out.str());
        res.artifacts.push_back(cfg.out);
        double wall =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        write_manifest(cfg, res, wall, 0, cfg.out + ".manifest.json");
        res.artifacts.push_back(cfg.out + ".manifest.json");
    }
    return res;
}

}  // namespace

RunResult run(const JobConfig& cfg) {
    cfg.validate();
    switch (cfg.task) {
        case TaskKind::taylor: return run_taylor(cfg);
        case TaskKind::sign_survey: return run_sign_survey(cfg);
        case TaskKind::moments: return run_moments(cfg);
        case TaskKind::nonvanish: return run_nonvanish(cfg);
        case TaskKind::selftest: return run_selftest_task(cfg);
    }
    throw config_error("unhandled task");
}

}  // namespace qtwist
