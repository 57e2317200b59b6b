#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "qtwist/arith.hpp"

namespace qtwist {

enum class TaskKind { taylor, sign_survey, moments, nonvanish, selftest };

// Flat key=value configuration (no nesting, diffable in manifests).
// Unknown keys and invalid values are rejected with the key named.
struct JobConfig {
    TaskKind task = TaskKind::selftest;

    // curve
    i64 a1 = 0, a2 = 0, a3 = 0, a4 = 0, a6 = 0;
    i64 conductor = 0;
    std::optional<int> eta;  // absent: auto-detect

    // taylor / sign-survey ranges
    std::optional<i64> d;
    std::optional<i64> d_min, d_max;
    int R = 11;
    int h = 1;

    // moments / nonvanish
    std::string family = "8d";  // "8d" | "fundamental"
    std::vector<double> X_grid;
    std::string moment_kind = "second";  // "first" | "second"
    int l1 = 0, l2 = 0;
    int i_order = 0;
    std::optional<int> j_order;
    double tol = 1e-6;
    i64 prime_cutoff = 100000;
    bool weight_index_qprime = false;
    bool fe_check = true;

    // common
    std::string out;
    std::string format = "csv";  // "csv" | "json"
    int workers = 1;
    std::string cache_dir;
    std::string checkpoint;

    std::map<std::string, std::string> echo;  // parsed key=value pairs, for manifests

    WeierstrassCurve curve() const;
    void validate() const;
};

JobConfig parse_config_text(const std::string& text);
JobConfig load_config_file(const std::string& path);

std::string task_name(TaskKind t);
TaskKind task_from_name(const std::string& name);

}  // namespace qtwist
