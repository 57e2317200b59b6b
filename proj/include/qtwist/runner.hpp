#pragma once

#include <string>
#include <vector>

#include "qtwist/config.hpp"
#include "qtwist/lfunc.hpp"

namespace qtwist {

struct RunResult {
    int exit_code = 0;
    std::vector<std::string> artifacts;
    std::string summary;
};

// Executes the configured task, writes the CSV/JSON artifact and a run
// manifest (config echo, versions, wall time, cache hits) next to it.
// Idempotent for identical config and caches.
RunResult run(const JobConfig& config);

struct SignSurveyRow {
    i64 d = 0;
    i64 N = 0;
    int omega = 0;
    int r_d = 0;            // min(rank, h+1); h+1 means "above h"
    bool assertion_zone = false;
    std::vector<double> c;  // c_0..c_h
    bool sign_ok = true;    // over r_d <= m <= h
    bool nonvanishing = true;
    double fe_residual = -1.0;
};

struct SignSurveyReport {
    double threshold = 0.0;
    std::vector<SignSurveyRow> rows;
    std::vector<i64> violations;  // assertion-zone offenders
};

SignSurveyReport sign_survey(const JobConfig& config);

// Self-test table used by the `selftest` subcommand: name, pass.
std::vector<std::pair<std::string, bool>> run_selftests();

std::string qtwist_version();

}  // namespace qtwist
