#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "qtwist/config.hpp"
#include "qtwist/errors.hpp"
#include "qtwist/runner.hpp"

using namespace qtwist;
namespace fs = std::filesystem;

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path tmpdir() {
    auto p = fs::temp_directory_path() / "qtwist_cli_test";
    fs::create_directories(p);
    return p;
}

}  // namespace

TEST_CASE("config parsing: values, comments, overrides") {
    auto cfg = parse_config_text(
        "task = taylor\n"
        "a4 = -1   # congruent number curve\n"
        "conductor = 32\n"
        "eta = auto\n"
        "d = 5\n"
        "R = 11\n"
        "workers = 2\n");
    CHECK(cfg.task == TaskKind::taylor);
    CHECK(cfg.a4 == -1);
    CHECK(cfg.conductor == 32);
    CHECK_FALSE(cfg.eta.has_value());
    CHECK(cfg.d == 5);
    CHECK(cfg.workers == 2);
    cfg.validate();
}

TEST_CASE("config errors name the offending key") {
    CHECK_THROWS_AS(parse_config_text("frobnicate = 1\n"), config_error);
    try {
        parse_config_text("frobnicate = 1\n");
    } catch (const config_error& e) {
        CHECK(std::string(e.what()).find("frobnicate") != std::string::npos);
    }
    try {
        auto cfg = parse_config_text("task = taylor\nconductor = 32\na4 = -1\nR = 99\nd = 5\n");
        cfg.validate();
        FAIL("expected config_error");
    } catch (const config_error& e) {
        CHECK(std::string(e.what()).find("R") != std::string::npos);
    }
    // singular curve rejected
    try {
        auto cfg = parse_config_text("task = taylor\nconductor = 32\nd = 5\n");  // all a_i = 0
        cfg.validate();
        FAIL("expected config_error");
    } catch (const config_error& e) {
        CHECK(std::string(e.what()).find("singular") != std::string::npos);
    }
}

TEST_CASE("taylor run: paper row, manifest, idempotence with warm cache") {
    auto dir = tmpdir();
    auto cfg = parse_config_text(
        "task = taylor\n"
        "a4 = -1\n"
        "conductor = 32\n"
        "d = 5\n"
        "R = 11\n");
    cfg.out = (dir / "taylor5.csv").string();
    cfg.cache_dir = (dir / "cache").string();
    auto res1 = run(cfg);
    CHECK(res1.exit_code == 0);
    auto body1 = slurp(cfg.out);
    CHECK(body1.find("d,N,omega,r_d") == 0);
    CHECK(body1.find("5,800,-1,1") != std::string::npos);
    CHECK(fs::exists(cfg.out + ".manifest.json"));

    // warm cache: byte-identical artifact, cache hit recorded in manifest
    auto res2 = run(cfg);
    CHECK(res2.exit_code == 0);
    CHECK(slurp(cfg.out) == body1);
    auto manifest = slurp(cfg.out + ".manifest.json");
    CHECK(manifest.find("\"cache_hits\": 1") != std::string::npos);
}

TEST_CASE("sign survey: empty admissible range exits clean") {
    auto cfg = parse_config_text(
        "task = sign-survey\n"
        "a4 = -1\n"
        "conductor = 32\n"
        "d_min = 2\n"
        "d_max = 4\n"
        "h = 1\n");
    auto rep = sign_survey(cfg);
    CHECK(rep.rows.empty());
    CHECK(rep.violations.empty());
}

TEST_CASE("sign survey: the paper twist d=5 sits below threshold (report zone)") {
    auto cfg = parse_config_text(
        "task = sign-survey\n"
        "a4 = -1\n"
        "conductor = 32\n"
        "d_min = 5\n"
        "d_max = 5\n"
        "h = 1\n"
        "workers = 2\n");
    auto rep = sign_survey(cfg);
    REQUIRE(rep.rows.size() == 1);
    CHECK_FALSE(rep.rows[0].assertion_zone);
    CHECK(rep.rows[0].omega == -1);
    CHECK(rep.rows[0].r_d == 1);
    CHECK(rep.violations.empty());  // report zone never asserts
}

TEST_CASE("moments CSV body is byte-identical across worker counts") {
    auto dir = tmpdir();
    auto text =
        "task = moments\n"
        "a1 = 0\na2 = -1\na3 = 1\na4 = -10\na6 = -20\n"
        "conductor = 11\n"
        "family = 8d\n"
        "X_grid = 500,800\n"
        "l1 = 0\nl2 = 0\n"
        "prime_cutoff = 2000\n"
        "fe_check = off\n";
    auto cfg1 = parse_config_text(text);
    cfg1.workers = 1;
    cfg1.out = (dir / "m1.csv").string();
    auto cfg4 = parse_config_text(text);
    cfg4.workers = 4;
    cfg4.out = (dir / "m4.csv").string();
    run(cfg1);
    run(cfg4);
    CHECK(slurp(cfg1.out) == slurp(cfg4.out));
}

TEST_CASE("selftest task runs green") {
    auto table = run_selftests();
    for (auto& [name, ok] : table) {
        INFO(name);
        CHECK(ok);
    }
}
