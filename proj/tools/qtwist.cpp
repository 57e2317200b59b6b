// qtwist: Taylor coefficients of quadratic-twist L-functions at the center,
// sign surveys, family moments and nonvanishing counts.
//
//   qtwist <taylor|sign-survey|moments|nonvanish|selftest> --config job.cfg
//
// Flags override config values.  Exit codes: 0 ok, 1 config, 2 math/precision,
// 3 I/O.

#include <cstdio>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "qtwist/config.hpp"
#include "qtwist/errors.hpp"
#include "qtwist/runner.hpp"

int main(int argc, char** argv) {
    CLI::App app{"quadratic-twist L-function toolkit"};
    app.require_subcommand(1);

    std::string config_path, cache_dir, out_path, format;
    int workers = 0;

    std::vector<CLI::App*> subs;
    for (const char* name :
         {"taylor", "sign-survey", "moments", "nonvanish", "selftest"}) {
        auto* sc = app.add_subcommand(name);
        sc->add_option("--config", config_path, "flat key=value config file");
        sc->add_option("--workers", workers, "worker thread count");
        sc->add_option("--cache-dir", cache_dir, "coefficient cache directory");
        sc->add_option("--out", out_path, "output artifact path");
        sc->add_option("--format", format, "csv or json");
        subs.push_back(sc);
    }

    CLI11_PARSE(app, argc, argv);

    try {
        qtwist::JobConfig cfg;
        if (!config_path.empty()) cfg = qtwist::load_config_file(config_path);
        cfg.task = qtwist::task_from_name(app.get_subcommands().front()->get_name());
        if (workers > 0) {
            cfg.workers = workers;
            cfg.echo["workers"] = std::to_string(workers);
        }
        if (!cache_dir.empty()) {
            cfg.cache_dir = cache_dir;
            cfg.echo["cache_dir"] = cache_dir;
        }
        if (!out_path.empty()) {
            cfg.out = out_path;
            cfg.echo["out"] = out_path;
        }
        if (!format.empty()) {
            if (format != "csv" && format != "json")
                throw qtwist::config_error("--format: expected csv or json");
            cfg.format = format;
            cfg.echo["format"] = format;
        }
        auto res = qtwist::run(cfg);
        if (!res.summary.empty()) std::cout << res.summary << "\n";
        for (auto& a : res.artifacts) std::cout << "wrote " << a << "\n";
        return res.exit_code;
    } catch (const qtwist::config_error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return qtwist::config_error::exit_code;
    } catch (const qtwist::math_error& e) {
        std::cerr << "math error: " << e.what() << "\n";
        return qtwist::math_error::exit_code;
    } catch (const qtwist::io_error& e) {
        std::cerr << "io error: " << e.what() << "\n";
        return qtwist::io_error::exit_code;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
