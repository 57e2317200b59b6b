#include "qtwist/config.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "qtwist/errors.hpp"

namespace qtwist {

std::string task_name(TaskKind t) {
    switch (t) {
        case TaskKind::taylor: return "taylor";
        case TaskKind::sign_survey: return "sign-survey";
        case TaskKind::moments: return "moments";
        case TaskKind::nonvanish: return "nonvanish";
        case TaskKind::selftest: return "selftest";
    }
    return "?";
}

TaskKind task_from_name(const std::string& name) {
    if (name == "taylor") return TaskKind::taylor;
    if (name == "sign-survey") return TaskKind::sign_survey;
    if (name == "moments") return TaskKind::moments;
    if (name == "nonvanish") return TaskKind::nonvanish;
    if (name == "selftest") return TaskKind::selftest;
    throw config_error("unknown task: " + name);
}

namespace {

std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    size_t b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

i64 to_i64(const std::string& key, const std::string& v) {
    try {
        size_t pos = 0;
        i64 r = std::stoll(v, &pos);
        if (pos != v.size()) throw std::invalid_argument("trailing");
        return r;
    } catch (...) {
        throw config_error("config key '" + key + "': not an integer: " + v);
    }
}

double to_double(const std::string& key, const std::string& v) {
    try {
        size_t pos = 0;
        double r = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument("trailing");
        return r;
    } catch (...) {
        throw config_error("config key '" + key + "': not a number: " + v);
    }
}

bool to_bool(const std::string& key, const std::string& v) {
    if (v == "on" || v == "true" || v == "1") return true;
    if (v == "off" || v == "false" || v == "0") return false;
    throw config_error("config key '" + key + "': expected on/off: " + v);
}

}  // namespace

JobConfig parse_config_text(const std::string& text) {
    JobConfig cfg;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw config_error("config line " + std::to_string(lineno) +
                               ": expected key = value");
        std::string key = trim(line.substr(0, eq));
        std::string val = trim(line.substr(eq + 1));
        cfg.echo[key] = val;
        if (key == "task") cfg.task = task_from_name(val);
        else if (key == "a1") cfg.a1 = to_i64(key, val);
        else if (key == "a2") cfg.a2 = to_i64(key, val);
        else if (key == "a3") cfg.a3 = to_i64(key, val);
        else if (key == "a4") cfg.a4 = to_i64(key, val);
        else if (key == "a6") cfg.a6 = to_i64(key, val);
        else if (key == "conductor") cfg.conductor = to_i64(key, val);
        else if (key == "eta") {
            if (val == "auto") cfg.eta.reset();
            else {
                i64 e = to_i64(key, val);
                if (e != 1 && e != -1) throw config_error("config key 'eta': must be auto/1/-1");
                cfg.eta = static_cast<int>(e);
            }
        }
        else if (key == "d") cfg.d = to_i64(key, val);
        else if (key == "d_min") cfg.d_min = to_i64(key, val);
        else if (key == "d_max") cfg.d_max = to_i64(key, val);
        else if (key == "R") cfg.R = static_cast<int>(to_i64(key, val));
        else if (key == "h") cfg.h = static_cast<int>(to_i64(key, val));
        else if (key == "family") {
            if (val != "8d" && val != "fundamental")
                throw config_error("config key 'family': expected 8d or fundamental");
            cfg.family = val;
        }
        else if (key == "X_grid") {
            cfg.X_grid.clear();
            std::istringstream xs(val);
            std::string tok;
            while (std::getline(xs, tok, ',')) cfg.X_grid.push_back(to_double(key, trim(tok)));
        }
        else if (key == "moment") {
            if (val != "first" && val != "second")
                throw config_error("config key 'moment': expected first or second");
            cfg.moment_kind = val;
        }
        else if (key == "l1") cfg.l1 = static_cast<int>(to_i64(key, val));
        else if (key == "l2") cfg.l2 = static_cast<int>(to_i64(key, val));
        else if (key == "i") cfg.i_order = static_cast<int>(to_i64(key, val));
        else if (key == "j") cfg.j_order = static_cast<int>(to_i64(key, val));
        else if (key == "tol") cfg.tol = to_double(key, val);
        else if (key == "prime_cutoff") cfg.prime_cutoff = to_i64(key, val);
        else if (key == "weight_index") {
            if (val == "q") cfg.weight_index_qprime = false;
            else if (val == "qprime") cfg.weight_index_qprime = true;
            else throw config_error("config key 'weight_index': expected q or qprime");
        }
        else if (key == "fe_check") cfg.fe_check = to_bool(key, val);
        else if (key == "out") cfg.out = val;
        else if (key == "format") {
            if (val != "csv" && val != "json")
                throw config_error("config key 'format': expected csv or json");
            cfg.format = val;
        }
        else if (key == "workers") cfg.workers = static_cast<int>(to_i64(key, val));
        else if (key == "cache_dir") cfg.cache_dir = val;
        else if (key == "checkpoint") cfg.checkpoint = val;
        else throw config_error("unknown config key: '" + key + "'");
    }
    return cfg;
}

JobConfig load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw io_error("cannot open config file: " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str());
}

WeierstrassCurve JobConfig::curve() const {
    return WeierstrassCurve(a1, a2, a3, a4, a6, conductor, eta);
}

void JobConfig::validate() const {
    if (task != TaskKind::selftest) {
        if (conductor <= 0) throw config_error("config key 'conductor': must be positive");
        curve();  // nonsingularity
    }
    if (workers < 1) throw config_error("config key 'workers': must be >= 1");
    if (R < 0 || R > 15) throw config_error("config key 'R': must lie in [0,15]");
    if (h < 1) throw config_error("config key 'h': must be >= 1");
    if (tol <= 0) throw config_error("config key 'tol': must be positive");
    if (prime_cutoff < 1000) throw config_error("config key 'prime_cutoff': must be >= 1000");
    switch (task) {
        case TaskKind::taylor:
            if (!d && !(d_min && d_max))
                throw config_error("config key 'd': taylor needs d or d_min/d_max");
            break;
        case TaskKind::sign_survey:
            if (!(d_min && d_max))
                throw config_error("config key 'd_min': sign-survey needs d_min and d_max");
            if (*d_min > *d_max)
                throw config_error("config key 'd_min': exceeds d_max");
            break;
        case TaskKind::moments:
            if (X_grid.empty()) throw config_error("config key 'X_grid': required for moments");
            if (l1 < 0 || l1 > 2 || l2 < 0 || l2 > 2)
                throw config_error("config key 'l1': per-twist orders are capped at 2");
            if (moment_kind == "first" && (i_order < 0 || i_order > 2))
                throw config_error("config key 'i': first-moment order capped at 2");
            break;
        case TaskKind::nonvanish:
            if (X_grid.empty()) throw config_error("config key 'X_grid': required for nonvanish");
            if (i_order < 0 || i_order > 2)
                throw config_error("config key 'i': order capped at 2");
            if (j_order && (*j_order < 0 || *j_order > 2))
                throw config_error("config key 'j': order capped at 2");
            break;
        case TaskKind::selftest:
            break;
    }
}

}  // namespace qtwist
