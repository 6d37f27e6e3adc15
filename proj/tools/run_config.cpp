#include "run_config.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

namespace cli {

int exit_code_of(qft_status status) {
    switch (status) {
        case QFT_OK: return kOk;
        case QFT_ERR_NON_CONVERGENT:
        case QFT_ERR_BRACKET_FAILURE:
        case QFT_ERR_BRANCH_COLLISION: return kNonConvergent;
        case QFT_ERR_VALIDATION: return kValidationFailure;
        default: return kConfigError;
    }
}

void check(qft_status status, const qft_context* ctx, const std::string& what) {
    if (status == QFT_OK) return;
    // Library messages already lead with the status name.
    throw Failure(exit_code_of(status), what + ": " + qft_last_error(ctx));
}

Json num(double v) {
    if (!std::isfinite(v)) return nullptr;
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return std::strtod(buf, nullptr);
}

std::string csv_num(double v) {
    if (!std::isfinite(v)) return "nan";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string part;
    std::istringstream is(s);
    while (std::getline(is, part, sep)) {
        if (!part.empty()) out.push_back(part);
    }
    return out;
}

qft_complex parse_complex(const Json& j) {
    if (j.is_number()) return {j.get<double>(), 0.0};
    if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number()) {
        return {j[0].get<double>(), j[1].get<double>()};
    }
    throw Failure(kConfigError, "expected a number or [re, im], got " + j.dump());
}

namespace {

[[noreturn]] void bad(const std::string& what) { throw Failure(kConfigError, what); }

template <class T>
void read(const Json& obj, const char* key, T& into) {
    if (obj.contains(key)) into = obj.at(key).get<T>();
}

std::pair<qft_complex, qft_complex> parse_direction(const Json& j) {
    if (!j.is_array() || j.size() != 2) bad("direction must be [dx, dy]");
    return {parse_complex(j[0]), parse_complex(j[1])};
}

qft_matrix parse_matrix(const Json& j) {
    if (!j.is_array() || j.size() != 4) bad("a matrix is [a, b, c, d] in row-major order");
    return {parse_complex(j[0]), parse_complex(j[1]), parse_complex(j[2]), parse_complex(j[3])};
}

qft_automorphism parse_phi(const std::string& name) {
    if (name == "ab-twist") return QFT_AB_TWIST;
    if (name == "ba-twist") return QFT_BA_TWIST;
    if (name == "swap") return QFT_SWAP;
    if (name == "invert-a") return QFT_INVERT_A;
    bad("unknown automorphism '" + name + "'");
}

Algorithm parse_algorithm(const Json& j) {
    Algorithm a;
    read(j, "nMax", a.n_max);
    read(j, "sMax", a.s_max);
    read(j, "gridSize", a.grid_size);
    read(j, "eps", a.eps);
    read(j, "maxHalvings", a.max_halvings);
    read(j, "wordCap", a.word_cap);
    read(j, "censusT", a.census_t);
    read(j, "workers", a.workers);
    if (j.contains("tolerances")) {
        const Json& t = j.at("tolerances");
        read(t, "root", a.root_tolerance);
        read(t, "census", a.census_tolerance);
        read(t, "convexity", a.convexity_tolerance);
    }
    if (a.n_max < 4 || a.n_max > 10) bad("algorithm.nMax must lie in 4..10");
    if (a.s_max < 1) bad("algorithm.sMax must be positive");
    if (a.grid_size < 5) bad("algorithm.gridSize must be at least 5");
    if (!(a.eps > 0.0)) bad("algorithm.eps must be positive");
    if (a.max_halvings < 0) bad("algorithm.maxHalvings must be >= 0");
    if (a.word_cap < 1 || a.word_cap > 14) bad("algorithm.wordCap must lie in 1..14");
    if (!(a.census_t > 0.0)) bad("algorithm.censusT must be positive");
    if (a.workers < 0) bad("algorithm.workers must be >= 0");
    if (!(a.root_tolerance > 0.0) || !(a.census_tolerance > 0.0) || !(a.convexity_tolerance >= 0.0)) {
        bad("algorithm.tolerances must be positive");
    }
    return a;
}

}  // namespace

RunConfig parse_config(const Json& doc) {
    try {
        RunConfig c;
        if (!doc.is_object()) bad("config must be a JSON object");
        const Json& reps = doc.at("representations");
        if (!reps.is_array() || reps.empty()) bad("representations must be a non-empty list");
        std::set<std::string> seen;
        for (const Json& r : reps) {
            RepresentationSpec spec{r.at("label").get<std::string>(), r};
            if (spec.label.empty() || spec.label.find_first_of(",;") != std::string::npos) {
                bad("representation labels must be non-empty without ',' or ';'");
            }
            if (!seen.insert(spec.label).second) bad("duplicate representation label '" + spec.label + "'");
            const int kinds = r.contains("traces") + r.contains("matrices") + r.contains("from");
            if (kinds != 1) bad("representation '" + spec.label + "' needs exactly one of traces, matrices, from");
            c.representations.push_back(std::move(spec));
        }
        if (doc.contains("algorithm")) c.algorithm = parse_algorithm(doc.at("algorithm"));
        if (doc.contains("output")) {
            const Json& o = doc.at("output");
            read(o, "directory", c.output_directory);
            read(o, "formats", c.formats);
            for (const auto& f : c.formats) {
                if (f != "json" && f != "csv") bad("unknown output format '" + f + "'");
            }
        }
        if (doc.contains("pair")) {
            const Json& p = doc.at("pair");
            c.pair = {p.at("rho").get<std::string>(), p.at("eta").get<std::string>()};
        }
        if (doc.contains("scan")) {
            const Json& s = doc.at("scan");
            ScanSpec scan;
            read(s, "label", scan.label);
            if (s.contains("direction")) std::tie(scan.dx, scan.dy) = parse_direction(s.at("direction"));
            read(s, "tMax", scan.t_max);
            read(s, "steps", scan.steps);
            if (scan.steps < 2) bad("scan.steps must be at least 2");
            c.scan = scan;
        }
        if (doc.contains("metric")) {
            const Json& m = doc.at("metric");
            MetricSpec metric;
            read(m, "base", metric.base);
            if (m.contains("direction")) std::tie(metric.dx, metric.dy) = parse_direction(m.at("direction"));
            read(m, "probeWords", metric.probe_words);
            c.metric = metric;
        }
        if (doc.contains("validate")) {
            const Json& v = doc.at("validate");
            ValidateSpec& spec = c.validate;
            read(v, "bijectionWordLength", spec.bijection_word_length);
            if (v.contains("bijectionOracle") && !v.at("bijectionOracle").is_null()) {
                spec.bijection_oracle = v.at("bijectionOracle").get<std::string>();
            }
            read(v, "z1Scales", spec.z1_scales);
            read(v, "z1Schedule", spec.z1_schedule);
            read(v, "invariance", spec.invariance);
            read(v, "metric", spec.metric);
            for (const auto& name : spec.invariance) {
                if (name != "conjugation") parse_phi(name);
            }
        }
        return c;
    } catch (const nlohmann::json::exception& e) {
        bad(std::string("config: ") + e.what());
    }
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) bad("cannot open config '" + path + "'");
    Json doc;
    try {
        doc = Json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        bad("config '" + path + "' is not valid JSON: " + e.what());
    }
    return parse_config(doc);
}

Session::Session(const RunConfig& config, bool keep_going) : config_(config) {
    qft_params p;
    qft_default_params(&p);
    p.n_max = config.algorithm.n_max;
    p.s_max = config.algorithm.s_max;
    p.workers = config.algorithm.workers;
    p.root_tolerance = config.algorithm.root_tolerance;
    check(qft_context_create(&p, &ctx_), nullptr, "creating context");
    for (const auto& spec : config.representations) {
        try {
            load(spec);
            loaded_.push_back(spec.label);
        } catch (const Failure& f) {
            if (!keep_going) {
                qft_context_destroy(ctx_);
                throw;
            }
            load_errors_.emplace_back(spec.label, f.what());
        }
    }
}

Session::~Session() { qft_context_destroy(ctx_); }

void Session::load(const RepresentationSpec& spec) {
    const Json& r = spec.source;
    const std::string what = "representation '" + spec.label + "'";
    try {
        if (r.contains("traces")) {
            const Json& t = r.at("traces");
            if (!t.is_array() || (t.size() != 2 && t.size() != 3)) bad(what + ": traces must list 2 or 3 values");
            qft_traces tr{parse_complex(t[0]), parse_complex(t[1]), {0.0, 0.0}};
            if (t.size() == 3) {
                tr.z = parse_complex(t[2]);
            } else {
                const std::string branch = r.at("branch").get<std::string>();
                if (branch != "plus" && branch != "minus") bad(what + ": branch must be plus or minus");
                check(qft_solve_z(tr.x, tr.y, branch == "plus", &tr.z), nullptr, what);
            }
            check(qft_add_traces(ctx_, spec.label.c_str(), &tr), ctx_, what);
        } else if (r.contains("matrices")) {
            const Json& m = r.at("matrices");
            if (!m.is_array() || m.size() != 2) bad(what + ": matrices must be [A, B]");
            const qft_matrix a = parse_matrix(m[0]), b = parse_matrix(m[1]);
            check(qft_add_matrices(ctx_, spec.label.c_str(), &a, &b), ctx_, what);
        } else {
            const std::string from = r.at("from").get<std::string>();
            if (!has(from)) bad(what + ": 'from' names '" + from + "', which is not loaded before it");
            if (r.contains("automorphism")) {
                const qft_automorphism phi = parse_phi(r.at("automorphism").get<std::string>());
                check(qft_add_automorphism(ctx_, from.c_str(), spec.label.c_str(), phi), ctx_, what);
            } else {
                const qft_matrix n = parse_matrix(r.at("conjugator"));
                check(qft_add_conjugate(ctx_, from.c_str(), spec.label.c_str(), &n), ctx_, what);
            }
        }
    } catch (const nlohmann::json::exception& e) {
        bad(what + ": " + e.what());
    }
}

bool Session::has(const std::string& label) const {
    for (const auto& l : loaded_) {
        if (l == label) return true;
    }
    return false;
}

qft_traces Session::traces(const std::string& label) const {
    qft_traces t;
    check(qft_get_traces(ctx_, label.c_str(), &t), ctx_, "representation '" + label + "'");
    return t;
}

std::pair<std::string, std::string> Session::pair(const std::string& override_label) const {
    std::pair<std::string, std::string> p;
    if (!override_label.empty()) {
        const auto parts = split(override_label, ',');
        if (parts.size() != 2) bad("--label for a pair must be 'rho,eta'");
        p = {parts[0], parts[1]};
    } else if (config_.pair) {
        p = *config_.pair;
    } else if (loaded_.empty()) {
        bad("no representation loaded");
    } else {
        p = {loaded_[0], loaded_.size() > 1 ? loaded_[1] : loaded_[0]};
    }
    for (const auto& l : {p.first, p.second}) {
        if (!has(l)) bad("unknown representation label '" + l + "'");
    }
    return p;
}

std::string Session::single(const std::string& override_label) const {
    const std::string l = override_label.empty() ? (loaded_.empty() ? std::string() : loaded_[0]) : override_label;
    if (!has(l)) bad("unknown representation label '" + l + "'");
    return l;
}

}  // namespace cli
