#include "commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <memory>
#include <sstream>
#include <thread>
#include <vector>

namespace cli {

namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

// Conjugator for the invariance checks: [[2, 1 + i], [1, 1 + i/2]], det 1.
constexpr qft_matrix kConjugator{{2.0, 0.0}, {1.0, 1.0}, {1.0, 0.0}, {1.0, 0.5}};

class Output {
public:
    Output(const RunConfig& config, const Invocation& inv)
        : dir_(inv.out_dir.empty() ? config.output_directory : inv.out_dir),
          json_(std::count(config.formats.begin(), config.formats.end(), "json") > 0),
          csv_(std::count(config.formats.begin(), config.formats.end(), "csv") > 0),
          workers_(config.algorithm.workers > 0 ? config.algorithm.workers
                                                : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()))),
          start_(Clock::now()) {}

    // Payload plus an isolated metadata object; only metadata may differ between identical runs.
    void json(const std::string& name, Json payload) const {
        if (!json_) return;
        Json doc = std::move(payload);
        doc["metadata"] = Json{{"version", qft_version()},
                               {"workers", workers_},
                               {"elapsedSeconds", num(std::chrono::duration<double>(Clock::now() - start_).count())}};
        write(name, doc.dump(2) + "\n");
    }

    void csv(const std::string& name, const std::string& body) const {
        if (csv_) write(name, body);
    }

private:
    void write(const std::string& name, const std::string& body) const {
        std::error_code ec;
        fs::create_directories(dir_, ec);
        const fs::path path = fs::path(dir_) / name;
        std::ofstream out(path, std::ios::binary);
        if (!out) throw Failure(kConfigError, "cannot write '" + path.string() + "'");
        out << body;
        std::cout << path.string() << "\n";
    }

    std::string dir_;
    bool json_, csv_;
    int workers_;
    Clock::time_point start_;
};

Json complex_json(qft_complex c) { return Json::array({num(c.re), num(c.im)}); }

Json traces_json(const qft_traces& t) {
    return Json::array({complex_json(t.x), complex_json(t.y), complex_json(t.z)});
}

Json ladder_json(const qft_pressure& p) {
    Json out = Json::array();
    for (int i = 0; i < p.ladder_len; ++i) out.push_back(Json{{"n", p.ladder_n[i]}, {"value", num(p.ladder[i])}});
    return out;
}

Json root_json(const qft_root& r) {
    return Json{{"value", num(r.value)}, {"errorBar", num(r.error_bar)}};
}

const char* verdict_name(qft_verdict v) {
    switch (v) {
        case QFT_EQUALITY: return "equality";
        case QFT_STRICT: return "strict";
        case QFT_VIOLATED: return "violated";
    }
    return "?";
}

qft_root entropy_of(const Session& s, const std::string& label) {
    qft_root r;
    check(qft_entropy(s.ctx(), label.c_str(), &r), s.ctx(), "entropy of '" + label + "'");
    return r;
}

bool fuchsian(const Session& s, const std::string& label) {
    int f = 0;
    check(qft_is_fuchsian(s.ctx(), label.c_str(), &f), s.ctx(), "fuchsian test");
    return f != 0;
}

// RAII over qft_curve.
struct Curve {
    qft_curve* handle = nullptr;
    Curve(const Session& s, const std::string& rho, const std::string& eta) {
        check(qft_curve_create(s.ctx(), rho.c_str(), eta.c_str(), s.config().algorithm.grid_size, &handle), s.ctx(),
              "Manhattan curve (" + rho + ", " + eta + ")");
    }
    ~Curve() { qft_curve_destroy(handle); }
    Curve(const Curve&) = delete;
    Curve& operator=(const Curve&) = delete;

    std::vector<qft_sample> samples() const {
        std::vector<qft_sample> out(qft_curve_size(handle));
        for (std::size_t i = 0; i < out.size(); ++i) check(qft_curve_sample(handle, i, &out[i]), nullptr, "sample");
        return out;
    }
};

qft_intersection intersection_of(const Session& s, const std::string& rho, const std::string& eta) {
    const Algorithm& a = s.config().algorithm;
    qft_intersection r;
    check(qft_intersection_report(s.ctx(), rho.c_str(), eta.c_str(), a.grid_size, a.census_t, a.word_cap, &r), s.ctx(),
          "intersection (" + rho + ", " + eta + ")");
    return r;
}

qft_dual_report dual_of(const Session& s, const std::string& rho, const std::string& eta) {
    qft_dual_report d;
    check(qft_dual_rigidity(s.ctx(), rho.c_str(), eta.c_str(), 1.0, 1.0, &d), s.ctx(), "dual rigidity");
    return d;
}

qft_metric_params metric_params(const Algorithm& a) {
    qft_metric_params p;
    qft_default_metric_params(&p);
    p.eps = a.eps;
    p.max_halvings = a.max_halvings;
    p.grid_size = a.grid_size;
    return p;
}

qft_pressure_form form_of(const Session& s, const qft_traces& base, qft_complex dx, qft_complex dy) {
    const qft_metric_params p = metric_params(s.config().algorithm);
    qft_pressure_form f;
    check(qft_pressure_form_eval(s.ctx(), &base, dx, dy, &p, &f), s.ctx(), "pressure form");
    return f;
}

Json form_json(const qft_pressure_form& f) {
    Json by_depth = Json::array();
    for (int i = 0; i < f.depths; ++i) by_depth.push_back(num(f.by_depth[i]));
    Json j = Json::array();
    for (double v : f.j) j.push_back(num(v));
    return Json{{"P_vv", num(f.value)}, {"errorBar", num(f.error_bar)}, {"eps", num(f.eps)},
                {"halvings", f.halvings}, {"atEps", num(f.at_eps)},    {"at2Eps", num(f.at_2eps)},
                {"J", j},                 {"byDepth", by_depth},       {"orbitGap", num(f.orbit_gap)}};
}

}  // namespace

int cmd_entropy(const Invocation& inv) {
    const RunConfig config = load_config(inv.config_path);
    const Output out(config, inv);
    const Session s(config, false);
    const std::string label = s.single(inv.label);
    const qft_root r = entropy_of(s, label);
    out.json("entropy.json", Json{{"label", label},
                                  {"h", num(r.value)},
                                  {"errorBar", num(r.error_bar)},
                                  {"ladder", ladder_json(r.pressure)},
                                  {"tailBound", num(r.pressure.tail_bound)},
                                  {"extrapolated", r.pressure.extrapolated != 0},
                                  {"slope", num(r.slope)}});
    return kOk;
}

int cmd_manhattan(const Invocation& inv) {
    const RunConfig config = load_config(inv.config_path);
    const Output out(config, inv);
    const Session s(config, false);
    const auto [rho, eta] = s.pair(inv.label);
    const Curve curve(s, rho, eta);
    std::ostringstream csv;
    csv << "a,b,residual,errorBar,status\n";
    const auto samples = curve.samples();
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const qft_sample& p = samples[i];
        std::string status = p.ok ? "ok" : qft_curve_sample_error(curve.handle, i);
        std::replace(status.begin(), status.end(), ',', ';');
        csv << csv_num(p.a) << ',' << csv_num(p.b) << ',' << csv_num(p.residual) << ',' << csv_num(p.error_bar) << ','
            << status << "\n";
    }
    out.csv("manhattan.csv", csv.str());

    qft_root hr, he;
    qft_curve_endpoints(curve.handle, &hr, &he);
    double slope = 0.0, slope_error = 0.0;
    check(qft_curve_intersection(curve.handle, &slope, &slope_error), nullptr, "tangent slope");
    out.json("manhattan_endpoints.json",
             Json{{"rho", rho},
                  {"eta", eta},
                  {"hRho", root_json(hr)},
                  {"hEta", root_json(he)},
                  {"convex", qft_curve_convex(curve.handle, config.algorithm.convexity_tolerance) != 0},
                  {"decreasing", qft_curve_decreasing(curve.handle) != 0},
                  {"I_slope", num(slope)},
                  {"I_slopeError", num(slope_error)}});
    return kOk;
}

int cmd_intersect(const Invocation& inv) {
    const RunConfig config = load_config(inv.config_path);
    const Output out(config, inv);
    const Session s(config, false);
    const auto [rho, eta] = s.pair(inv.label);
    const qft_intersection r = intersection_of(s, rho, eta);
    const qft_dual_report d = dual_of(s, rho, eta);
    if (r.completeness_warning) std::cerr << "warning: census R_T incomplete at wordCap\n";
    out.json("intersect.json", Json{{"rho", rho},
                                    {"eta", eta},
                                    {"I_slope", num(r.i_slope)},
                                    {"I_slopeError", num(r.i_slope_error)},
                                    {"I_orbit", num(r.i_orbit)},
                                    {"orbitClasses", r.orbit_classes},
                                    {"J", num(r.j)},
                                    {"J_error", num(r.j_error)},
                                    {"J_reverse", num(r.j_reverse)},
                                    {"J_reverseError", num(r.j_reverse_error)},
                                    {"J_orbit", num(r.j_orbit)},
                                    {"estimatorGap", num(r.estimator_gap)},
                                    {"rigidity_verdict", verdict_name(r.verdict)},
                                    {"completenessWarning", r.completeness_warning != 0},
                                    {"dualRigidity", Json{{"lhs", num(d.lhs)},
                                                          {"rhs", num(d.rhs)},
                                                          {"slack", num(d.slack)},
                                                          {"tolerance", num(d.tolerance)},
                                                          {"verdict", verdict_name(d.verdict)}}}});
    return kOk;
}

int cmd_metric(const Invocation& inv) {
    const RunConfig config = load_config(inv.config_path);
    const Output out(config, inv);
    const Session s(config, false);
    const MetricSpec spec = config.metric.value_or(MetricSpec{});
    const std::string base_label = s.single(inv.label.empty() ? spec.base : inv.label);
    const qft_traces base = s.traces(base_label);
    const qft_pressure_form f = form_of(s, base, spec.dx, spec.dy);

    std::vector<const char*> words;
    for (const auto& w : spec.probe_words) words.push_back(w.c_str());
    std::vector<double> derivatives(words.size());
    double max_abs = 0.0;
    check(qft_degeneracy_probe(s.ctx(), &base, spec.dx, spec.dy, words.data(), words.size(), config.algorithm.eps,
                               derivatives.data(), &max_abs),
          s.ctx(), "degeneracy probe");
    Json probe = Json::array();
    for (std::size_t i = 0; i < words.size(); ++i) {
        probe.push_back(Json{{"word", spec.probe_words[i]}, {"derivative", num(derivatives[i])}});
    }
    Json doc{{"base", base_label}, {"traces", traces_json(base)},
             {"direction", Json::array({complex_json(spec.dx), complex_json(spec.dy)})}};
    doc.update(form_json(f));
    doc["degeneracy_probe_max"] = num(max_abs);
    doc["degeneracy_probe"] = probe;
    out.json("metric.json", doc);
    return kOk;
}

int cmd_scan(const Invocation& inv) {
    const RunConfig config = load_config(inv.config_path);
    const Output out(config, inv);
    const Session s(config, false);
    const ScanSpec spec = config.scan.value_or(ScanSpec{});
    const std::string label = s.single(inv.label.empty() ? spec.label : inv.label);
    const qft_traces base = s.traces(label);

    std::ostringstream csv;
    csv << "t,x_re,x_im,y_re,y_im,z_re,z_im,h,errorBar\n";
    std::vector<double> ts, hs;
    for (int k = 0; k <= spec.steps; ++k) {
        const double t = spec.t_max * k / spec.steps;
        qft_traces p;
        check(qft_continue_point(&base, spec.dx, spec.dy, t, &p), nullptr, "scan continuation");
        const std::string point = "scan:" + std::to_string(k);
        check(qft_add_traces(s.ctx(), point.c_str(), &p), s.ctx(), "scan point " + std::to_string(k));
        const qft_root r = entropy_of(s, point);
        ts.push_back(t);
        hs.push_back(r.value);
        csv << csv_num(t) << ',' << csv_num(p.x.re) << ',' << csv_num(p.x.im) << ',' << csv_num(p.y.re) << ','
            << csv_num(p.y.im) << ',' << csv_num(p.z.re) << ',' << csv_num(p.z.im) << ',' << csv_num(r.value) << ','
            << csv_num(r.error_bar) << "\n";
    }
    out.csv("scan.csv", csv.str());

    bool increasing = true, decreasing = true;
    double max_second = 0.0;
    const double dt = spec.t_max / spec.steps;
    for (std::size_t i = 1; i < hs.size(); ++i) {
        increasing = increasing && hs[i] >= hs[i - 1];
        decreasing = decreasing && hs[i] <= hs[i - 1];
        if (i + 1 < hs.size()) {
            max_second = std::max(max_second, std::abs(hs[i + 1] - 2.0 * hs[i] + hs[i - 1]) / (dt * dt));
        }
    }
    out.json("scan.json", Json{{"label", label},
                               {"direction", Json::array({complex_json(spec.dx), complex_json(spec.dy)})},
                               {"tMax", num(spec.t_max)},
                               {"steps", spec.steps},
                               {"monotone", increasing || decreasing},
                               {"maxSecondDerivative", num(max_second)}});
    return kOk;
}

int cmd_census(const Invocation& inv) {
    const RunConfig config = load_config(inv.config_path);
    const Output out(config, inv);
    const Session s(config, false);
    std::vector<std::string> labels = inv.label.empty() ? s.labels() : split(inv.label, ',');
    for (const auto& l : labels) s.single(l);
    std::vector<const char*> ptrs;
    for (const auto& l : labels) ptrs.push_back(l.c_str());
    qft_census* raw = nullptr;
    check(qft_census_create(s.ctx(), ptrs.data(), ptrs.size(), config.algorithm.census_t, config.algorithm.word_cap,
                            &raw),
          s.ctx(), "census");
    const std::unique_ptr<qft_census, void (*)(qft_census*)> census(raw, qft_census_destroy);
    if (!qft_census_complete(census.get())) std::cerr << "warning: census R_T incomplete at wordCap\n";

    std::ostringstream csv;
    csv << "class;wordlen";
    for (const auto& l : labels) csv << ";length@" << l;
    csv << "\n";
    for (std::size_t row = 0; row < qft_census_size(census.get()); ++row) {
        const std::string word = qft_census_word(census.get(), row);
        csv << word << ';' << word.size();
        for (std::size_t c = 0; c < labels.size(); ++c) csv << ';' << csv_num(qft_census_length(census.get(), row, c));
        csv << "\n";
    }
    out.csv("census.csv", csv.str());
    return kOk;
}

namespace {

// One named check; a thrown Failure marks it failed with the message.
class Suite {
public:
    void run(const std::string& name, const std::function<bool(Json&)>& body) {
        Json detail = Json::object();
        bool passed = false;
        try {
            passed = body(detail);
        } catch (const Failure& f) {
            detail["error"] = f.what();
        }
        all_ = all_ && passed;
        checks_.push_back(Json{{"name", name}, {"passed", passed}, {"detail", detail}});
        std::cerr << (passed ? "PASS " : "FAIL ") << name << "\n";
    }
    bool passed() const { return all_; }
    Json checks() const { return checks_; }

private:
    Json checks_ = Json::array();
    bool all_ = true;
};

}  // namespace

int cmd_validate(const Invocation& inv) {
    const RunConfig config = load_config(inv.config_path);
    const Output out(config, inv);
    const Session s(config, true);
    const Algorithm& alg = config.algorithm;
    const ValidateSpec& v = config.validate;
    Suite suite;

    suite.run("representations", [&](Json& d) {
        Json errors = Json::array();
        for (const auto& [label, what] : s.load_errors()) errors.push_back(Json{{"label", label}, {"error", what}});
        d["loaded"] = s.labels();
        d["errors"] = errors;
        return s.load_errors().empty();
    });
    std::pair<std::string, std::string> names;
    try {
        names = s.pair(inv.label);
    } catch (const Failure& f) {
        // A pair member that failed to load is a validation failure, not a config error.
        if (s.load_errors().empty()) throw;
        out.json("validate.json", Json{{"passed", false}, {"checks", suite.checks()}});
        return kValidationFailure;
    }
    const auto& [rho, eta] = names;
    const bool distinct = rho != eta;

    suite.run("entropy", [&](Json& d) {
        bool ok = true;
        for (const auto& label : s.labels()) {
            const qft_root r = entropy_of(s, label);
            const bool f = fuchsian(s, label);
            const bool good = r.value > 0.5 && (!f || std::abs(r.value - 1.0) <= 0.1);
            ok = ok && good;
            d[label] = Json{{"h", num(r.value)}, {"errorBar", num(r.error_bar)}, {"fuchsian", f}, {"passed", good}};
        }
        return ok;
    });

    if (distinct && fuchsian(s, rho) != fuchsian(s, eta)) {
        suite.run("quasifuchsian_gap", [&](Json& d) {
            const std::string& f = fuchsian(s, rho) ? rho : eta;
            const std::string& q = fuchsian(s, rho) ? eta : rho;
            double gap = 0.0, err = 0.0;
            check(qft_entropy_gap(s.ctx(), f.c_str(), q.c_str(), &gap, &err), s.ctx(), "entropy gap");
            d["fuchsian"] = f;
            d["quasifuchsian"] = q;
            d["gap"] = num(gap);
            d["errorBar"] = num(err);
            return gap > err;
        });
    }

    suite.run("census_bijection", [&](Json& d) {
        const std::string oracle = v.bijection_oracle.value_or(rho);
        if (!s.has(oracle)) throw Failure(kConfigError, "unknown oracle label '" + oracle + "'");
        std::size_t coding = 0, classes = 0, mismatches = 0;
        double gap = 0.0;
        check(qft_census_bijection(s.ctx(), rho.c_str(), oracle.c_str(), v.bijection_word_length, alg.census_tolerance,
                                   &coding, &classes, &mismatches, &gap),
              s.ctx(), "census bijection");
        d["coding"] = rho;
        d["oracle"] = oracle;
        d["maxWordLength"] = v.bijection_word_length;
        d["codingClasses"] = coding;
        d["oracleClasses"] = classes;
        d["mismatches"] = mismatches;
        d["maxLengthGap"] = num(gap);
        return mismatches == 0 && coding == classes && gap <= alg.census_tolerance;
    });

    suite.run("manhattan_diagonal", [&](Json& d) {
        const Curve c(s, rho, rho);
        qft_root h;
        qft_curve_endpoints(c.handle, &h, nullptr);
        double worst = 0.0;
        bool ok = true;
        for (const auto& p : c.samples()) {
            ok = ok && p.ok;
            worst = std::max(worst, std::abs(p.a + p.b - h.value));
        }
        d["maxLineDeviation"] = num(worst);
        return ok && worst <= 1e-3;
    });

    if (distinct) {
        suite.run("manhattan_pair", [&](Json& d) {
            const Curve c(s, rho, eta);
            const qft_root hr = entropy_of(s, rho), he = entropy_of(s, eta);
            const auto samples = c.samples();
            const double b0 = samples.front().b, b_end = samples.back().b, a_end = samples.back().a;
            const double rel_eta = std::abs(b0 - he.value) / he.value;
            const double rel_rho = std::abs(a_end - hr.value) / hr.value;
            const double stray = std::abs(b_end) / he.value;
            const bool convex = qft_curve_convex(c.handle, alg.convexity_tolerance) != 0;
            const bool decreasing = qft_curve_decreasing(c.handle) != 0;
            d["endpointGapRho"] = num(rel_rho);
            d["endpointGapEta"] = num(rel_eta);
            d["endpointStray"] = num(stray);
            d["convex"] = convex;
            d["decreasing"] = decreasing;
            return rel_eta <= 0.02 && rel_rho <= 0.02 && stray <= 0.02 && convex && decreasing;
        });
    }

    suite.run("intersection_self", [&](Json& d) {
        const qft_intersection r = intersection_of(s, rho, rho);
        d["I_slope"] = num(r.i_slope);
        d["J"] = num(r.j);
        d["verdict"] = verdict_name(r.verdict);
        return std::abs(r.j - 1.0) <= 1e-6 && std::abs(r.i_slope - 1.0) <= 1e-6 && r.verdict == QFT_EQUALITY;
    });

    if (distinct) {
        suite.run("intersection_pair", [&](Json& d) {
            const qft_intersection r = intersection_of(s, rho, eta);
            d["I_slope"] = num(r.i_slope);
            d["I_orbit"] = num(r.i_orbit);
            d["estimatorGap"] = num(r.estimator_gap);
            d["J"] = num(r.j);
            d["J_error"] = num(r.j_error);
            d["J_reverse"] = num(r.j_reverse);
            d["verdict"] = verdict_name(r.verdict);
            return r.estimator_gap <= 0.05 && r.j >= 1.0 - 1e-3 && r.j_reverse >= 1.0 - 1e-3 &&
                   r.verdict != QFT_VIOLATED;
        });
    }

    suite.run("dual_rigidity", [&](Json& d) {
        const qft_dual_report r = dual_of(s, rho, eta);
        d["lhs"] = num(r.lhs);
        d["rhs"] = num(r.rhs);
        d["slack"] = num(r.slack);
        d["tolerance"] = num(r.tolerance);
        d["verdict"] = verdict_name(r.verdict);
        return r.verdict != QFT_VIOLATED && (distinct || r.verdict == QFT_EQUALITY);
    });

    suite.run("z1_probe", [&](Json& d) {
        bool ok = true;
        Json rows = Json::array();
        for (double scale : v.z1_scales) {
            qft_z1_probe p;
            check(qft_z1_probe_run(scale, v.z1_schedule.data(), v.z1_schedule.size(), &p), nullptr, "z1 probe");
            const bool expect = 2.0 * scale > 1.0;
            const bool good = (p.converging != 0) == expect && std::abs(p.exponent + 2.0 * scale) <= 0.1;
            ok = ok && good;
            rows.push_back(Json{{"scale", num(scale)},
                                {"converging", p.converging != 0},
                                {"exponent", num(p.exponent)},
                                {"passed", good}});
        }
        d["rows"] = rows;
        return ok;
    });

    for (const auto& kind : v.invariance) {
        suite.run("invariance_" + kind, [&](Json& d) {
            const std::string r2 = "inv:" + kind + ":" + rho, e2 = "inv:" + kind + ":" + eta;
            for (const auto& [src, dst] : {std::pair{rho, r2}, std::pair{eta, e2}}) {
                if (kind == "conjugation") {
                    check(qft_add_conjugate(s.ctx(), src.c_str(), dst.c_str(), &kConjugator), s.ctx(), kind);
                } else {
                    const qft_automorphism phi = kind == "swap" ? QFT_SWAP
                                                 : kind == "ab-twist" ? QFT_AB_TWIST
                                                 : kind == "ba-twist" ? QFT_BA_TWIST
                                                                      : QFT_INVERT_A;
                    check(qft_add_automorphism(s.ctx(), src.c_str(), dst.c_str(), phi), s.ctx(), kind);
                }
            }
            const qft_root h0 = entropy_of(s, rho), h1 = entropy_of(s, r2);
            const qft_root g0 = entropy_of(s, eta), g1 = entropy_of(s, e2);
            const bool h_ok = std::abs(h0.value - h1.value) <= h0.error_bar + h1.error_bar &&
                              std::abs(g0.value - g1.value) <= g0.error_bar + g1.error_bar;
            const Curve c0(s, rho, eta), c1(s, r2, e2);
            const auto s0 = c0.samples(), s1 = c1.samples();
            double sample_gap = 0.0;
            bool samples_ok = s0.size() == s1.size();
            for (std::size_t i = 0; samples_ok && i < s0.size(); ++i) {
                const double g = std::abs(s0[i].b - s1[i].b);
                sample_gap = std::max(sample_gap, g);
                samples_ok = s0[i].ok && s1[i].ok && g <= s0[i].error_bar + s1[i].error_bar;
            }
            const qft_intersection i0 = intersection_of(s, rho, eta), i1 = intersection_of(s, r2, e2);
            const bool i_ok = std::abs(i0.i_slope - i1.i_slope) <= i0.i_slope_error + i1.i_slope_error;
            const bool j_ok = std::abs(i0.j - i1.j) <= i0.j_error + i1.j_error;
            d["entropyGap"] = num(std::max(std::abs(h0.value - h1.value), std::abs(g0.value - g1.value)));
            d["entropyTolerance"] = num(std::min(h0.error_bar + h1.error_bar, g0.error_bar + g1.error_bar));
            d["maxSampleGap"] = num(sample_gap);
            d["intersectionGap"] = num(std::abs(i0.i_slope - i1.i_slope));
            d["intersectionTolerance"] = num(i0.i_slope_error + i1.i_slope_error);
            d["renormalizedGap"] = num(std::abs(i0.j - i1.j));
            d["renormalizedTolerance"] = num(i0.j_error + i1.j_error);
            return h_ok && samples_ok && i_ok && j_ok;
        });
    }

    if (v.metric) {
        suite.run("pressure_form", [&](Json& d) {
            const MetricSpec spec = config.metric.value_or(MetricSpec{});
            const std::string base_label = spec.base.empty() ? rho : spec.base;
            if (!s.has(base_label)) throw Failure(kConfigError, "unknown metric base '" + base_label + "'");
            const qft_traces base = s.traces(base_label);
            const qft_pressure_form zero = form_of(s, base, {0.0, 0.0}, {0.0, 0.0});
            const qft_pressure_form real = form_of(s, base, {1.0, 0.0}, {0.0, 0.0});
            bool ok = zero.value == 0.0 && real.value > real.error_bar;
            d["zero"] = num(zero.value);
            d["real"] = form_json(real);
            if (fuchsian(s, base_label)) {
                const qft_pressure_form bend = form_of(s, base, {0.0, 1.0}, {0.0, 0.0});
                ok = ok && std::abs(bend.value) <= 0.05 * real.value;
                d["bending"] = form_json(bend);
            }
            return ok;
        });
    }

    out.json("validate.json", Json{{"rho", rho},
                                   {"eta", eta},
                                   {"passed", suite.passed()},
                                   {"checks", suite.checks()}});
    return suite.passed() ? kOk : kValidationFailure;
}

}  // namespace cli
