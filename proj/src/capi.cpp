#include "qfthermo/qfthermo.h"

#include <algorithm>
#include <cstring>
#include <exception>
#include <string>
#include <vector>

#include "qfthermo/error.hpp"
#include "qfthermo/manhattan.hpp"
#include "qfthermo/oracle.hpp"
#include "qfthermo/pressure_metric.hpp"
#include "qfthermo/thermo.hpp"

struct qft_context {
    qft::Thermo thermo;
    std::string last_error;
};

struct qft_census {
    qft::Census census;
    std::vector<std::string> labels;
    std::vector<std::string> words;
};

struct qft_curve {
    qft::ManhattanCurve curve;
};

namespace {

thread_local std::string g_thread_error;

qft_status status_of(qft::ErrorCode code) {
    const int c = static_cast<int>(code);
    return c >= QFT_ERR_DOMAIN && c <= QFT_ERR_VALIDATION ? static_cast<qft_status>(c) : QFT_ERR_INTERNAL;
}

template <class Fn>
qft_status guard(qft_context* ctx, Fn&& fn) {
    std::string* sink = ctx ? &ctx->last_error : &g_thread_error;
    try {
        fn();
        return QFT_OK;
    } catch (const qft::Error& e) {
        *sink = e.what();
        return status_of(e.code());
    } catch (const std::exception& e) {
        *sink = e.what();
        return QFT_ERR_INTERNAL;
    } catch (...) {
        *sink = "unknown failure";
        return QFT_ERR_INTERNAL;
    }
}

void require(const void* p, const char* what) {
    if (!p) qft::fail(qft::ErrorCode::domain, std::string(what) + " is NULL");
}

qft::Complex cx(qft_complex c) { return {c.re, c.im}; }
qft_complex cx(qft::Complex c) { return {c.real(), c.imag()}; }

qft::TraceCoordinates traces(const qft_traces& t) { return {cx(t.x), cx(t.y), cx(t.z)}; }
qft_traces traces(const qft::TraceCoordinates& t) { return {cx(t.x), cx(t.y), cx(t.z)}; }

qft::MoebiusMap matrix(const qft_matrix& m) { return qft::MoebiusMap(cx(m.a), cx(m.b), cx(m.c), cx(m.d)); }

qft::Automorphism automorphism(qft_automorphism phi) {
    switch (phi) {
        case QFT_AB_TWIST: return qft::Automorphism::ab_twist;
        case QFT_BA_TWIST: return qft::Automorphism::ba_twist;
        case QFT_SWAP: return qft::Automorphism::swap;
        case QFT_INVERT_A: return qft::Automorphism::invert_a;
    }
    qft::fail(qft::ErrorCode::domain, "unknown automorphism");
}

qft_verdict verdict(const std::string& v) {
    if (v == "strict") return QFT_STRICT;
    if (v == "violated") return QFT_VIOLATED;
    return QFT_EQUALITY;
}

void copy_pressure(const qft::PressureEstimate& p, qft_pressure* out) {
    std::memset(out, 0, sizeof *out);
    out->value = p.value;
    out->error_bar = p.error_bar;
    out->extrapolated = p.extrapolated ? 1 : 0;
    out->tail_bound = p.tail_bound;
    const std::size_t n = std::min<std::size_t>(p.ladder.size(), QFT_LADDER_MAX);
    out->ladder_len = static_cast<int>(n);
    for (std::size_t i = 0; i < n; ++i) {
        out->ladder_n[i] = p.ladder[i].n;
        out->ladder[i] = p.ladder[i].value;
    }
}

void copy_root(const qft::RootEstimate& r, qft_root* out) {
    out->value = r.value;
    out->error_bar = r.error_bar;
    out->slope = r.slope;
    copy_pressure(r.pressure, &out->pressure);
}

qft::MetricParams metric_params(const qft_metric_params* p) {
    qft::MetricParams m;
    if (!p) return m;
    m.eps = p->eps;
    m.max_halvings = p->max_halvings;
    m.richardson_agreement = p->richardson_agreement;
    m.richardson_floor = p->richardson_floor;
    m.grid_size = p->grid_size;
    m.spot_census_length = p->spot_census_length;
    m.spot_word_cap = p->spot_word_cap;
    return m;
}

std::vector<std::string> labels_of(const char* const* labels, std::size_t count) {
    require(labels, "labels");
    std::vector<std::string> out;
    for (std::size_t i = 0; i < count; ++i) {
        require(labels[i], "label");
        out.emplace_back(labels[i]);
    }
    return out;
}

}  // namespace

extern "C" {

const char* qft_version(void) { return "0.1.0"; }

const char* qft_status_name(qft_status status) {
    switch (status) {
        case QFT_OK: return "Ok";
        case QFT_ERR_INTERNAL: return "Internal";
        default: break;
    }
    const int c = static_cast<int>(status);
    if (c >= QFT_ERR_DOMAIN && c <= QFT_ERR_VALIDATION) return qft::to_string(static_cast<qft::ErrorCode>(c));
    return "Unknown";
}

const char* qft_last_error(const qft_context* ctx) {
    return ctx ? ctx->last_error.c_str() : g_thread_error.c_str();
}

void qft_default_params(qft_params* out) {
    if (!out) return;
    const qft::ThermoParams p;
    out->n_max = p.n_max;
    out->s_max = p.s_max;
    out->workers = p.workers;
    out->root_tolerance = p.root_tolerance;
}

qft_status qft_context_create(const qft_params* params, qft_context** out) {
    return guard(nullptr, [&] {
        require(out, "out");
        *out = nullptr;
        qft::ThermoParams p;
        if (params) {
            p.n_max = params->n_max;
            p.s_max = params->s_max;
            p.workers = params->workers;
            p.root_tolerance = params->root_tolerance;
        }
        if (p.n_max > qft::kDefaultCycleCap) qft::fail(qft::ErrorCode::cap_exceeded, "nMax above the cycle cap");
        if (p.s_max < 1) qft::fail(qft::ErrorCode::domain, "sMax must be positive");
        if (!(p.root_tolerance > 0.0)) qft::fail(qft::ErrorCode::domain, "root tolerance must be positive");
        *out = new qft_context{qft::Thermo(p), {}};
    });
}

void qft_context_destroy(qft_context* ctx) { delete ctx; }

qft_status qft_solve_z(qft_complex x, qft_complex y, int plus, qft_complex* out) {
    return guard(nullptr, [&] {
        require(out, "out");
        *out = cx(qft::solve_z(cx(x), cx(y), plus ? qft::Branch::plus : qft::Branch::minus));
    });
}

qft_status qft_markov_residual(const qft_traces* t, qft_complex* out) {
    return guard(nullptr, [&] {
        require(t, "traces");
        require(out, "out");
        *out = cx(traces(*t).markov_residual());
    });
}

qft_status qft_apply_automorphism_traces(const qft_traces* t, qft_automorphism phi, qft_traces* out) {
    return guard(nullptr, [&] {
        require(t, "traces");
        require(out, "out");
        *out = traces(qft::apply_automorphism(traces(*t), automorphism(phi)));
    });
}

qft_status qft_continue_point(const qft_traces* base, qft_complex dx, qft_complex dy, double t, qft_traces* out) {
    return guard(nullptr, [&] {
        require(base, "base");
        require(out, "out");
        *out = traces(qft::continue_point(traces(*base), {cx(dx), cx(dy)}, t));
    });
}

qft_status qft_push_forward(const qft_traces* t, qft_complex dx, qft_complex dy, qft_automorphism phi,
                            qft_complex* out_dx, qft_complex* out_dy) {
    return guard(nullptr, [&] {
        require(t, "traces");
        require(out_dx, "out_dx");
        require(out_dy, "out_dy");
        const qft::TangentVector w = qft::push_forward(traces(*t), {cx(dx), cx(dy)}, automorphism(phi));
        *out_dx = cx(w.dx);
        *out_dy = cx(w.dy);
    });
}

qft_status qft_add_traces(qft_context* ctx, const char* label, const qft_traces* t) {
    if (!ctx) return QFT_ERR_DOMAIN;
    return guard(ctx, [&] {
        require(label, "label");
        require(t, "traces");
        ctx->thermo.add(qft::from_traces(traces(*t), label));
    });
}

qft_status qft_add_matrices(qft_context* ctx, const char* label, const qft_matrix* a, const qft_matrix* b) {
    if (!ctx) return QFT_ERR_DOMAIN;
    return guard(ctx, [&] {
        require(label, "label");
        require(a, "a");
        require(b, "b");
        ctx->thermo.add(qft::MarkedRepresentation::from_matrices(matrix(*a), matrix(*b), label));
    });
}

qft_status qft_add_conjugate(qft_context* ctx, const char* label, const char* new_label, const qft_matrix* n) {
    if (!ctx) return QFT_ERR_DOMAIN;
    return guard(ctx, [&] {
        require(label, "label");
        require(new_label, "new_label");
        require(n, "n");
        qft::MarkedRepresentation rep = qft::conjugate(ctx->thermo.rep(label), matrix(*n));
        rep.set_label(new_label);
        ctx->thermo.add(rep);
    });
}

qft_status qft_add_automorphism(qft_context* ctx, const char* label, const char* new_label, qft_automorphism phi) {
    if (!ctx) return QFT_ERR_DOMAIN;
    return guard(ctx, [&] {
        require(label, "label");
        require(new_label, "new_label");
        qft::MarkedRepresentation rep = qft::apply_automorphism(ctx->thermo.rep(label), automorphism(phi));
        rep.set_label(new_label);
        ctx->thermo.add(rep);
    });
}

qft_status qft_get_traces(const qft_context* ctx, const char* label, qft_traces* out) {
    if (!ctx) return QFT_ERR_DOMAIN;
    return guard(const_cast<qft_context*>(ctx), [&] {
        require(label, "label");
        require(out, "out");
        *out = traces(ctx->thermo.rep(label).traces());
    });
}

qft_status qft_is_fuchsian(const qft_context* ctx, const char* label, int* out) {
    if (!ctx) return QFT_ERR_DOMAIN;
    return guard(const_cast<qft_context*>(ctx), [&] {
        require(label, "label");
        require(out, "out");
        *out = qft::is_fuchsian_point(ctx->thermo.rep(label)) ? 1 : 0;
    });
}

qft_status qft_word_length(const qft_context* ctx, const char* label, const char* word, double* out) {
    if (!ctx) return QFT_ERR_DOMAIN;
    return guard(const_cast<qft_context*>(ctx), [&] {
        require(label, "label");
        require(word, "word");
        require(out, "out");
        *out = qft::word_translation_length(ctx->thermo.rep(label), qft::parse_word(word));
    });
}

qft_status qft_pressure_at(qft_context* ctx, const char* const* labels, const double* coefficients, size_t count,
                           double t, qft_pressure* out) {
    if (!ctx) return QFT_ERR_DOMAIN;
    return guard(ctx, [&] {
        require(coefficients, "coefficients");
        require(out, "out");
        qft::PotentialSpec spec;
        spec.t = t;
        const auto ls = labels_of(labels, count);
        for (std::size_t i = 0; i < count; ++i) spec.terms.push_back({ls[i], coefficients[i]});
        copy_pressure(ctx->thermo.gurevich_pressure(spec), out);
    });
}

qft_status qft_entropy(qft_context* ctx, const char* label, qft_root* out) {
    if (!ctx) return QFT_ERR_DOMAIN;
    return guard(ctx, [&] {
        require(label, "label");
        require(out, "out");
        copy_root(ctx->thermo.entropy(label), out);
    });
}

qft_status qft_weighted_entropy(qft_context* ctx, const char* rho, const char* eta, double a, double b,
                                qft_root* out) {
    if (!ctx) return QFT_ERR_DOMAIN;
    return guard(ctx, [&] {
        require(rho, "rho");
        require(eta, "eta");
        require(out, "out");
        copy_root(ctx->thermo.weighted_entropy(rho, eta, a, b), out);
    });
}

qft_status qft_entropy_gap(qft_context* ctx, const char* rho, const char* eta, double* value, double* error_bar) {
    if (!ctx) return QFT_ERR_DOMAIN;
    return guard(ctx, [&] {
        require(rho, "rho");
        require(eta, "eta");
        require(value, "value");
        const qft::MatchedValue g = qft::matched_entropy_gap(ctx->thermo, rho, eta);
        *value = g.value;
        if (error_bar) *error_bar = g.error_bar;
    });
}

qft_status qft_z1_probe_run(double effective_scale, const int* s_max_schedule, size_t count, qft_z1_probe* out) {
    return guard(nullptr, [&] {
        require(s_max_schedule, "schedule");
        require(out, "out");
        const qft::Z1Probe p = qft::z1_probe(effective_scale, std::vector<int>(s_max_schedule, s_max_schedule + count));
        out->converging = p.converging ? 1 : 0;
        out->exponent = p.exponent;
        out->exponent_error = p.exponent_error;
    });
}

qft_status qft_ball_count(qft_context* ctx, const char* label, double radius, int word_cap, unsigned long long* count,
                          int* boundary_warning) {
    if (!ctx) return QFT_ERR_DOMAIN;
    return guard(ctx, [&] {
        require(label, "label");
        require(count, "count");
        const qft::BallCount c =
            qft::ball_count(ctx->thermo.rep(label), radius, word_cap, ctx->thermo.params().workers);
        *count = c.count;
        if (boundary_warning) *boundary_warning = c.boundary_warning ? 1 : 0;
    });
}

qft_status qft_poincare_entropy(qft_context* ctx, const char* label, const double* radii, size_t count, int word_cap,
                                qft_slope_fit* out) {
    if (!ctx) return QFT_ERR_DOMAIN;
    return guard(ctx, [&] {
        require(label, "label");
        require(out, "out");
        const std::vector<double> grid = radii ? std::vector<double>(radii, radii + count) : qft::default_entropy_grid();
        const qft::SlopeFit f =
            qft::poincare_entropy(ctx->thermo.rep(label), grid, word_cap, ctx->thermo.params().workers);
        out->slope = f.slope;
        out->error = f.error;
        out->max_relative_residual = f.max_relative_residual;
        out->boundary_warning = f.boundary_warning ? 1 : 0;
    });
}

qft_status qft_census_create(qft_context* ctx, const char* const* labels, size_t count, double max_length,
                             int word_cap, qft_census** out) {
    if (!ctx) return QFT_ERR_DOMAIN;
    return guard(ctx, [&] {
        require(out, "out");
        *out = nullptr;
        const auto ls = labels_of(labels, count);
        if (ls.empty()) qft::fail(qft::ErrorCode::domain, "census needs a label");
        std::vector<const qft::MarkedRepresentation*> reps;
        for (const auto& l : ls) reps.push_back(&ctx->thermo.rep(l));
        auto* c = new qft_census{qft::conjugacy_census(reps, max_length, word_cap, ctx->thermo.params().workers), ls, {}};
        for (const auto& e : c->census.entries) c->words.push_back(qft::to_string(e.cls.representative));
        *out = c;
    });
}

void qft_census_destroy(qft_census* census) { delete census; }

size_t qft_census_size(const qft_census* census) { return census ? census->census.entries.size() : 0; }

int qft_census_complete(const qft_census* census) { return census && !census->census.completeness_warning ? 1 : 0; }

const char* qft_census_word(const qft_census* census, size_t row) {
    if (!census || row >= census->words.size()) return "";
    return census->words[row].c_str();
}

double qft_census_length(const qft_census* census, size_t row, size_t column) {
    if (!census || row >= census->census.entries.size() || column >= census->labels.size()) return 0.0;
    return census->census.entries[row].lengths.at(census->labels[column]);
}

qft_status qft_census_bijection(qft_context* ctx, const char* coding_label, const char* oracle_label,
                                int max_word_length, double tolerance, size_t* coding_classes, size_t* oracle_classes,
                                size_t* mismatches, double* max_length_gap) {
    if (!ctx) return QFT_ERR_DOMAIN;
    return guard(ctx, [&] {
        require(coding_label, "coding_label");
        require(oracle_label, "oracle_label");
        const qft::Thermo& th = ctx->thermo;
        const qft::BijectionReport r =
            qft::census_bijection(th.rep(coding_label), th.rep(oracle_label), th.alphabet(), th.graph(),
                                  max_word_length, tolerance, th.params().workers);
        if (coding_classes) *coding_classes = r.coding_classes;
        if (oracle_classes) *oracle_classes = r.oracle_classes;
        if (mismatches) *mismatches = r.mismatches;
        if (max_length_gap) *max_length_gap = r.max_length_gap;
    });
}

qft_status qft_curve_create(qft_context* ctx, const char* rho, const char* eta, int grid_size, qft_curve** out) {
    if (!ctx) return QFT_ERR_DOMAIN;
    return guard(ctx, [&] {
        require(rho, "rho");
        require(eta, "eta");
        require(out, "out");
        *out = nullptr;
        *out = new qft_curve{qft::trace_curve(ctx->thermo, rho, eta, grid_size, qft::kCurveTolerance,
                                              ctx->thermo.params().workers)};
    });
}

void qft_curve_destroy(qft_curve* curve) { delete curve; }

size_t qft_curve_size(const qft_curve* curve) { return curve ? curve->curve.samples.size() : 0; }

qft_status qft_curve_sample(const qft_curve* curve, size_t i, qft_sample* out) {
    return guard(nullptr, [&] {
        require(curve, "curve");
        require(out, "out");
        if (i >= curve->curve.samples.size()) qft::fail(qft::ErrorCode::domain, "sample index out of range");
        const qft::ManhattanSample& s = curve->curve.samples[i];
        *out = {s.a, s.b, s.residual, s.error_bar, s.ok ? 1 : 0};
    });
}

const char* qft_curve_sample_error(const qft_curve* curve, size_t i) {
    if (!curve || i >= curve->curve.samples.size()) return "";
    return curve->curve.samples[i].error.c_str();
}

void qft_curve_endpoints(const qft_curve* curve, qft_root* h_rho, qft_root* h_eta) {
    if (!curve) return;
    if (h_rho) copy_root(curve->curve.h_rho, h_rho);
    if (h_eta) copy_root(curve->curve.h_eta, h_eta);
}

int qft_curve_convex(const qft_curve* curve, double tolerance) {
    return curve && curve->curve.convex(tolerance) ? 1 : 0;
}

int qft_curve_decreasing(const qft_curve* curve) { return curve && curve->curve.decreasing() ? 1 : 0; }

qft_status qft_curve_intersection(const qft_curve* curve, double* value, double* error_bar) {
    return guard(nullptr, [&] {
        require(curve, "curve");
        require(value, "value");
        const qft::SlopeEstimate s = qft::intersection_slope(curve->curve);
        *value = s.value;
        if (error_bar) *error_bar = s.error_bar;
    });
}

qft_status qft_intersection_report(qft_context* ctx, const char* rho, const char* eta, int grid_size,
                                   double census_length, int word_cap, qft_intersection* out) {
    if (!ctx) return QFT_ERR_DOMAIN;
    return guard(ctx, [&] {
        require(rho, "rho");
        require(eta, "eta");
        require(out, "out");
        const qft::IntersectionReport r = qft::intersection_report(ctx->thermo, rho, eta, grid_size, census_length,
                                                                   word_cap, ctx->thermo.params().workers);
        out->i_slope = r.i_slope;
        out->i_slope_error = r.i_slope_error;
        out->i_orbit = r.i_orbit;
        out->orbit_classes = r.orbit_classes;
        out->j = r.j;
        out->j_error = r.j_error;
        out->j_reverse = r.j_reverse;
        out->j_reverse_error = r.j_reverse_error;
        out->j_orbit = r.j_orbit;
        out->estimator_gap = r.estimator_gap;
        out->verdict = verdict(r.verdict);
        out->completeness_warning = r.completeness_warning ? 1 : 0;
    });
}

qft_status qft_orbit_average(qft_context* ctx, const char* rho, const char* eta, double max_length, int word_cap,
                             double* value, size_t* classes) {
    if (!ctx) return QFT_ERR_DOMAIN;
    return guard(ctx, [&] {
        require(rho, "rho");
        require(eta, "eta");
        require(value, "value");
        const qft::OrbitAverage o = qft::intersection_orbit_average(
            ctx->thermo.rep(rho), ctx->thermo.rep(eta), max_length, word_cap, ctx->thermo.params().workers);
        *value = o.value;
        if (classes) *classes = o.classes;
    });
}

qft_status qft_dual_rigidity(qft_context* ctx, const char* rho, const char* eta, double a, double b,
                             qft_dual_report* out) {
    if (!ctx) return QFT_ERR_DOMAIN;
    return guard(ctx, [&] {
        require(rho, "rho");
        require(eta, "eta");
        require(out, "out");
        const qft::DualRigidityReport r = qft::dual_rigidity_check(ctx->thermo, rho, eta, a, b);
        *out = {r.lhs, r.lhs_error, r.rhs, r.rhs_error, r.slack, r.tolerance, verdict(r.verdict)};
    });
}

void qft_default_metric_params(qft_metric_params* out) {
    if (!out) return;
    const qft::MetricParams m;
    *out = {m.eps, m.max_halvings, m.richardson_agreement, m.richardson_floor, m.grid_size, m.spot_census_length,
            m.spot_word_cap};
}

qft_status qft_pressure_form_eval(qft_context* ctx, const qft_traces* base, qft_complex dx, qft_complex dy,
                                  const qft_metric_params* params, qft_pressure_form* out) {
    if (!ctx) return QFT_ERR_DOMAIN;
    return guard(ctx, [&] {
        require(base, "base");
        require(out, "out");
        const qft::PressureForm f =
            qft::pressure_form(ctx->thermo, traces(*base), {cx(dx), cx(dy)}, metric_params(params));
        std::memset(out, 0, sizeof *out);
        out->value = f.value;
        out->error_bar = f.error_bar;
        out->eps = f.eps;
        out->halvings = f.halvings;
        out->at_eps = f.at_eps;
        out->at_2eps = f.at_2eps;
        for (std::size_t i = 0; i < 5 && i < f.j.size(); ++i) out->j[i] = f.j[i];
        out->depths = static_cast<int>(std::min<std::size_t>(f.by_depth.size(), 3));
        for (int i = 0; i < out->depths; ++i) out->by_depth[i] = f.by_depth[static_cast<std::size_t>(i)];
        out->orbit_gap = f.orbit_gap;
    });
}

qft_status qft_pressure_form_polarized(qft_context* ctx, const qft_traces* base, qft_complex vx, qft_complex vy,
                                       qft_complex wx, qft_complex wy, const qft_metric_params* params, double* value,
                                       double* error_bar) {
    if (!ctx) return QFT_ERR_DOMAIN;
    return guard(ctx, [&] {
        require(base, "base");
        require(value, "value");
        const qft::PolarizedForm f = qft::pressure_form_polarized(ctx->thermo, traces(*base), {cx(vx), cx(vy)},
                                                                  {cx(wx), cx(wy)}, metric_params(params));
        *value = f.value;
        if (error_bar) *error_bar = f.error_bar;
    });
}

qft_status qft_degeneracy_probe(qft_context* ctx, const qft_traces* base, qft_complex dx, qft_complex dy,
                                const char* const* words, size_t count, double eps, double* derivatives,
                                double* max_abs) {
    if (!ctx) return QFT_ERR_DOMAIN;
    return guard(ctx, [&] {
        require(base, "base");
        std::vector<qft::Word> ws;
        for (const auto& w : labels_of(words, count)) ws.push_back(qft::parse_word(w));
        const qft::DegeneracyProbe p = qft::degeneracy_probe(ctx->thermo, traces(*base), {cx(dx), cx(dy)}, ws, eps);
        if (derivatives) {
            for (std::size_t i = 0; i < p.rows.size(); ++i) derivatives[i] = p.rows[i].derivative;
        }
        if (max_abs) *max_abs = p.max_abs;
    });
}

qft_status qft_path_length(qft_context* ctx, const qft_traces* points, size_t count, double max_gap,
                           const qft_metric_params* params, double* value, double* error_bar) {
    if (!ctx) return QFT_ERR_DOMAIN;
    return guard(ctx, [&] {
        require(points, "points");
        require(value, "value");
        std::vector<qft::TraceCoordinates> ps;
        for (std::size_t i = 0; i < count; ++i) ps.push_back(traces(points[i]));
        const qft::PathLength l = qft::path_length(ctx->thermo, ps, max_gap, metric_params(params));
        *value = l.value;
        if (error_bar) *error_bar = l.error_bar;
    });
}

}  // extern "C"
