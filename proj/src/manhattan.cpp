#include "qfthermo/manhattan.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "qfthermo/error.hpp"

namespace qft {

namespace {

// P(-a tau_rho - b tau_eta) on the spectrum shared by both labels.
class JointPressure {
public:
    JointPressure(const Thermo& thermo, const std::string& rho, const std::string& eta)
        : thermo_(thermo), same_(rho == eta), swap_(eta < rho) {
        if (same_) {
            labels_ = {rho};
        } else {
            labels_ = swap_ ? std::vector<std::string>{eta, rho} : std::vector<std::string>{rho, eta};
        }
    }

    PressureEstimate operator()(double a, double b) const {
        if (same_) return thermo_.estimate_joint(labels_, {a + b, 0.0});
        return thermo_.estimate_joint(labels_, swap_ ? std::array<double, 2>{b, a} : std::array<double, 2>{a, b});
    }

private:
    const Thermo& thermo_;
    bool same_;
    bool swap_;
    std::vector<std::string> labels_;
};

// Solves P(a, b) = 0 for b near `guess`; P is decreasing in b.
ManhattanSample solve_b(const JointPressure& p, double a, double guess, double width, double tol) {
    ManhattanSample s;
    s.a = a;
    double lo = guess - width, hi = guess + width;
    double flo = p(a, lo).value, fhi = p(a, hi).value;
    for (int i = 0; i < 60 && !(flo > 0.0 && fhi < 0.0); ++i) {
        if (!(flo > 0.0)) {
            lo -= (hi - lo);
            flo = p(a, lo).value;
        }
        if (!(fhi < 0.0)) {
            hi += (hi - lo);
            fhi = p(a, hi).value;
        }
    }
    if (!(flo > 0.0 && fhi < 0.0)) {
        s.ok = false;
        s.error = "BracketFailure: pressure does not change sign in b near " + std::to_string(guess);
        s.b = guess;
        return s;
    }
    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        if (p(a, mid).value > 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    s.b = 0.5 * (lo + hi);
    const PressureEstimate at = p(a, s.b);
    s.residual = std::abs(at.value);
    const double db = 1e-4;
    const double slope = (p(a, s.b + db).value - p(a, s.b - db).value) / (2.0 * db);
    s.error_bar = slope != 0.0 ? at.error_bar / std::abs(slope) : 0.0;
    return s;
}

std::string verdict_of(double slack, double tol) {
    if (slack > tol) return "strict";
    if (slack < -tol) return "violated";
    return "equality";
}

// I = -da/db from b at a = h - 2 step, h - step, h.
SlopeEstimate slope_from(const ManhattanSample& b2, const ManhattanSample& b1, const ManhattanSample& b0,
                         double tolerance) {
    if (!(b0.ok && b1.ok && b2.ok)) fail(ErrorCode::bracket_failure, "endpoint samples of the curve failed");
    const double step = b0.a - b1.a;
    const double three = -(3.0 * b0.b - 4.0 * b1.b + b2.b) / (2.0 * step);
    const double two = -(b0.b - b1.b) / step;
    if (!(three > 0.0)) fail(ErrorCode::domain, "curve is not decreasing at (h(rho), 0)");
    SlopeEstimate out;
    out.value = 1.0 / three;
    out.error_bar = (std::abs(three - two) + 4.0 * tolerance / step) / (three * three);
    return out;
}

template <class F>
MatchedValue over_depths(const Thermo& thermo, F&& f) {
    MatchedValue out;
    const int n = thermo.params().n_max;
    for (int d = std::max(4, n - 2); d <= n; ++d) out.by_depth.push_back(f(d == n ? thermo : thermo.at_depth(d)));
    const auto& v = out.by_depth;
    out.value = v.back();
    out.error_bar = v.size() < 2 ? std::numeric_limits<double>::infinity() : 0.0;
    for (std::size_t i = 1; i < v.size(); ++i) out.error_bar = std::max(out.error_bar, std::abs(v[i] - v[i - 1]));
    return out;
}

}  // namespace

bool ManhattanCurve::convex(double tol) const {
    for (std::size_t i = 1; i + 1 < samples.size(); ++i) {
        const auto &l = samples[i - 1], &m = samples[i], &r = samples[i + 1];
        if (!(l.ok && m.ok && r.ok)) return false;
        const double chord = l.b + (r.b - l.b) * (m.a - l.a) / (r.a - l.a);
        if (m.b > chord + tol) return false;
    }
    return true;
}

bool ManhattanCurve::decreasing() const {
    for (std::size_t i = 1; i < samples.size(); ++i) {
        if (!(samples[i].b < samples[i - 1].b)) return false;
    }
    return true;
}

ManhattanCurve trace_curve(const Thermo& thermo, const std::string& rho, const std::string& eta, int grid_size,
                           double tolerance, int workers) {
    (void)workers;  // samples are warm-started from their predecessor
    if (grid_size < 5) fail(ErrorCode::domain, "gridSize must be at least 5");
    ManhattanCurve curve;
    curve.rho = rho;
    curve.eta = eta;
    curve.grid_size = grid_size;
    curve.tolerance = tolerance;
    curve.h_rho = precise_entropy(thermo, rho, tolerance);
    curve.h_eta = rho == eta ? curve.h_rho : precise_entropy(thermo, eta, tolerance);
    const JointPressure p(thermo, rho, eta);
    const double h = curve.h_rho.value;
    const double step = h / grid_size;
    double guess = curve.h_eta.value;
    double trend = -curve.h_eta.value / h;  // chord slope until two samples exist
    for (int i = 0; i <= grid_size; ++i) {
        const double a = i * step;
        ManhattanSample s = solve_b(p, a, guess, 0.02 * std::max(curve.h_eta.value, 0.1), tolerance);
        if (s.ok && !curve.samples.empty() && curve.samples.back().ok) trend = (s.b - curve.samples.back().b) / step;
        if (s.ok) guess = s.b + trend * step;
        curve.samples.push_back(s);
    }
    return curve;
}

SlopeEstimate intersection_slope(const ManhattanCurve& curve) {
    const auto& s = curve.samples;
    if (s.size() < 3) fail(ErrorCode::domain, "curve has fewer than three samples");
    return slope_from(s[s.size() - 3], s[s.size() - 2], s[s.size() - 1], curve.tolerance);
}

SlopeEstimate intersection_slope(const Thermo& thermo, const std::string& rho, const std::string& eta, int grid_size,
                                 int workers) {
    return intersection_slope(trace_curve(thermo, rho, eta, grid_size, kCurveTolerance, workers));
}

SlopeEstimate endpoint_slope(const Thermo& thermo, const std::string& rho, const std::string& eta, int grid_size,
                             double tolerance) {
    if (grid_size < 5) fail(ErrorCode::domain, "gridSize must be at least 5");
    const double hr = precise_entropy(thermo, rho, tolerance).value;
    const double he = rho == eta ? hr : precise_entropy(thermo, eta, tolerance).value;
    const JointPressure p(thermo, rho, eta);
    const double step = hr / grid_size;
    // a = h - 2 step, h - step, h - step / 2, h.
    const double offsets[4] = {2.0, 1.0, 0.5, 0.0};
    ManhattanSample s[4];
    for (int k = 0; k < 4; ++k) {
        const double a = hr - offsets[k] * step;
        s[k] = solve_b(p, a, he * (1.0 - a / hr), 0.02 * std::max(he, 0.1), tolerance);
    }
    SlopeEstimate out = slope_from(s[0], s[1], s[3], tolerance);
    const SlopeEstimate half = slope_from(s[1], s[2], s[3], tolerance);
    out.half_step = half.value;
    out.error_bar = std::abs(out.value - half.value) + 4.0 * tolerance / (0.5 * step) * out.value * out.value;
    return out;
}

OrbitAverage intersection_orbit_average(const Census& census, const std::string& rho, const std::string& eta) {
    OrbitAverage out;
    out.completeness_warning = census.completeness_warning;
    double sum = 0.0;
    for (const auto& e : census.entries) {
        auto r = e.lengths.find(rho), s = e.lengths.find(eta);
        if (r == e.lengths.end() || s == e.lengths.end()) {
            fail(ErrorCode::unknown_label, "census lacks lengths for '" + rho + "' or '" + eta + "'");
        }
        if (!(r->second > 0.0) || r->second > census.max_length) continue;
        sum += rho == eta ? 1.0 : s->second / r->second;
        ++out.classes;
    }
    if (out.classes == 0) fail(ErrorCode::empty_census, "no class with 0 < length <= " + std::to_string(census.max_length));
    out.value = sum / static_cast<double>(out.classes);
    return out;
}

OrbitAverage intersection_orbit_average(const MarkedRepresentation& rho, const MarkedRepresentation& eta,
                                        double max_length, int word_cap, int workers) {
    const Census census = conjugacy_census({&rho, &eta}, max_length, word_cap, workers);
    return intersection_orbit_average(census, rho.label(), eta.label());
}

double renormalized_intersection(double h_rho, double h_eta, double intersection) {
    if (!(h_rho > 0.0)) fail(ErrorCode::domain, "entropy must be positive");
    return h_eta / h_rho * intersection;
}

RootEstimate precise_entropy(const Thermo& thermo, const std::string& label, double tolerance) {
    const ThermoParams& p = thermo.params();
    return thermo.root_in_t({{{label, 1.0}}, 1.0, 0.0}, p.bracket_low, p.bracket_high, tolerance);
}

MatchedValue matched_intersection(const Thermo& thermo, const std::string& rho, const std::string& eta,
                                  int grid_size, MatchedValue* slopes) {
    double slope_error = 0.0, j_slope_error = 0.0;
    std::vector<double> is;
    MatchedValue out = over_depths(thermo, [&](const Thermo& th) {
        const SlopeEstimate i = endpoint_slope(th, rho, eta, grid_size);
        const double hr = precise_entropy(th, rho).value;
        const double he = rho == eta ? hr : precise_entropy(th, eta).value;
        const double j = renormalized_intersection(hr, he, i.value);
        is.push_back(i.value);
        slope_error = i.error_bar;  // the last call is depth N
        j_slope_error = j * i.error_bar / i.value;
        return j;
    });
    out.error_bar += j_slope_error;
    if (slopes) {
        slopes->by_depth = is;
        slopes->value = is.back();
        double spread = 0.0;
        for (std::size_t k = 1; k < is.size(); ++k) spread = std::max(spread, std::abs(is[k] - is[k - 1]));
        slopes->error_bar = spread + slope_error;
    }
    return out;
}

MatchedValue matched_entropy_gap(const Thermo& thermo, const std::string& rho, const std::string& eta) {
    MatchedValue out = over_depths(thermo, [&](const Thermo& th) {
        return precise_entropy(th, eta).value - precise_entropy(th, rho).value;
    });
    out.error_bar += 2.0 * kCurveTolerance;
    return out;
}

IntersectionReport intersection_report(const Thermo& thermo, const std::string& rho, const std::string& eta,
                                       int grid_size, double census_length, int word_cap, int workers) {
    IntersectionReport out;
    const ManhattanCurve curve = trace_curve(thermo, rho, eta, grid_size, kCurveTolerance, workers);
    const SlopeEstimate slope = intersection_slope(curve);
    const MarkedRepresentation& r = thermo.rep(rho);
    const MarkedRepresentation& e = thermo.rep(eta);
    const Census census = conjugacy_census({&r, &e}, census_length, word_cap, workers);
    const OrbitAverage orbit = intersection_orbit_average(census, rho, eta);

    out.i_slope = slope.value;
    out.i_orbit = orbit.value;
    out.orbit_classes = orbit.classes;
    out.j_orbit = renormalized_intersection(curve.h_rho.value, curve.h_eta.value, orbit.value);
    MatchedValue i_matched;
    const MatchedValue j = matched_intersection(thermo, rho, eta, grid_size, &i_matched);
    double spread = 0.0;
    for (std::size_t k = 1; k < i_matched.by_depth.size(); ++k) {
        spread = std::max(spread, std::abs(i_matched.by_depth[k] - i_matched.by_depth[k - 1]));
    }
    out.i_slope_error = slope.error_bar + spread;
    out.j = j.value;
    out.j_error = j.error_bar;
    const MatchedValue back = rho == eta ? j : matched_intersection(thermo, eta, rho, grid_size);
    out.j_reverse = back.value;
    out.j_reverse_error = back.error_bar;
    out.estimator_gap = std::abs(slope.value - orbit.value) / orbit.value;
    out.completeness_warning = orbit.completeness_warning;
    out.verdict = verdict_of(out.j - 1.0, std::max(out.j_error, kRigidityFloor));
    return out;
}

DualRigidityReport dual_rigidity_check(const Thermo& thermo, const std::string& rho, const std::string& eta, double a,
                                       double b) {
    if (a < 0.0 || b < 0.0 || a + b <= 0.0) fail(ErrorCode::domain, "weights must be >= 0 with a + b > 0");
    DualRigidityReport out;
    const MatchedValue slack = over_depths(thermo, [&](const Thermo& th) {
        const ThermoParams& p = th.params();
        const double s = a + b;
        const RootEstimate w = th.root_in_t({{{rho, a}, {eta, b}}, 1.0, 0.0}, p.bracket_low / s, p.bracket_high / s,
                                            kCurveTolerance / s);
        const RootEstimate hr = precise_entropy(th, rho);
        const RootEstimate he = rho == eta ? hr : precise_entropy(th, eta);
        out.lhs = w.value;
        out.lhs_error = w.error_bar;
        const double den = b * hr.value + a * he.value;
        out.rhs = hr.value * he.value / den;
        // d rhs / d h_rho = b h_eta^2 / den^2 and symmetrically.
        out.rhs_error = (b * he.value * he.value * hr.error_bar + a * hr.value * hr.value * he.error_bar) / (den * den);
        return out.rhs - out.lhs;
    });
    out.slack = slack.value;
    out.tolerance = slack.error_bar + 4.0 * kCurveTolerance;
    out.verdict = verdict_of(out.slack, std::max(out.tolerance, kRigidityFloor));
    return out;
}

}  // namespace qft
