#include "qfthermo/pressure_metric.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "qfthermo/error.hpp"
#include "qfthermo/manhattan.hpp"

namespace qft {

namespace {

constexpr double kSubstep = 0.01;  // coordinate-norm length of one continuation substep

// Root of the z quadratic at (x, y) nearest `prev`; index 0 is "plus".
std::pair<Complex, int> nearest_root(Complex x, Complex y, Complex prev) {
    const auto roots = solve_z_roots(x, y);
    const double sep = std::abs(roots[0] - roots[1]);
    if (sep < kBranchSeparation * std::max(1.0, std::abs(roots[0]))) {
        fail(ErrorCode::branch_collision, "z roots collide near x = " + std::to_string(x.real()) + "+" +
                                              std::to_string(x.imag()) + "i");
    }
    const double d0 = std::abs(roots[0] - prev), d1 = std::abs(roots[1] - prev);
    const int k = d0 <= d1 ? 0 : 1;
    if (std::min(d0, d1) >= 0.5 * sep) {
        fail(ErrorCode::branch_collision, "z continuation cannot tell the roots apart; the path nears the branch point");
    }
    return {roots[static_cast<std::size_t>(k)], k};
}

const char* branch_name(int k) { return k == 0 ? "plus" : "minus"; }

// J(base, label) at one ladder depth from the slope with the grid step and
// with half of it; `error` is the solver tolerance propagated to J.
struct JValue {
    double j = 1.0;
    double j_half = 1.0;
    double error = 0.0;
    double i_slope = 1.0;
};

class PathEvaluator {
public:
    PathEvaluator(const Thermo& thermo, const TraceCoordinates& base, const TangentVector& v, const MetricParams& mp)
        : work_(thermo.fresh()), base_(base), v_(v), mp_(mp) {
        work_.add(from_traces(base, "base"));
        const int n = thermo.params().n_max;
        for (int d = std::max(4, n - 2); d <= n; ++d) depths_.push_back(d);
    }

    const std::vector<int>& depths() const { return depths_; }
    int top() const { return depths_.back(); }

    // Label of the path point at parameter t, registered on first use.
    const std::string& point(double t) {
        auto it = labels_.find(t);
        if (it != labels_.end()) return it->second;
        const std::string label = "t" + std::to_string(labels_.size());
        work_.add(from_traces(continue_point(base_, v_, t), label));
        return labels_.emplace(t, label).first->second;
    }

    JValue j(double t, int depth) {
        if (t == 0.0) return {};
        const std::string& label = point(t);
        const Thermo th = depth == work_.params().n_max ? work_ : work_.at_depth(depth);
        auto key = std::make_pair(t, depth);
        auto hit = j_cache_.find(key);
        if (hit != j_cache_.end()) return hit->second;
        const SlopeEstimate i = endpoint_slope(th, "base", label, mp_.grid_size);
        const double h0 = base_entropy(th, depth);
        const double ht = precise_entropy(th, label).value;
        JValue out;
        out.i_slope = i.value;
        out.j = renormalized_intersection(h0, ht, i.value);
        out.j_half = renormalized_intersection(h0, ht, i.half_step);
        out.error = out.j * (i.error_bar - std::abs(i.value - i.half_step)) / i.value;
        return j_cache_.emplace(key, out).first->second;
    }

    double orbit_gap(double t) {
        const std::string& label = point(t);
        const OrbitAverage o = intersection_orbit_average(work_.rep("base"), work_.rep(label), mp_.spot_census_length,
                                                          mp_.spot_word_cap, work_.params().workers);
        return std::abs(j(t, top()).i_slope - o.value) / o.value;
    }

private:
    double base_entropy(const Thermo& th, int depth) {
        auto it = h0_.find(depth);
        if (it != h0_.end()) return it->second;
        return h0_.emplace(depth, precise_entropy(th, "base").value).first->second;
    }

    Thermo work_;
    TraceCoordinates base_;
    TangentVector v_;
    MetricParams mp_;
    std::vector<int> depths_;
    std::map<double, std::string> labels_;
    std::map<std::pair<double, int>, JValue> j_cache_;
    std::map<int, double> h0_;
};

struct Differences {
    double at_eps = 0.0, at_2eps = 0.0, richardson = 0.0;
    double grid = 0.0;   // change of the Richardson value when the slope step is halved
    double noise = 0.0;  // solver tolerance carried through the differences
};

double richardson(double jm2, double jm1, double jp1, double jp2, double h, double* at_eps, double* at_2eps) {
    const double e1 = (jm1 - 2.0 + jp1) / (h * h);
    const double e2 = (jm2 - 2.0 + jp2) / (4.0 * h * h);
    if (at_eps) *at_eps = e1;
    if (at_2eps) *at_2eps = e2;
    return (4.0 * e1 - e2) / 3.0;
}

Differences differences(PathEvaluator& ev, double h, int depth) {
    const JValue m2 = ev.j(-2.0 * h, depth), m1 = ev.j(-h, depth), p1 = ev.j(h, depth), p2 = ev.j(2.0 * h, depth);
    Differences d;
    d.richardson = richardson(m2.j, m1.j, p1.j, p2.j, h, &d.at_eps, &d.at_2eps);
    d.grid = std::abs(d.richardson - richardson(m2.j_half, m1.j_half, p1.j_half, p2.j_half, h, nullptr, nullptr));
    const double dj = std::max({m2.error, m1.error, p1.error, p2.error});
    d.noise = 3.0 * dj / (h * h);
    return d;
}

}  // namespace

double TangentVector::norm() const { return std::sqrt(std::norm(dx) + std::norm(dy)); }

TangentVector TangentVector::unit(Complex dx, Complex dy) {
    const TangentVector v{dx, dy};
    const double n = v.norm();
    if (!(n > 0.0)) fail(ErrorCode::domain, "zero tangent vector has no direction");
    return v * (1.0 / n);
}

TangentVector push_forward(const TraceCoordinates& base, const TangentVector& v, Automorphism phi) {
    const Complex x = base.x, y = base.y, z = base.z;
    const Complex dz_coeff = 2.0 * z - x * y;
    if (std::abs(dz_coeff) < kBranchSeparation) fail(ErrorCode::domain, "z is not a function of (x, y) here");
    const Complex dz = -((2.0 * x - y * z) * v.dx + (2.0 * y - x * z) * v.dy) / dz_coeff;
    switch (phi) {
        case Automorphism::ab_twist: return {dz, v.dy};
        case Automorphism::ba_twist: return {v.dx, dz};
        case Automorphism::swap: return {v.dy, v.dx};
        case Automorphism::invert_a: return v;
    }
    return v;
}

TraceCoordinates continue_point(const TraceCoordinates& base, const TangentVector& v, double t, std::string* branch) {
    const double length = std::abs(t) * v.norm();
    const int substeps = std::max(1, static_cast<int>(std::ceil(length / kSubstep)));
    TraceCoordinates p = base;
    int k = nearest_root(base.x, base.y, base.z).second;
    for (int i = 1; i <= substeps; ++i) {
        const double s = t * i / substeps;
        p.x = base.x + s * v.dx;
        p.y = base.y + s * v.dy;
        std::tie(p.z, k) = nearest_root(p.x, p.y, p.z);
    }
    if (branch) *branch = branch_name(k);
    return p;
}

PathFamily path_family(const TraceCoordinates& base, const TangentVector& v, double eps) {
    if (!(eps > 0.0)) fail(ErrorCode::domain, "eps must be positive");
    PathFamily f;
    f.eps = eps;
    const double n = v.norm();
    f.step = n > 0.0 ? eps / n : 0.0;
    for (int k = -2; k <= 2; ++k) {
        std::string b;
        f.points.push_back(continue_point(base, v, k * f.step, &b));
        f.branch_log.push_back(b);
    }
    return f;
}

PressureForm pressure_form(const Thermo& thermo, const TraceCoordinates& base, const TangentVector& v,
                           const MetricParams& params) {
    if (!(params.eps > 0.0)) fail(ErrorCode::domain, "eps must be positive");
    PressureForm out;
    out.eps = params.eps;
    const double n = v.norm();
    if (n == 0.0) {
        out.j.assign(5, 1.0);
        return out;
    }
    PathEvaluator ev(thermo, base, v, params);
    double h = params.eps / n;
    Differences top;
    for (;;) {
        top = differences(ev, h, ev.top());
        const double gap = std::abs(top.at_eps - top.at_2eps);
        const bool disagree = gap > params.richardson_agreement * std::abs(top.at_eps) &&
                              gap > std::max(params.richardson_floor, top.noise + top.grid);
        if (!disagree || out.halvings == params.max_halvings) break;
        h *= 0.5;
        out.eps *= 0.5;
        ++out.halvings;
    }
    out.at_eps = top.at_eps;
    out.at_2eps = top.at_2eps;
    for (int d : ev.depths()) out.by_depth.push_back(d == ev.top() ? top.richardson : differences(ev, h, d).richardson);
    out.value = top.richardson;
    double spread = 0.0;
    for (std::size_t i = 1; i < out.by_depth.size(); ++i) {
        spread = std::max(spread, std::abs(out.by_depth[i] - out.by_depth[i - 1]));
    }
    out.error_bar = spread + std::abs(top.at_eps - top.at_2eps) / 3.0 + top.grid + top.noise;
    for (int k = -2; k <= 2; ++k) out.j.push_back(ev.j(k * h, ev.top()).j);
    out.orbit_gap = std::max(ev.orbit_gap(-h), ev.orbit_gap(h));
    return out;
}

PolarizedForm pressure_form_polarized(const Thermo& thermo, const TraceCoordinates& base, const TangentVector& v,
                                      const TangentVector& w, const MetricParams& params) {
    const PressureForm plus = pressure_form(thermo, base, v + w, params);
    const PressureForm minus = pressure_form(thermo, base, v - w, params);
    return {0.25 * (plus.value - minus.value), 0.25 * (plus.error_bar + minus.error_bar)};
}

DegeneracyProbe degeneracy_probe(const Thermo& thermo, const TraceCoordinates& base, const TangentVector& v,
                                 const std::vector<Word>& words, double eps) {
    if (words.empty()) fail(ErrorCode::domain, "degeneracy probe needs at least one word");
    if (!(eps > 0.0)) fail(ErrorCode::domain, "eps must be positive");
    DegeneracyProbe out;
    const double n = v.norm();
    if (n == 0.0) {
        for (const auto& w : words) out.rows.push_back({w, 0.0});
        return out;
    }
    const double h = eps / n;
    Thermo work = thermo.fresh();
    const MarkedRepresentation minus = from_traces(continue_point(base, v, -h), "minus");
    const MarkedRepresentation plus = from_traces(continue_point(base, v, h), "plus");
    work.add(minus);
    work.add(plus);
    const double hm = precise_entropy(work, "minus").value;
    const double hp = precise_entropy(work, "plus").value;
    for (const auto& w : words) {
        const double d = (hp * word_translation_length(plus, w) - hm * word_translation_length(minus, w)) / (2.0 * h);
        out.rows.push_back({w, d});
        out.max_abs = std::max(out.max_abs, std::abs(d));
    }
    return out;
}

PathLength path_length(const Thermo& thermo, const std::vector<TraceCoordinates>& points, double max_gap,
                       const MetricParams& params) {
    PathLength out;
    for (std::size_t i = 0; i + 1 < points.size(); ++i) {
        const TraceCoordinates &p = points[i], &q = points[i + 1];
        const TangentVector chord{q.x - p.x, q.y - p.y};
        if (chord.norm() > max_gap) fail(ErrorCode::domain, "consecutive path points are farther apart than the step");
        if (chord.norm() == 0.0) {
            out.segments.push_back(0.0);
            continue;
        }
        // The midpoint is formed symmetrically so that a reversed path meets
        // the same base point; z is the root nearest the continued value.
        TraceCoordinates mid = continue_point(p, chord, 0.5);
        mid.x = 0.5 * (p.x + q.x);
        mid.y = 0.5 * (p.y + q.y);
        mid.z = nearest_root(mid.x, mid.y, mid.z).first;
        const PressureForm f = pressure_form(thermo, mid, chord, params);
        const double seg = std::sqrt(std::max(f.value, 0.0));
        out.segments.push_back(seg);
        out.value += seg;
        out.error_bar += seg > 0.0 ? std::min(f.error_bar / (2.0 * seg), std::sqrt(f.error_bar)) : std::sqrt(f.error_bar);
    }
    return out;
}

}  // namespace qft
