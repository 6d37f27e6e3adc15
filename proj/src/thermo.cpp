#include "qfthermo/thermo.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <unordered_map>

#include "qfthermo/error.hpp"
#include "qfthermo/parallel.hpp"

namespace qft {

namespace {

constexpr double kWidth1 = 1e-3;
constexpr double kWidth2 = 1e-2;

struct Weights {
    std::vector<std::string> labels;  // distinct, sorted
    std::array<double, 2> w{};        // t * coefficient per label
};

Weights collapse(const PotentialSpec& spec) {
    std::map<std::string, double> sum;
    for (const auto& term : spec.terms) {
        if (term.coefficient < 0.0) fail(ErrorCode::domain, "negative potential coefficient");
        if (term.coefficient > 0.0) sum[term.label] += term.coefficient;
    }
    if (sum.empty()) fail(ErrorCode::domain, "potential has no term with a positive coefficient");
    if (sum.size() > 2) fail(ErrorCode::domain, "potentials mix at most two representations");
    Weights out;
    std::size_t i = 0;
    for (const auto& [label, c] : sum) {
        out.labels.push_back(label);
        out.w[i++] = spec.t * c;
    }
    return out;
}

double aitken(double a, double b, double c, bool& ok) {
    const double den = c - 2.0 * b + a;
    ok = std::abs(den) >= 1e-12;
    return ok ? c - (c - b) * (c - b) / den : c;
}

}  // namespace

double PotentialSpec::effective_scale() const {
    double s = 0.0;
    for (const auto& term : terms) s += term.coefficient;
    return t * s;
}

double periodic_weight(const CycleClass& cycle, const PotentialSpec& spec) {
    double w = 0.0;
    for (const auto& term : spec.terms) {
        auto it = cycle.lengths.find(term.label);
        if (it == cycle.lengths.end()) fail(ErrorCode::unknown_label, "no length recorded for '" + term.label + "'");
        w -= spec.t * term.coefficient * it->second;
    }
    return w + spec.step_shift * static_cast<double>(cycle.states.size());
}

double truncation_tail_bound(int s_max, double effective_scale, int states_per_power) {
    const double p = 2.0 * effective_scale;
    if (p <= 1.0) return std::numeric_limits<double>::infinity();
    const long first = s_max + 2;
    const long last = first + 1000;
    double sum = 0.0;
    for (long r = last - 1; r >= first; --r) sum += std::pow(static_cast<double>(r), -p);
    // Euler-Maclaurin remainder for r >= last.
    const double n = static_cast<double>(last);
    sum += std::pow(n, 1.0 - p) / (p - 1.0) + 0.5 * std::pow(n, -p) + p * std::pow(n, -p - 1.0) / 12.0;
    return states_per_power * sum;
}

Z1Probe z1_probe(double effective_scale, const std::vector<int>& schedule) {
    if (schedule.size() < 2) fail(ErrorCode::domain, "z1 schedule needs at least two entries");
    for (std::size_t i = 0; i < schedule.size(); ++i) {
        if (schedule[i] < 1 || (i > 0 && schedule[i] <= schedule[i - 1])) {
            fail(ErrorCode::domain, "z1 schedule must be increasing and positive");
        }
    }
    const double p = 2.0 * effective_scale;
    const TruncatedAlphabet alph(build_parabolic_data(), schedule.back());
    auto term = [&](int r) { return alph.count_with_r(r) * std::pow(static_cast<double>(r), -p); };

    Z1Probe out;
    double sum = 0.0;
    int done = 0;  // states with s <= done are included; A1 states have r = 1
    sum += term(1);
    std::vector<double> xs, ys;
    for (int s_max : schedule) {
        for (int s = done + 1; s <= s_max; ++s) sum += term(s + 1);
        done = s_max;
        out.partial_sums.emplace_back(s_max, sum);
        // Increment Z_1(s_max) - Z_1(s_max - 1), contributed by r = s_max + 1.
        xs.push_back(std::log(static_cast<double>(s_max + 1)));
        ys.push_back(std::log(term(s_max + 1)));
    }
    const double n = static_cast<double>(xs.size());
    const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
    const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / n;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
    }
    out.exponent = sxy / sxx;
    double rss = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double e = ys[i] - my - out.exponent * (xs[i] - mx);
        rss += e * e;
    }
    out.exponent_error = xs.size() > 2 ? std::sqrt(rss / (n - 2.0) / sxx) : 0.0;
    // The harmonic boundary diverges; allow for rounding in the fit.
    out.converging = out.exponent < -1.0 - 1e-9;
    return out;
}

LengthSpectrum::LengthSpectrum(const TruncatedAlphabet& alph, const TransitionGraph& graph,
                               const std::vector<int>& anchors, int n_max,
                               const std::vector<const MarkedRepresentation*>& reps, int workers)
    : dim_(static_cast<int>(reps.size())), n_max_(n_max), width_(reps.size() == 1 ? kWidth1 : kWidth2) {
    if (dim_ < 1 || dim_ > 2) fail(ErrorCode::domain, "length spectra hold one or two representations");
    if (anchors.empty()) fail(ErrorCode::domain, "empty anchor set");
    std::vector<std::vector<MoebiusMap>> images;
    for (const auto* rep : reps) images.push_back(state_images(*rep, alph));
    std::vector<const std::vector<MoebiusMap>*> image_ptrs;
    for (const auto& im : images) image_ptrs.push_back(&im);

    struct Acc {
        std::uint64_t count = 0;
        std::array<std::int64_t, 2> offset{};
    };
    // Per-worker accumulators keyed by the packed bin pair.
    using Table = std::vector<std::unordered_map<std::uint64_t, Acc>>;
    const int nw = std::max(1, std::min<int>(resolve_workers(workers), static_cast<int>(anchors.size())));
    std::vector<Table> tables(static_cast<std::size_t>(nw), Table(static_cast<std::size_t>(n_max) + 1));
    const double inv = 1.0 / width_;
    const int dim = dim_;
    const double width = width_;

    parallel_for(static_cast<std::size_t>(nw), nw, [&](std::size_t w) {
        Table& table = tables[w];
        // Dense counters for the one-dimensional case.
        std::vector<std::vector<Acc>> dense(static_cast<std::size_t>(n_max) + 1);
        for (std::size_t ai = w; ai < anchors.size(); ai += static_cast<std::size_t>(nw)) {
            const ClosedWalkSearch search(graph, anchors[ai], n_max);
            search.run(image_ptrs, [&](int n, const double* len) {
                std::array<std::int64_t, 2> bin{};
                std::array<std::int64_t, 2> off{};
                for (int r = 0; r < dim; ++r) {
                    bin[r] = static_cast<std::int64_t>(len[r] * inv);
                    off[r] = std::llround((len[r] - (static_cast<double>(bin[r]) + 0.5) * width) * kOffsetScale);
                }
                if (dim == 1) {
                    auto& row = dense[static_cast<std::size_t>(n)];
                    if (static_cast<std::size_t>(bin[0]) >= row.size()) row.resize(static_cast<std::size_t>(bin[0]) + 1024);
                    Acc& a = row[static_cast<std::size_t>(bin[0])];
                    ++a.count;
                    a.offset[0] += off[0];
                } else {
                    const std::uint64_t key = (static_cast<std::uint64_t>(bin[0]) << 32) | static_cast<std::uint64_t>(bin[1]);
                    Acc& a = table[static_cast<std::size_t>(n)][key];
                    ++a.count;
                    a.offset[0] += off[0];
                    a.offset[1] += off[1];
                }
            });
        }
        if (dim == 1) {
            for (std::size_t n = 0; n < dense.size(); ++n) {
                for (std::size_t b = 0; b < dense[n].size(); ++b) {
                    if (dense[n][b].count) table[n][static_cast<std::uint64_t>(b) << 32] = dense[n][b];
                }
            }
        }
    });

    cells_.assign(static_cast<std::size_t>(n_max) + 1, {});
    for (std::size_t n = 0; n <= static_cast<std::size_t>(n_max); ++n) {
        std::unordered_map<std::uint64_t, Acc> merged;
        for (auto& table : tables) {
            for (const auto& [key, acc] : table[n]) {
                Acc& m = merged[key];
                m.count += acc.count;
                m.offset[0] += acc.offset[0];
                m.offset[1] += acc.offset[1];
            }
        }
        std::vector<std::uint64_t> keys;
        keys.reserve(merged.size());
        for (const auto& kv : merged) keys.push_back(kv.first);
        std::sort(keys.begin(), keys.end());
        auto& out = cells_[n];
        out.reserve(keys.size());
        for (std::uint64_t key : keys) {
            const Acc& acc = merged[key];
            Cell c;
            c.bin = {static_cast<std::int32_t>(key >> 32), static_cast<std::int32_t>(key & 0xffffffffu)};
            c.count = acc.count;
            c.offset = acc.offset;
            out.push_back(c);
        }
    }
}

std::uint64_t LengthSpectrum::walk_count(int n) const {
    std::uint64_t total = 0;
    for (const Cell& c : cells(n)) total += c.count;
    return total;
}

double LengthSpectrum::log_partition(int n, const std::array<double, 2>& weights) const {
    const auto& row = cells(n);
    if (row.empty()) return -std::numeric_limits<double>::infinity();
    auto exponent = [&](const Cell& c) {
        double e = 0.0;
        for (int r = 0; r < dim_; ++r) e -= weights[static_cast<std::size_t>(r)] * (c.bin[static_cast<std::size_t>(r)] + 0.5) * width_;
        return e;
    };
    double top = -std::numeric_limits<double>::infinity();
    for (const Cell& c : row) top = std::max(top, exponent(c));
    double z = 0.0;
    for (const Cell& c : row) {
        double shift = 0.0;
        for (int r = 0; r < dim_; ++r) {
            shift += weights[static_cast<std::size_t>(r)] * static_cast<double>(c.offset[static_cast<std::size_t>(r)]) / kOffsetScale;
        }
        z += std::exp(exponent(c) - top) * (static_cast<double>(c.count) - shift);
    }
    return top + std::log(z);
}

void extrapolate(PressureEstimate& est) {
    const auto& l = est.ladder;
    if (l.size() < 3) fail(ErrorCode::domain, "ladder needs at least three rungs");
    const double a = l[l.size() - 3].value, b = l[l.size() - 2].value, c = l.back().value;
    bool ok = false;
    est.value = aitken(a, b, c, ok);
    est.extrapolated = ok;
    est.error_bar = std::max(std::abs(c - est.value), std::abs(c - b));
    if (!ok) est.error_bar *= 2.0;
}

Thermo::Thermo(ThermoParams params) : params_(params) {
    if (params_.n_max < 4) fail(ErrorCode::domain, "nMax must be at least 4 for the extrapolation");
    TruncatedAlphabet alph(build_parabolic_data(), params_.s_max);
    TransitionGraph graph = transitions(alph);
    std::vector<int> anchors;
    if (params_.anchors == AnchorMode::all_a1) {
        anchors.resize(static_cast<std::size_t>(alph.a1_count()));
        std::iota(anchors.begin(), anchors.end(), 0);
    } else {
        if (params_.anchor < 0 || params_.anchor >= alph.size()) fail(ErrorCode::domain, "anchor out of range");
        anchors = {params_.anchor};
    }
    coding_ = std::make_shared<const Coding>(Coding{std::move(alph), std::move(graph), std::move(anchors)});
    state_ = std::make_shared<State>();
}

Thermo Thermo::at_depth(int n) const {
    if (n < 4 || n > params_.n_max) fail(ErrorCode::domain, "depth must lie in 4..nMax");
    ThermoParams p = params_;
    p.n_max = n;
    return Thermo(p, coding_, state_);
}

Thermo Thermo::fresh() const { return Thermo(params_, coding_, std::make_shared<State>()); }

void Thermo::add(const MarkedRepresentation& rep) {
    std::lock_guard<std::mutex> lock(state_->mutex);
    state_->reps.insert_or_assign(rep.label(), rep);
    auto& cache = state_->cache;
    for (auto it = cache.begin(); it != cache.end();) {
        const auto& ls = it->first;
        const bool hit = std::find(ls.begin(), ls.end(), rep.label()) != ls.end();
        it = hit ? cache.erase(it) : std::next(it);
    }
}

bool Thermo::has(const std::string& label) const {
    std::lock_guard<std::mutex> lock(state_->mutex);
    return state_->reps.count(label) != 0;
}

const MarkedRepresentation& Thermo::rep(const std::string& label) const {
    std::lock_guard<std::mutex> lock(state_->mutex);
    auto it = state_->reps.find(label);
    if (it == state_->reps.end()) fail(ErrorCode::unknown_label, "representation '" + label + "' is not registered");
    return it->second;
}

std::shared_ptr<const LengthSpectrum> Thermo::spectrum(const std::vector<std::string>& labels, int n_max) const {
    std::vector<const MarkedRepresentation*> reps;
    {
        std::lock_guard<std::mutex> lock(state_->mutex);
        auto it = state_->cache.find(labels);
        if (it != state_->cache.end()) {
            auto deep = it->second.lower_bound(n_max);
            if (deep != it->second.end()) return deep->second;
        }
        for (const auto& l : labels) {
            auto r = state_->reps.find(l);
            if (r == state_->reps.end()) fail(ErrorCode::unknown_label, "representation '" + l + "' is not registered");
            reps.push_back(&r->second);
        }
    }
    auto sp = std::make_shared<const LengthSpectrum>(coding_->alph, coding_->graph, coding_->anchors, n_max, reps,
                                                     params_.workers);
    std::lock_guard<std::mutex> lock(state_->mutex);
    return state_->cache[labels].emplace(n_max, std::move(sp)).first->second;
}

double Thermo::log_partition_sum(int n, int anchor, const PotentialSpec& spec) const {
    if (n < 1 || n > kDefaultCycleCap) {
        fail(ErrorCode::cap_exceeded, "walk length " + std::to_string(n) + " outside 1.." + std::to_string(kDefaultCycleCap));
    }
    const Weights wt = collapse(spec);
    std::vector<std::vector<MoebiusMap>> images;
    for (const auto& l : wt.labels) images.push_back(state_images(rep(l), coding_->alph));
    std::vector<const std::vector<MoebiusMap>*> ptrs;
    for (const auto& im : images) ptrs.push_back(&im);
    const std::size_t k = ptrs.size();
    const ClosedWalkSearch search(coding_->graph, anchor, n);
    // Streaming log-sum-exp.
    double top = -std::numeric_limits<double>::infinity();
    double acc = 0.0;
    search.run(ptrs, [&](int depth, const double* len) {
        if (depth != n) return;
        double e = spec.step_shift * n;
        for (std::size_t r = 0; r < k; ++r) e -= wt.w[r] * len[r];
        if (e > top) {
            acc = acc * std::exp(top - e) + 1.0;
            top = e;
        } else {
            acc += std::exp(e - top);
        }
    });
    return acc > 0.0 ? top + std::log(acc) : -std::numeric_limits<double>::infinity();
}

PressureEstimate Thermo::gurevich_pressure(const PotentialSpec& spec) const {
    return gurevich_pressure(spec, params_.n_max);
}

namespace {

PressureEstimate ladder_estimate(const LengthSpectrum& sp, const Weights& wt, const PotentialSpec& spec, int n_max,
                                 int s_max) {
    PressureEstimate est;
    est.s_max = s_max;
    for (int n = 2; n <= n_max; ++n) {
        const double lz = sp.log_partition(n, wt.w) + spec.step_shift * n;
        est.ladder.push_back({n, lz / n});
    }
    extrapolate(est);
    est.tail_bound = truncation_tail_bound(s_max, spec.effective_scale());
    return est;
}

}  // namespace

PressureEstimate Thermo::estimate(const PotentialSpec& spec) const {
    const Weights wt = collapse(spec);
    return ladder_estimate(*spectrum(wt.labels, params_.n_max), wt, spec, params_.n_max, params_.s_max);
}

PressureEstimate Thermo::estimate_joint(const std::vector<std::string>& labels,
                                        const std::array<double, 2>& weights) const {
    if (labels.empty() || labels.size() > 2 || (labels.size() == 2 && labels[0] == labels[1])) {
        fail(ErrorCode::domain, "joint estimate takes one or two distinct labels");
    }
    Weights wt{labels, weights};
    PotentialSpec spec;
    spec.t = 1.0;
    for (std::size_t i = 0; i < labels.size(); ++i) spec.terms.push_back({labels[i], weights[i]});
    return ladder_estimate(*spectrum(labels, params_.n_max), wt, spec, params_.n_max, params_.s_max);
}

PressureEstimate Thermo::gurevich_pressure(const PotentialSpec& spec, int n_max) const {
    if (n_max < 4) fail(ErrorCode::domain, "nMax must be at least 4 for the extrapolation");
    if (spec.effective_scale() <= 0.5) {
        fail(ErrorCode::domain, "t * sum(a) = " + std::to_string(spec.effective_scale()) +
                                    " <= 1/2: pressure is infinite; use z1_probe");
    }
    const Weights wt = collapse(spec);
    const auto sp = spectrum(wt.labels, n_max);
    PressureEstimate est = ladder_estimate(*sp, wt, spec, n_max, params_.s_max);
    if (!(est.error_bar <= params_.oscillation_threshold)) {
        fail(ErrorCode::non_convergent, "pressure ladder oscillation " + std::to_string(est.error_bar) +
                                            " exceeds " + std::to_string(params_.oscillation_threshold));
    }
    return est;
}

RootEstimate Thermo::root_in_t(const PotentialSpec& unit, double low, double high, double tolerance) const {
    const Weights base = collapse(unit);
    const int n_max = params_.n_max;
    const auto sp = spectrum(base.labels, n_max);
    auto at = [&](double t) {
        PotentialSpec s = unit;
        s.t = t;
        Weights w = base;
        for (auto& x : w.w) x *= t / unit.t;
        return ladder_estimate(*sp, w, s, n_max, params_.s_max);
    };
    PressureEstimate plo = at(low), phi = at(high);
    if (!(plo.value > 0.0 && phi.value < 0.0)) {
        std::string diag = "pressure does not change sign on [" + std::to_string(low) + ", " + std::to_string(high) +
                           "]: P(low) = " + std::to_string(plo.value) + ", P(high) = " + std::to_string(phi.value) +
                           "; ladder at low:";
        for (const auto& p : plo.ladder) diag += " " + std::to_string(p.value);
        fail(ErrorCode::bracket_failure, diag);
    }
    double lo = low, hi = high;
    while (hi - lo > tolerance) {
        const double mid = 0.5 * (lo + hi);
        if (at(mid).value > 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    RootEstimate out;
    out.value = 0.5 * (lo + hi);
    out.pressure = at(out.value);
    const double dt = std::max(1e-4, tolerance);
    out.slope = (at(out.value + dt).value - at(out.value - dt).value) / (2.0 * dt);
    const double from_pressure = out.slope != 0.0 ? out.pressure.error_bar / std::abs(out.slope) : 0.0;
    out.error_bar = std::hypot(0.5 * (hi - lo), from_pressure);
    if (!(out.pressure.error_bar <= params_.oscillation_threshold)) {
        fail(ErrorCode::non_convergent, "pressure ladder oscillation at the root exceeds the threshold");
    }
    return out;
}

RootEstimate Thermo::entropy(const std::string& label) const {
    PotentialSpec unit{{{label, 1.0}}, 1.0, 0.0};
    return root_in_t(unit, params_.bracket_low, params_.bracket_high, params_.root_tolerance);
}

RootEstimate Thermo::weighted_entropy(const std::string& rho, const std::string& eta, double a, double b) const {
    if (a < 0.0 || b < 0.0 || a + b <= 0.0) fail(ErrorCode::domain, "weights must be >= 0 with a + b > 0");
    PotentialSpec unit{{{rho, a}, {eta, b}}, 1.0, 0.0};
    const double s = a + b;
    return root_in_t(unit, params_.bracket_low / s, params_.bracket_high / s, params_.root_tolerance / s);
}

}  // namespace qft
