#include "qfthermo/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "qfthermo/error.hpp"
#include "qfthermo/format.hpp"
#include "qfthermo/parallel.hpp"

namespace qft {

namespace {

// cosh d(b0, M b0) = |M|_F^2 / 2.
double frobenius2(const MoebiusMap& m) { return std::norm(m.a()) + std::norm(m.b()) + std::norm(m.c()) + std::norm(m.d()); }

struct BallWalk {
    const MarkedRepresentation& rep;
    const std::vector<double>& thresholds;  // 2 cosh R per grid radius, increasing
    int cap;
    std::vector<std::uint64_t> hits;        // hits[i]: words whose smallest containing radius is i
    std::vector<std::uint8_t> at_cap;       // a word of length cap reached radius i

    void visit(const MoebiusMap& m, int len, int last) {
        const double f = frobenius2(m);
        const auto it = std::lower_bound(thresholds.begin(), thresholds.end(), f);
        const auto i = static_cast<std::size_t>(it - thresholds.begin());
        if (i < thresholds.size()) {
            ++hits[i];
            if (len == cap) at_cap[i] = 1;
        }
        if (len == cap) return;
        for (Letter x : kLetters) {
            if (last >= 0 && index(x) == (last ^ 1)) continue;
            visit(MoebiusMap::multiply_raw(m, rep.image(x)), len + 1, index(x));
        }
    }
};

}  // namespace

std::vector<BallCount> ball_counts(const MarkedRepresentation& rep, const std::vector<double>& radii, int word_cap,
                                   int workers) {
    if (word_cap > kBallWordCap) {
        fail(ErrorCode::cap_exceeded, "ball word cap " + std::to_string(word_cap) + " > " + std::to_string(kBallWordCap));
    }
    if (word_cap < 0) fail(ErrorCode::domain, "negative word cap");
    for (std::size_t i = 1; i < radii.size(); ++i) {
        if (radii[i] < radii[i - 1]) fail(ErrorCode::domain, "radius grid must be nondecreasing");
    }
    std::vector<double> thresholds;
    for (double r : radii) thresholds.push_back(2.0 * std::cosh(std::max(r, 0.0)) * (1.0 + 1e-14));
    const std::size_t g = radii.size();

    // One subtree per first letter; the identity is counted separately.
    std::vector<std::vector<std::uint64_t>> hits(4, std::vector<std::uint64_t>(g, 0));
    std::vector<std::vector<std::uint8_t>> at_cap(4, std::vector<std::uint8_t>(g, 0));
    if (word_cap >= 1) {
        parallel_for(4, workers, [&](std::size_t first) {
            BallWalk walk{rep, thresholds, word_cap, std::vector<std::uint64_t>(g, 0), std::vector<std::uint8_t>(g, 0)};
            walk.visit(rep.image(kLetters[first]), 1, static_cast<int>(first));
            hits[first] = std::move(walk.hits);
            at_cap[first] = std::move(walk.at_cap);
        });
    }
    std::vector<BallCount> out(g);
    std::uint64_t running = 1;  // identity: displacement 0
    bool warned = false;
    for (std::size_t i = 0; i < g; ++i) {
        for (std::size_t f = 0; f < 4; ++f) {
            running += hits[f][i];
            warned = warned || at_cap[f][i];
        }
        if (radii[i] < 0.0) {
            out[i] = {0, false};
            continue;
        }
        out[i] = {running, warned};
    }
    return out;
}

BallCount ball_count(const MarkedRepresentation& rep, double radius, int word_cap, int workers) {
    return ball_counts(rep, {radius}, word_cap, workers).front();
}

std::vector<double> default_entropy_grid() {
    std::vector<double> grid;
    for (int i = 0; i <= 12; ++i) grid.push_back(6.0 + 0.5 * i);
    return grid;
}

SlopeFit poincare_entropy(const MarkedRepresentation& rep, const std::vector<double>& radii, int word_cap,
                          int workers) {
    if (radii.size() < 3) fail(ErrorCode::domain, "entropy grid needs at least three radii");
    const auto counts = ball_counts(rep, radii, word_cap, workers);
    std::vector<double> ys;
    for (const auto& c : counts) {
        if (c.count == 0) fail(ErrorCode::domain, "empty ball on the entropy grid");
        ys.push_back(std::log(static_cast<double>(c.count)));
    }
    const double n = static_cast<double>(radii.size());
    const double mx = std::accumulate(radii.begin(), radii.end(), 0.0) / n;
    const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / n;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < radii.size(); ++i) {
        sxx += (radii[i] - mx) * (radii[i] - mx);
        sxy += (radii[i] - mx) * (ys[i] - my);
    }
    if (sxx <= 0.0) fail(ErrorCode::domain, "degenerate entropy grid");
    SlopeFit fit;
    fit.slope = sxy / sxx;
    double rss = 0.0;
    for (std::size_t i = 0; i < radii.size(); ++i) {
        const double e = ys[i] - my - fit.slope * (radii[i] - mx);
        rss += e * e;
        fit.max_relative_residual = std::max(fit.max_relative_residual, std::abs(std::expm1(e)));
    }
    fit.error = std::sqrt(rss / (n - 2.0) / sxx);
    fit.boundary_warning = counts.back().boundary_warning;
    return fit;
}

std::vector<CensusEntry> class_table(const std::vector<const MarkedRepresentation*>& reps, int word_cap,
                                     int workers) {
    if (word_cap > kCensusWordCap) {
        fail(ErrorCode::cap_exceeded,
             "census word cap " + std::to_string(word_cap) + " > " + std::to_string(kCensusWordCap));
    }
    const auto classes = conjugacy_classes_up_to(word_cap, kCensusWordCap);
    std::vector<CensusEntry> out(classes.size());
    parallel_for(classes.size(), workers, [&](std::size_t i) {
        CensusEntry& e = out[i];
        e.cls = classes[i];
        e.parabolic = is_peripheral(e.cls.representative);
        for (const auto* rep : reps) {
            e.lengths[rep->label()] = e.parabolic ? 0.0 : word_translation_length(*rep, e.cls.representative);
        }
    });
    std::sort(out.begin(), out.end(), [](const CensusEntry& a, const CensusEntry& b) { return a.cls < b.cls; });
    return out;
}

Census conjugacy_census(const std::vector<const MarkedRepresentation*>& reps, double max_length, int word_cap,
                        int workers) {
    if (reps.empty()) fail(ErrorCode::domain, "census needs a representation");
    Census census;
    census.primary = reps.front()->label();
    census.max_length = max_length;
    census.word_cap = word_cap;
    for (auto& e : class_table(reps, word_cap, workers)) {
        const double l = e.lengths.at(census.primary);
        if (e.cls.word_length() == word_cap && l <= max_length) census.completeness_warning = true;
        if (l < 1e-9 || l > max_length) continue;
        census.entries.push_back(std::move(e));
    }
    return census;
}

std::string census_csv(const Census& census, const std::vector<std::string>& labels) {
    std::ostringstream os;
    os << "class;wordlen";
    for (const auto& l : labels) os << ";length@" << l;
    os << "\n";
    for (const auto& e : census.entries) {
        os << to_string(e.cls.representative) << ';' << e.cls.word_length();
        for (const auto& l : labels) {
            auto it = e.lengths.find(l);
            os << ';' << (it == e.lengths.end() ? std::string() : format_number(it->second));
        }
        os << "\n";
    }
    return os.str();
}

BijectionReport census_bijection(const MarkedRepresentation& coding_rep, const MarkedRepresentation& oracle_rep,
                                 const TruncatedAlphabet& alph, const TransitionGraph& graph, int max_word_length,
                                 double tolerance, int workers) {
    if (max_word_length > kCensusWordCap) {
        fail(ErrorCode::cap_exceeded, "bijection word length " + std::to_string(max_word_length) + " > " +
                                          std::to_string(kCensusWordCap));
    }
    using Entry = std::pair<ConjugacyClass, double>;
    const auto cycles = enumerate_cycles_by_word_length(alph, graph, max_word_length);
    std::vector<Entry> coding(cycles.size());
    parallel_for(cycles.size(), workers, [&](std::size_t i) {
        coding[i] = {conjugacy_class_of(cycles[i].word),
                     translation_length(cycle_group_element(coding_rep, alph, cycles[i].states))};
    });
    std::vector<Entry> oracle;
    for (const auto& e : class_table({&oracle_rep}, max_word_length, workers)) {
        if (!e.parabolic) oracle.emplace_back(e.cls, e.lengths.at(oracle_rep.label()));
    }
    auto by_class = [](const Entry& a, const Entry& b) { return a.first < b.first || (a.first == b.first && a.second < b.second); };
    std::sort(coding.begin(), coding.end(), by_class);
    std::sort(oracle.begin(), oracle.end(), by_class);

    BijectionReport out;
    out.coding_classes = coding.size();
    out.oracle_classes = oracle.size();
    auto note = [&](const Entry& e, const char* why) {
        ++out.mismatches;
        if (out.examples.size() < 8) out.examples.push_back(to_string(e.first.representative) + " " + why);
    };
    std::size_t i = 0, j = 0;
    while (i < coding.size() || j < oracle.size()) {
        if (j == oracle.size() || (i < coding.size() && coding[i].first < oracle[j].first)) {
            note(coding[i++], "coding only");
        } else if (i == coding.size() || oracle[j].first < coding[i].first) {
            note(oracle[j++], "oracle only");
        } else {
            const double gap = std::abs(coding[i].second - oracle[j].second);
            out.max_length_gap = std::max(out.max_length_gap, gap);
            if (!(gap <= tolerance)) note(coding[i], "length mismatch");
            ++i;
            ++j;
        }
    }
    return out;
}

}  // namespace qft
