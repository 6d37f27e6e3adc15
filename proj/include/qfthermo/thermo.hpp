#pragma once

// Gurevich pressure of potentials -t * sum_i a_i tau_i estimated from closed
// walks of the truncated coding, where the ergodic sum of tau_i over a
// periodic orbit is the translation length of the orbit's group element.

#include <array>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <utility>
#include <vector>

#include "qfthermo/coding.hpp"

namespace qft {

struct PotentialTerm {
    std::string label;
    double coefficient = 1.0;
};

struct PotentialSpec {
    std::vector<PotentialTerm> terms;
    double t = 1.0;
    // Added once per state along a walk; log Z_n moves by exactly n * step_shift.
    double step_shift = 0.0;

    double effective_scale() const;  // t * sum of coefficients
};

// -t * sum_i a_i * length_i over the cycle, plus n * step_shift.  Lengths are
// read from cycle.lengths; missing labels throw UnknownLabel.
double periodic_weight(const CycleClass& cycle, const PotentialSpec& spec);

struct LadderPoint {
    int n = 0;
    double value = 0.0;  // (1/n) log Z_n
};

struct PressureEstimate {
    std::vector<LadderPoint> ladder;
    double value = 0.0;
    double error_bar = 0.0;
    bool extrapolated = true;  // false when the Aitken denominator degenerated
    int s_max = 0;
    double tail_bound = 0.0;
};

struct RootEstimate {
    double value = 0.0;
    double error_bar = 0.0;
    double slope = 0.0;  // d pressure / d t at the root
    PressureEstimate pressure;  // at the reported root
};

// The 2 log r surrogate: every A2 clump with s > s_max has roof at least
// 2 log r(a) up to a constant, so the omitted mass is bounded by
// count * sum_{r >= s_max + 2} r^(-2 T).  Infinite for T <= 1/2.
double truncation_tail_bound(int s_max, double effective_scale, int states_per_power = 128);

struct Z1Probe {
    bool converging = false;
    double exponent = 0.0;        // fitted log-log slope of per-r increments
    double exponent_error = 0.0;  // regression standard error
    std::vector<std::pair<int, double>> partial_sums;  // (s_max, surrogate Z_1)
};

// Surrogate Z_1 = sum over states of r(a)^(-2 T) truncated at each s_max of
// the schedule.  The increment at r = s + 1 is regressed against r in log-log
// scale; the series is declared divergent iff the slope is >= -1.
Z1Probe z1_probe(double effective_scale, const std::vector<int>& s_max_schedule);

enum class AnchorMode { all_a1, single };

struct ThermoParams {
    int n_max = 6;
    int s_max = kDefaultSMax;
    int workers = 0;
    AnchorMode anchors = AnchorMode::all_a1;
    int anchor = 0;                        // used with AnchorMode::single
    double root_tolerance = 1e-3;          // bisection tolerance in t
    double oscillation_threshold = 0.5;    // NonConvergent above this error bar
    double bracket_low = 0.55;
    double bracket_high = 3.0;
};

// Translation lengths (one per representation, at most two) of the closed
// walks from an anchor set, binned by walk length n.  Bins carry the exact
// count and the summed in-bin offsets, so partition sums are correct to
// second order in the bin width.  Counts and offsets are integers, so the
// spectrum does not depend on how the walk search was split among workers.
class LengthSpectrum {
public:
    struct Cell {
        std::array<std::int32_t, 2> bin{};
        std::uint64_t count = 0;
        std::array<std::int64_t, 2> offset{};  // fixed point, kOffsetScale units
    };

    static constexpr double kOffsetScale = 68719476736.0;  // 2^36

    LengthSpectrum(const TruncatedAlphabet& alph, const TransitionGraph& graph, const std::vector<int>& anchors,
                   int n_max, const std::vector<const MarkedRepresentation*>& reps, int workers);

    int dimension() const { return dim_; }
    int n_max() const { return n_max_; }
    double bin_width() const { return width_; }
    std::uint64_t walk_count(int n) const;
    const std::vector<Cell>& cells(int n) const { return cells_[static_cast<std::size_t>(n)]; }

    // log sum over closed n-walks of exp(-sum_i weights[i] * length_i).
    double log_partition(int n, const std::array<double, 2>& weights) const;

private:
    int dim_;
    int n_max_;
    double width_;
    std::vector<std::vector<Cell>> cells_;
};

class Thermo {
public:
    explicit Thermo(ThermoParams params = {});

    const ThermoParams& params() const { return params_; }
    const TruncatedAlphabet& alphabet() const { return coding_->alph; }
    const TransitionGraph& graph() const { return coding_->graph; }
    const std::vector<int>& anchors() const { return coding_->anchors; }

    // A view with ladder depth n <= params().n_max that shares the registered
    // representations and spectra (a depth-n ladder reads the first n levels).
    Thermo at_depth(int n) const;
    // Same parameters and coding, no representations.
    Thermo fresh() const;

    // Registers (or replaces) a representation under rep.label().
    void add(const MarkedRepresentation& rep);
    bool has(const std::string& label) const;
    const MarkedRepresentation& rep(const std::string& label) const;

    // Spectrum over the anchor set for one or two labels; built on first use.
    std::shared_ptr<const LengthSpectrum> spectrum(const std::vector<std::string>& labels, int n_max) const;

    // Anchored sum over closed n-walks at a single anchor of exp(weight),
    // evaluated directly (no binning); returned as a logarithm.
    double log_partition_sum(int n, int anchor, const PotentialSpec& spec) const;

    PressureEstimate gurevich_pressure(const PotentialSpec& spec) const;
    PressureEstimate gurevich_pressure(const PotentialSpec& spec, int n_max) const;

    // Ladder estimate at params().n_max without the convergence checks; used
    // inside root searches where only the sign matters.
    PressureEstimate estimate(const PotentialSpec& spec) const;
    // Same for an explicit weight vector on the spectrum of labels (one or two
    // distinct labels); weights may be negative.
    PressureEstimate estimate_joint(const std::vector<std::string>& labels, const std::array<double, 2>& weights) const;

    RootEstimate entropy(const std::string& label) const;
    // Root in t of P(-t (a tau_rho + b tau_eta)) = 0.  The bracket is scaled
    // by 1/(a + b), as is the tolerance, so that it covers the same range of t (a + b).
    RootEstimate weighted_entropy(const std::string& rho, const std::string& eta, double a, double b) const;

    // Largest root search shared by entropy and weighted_entropy.
    RootEstimate root_in_t(const PotentialSpec& unit, double low, double high, double tolerance) const;

private:
    struct Coding {
        TruncatedAlphabet alph;
        TransitionGraph graph;
        std::vector<int> anchors;
    };
    struct State {
        std::mutex mutex;
        std::map<std::string, MarkedRepresentation> reps;
        // labels -> n_max -> spectrum
        std::map<std::vector<std::string>, std::map<int, std::shared_ptr<const LengthSpectrum>>> cache;
    };

    Thermo(ThermoParams params, std::shared_ptr<const Coding> coding, std::shared_ptr<State> state)
        : params_(params), coding_(std::move(coding)), state_(std::move(state)) {}

    ThermoParams params_;
    std::shared_ptr<const Coding> coding_;
    std::shared_ptr<State> state_;
};

// Aitken delta-squared on the last three ladder values with the fallback
// and error-bar rules of PressureEstimate.
void extrapolate(PressureEstimate& est);

}  // namespace qft
