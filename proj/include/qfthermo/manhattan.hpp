#pragma once

// Manhattan curves {(a, b) : P(-a tau_rho - b tau_eta) = 0}, pressure
// intersection by the tangent slope and by orbit averages, and the
// intersection / dual-entropy rigidity checks.

#include <string>
#include <vector>

#include "qfthermo/oracle.hpp"
#include "qfthermo/thermo.hpp"

namespace qft {

struct ManhattanSample {
    double a = 0.0;
    double b = 0.0;
    double residual = 0.0;   // |P(-a tau_rho - b tau_eta)| at the solution
    double error_bar = 0.0;  // pressure error bar / |dP/db|
    bool ok = true;
    std::string error;       // set when the sample failed
};

struct ManhattanCurve {
    std::string rho, eta;
    std::vector<ManhattanSample> samples;  // a = i h(rho) / grid_size, i = 0..grid_size
    RootEstimate h_rho, h_eta;             // endpoint records (h(rho), 0) and (0, h(eta))
    int grid_size = 0;
    double tolerance = 0.0;

    // Every interior sample on or below the chord of its neighbours + tol.
    bool convex(double tol = 1e-3) const;
    bool decreasing() const;
};

inline constexpr double kCurveTolerance = 1e-9;

ManhattanCurve trace_curve(const Thermo& thermo, const std::string& rho, const std::string& eta, int grid_size,
                           double tolerance = kCurveTolerance, int workers = 1);

struct SlopeEstimate {
    double value = 0.0;
    double error_bar = 0.0;  // truncation estimate plus propagated solver tolerance
    double half_step = 0.0;  // endpoint_slope only: the estimate with step / 2
};

// I(rho, eta) from the tangent at (h(rho), 0).  Implicit differentiation of
// P(-a tau_rho - b tau_eta) = 0 gives db/da = -1/I there, so I = -da/db,
// the reciprocal of the negated one-sided three-point difference of b.
SlopeEstimate intersection_slope(const ManhattanCurve& curve);
SlopeEstimate intersection_slope(const Thermo& thermo, const std::string& rho, const std::string& eta, int grid_size,
                                 int workers = 1);

// The same estimate from the samples nearest (h(rho), 0) only, repeated
// with half the step; the error bar is the change under halving.
SlopeEstimate endpoint_slope(const Thermo& thermo, const std::string& rho, const std::string& eta, int grid_size,
                             double tolerance = kCurveTolerance);

struct OrbitAverage {
    double value = 0.0;
    std::size_t classes = 0;
    bool completeness_warning = false;
};

// Mean of length(eta) / length(rho) over R_T(rho) as collected in the census.
OrbitAverage intersection_orbit_average(const Census& census, const std::string& rho, const std::string& eta);
OrbitAverage intersection_orbit_average(const MarkedRepresentation& rho, const MarkedRepresentation& eta,
                                        double max_length, int word_cap = kCensusWordCap, int workers = 1);

// J = (h(eta) / h(rho)) I.
double renormalized_intersection(double h_rho, double h_eta, double intersection);

// Entropy by bisection to `tolerance` rather than params().root_tolerance.
RootEstimate precise_entropy(const Thermo& thermo, const std::string& label, double tolerance = kCurveTolerance);

// A quantity compared at matched parameters.  Truncation errors of the
// ladder are shared by both sides of such a comparison, so the error bar is
// the larger of the last two changes of the quantity itself as the ladder
// depth goes N - 2 -> N - 1 -> N.  Depths start at 4, so at N = 4 the
// error bar is infinite.
struct MatchedValue {
    double value = 0.0;
    double error_bar = 0.0;
    std::vector<double> by_depth;  // depths N - 2, N - 1, N
};

// J(rho, eta) from endpoint_slope and precise entropies at each depth.
// With `slopes`, the matched I(rho, eta) comes back alongside.
MatchedValue matched_intersection(const Thermo& thermo, const std::string& rho, const std::string& eta,
                                  int grid_size, MatchedValue* slopes = nullptr);

// h(eta) - h(rho) with both entropies from the same spectra at each depth.
MatchedValue matched_entropy_gap(const Thermo& thermo, const std::string& rho, const std::string& eta);

struct IntersectionReport {
    double i_slope = 0.0, i_slope_error = 0.0;  // error adds the spread over ladder depths
    double i_orbit = 0.0;
    std::size_t orbit_classes = 0;
    double j = 0.0, j_error = 0.0;      // tangent-slope estimate, matched error bar
    double j_reverse = 0.0, j_reverse_error = 0.0;
    double j_orbit = 0.0;               // (h(eta) / h(rho)) I_orbit
    double estimator_gap = 0.0;         // |I_slope - I_orbit| / I_orbit
    std::string verdict;                // "equality", "strict" or "violated"
    bool completeness_warning = false;
};

IntersectionReport intersection_report(const Thermo& thermo, const std::string& rho, const std::string& eta,
                                       int grid_size, double census_length, int word_cap = kCensusWordCap,
                                       int workers = 1);

struct DualRigidityReport {
    double lhs = 0.0, lhs_error = 0.0;  // weighted entropy
    double rhs = 0.0, rhs_error = 0.0;  // h(rho) h(eta) / (b h(rho) + a h(eta))
    double slack = 0.0;                 // rhs - lhs
    double tolerance = 0.0;             // matched error bar of the slack
    std::string verdict;                // "equality", "strict" or "violated"
};

// Both sides from roots to kCurveTolerance; the slack error bar follows
// MatchedValue while lhs_error and rhs_error are the independent bars.
DualRigidityReport dual_rigidity_check(const Thermo& thermo, const std::string& rho, const std::string& eta, double a,
                                       double b);

// Comparisons closer than this to equality are reported as equality.
inline constexpr double kRigidityFloor = 1e-6;

}  // namespace qft
