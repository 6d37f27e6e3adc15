#pragma once

// The pressure form as the Hessian of t -> J(rho_0, rho_t) along straight
// lines in the (x, y) trace chart, with z carried along by continuation.

#include <string>
#include <vector>

#include "qfthermo/surface_group.hpp"
#include "qfthermo/thermo.hpp"

namespace qft {

struct TangentVector {
    Complex dx{0.0}, dy{0.0};

    double norm() const;  // sqrt(|dx|^2 + |dy|^2)
    // Unit vector in the direction of (dx, dy); DomainError for zero.
    static TangentVector unit(Complex dx, Complex dy);
    TangentVector operator+(const TangentVector& o) const { return {dx + o.dx, dy + o.dy}; }
    TangentVector operator-(const TangentVector& o) const { return {dx - o.dx, dy - o.dy}; }
    TangentVector operator*(double s) const { return {dx * s, dy * s}; }
};

inline constexpr double kDefaultEps = 0.05;
// Roots of the z quadratic closer than this count as a collision.
inline constexpr double kBranchSeparation = 1e-6;

struct PathFamily {
    double eps = 0.0;                          // step in coordinate norm
    double step = 0.0;                         // parameter step eps / |v| (0 for v = 0)
    std::vector<TraceCoordinates> points;      // t = -2, -1, 0, 1, 2 steps
    std::vector<std::string> branch_log;       // "plus" / "minus" per point
};

// (x, y)(t) = base + t (dx, dy); z(t) follows the root nearest its value a
// small substep earlier, starting from base.z.
TraceCoordinates continue_point(const TraceCoordinates& base, const TangentVector& v, double t,
                                std::string* branch = nullptr);
// Image of v under the derivative of phi in the (x, y) chart, with dz read
// off the Markov equation.  DomainError where 2z - xy vanishes.
TangentVector push_forward(const TraceCoordinates& base, const TangentVector& v, Automorphism phi);

PathFamily path_family(const TraceCoordinates& base, const TangentVector& v, double eps = kDefaultEps);

struct PressureForm {
    double value = 0.0;
    double error_bar = 0.0;
    double eps = 0.0;                 // final eps after halvings
    int halvings = 0;
    double at_eps = 0.0;              // second difference with step eps
    double at_2eps = 0.0;             // and with 2 eps
    std::vector<double> j;            // J at t = -2, -1, 0, 1, 2 steps (final eps, depth N)
    std::vector<double> by_depth;     // Richardson value at depths N - 2 .. N
    double orbit_gap = 0.0;           // max |I_slope - I_orbit| / I_orbit at t = +-eps
};

struct MetricParams {
    double eps = kDefaultEps;
    int max_halvings = 3;
    double richardson_agreement = 0.2;  // relative disagreement that triggers halving
    // Disagreements smaller than this never trigger halving: near a
    // degenerate direction the relative test compares two values that are
    // both estimator noise, and a smaller eps only amplifies the noise.
    double richardson_floor = 0.01;
    int grid_size = 10;                 // Manhattan grid behind the slope estimate
    double spot_census_length = 5.0;    // orbit-average spot check at t = +-eps
    int spot_word_cap = 12;
};

// (J(-e) - 2 + J(e)) / e^2 refined by Richardson with the 2e pair, with the
// centre J(0) = 1 pinned.  The error bar adds the Richardson correction, the
// spread over ladder depths and the propagated slope error.
PressureForm pressure_form(const Thermo& thermo, const TraceCoordinates& base, const TangentVector& v,
                           const MetricParams& params = {});

struct PolarizedForm {
    double value = 0.0;
    double error_bar = 0.0;
};

// (Q(v + w) - Q(v - w)) / 4.
PolarizedForm pressure_form_polarized(const Thermo& thermo, const TraceCoordinates& base, const TangentVector& v,
                                      const TangentVector& w, const MetricParams& params = {});

struct ProbeRow {
    Word word;
    double derivative = 0.0;  // D_v (h l_word)
};

struct DegeneracyProbe {
    double max_abs = 0.0;
    std::vector<ProbeRow> rows;
};

// Central difference of t -> h(rho_t) l_word(rho_t) over +-eps per word.
DegeneracyProbe degeneracy_probe(const Thermo& thermo, const TraceCoordinates& base, const TangentVector& v,
                                 const std::vector<Word>& words, double eps = kDefaultEps);

struct PathLength {
    double value = 0.0;
    double error_bar = 0.0;
    std::vector<double> segments;  // sqrt(max(P, 0)) of each chord
};

// Riemann sum of sqrt(P(v_i, v_i)) dt over the chords of a discrete path,
// each chord evaluated at its midpoint.  Consecutive points must lie closer
// than max_gap in coordinate norm.
PathLength path_length(const Thermo& thermo, const std::vector<TraceCoordinates>& points, double max_gap,
                       const MetricParams& params = {});

}  // namespace qft
