#pragma once

// Brute-force ground truth over the free group: orbit-point counts for the
// Poincare series and the conjugacy-class census by translation length.

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "qfthermo/coding.hpp"
#include "qfthermo/surface_group.hpp"

namespace qft {

inline constexpr int kBallWordCap = 16;
inline constexpr int kCensusWordCap = 14;

struct BallCount {
    std::uint64_t count = 0;
    bool boundary_warning = false;  // some word of length word_cap lies in the ball
};

// N(R) = #{reduced words g, |g| <= word_cap : d(b0, rho(g) b0) <= R} with b0 = (0, 1).
BallCount ball_count(const MarkedRepresentation& rep, double radius, int word_cap, int workers = 1);

// N(R) for every radius of an increasing grid in one enumeration.
std::vector<BallCount> ball_counts(const MarkedRepresentation& rep, const std::vector<double>& radii, int word_cap,
                                   int workers = 1);

struct SlopeFit {
    double slope = 0.0;
    double error = 0.0;  // standard error of the slope
    double max_relative_residual = 0.0;
    bool boundary_warning = false;
};

// Least-squares slope of log N(R) against R over the grid.
SlopeFit poincare_entropy(const MarkedRepresentation& rep, const std::vector<double>& radii,
                          int word_cap = kBallWordCap, int workers = 1);

// R = 6, 6.5, ..., 12: complete enough at word cap 16 for quasifuchsian
// points near (3, 3, 3) while clear of the small-R lattice effects.
std::vector<double> default_entropy_grid();

struct CensusEntry {
    ConjugacyClass cls;
    std::map<std::string, double> lengths;  // by representation label
    bool parabolic = false;
};

struct Census {
    std::vector<CensusEntry> entries;  // sorted by class
    bool completeness_warning = false;
    std::string primary;               // label that defines R_T
    double max_length = 0.0;           // T
    int word_cap = 0;
};

// Every necklace of length 1..word_cap with its translation lengths.
std::vector<CensusEntry> class_table(const std::vector<const MarkedRepresentation*>& reps, int word_cap,
                                     int workers = 1);

// R_T(reps[0]) = classes with 0 < length <= T among necklaces of length
// <= word_cap; the other representations' lengths are recorded alongside.
Census conjugacy_census(const std::vector<const MarkedRepresentation*>& reps, double max_length,
                        int word_cap = kCensusWordCap, int workers = 1);

// class;wordlen;length@label... with one row per entry.
std::string census_csv(const Census& census, const std::vector<std::string>& labels);

struct BijectionReport {
    std::size_t coding_classes = 0;
    std::size_t oracle_classes = 0;    // non-parabolic
    std::size_t mismatches = 0;
    double max_length_gap = 0.0;       // over classes found on both sides
    std::vector<std::string> examples; // first few mismatched classes
};

// Rotation classes of coding cycles with word length <= max_word_length
// against the non-parabolic necklaces of the same lengths, as multisets of
// (class, length).  Coding lengths come from coding_rep, oracle lengths from
// oracle_rep (the same representation unless a fault is being injected).
BijectionReport census_bijection(const MarkedRepresentation& coding_rep, const MarkedRepresentation& oracle_rep,
                                 const TruncatedAlphabet& alph, const TransitionGraph& graph, int max_word_length,
                                 double tolerance, int workers = 1);

}  // namespace qft
