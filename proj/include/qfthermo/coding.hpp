#pragma once

// Countable-alphabet Markov coding of the once-punctured torus group, truncated
// at a maximal parabolic power.  States either read a window of 2N+1 letters
// away from the cusp (kind A1) or swallow a whole excursion b w^s w_1..w_{k-1} c
// around a parabolic word w (kind A2).

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "qfthermo/error.hpp"
#include "qfthermo/surface_group.hpp"

namespace qft {

struct ParabolicData {
    std::vector<Word> minimal_parabolics;  // C
    int two_n = 4;                         // 2N
    std::vector<Word> c_star;              // powers of elements of C of length 2N

    // Index into c_star of the window starting at letters[pos], or -1.
    int c_star_index(const Word& letters, std::size_t pos) const;
};

ParabolicData build_parabolic_data();

// Parabolic words for a four-times punctured sphere on generators
// alpha, beta, gamma, written with 'c'/'C' for gamma.  Not wired into the
// coding, which only knows the two-generator alphabet.
extern const std::array<const char*, 12> kFourPuncturedSphereParabolics;

enum class StateKind : std::uint8_t { a1, a2 };

struct CodingState {
    StateKind kind = StateKind::a1;
    Word underlying;       // u(a) = b_0 ... b_m
    int displacement = 1;  // d(a)
    int r_value = 1;       // r(a)
    Word g_word;           // letters b_1 .. b_d of u(a)
    // A2 only: u = entry . w^s . w_1..w_{k-1} . exit with w = c_star[w_index].
    int w_index = -1;
    int s = 0;
    int k = 0;
    Letter entry = Letter::a;
    Letter exit = Letter::a;

    std::string name() const;
};

inline constexpr int kDefaultSMax = 30;

class TruncatedAlphabet {
public:
    TruncatedAlphabet(ParabolicData pd, int s_max);

    const ParabolicData& parabolic_data() const { return pd_; }
    int s_max() const { return s_max_; }
    const std::vector<CodingState>& states() const { return states_; }
    const CodingState& state(int i) const { return states_[static_cast<std::size_t>(i)]; }
    int size() const { return static_cast<int>(states_.size()); }
    int a1_count() const { return a1_count_; }

    // Number of states with r(a) = n.
    int count_with_r(int n) const;

    std::optional<int> find_a1(const Word& window) const;
    std::optional<int> find_a2(int w_index, int s, int k, Letter entry, Letter exit) const;

private:
    ParabolicData pd_;
    int s_max_;
    int a1_count_ = 0;
    std::vector<CodingState> states_;
    std::map<Word, int> a1_index_;
    std::map<std::array<int, 5>, int> a2_index_;
};

TruncatedAlphabet build_alphabet(const ParabolicData& pd, int s_max);

struct TransitionGraph {
    std::vector<std::vector<int>> successors;
    std::vector<std::vector<int>> predecessors;
    bool strongly_connected = false;
    int period = 0;  // gcd of cycle lengths; 1 means aperiodic

    int size() const { return static_cast<int>(successors.size()); }
    bool has_edge(int from, int to) const;
    std::size_t edge_count() const;
};

// a -> a' iff u(a) read from position d(a) agrees with the start of u(a'),
// excluding A2 -> A2.
TransitionGraph transitions(const TruncatedAlphabet& alph);

struct ParseResult {
    std::vector<int> states;
    std::size_t consumed = 0;  // sum of displacements of emitted states
};

// Deterministic parse of a freely reduced letter sequence b_0 b_1 ...; emits
// states while the sequence determines them.  Throws Unparseable when b_0
// starts inside a parabolic window or when a clump needs s > s_max.
ParseResult parse_boundary_word(const TruncatedAlphabet& alph, const Word& letters);

struct CycleClass {
    std::vector<int> states;  // rotation-minimal (anchored walks keep x_1 = anchor)
    Word word;                // concatenated g-words, a cyclically reduced word
    std::map<std::string, double> lengths;

    int word_length() const { return static_cast<int>(word.size()); }
};

inline constexpr int kDefaultCycleCap = 10;

// Cycles through n states.  Without an anchor: one rotation-minimal
// representative per rotation class.  With an anchor: every closed walk with
// x_1 = anchor (the periodic points of period n in the cylinder of the anchor).
std::vector<CycleClass> enumerate_cycles(const TruncatedAlphabet& alph, const TransitionGraph& graph, int n,
                                         std::optional<int> anchor = std::nullopt, int cap = kDefaultCycleCap,
                                         int workers = 1);

// Rotation classes of cycles whose word length sum d(x_i) is at most max_word_length.
std::vector<CycleClass> enumerate_cycles_by_word_length(const TruncatedAlphabet& alph, const TransitionGraph& graph,
                                                        int max_word_length);

MoebiusMap cycle_group_element(const MarkedRepresentation& rep, const TruncatedAlphabet& alph,
                               const std::vector<int>& states);
// Product matrix of the cycle; records its translation length under rep.label().
MoebiusMap cycle_group_element(const MarkedRepresentation& rep, const TruncatedAlphabet& alph, CycleClass& cycle);

// G(x) under rep for every state x, indexed by state.
std::vector<MoebiusMap> state_images(const MarkedRepresentation& rep, const TruncatedAlphabet& alph);

inline constexpr int kMaxJointReps = 4;

// Closed walks anchor = x_1 -> x_2 -> ... -> x_n -> x_1 with n <= n_max,
// visited depth-first in successor order.  Products of state images are kept
// per depth, so a walk costs one matrix product per representation.
class ClosedWalkSearch {
public:
    ClosedWalkSearch(const TransitionGraph& graph, int anchor, int n_max);

    int anchor() const { return anchor_; }
    int n_max() const { return n_max_; }

    // images[r] = state_images of representation r (at most kMaxJointReps).
    // visit(n, lengths) gets the translation length of the walk under each r.
    template <class Visit>
    void run(const std::vector<const std::vector<MoebiusMap>*>& images, Visit&& visit) const;

    // Number of closed walks with exactly n states, for n = 0..n_max.
    std::vector<std::uint64_t> counts() const;

private:
    using Stack = std::array<MoebiusMap, kMaxJointReps>;

    template <class Visit>
    void descend(const std::vector<const std::vector<MoebiusMap>*>& images, std::vector<Stack>& prod, int u, int depth,
                 Visit& visit) const;

    const TransitionGraph* graph_;
    int anchor_;
    int n_max_;
    std::vector<int> need_;             // fewest further states before the walk can close
    std::vector<std::uint8_t> closes_;  // state -> anchor is an edge
};

double length_from_trace(Complex tr);

template <class Visit>
void ClosedWalkSearch::run(const std::vector<const std::vector<MoebiusMap>*>& images, Visit&& visit) const {
    const std::size_t k = images.size();
    if (k == 0 || k > static_cast<std::size_t>(kMaxJointReps)) fail(ErrorCode::domain, "joint walk search takes 1.." + std::to_string(kMaxJointReps) + " representations");
    std::vector<Stack> prod(static_cast<std::size_t>(n_max_) + 1);
    for (std::size_t r = 0; r < k; ++r) prod[1][r] = (*images[r])[static_cast<std::size_t>(anchor_)];
    if (closes_[static_cast<std::size_t>(anchor_)]) {
        std::array<double, kMaxJointReps> len{};
        for (std::size_t r = 0; r < k; ++r) len[r] = length_from_trace(trace(prod[1][r]));
        visit(1, len.data());
    }
    if (n_max_ >= 2) descend(images, prod, anchor_, 1, visit);
}

template <class Visit>
void ClosedWalkSearch::descend(const std::vector<const std::vector<MoebiusMap>*>& images, std::vector<Stack>& prod,
                               int u, int depth, Visit& visit) const {
    const std::size_t k = images.size();
    const int next = depth + 1;
    const Stack& here = prod[static_cast<std::size_t>(depth)];
    std::array<double, kMaxJointReps> len{};
    for (int v : graph_->successors[static_cast<std::size_t>(u)]) {
        const auto vi = static_cast<std::size_t>(v);
        if (next + need_[vi] > n_max_ + 1) continue;
        if (next == n_max_) {
            // Leaf: only the trace of the product is needed.
            for (std::size_t r = 0; r < k; ++r) {
                const MoebiusMap& m = (*images[r])[vi];
                len[r] = length_from_trace(here[r].a() * m.a() + here[r].b() * m.c() + here[r].c() * m.b() +
                                           here[r].d() * m.d());
            }
            visit(next, len.data());
            continue;
        }
        Stack& out = prod[static_cast<std::size_t>(next)];
        for (std::size_t r = 0; r < k; ++r) out[r] = MoebiusMap::multiply_raw(here[r], (*images[r])[vi]);
        if (closes_[vi]) {
            for (std::size_t r = 0; r < k; ++r) len[r] = length_from_trace(trace(out[r]));
            visit(next, len.data());
        }
        descend(images, prod, v, next, visit);
    }
}

// Lexicographically least A1 state index.
int default_anchor(const TruncatedAlphabet& alph);

}  // namespace qft
