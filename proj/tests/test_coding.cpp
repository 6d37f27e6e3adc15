#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include "doctest.h"
#include "qfthermo/coding.hpp"
#include "qfthermo/error.hpp"
#include "qfthermo/oracle.hpp"

using namespace qft;

namespace {

const ParabolicData kPd = build_parabolic_data();

bool window_in_c_star(const Word& w, std::size_t pos) {
    for (const Word& c : kPd.c_star) {
        if (pos + c.size() <= w.size() && std::equal(c.begin(), c.end(), w.begin() + static_cast<std::ptrdiff_t>(pos))) {
            return true;
        }
    }
    return false;
}

// Counts reduced length-5 strings with no commutator window, by nested loops.
int brute_force_a1_count() {
    int n = 0;
    Word w(5);
    for (int code = 0; code < 1024; ++code) {
        for (int i = 0, c = code; i < 5; ++i, c /= 4) w[static_cast<std::size_t>(i)] = kLetters[static_cast<std::size_t>(c % 4)];
        if (!is_reduced(w)) continue;
        if (window_in_c_star(w, 0) || window_in_c_star(w, 1)) continue;
        ++n;
    }
    return n;
}

// Closed n-walks from `anchor` by propagating a count vector along edges.
std::uint64_t dp_closed_walks(const TransitionGraph& g, int anchor, int n) {
    std::vector<std::uint64_t> v(static_cast<std::size_t>(g.size()), 0);
    v[static_cast<std::size_t>(anchor)] = 1;
    for (int step = 0; step < n; ++step) {
        std::vector<std::uint64_t> next(v.size(), 0);
        for (int u = 0; u < g.size(); ++u) {
            if (v[static_cast<std::size_t>(u)] == 0) continue;
            for (int w : g.successors[static_cast<std::size_t>(u)]) next[static_cast<std::size_t>(w)] += v[static_cast<std::size_t>(u)];
        }
        v.swap(next);
    }
    return v[static_cast<std::size_t>(anchor)];
}

// Reduced letter strings with commutator clumps spliced in.
Word random_admissible(std::mt19937_64& rng, int length, int max_power) {
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    std::uniform_int_distribution<int> letter(0, 3), which(0, 7), power(1, max_power), part(0, 3);
    Word w;
    while (static_cast<int>(w.size()) < length) {
        if (w.size() > 2 && coin(rng) < 0.2) {
            const Word& c = kPd.c_star[static_cast<std::size_t>(which(rng))];
            if (c[0] == inverse(w.back())) continue;
            const int s = power(rng);
            for (int j = 0; j < s; ++j) w.insert(w.end(), c.begin(), c.end());
            w.insert(w.end(), c.begin(), c.begin() + part(rng));
            continue;
        }
        const Letter x = kLetters[static_cast<std::size_t>(letter(rng))];
        if (!w.empty() && x == inverse(w.back())) continue;
        w.push_back(x);
    }
    return w;
}

}  // namespace

TEST_SUITE("coding") {

TEST_CASE("parabolic data") {
    CHECK(kPd.minimal_parabolics.size() == 8);
    CHECK(kPd.two_n == 4);
    for (const Word& c : kPd.minimal_parabolics) {
        CHECK(c.size() == 4);
        CHECK(is_cyclically_reduced(c));
        CHECK(is_peripheral(c));
        CHECK(kPd.two_n % static_cast<int>(c.size()) == 0);
    }
    CHECK(kPd.c_star == kPd.minimal_parabolics);
    // The eight cyclic rotations of the commutator and of its inverse.
    std::set<Word> rotations;
    for (const Word base : {parse_word("abAB"), parse_word("baBA")}) {
        Word r = base;
        for (int i = 0; i < 4; ++i) {
            rotations.insert(r);
            std::rotate(r.begin(), r.begin() + 1, r.end());
        }
    }
    CHECK(std::set<Word>(kPd.c_star.begin(), kPd.c_star.end()) == rotations);
}

TEST_CASE("alphabet counts") {
    const TruncatedAlphabet alph = build_alphabet(kPd, 5);
    CHECK(alph.a1_count() == brute_force_a1_count());
    CHECK(alph.count_with_r(1) == alph.a1_count());
    const int per_power = alph.count_with_r(2);
    CHECK(per_power > 0);
    CHECK(per_power <= 8 * 16 * 4);
    for (int n = 2; n <= 6; ++n) CHECK(alph.count_with_r(n) == per_power);
    CHECK(alph.count_with_r(7) == 0);
    CHECK(alph.size() == alph.a1_count() + 5 * per_power);
    CHECK_THROWS_AS(build_alphabet(kPd, 0), Error);
}

TEST_CASE("state invariants") {
    const TruncatedAlphabet alph = build_alphabet(kPd, 3);
    for (const CodingState& st : alph.states()) {
        CAPTURE(st.name());
        CHECK(is_reduced(st.underlying));
        CHECK(st.g_word == Word(st.underlying.begin() + 1, st.underlying.begin() + 1 + st.displacement));
        if (st.kind == StateKind::a1) {
            CHECK(st.underlying.size() == 5);
            CHECK_FALSE(window_in_c_star(st.underlying, 0));
            CHECK_FALSE(window_in_c_star(st.underlying, 1));
            CHECK(st.displacement == 1);
            CHECK(st.r_value == 1);
        } else {
            const Word& w = kPd.c_star[static_cast<std::size_t>(st.w_index)];
            Word expect{st.entry};
            for (int j = 0; j < st.s; ++j) expect.insert(expect.end(), w.begin(), w.end());
            expect.insert(expect.end(), w.begin(), w.begin() + (st.k - 1));
            expect.push_back(st.exit);
            CHECK(st.underlying == expect);
            CHECK(st.entry != w[3]);
            CHECK(st.exit != w[static_cast<std::size_t>(st.k - 1)]);
            CHECK(st.displacement == 4 * (st.s - 1) + st.k + 1);
            CHECK(st.r_value == st.s + 1);
            // G(a) = w^(s-1) w_1 .. w_(k+1), indices past 2N wrapping into the next copy of w.
            Word g;
            for (int j = 0; j < st.s - 1; ++j) g.insert(g.end(), w.begin(), w.end());
            for (int j = 0; j < st.k + 1; ++j) g.push_back(w[static_cast<std::size_t>(j % 4)]);
            CHECK(st.g_word == g);
        }
    }
}

TEST_CASE("transition graph structure") {
    for (int s_max = 1; s_max <= 10; ++s_max) {
        const TruncatedAlphabet alph = build_alphabet(kPd, s_max);
        const TransitionGraph g = transitions(alph);
        CAPTURE(s_max);
        CHECK(g.strongly_connected);
        CHECK(g.period == 1);
        for (int i = 0; i < g.size(); ++i) {
            if (alph.state(i).kind != StateKind::a2) continue;
            for (int j : g.successors[static_cast<std::size_t>(i)]) CHECK(alph.state(j).kind == StateKind::a1);
        }
    }
}

TEST_CASE("every edge is what the parser emits on the merged string") {
    const TruncatedAlphabet alph = build_alphabet(kPd, 2);
    const TransitionGraph g = transitions(alph);
    std::size_t edges = 0;
    for (int i = 0; i < g.size(); ++i) {
        const CodingState& a = alph.state(i);
        for (int j : g.successors[static_cast<std::size_t>(i)]) {
            const CodingState& b = alph.state(j);
            Word merged(a.underlying.begin(), a.underlying.begin() + a.displacement);
            merged.insert(merged.end(), b.underlying.begin(), b.underlying.end());
            REQUIRE(std::equal(b.underlying.begin(), b.underlying.begin() + 4, a.underlying.begin() + a.displacement));
            const ParseResult p = parse_boundary_word(alph, merged);
            REQUIRE(p.states.size() >= 2);
            CHECK(p.states[0] == i);
            CHECK(p.states[1] == j);
            ++edges;
        }
    }
    CHECK(edges == g.edge_count());
}

TEST_CASE("parser roundtrip on random strings") {
    const TruncatedAlphabet alph = build_alphabet(kPd, 4);
    const TransitionGraph g = transitions(alph);
    const MarkedRepresentation rep = from_traces({Complex(3.0, 0.3), 3.0, solve_z(Complex(3.0, 0.3), 3.0, Branch::minus)});
    std::mt19937_64 rng(21);
    int parsed = 0;
    for (int trial = 0; trial < 10000; ++trial) {
        const Word letters = random_admissible(rng, 40, 3);
        ParseResult p;
        try {
            p = parse_boundary_word(alph, letters);
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::unparseable);
            continue;
        }
        ++parsed;
        REQUIRE_FALSE(p.states.empty());
        for (std::size_t i = 0; i + 1 < p.states.size(); ++i) CHECK(g.has_edge(p.states[i], p.states[i + 1]));
        // Concatenation: the g-words spell letters 1..consumed.
        Word spelled;
        for (int s : p.states) spelled = concat(spelled, alph.state(s).g_word);
        CHECK(spelled == Word(letters.begin() + 1, letters.begin() + 1 + static_cast<std::ptrdiff_t>(p.consumed)));
        if (trial % 50 == 0) {
            MoebiusMap prod;
            for (int s : p.states) prod = prod * evaluate(rep, alph.state(s).g_word);
            CHECK(distance_mod_sign(prod, evaluate(rep, spelled)) <= 1e-6 * (1.0 + std::abs(prod.a()) + std::abs(prod.b())));
        }
        // Parsing is deterministic and shift-compatible.
        CHECK(parse_boundary_word(alph, letters).states == p.states);
        const int d = alph.state(p.states[0]).displacement;
        const ParseResult tail = parse_boundary_word(alph, Word(letters.begin() + d, letters.end()));
        CHECK(tail.states == std::vector<int>(p.states.begin() + 1, p.states.end()));
    }
    CHECK(parsed > 5000);
}

TEST_CASE("parser rejects clumps beyond the cap") {
    const TruncatedAlphabet alph = build_alphabet(kPd, 1);
    const Word letters = concat(parse_word("b"), concat(power(parse_word("abAB"), 3), parse_word("AAAAAA")));
    try {
        parse_boundary_word(alph, letters);
        FAIL("expected Unparseable");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::unparseable);
        CHECK(std::string(e.what()).find("s = 3") != std::string::npos);
    }
    CHECK_THROWS_AS(parse_boundary_word(alph, parse_word("abABaa")), Error);  // starts inside a window
}

TEST_CASE("A2 state from a clump") {
    const TruncatedAlphabet alph = build_alphabet(kPd, 3);
    // b . (abAB)^2 . a . a ...: s = 2, k = 2.
    const Word letters = concat(parse_word("b"), concat(power(parse_word("abAB"), 2), parse_word("aaaaaa")));
    const ParseResult p = parse_boundary_word(alph, letters);
    REQUIRE_FALSE(p.states.empty());
    const CodingState& st = alph.state(p.states[0]);
    CHECK(st.kind == StateKind::a2);
    CHECK(st.s == 2);
    CHECK(st.k == 2);
    CHECK(st.displacement == 4 + 3);
    const ParseResult a1 = parse_boundary_word(alph, parse_word("aabaabb"));
    REQUIRE_FALSE(a1.states.empty());
    CHECK(alph.state(a1.states[0]).underlying == parse_word("aabaa"));
}

TEST_CASE("enumerate_cycles") {
    const TruncatedAlphabet alph = build_alphabet(kPd, 3);
    const TransitionGraph g = transitions(alph);
    const auto ones = enumerate_cycles(alph, g, 1);
    CHECK(ones.size() == 4);
    for (const auto& c : ones) {
        CHECK(alph.state(c.states[0]).kind == StateKind::a1);
        CHECK(g.has_edge(c.states[0], c.states[0]));
        CHECK(alph.state(c.states[0]).underlying == power(c.word, 5));
    }
    for (int n = 2; n <= 4; ++n) {
        for (const auto& c : enumerate_cycles(alph, g, n)) {
            for (std::size_t i = 0; i < c.states.size(); ++i) CHECK(g.has_edge(c.states[i], c.states[(i + 1) % c.states.size()]));
            CHECK(is_cyclically_reduced(c.word));
        }
    }
    CHECK_THROWS_AS(enumerate_cycles(alph, g, kDefaultCycleCap + 1), Error);
}

TEST_CASE("anchored walk counts") {
    const TruncatedAlphabet alph = build_alphabet(kPd, 2);
    const TransitionGraph g = transitions(alph);
    const int anchor = default_anchor(alph);
    CHECK(alph.state(anchor).kind == StateKind::a1);
    for (int i = 0; i < alph.a1_count(); ++i) CHECK(alph.state(anchor).underlying <= alph.state(i).underlying);
    const ClosedWalkSearch search(g, anchor, 5);
    const auto counts = search.counts();
    for (int n = 1; n <= 5; ++n) {
        CHECK(counts[static_cast<std::size_t>(n)] == dp_closed_walks(g, anchor, n));
        CHECK(enumerate_cycles(alph, g, n, anchor).size() == dp_closed_walks(g, anchor, n));
    }
    // Worker count does not change the rotation classes.
    const auto serial = enumerate_cycles(alph, g, 4, std::nullopt, kDefaultCycleCap, 1);
    const auto threaded = enumerate_cycles(alph, g, 4, std::nullopt, kDefaultCycleCap, 3);
    REQUIRE(serial.size() == threaded.size());
    for (std::size_t i = 0; i < serial.size(); ++i) CHECK(serial[i].states == threaded[i].states);
}

TEST_CASE("cycle group elements") {
    const TruncatedAlphabet alph = build_alphabet(kPd, 3);
    const TransitionGraph g = transitions(alph);
    const MarkedRepresentation f = from_traces({3.0, 3.0, 3.0}, "F");
    const Complex x(3.0, 0.3);
    const MarkedRepresentation q = from_traces({x, 3.0, solve_z(x, 3.0, Branch::minus)}, "Q");

    auto ones = enumerate_cycles(alph, g, 1);
    for (auto& c : ones) {
        if (c.word != parse_word("a")) continue;
        CHECK(distance_mod_sign(cycle_group_element(f, alph, c), f.gen_a()) <= 1e-12);
        CHECK(c.lengths.at("F") == doctest::Approx(1.92485).epsilon(1e-5));
    }
    for (auto& c : enumerate_cycles(alph, g, 4)) {
        for (const MarkedRepresentation* rep : {&f, &q}) {
            const MoebiusMap m = cycle_group_element(*rep, alph, c);
            CHECK(classify(m) == IsometryType::loxodromic);
            std::vector<int> rot = c.states;
            std::rotate(rot.begin(), rot.begin() + 1, rot.end());
            const Complex t0 = trace(m), t1 = trace(cycle_group_element(*rep, alph, rot));
            CHECK(std::abs(t0 * t0 - t1 * t1) <= 1e-9 * (1.0 + std::norm(t0)));
            CHECK(c.lengths.at(rep->label()) == doctest::Approx(word_translation_length(*rep, c.word)).epsilon(1e-9));
        }
    }
}

TEST_CASE("truncation monotonicity") {
    std::set<Word> small, large;
    for (int s_max : {1, 2}) {
        const TruncatedAlphabet alph = build_alphabet(kPd, s_max);
        const TransitionGraph g = transitions(alph);
        for (int n = 1; n <= 3; ++n) {
            for (const auto& c : enumerate_cycles(alph, g, n)) (s_max == 1 ? small : large).insert(c.word);
        }
    }
    CHECK(std::includes(large.begin(), large.end(), small.begin(), small.end()));
    CHECK(large.size() > small.size());
}

TEST_CASE("cycles match the census at small word length") {
    const TruncatedAlphabet alph = build_alphabet(kPd, 3);
    const TransitionGraph g = transitions(alph);
    const Complex x(3.0, 0.3);
    const MarkedRepresentation q = from_traces({x, 3.0, solve_z(x, 3.0, Branch::minus)}, "Q");
    const BijectionReport r = census_bijection(q, q, alph, g, 6, 1e-9);
    CHECK(r.mismatches == 0);
    CHECK(r.coding_classes == r.oracle_classes);
    CHECK(r.max_length_gap <= 1e-9);

    // Independent count: necklaces up to length 6 minus the peripheral ones.
    std::size_t expect = 0;
    for (const auto& c : conjugacy_classes_up_to(6)) expect += !is_peripheral(c.representative);
    CHECK(r.oracle_classes == expect);
}

}  // TEST_SUITE
