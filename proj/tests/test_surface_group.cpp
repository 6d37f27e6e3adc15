#include <cctype>
#include <cmath>
#include <random>
#include <set>
#include <string>

#include "doctest.h"
#include "qfthermo/error.hpp"
#include "qfthermo/surface_group.hpp"

using namespace qft;

namespace {

const Complex kBentX(3.0, 0.3);

TraceCoordinates bent() { return {kBentX, 3.0, solve_z(kBentX, 3.0, Branch::minus)}; }

Word random_reduced(std::mt19937_64& rng, int length) {
    std::uniform_int_distribution<int> pick(0, 3);
    Word w;
    while (static_cast<int>(w.size()) < length) {
        const Letter x = kLetters[static_cast<std::size_t>(pick(rng))];
        if (!w.empty() && w.back() == inverse(x)) continue;
        w.push_back(x);
    }
    return w;
}

// Independent necklace counter: all cyclically reduced strings, keyed by least rotation.
std::size_t brute_force_necklaces(int length) {
    std::set<std::string> seen;
    const std::string letters = "aAbB";
    const auto inv = [](char c) { return static_cast<char>(std::islower(c) ? std::toupper(c) : std::tolower(c)); };
    std::string s(static_cast<std::size_t>(length), 'a');
    const auto total = static_cast<long>(std::pow(4, length));
    for (long code = 0; code < total; ++code) {
        long c = code;
        for (int i = 0; i < length; ++i, c /= 4) s[static_cast<std::size_t>(i)] = letters[static_cast<std::size_t>(c % 4)];
        bool ok = true;
        for (int i = 0; i < length && ok; ++i) {
            ok = s[static_cast<std::size_t>(i)] != inv(s[static_cast<std::size_t>((i + 1) % length)]);
        }
        if (length == 1) ok = true;
        if (!ok) continue;
        std::string best = s;
        for (int r = 1; r < length; ++r) best = std::min(best, s.substr(static_cast<std::size_t>(r)) + s.substr(0, static_cast<std::size_t>(r)));
        seen.insert(best);
    }
    return seen.size();
}

}  // namespace

TEST_SUITE("surface_group") {

TEST_CASE("solve_z branch convention") {
    CHECK(std::abs(solve_z(3.0, 3.0, Branch::plus) - 6.0) <= 1e-12);
    CHECK(std::abs(solve_z(3.0, 3.0, Branch::minus) - 3.0) <= 1e-12);
    const auto roots = solve_z_roots(3.0, 3.0);
    CHECK(std::abs(roots[0]) >= std::abs(roots[1]));
}

TEST_CASE("solve_z with x = 0 gives z^2 = -y^2") {
    const Complex y(2.0, 0.5);
    for (Branch br : {Branch::plus, Branch::minus}) {
        const Complex z = solve_z(0.0, y, br);
        CHECK(std::abs(z * z + y * y) <= 1e-12);
    }
    const auto r = solve_z_roots(0.0, y);
    CHECK(std::abs(r[0] + r[1]) <= 1e-12);
}

TEST_CASE("solve_z residual") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-4.0, 4.0);
    for (int i = 0; i < 500; ++i) {
        const Complex x(u(rng), u(rng)), y(u(rng), u(rng));
        for (Branch br : {Branch::plus, Branch::minus}) {
            const Complex z = solve_z(x, y, br);
            const double scale = 1.0 + std::norm(x) + std::norm(y) + std::norm(z);
            CHECK(std::abs(z * z - x * y * z + x * x + y * y) <= 1e-12 * scale);
        }
    }
}

TEST_CASE("from_traces at (3,3,3)") {
    const MarkedRepresentation rep = from_traces({3.0, 3.0, 3.0}, "F");
    CHECK(rep.label() == "F");
    CHECK(std::abs(trace(rep.gen_a()) - 3.0) <= 1e-12);
    CHECK(std::abs(trace(rep.gen_b()) - 3.0) <= 1e-12);
    CHECK(std::abs(trace(rep.gen_a() * rep.gen_b()) - 3.0) <= 1e-12);
    CHECK(std::abs(trace(evaluate(rep, parse_word("abAB"))) + 2.0) <= 1e-12);
}

TEST_CASE("from_traces rejects a Markov violation") {
    try {
        from_traces({2.0, 2.0, 2.0});
        FAIL("expected MarkovViolation");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::markov_violation);
    }
}

TEST_CASE("from_traces at the bent point") {
    const Complex x(3.0, 0.0), y(3.0, 0.5);
    const MarkedRepresentation rep = from_traces({x, y, solve_z(x, y, Branch::minus)});
    CHECK(std::abs(trace(evaluate(rep, parse_word("abAB"))) + 2.0) <= 1e-10);
    const MarkedRepresentation q = from_traces(bent());
    CHECK(std::abs(trace(evaluate(q, parse_word("abAB"))) + 2.0) <= 1e-10);
}

TEST_CASE("traces roundtrip through the lift") {
    std::mt19937_64 rng(12);
    std::uniform_real_distribution<double> u(-0.5, 0.5);
    for (int i = 0; i < 50; ++i) {
        const Complex x(3.0 + u(rng), u(rng)), y(3.0 + u(rng), u(rng));
        const TraceCoordinates t{x, y, solve_z(x, y, Branch::minus)};
        const MarkedRepresentation rep = from_traces(t);
        const TraceCoordinates& back = rep.traces();
        // Up to a global sign on each generator.
        CHECK(std::abs(back.x * back.x - x * x) <= 1e-9);
        CHECK(std::abs(back.y * back.y - y * y) <= 1e-9);
        CHECK(std::abs(back.z * back.z - t.z * t.z) <= 1e-9);
        const auto again = MarkedRepresentation::from_matrices(rep.gen_a(), rep.gen_b());
        CHECK(std::abs(again.traces().markov_residual()) <= 1e-9);
    }
}

TEST_CASE("evaluate") {
    const MarkedRepresentation rep = from_traces({3.0, 3.0, 3.0});
    CHECK(distance_mod_sign(evaluate(rep, Word{}), MoebiusMap::identity()) <= 1e-15);
    CHECK(distance_mod_sign(evaluate(rep, parse_word("a")), rep.gen_a()) <= 1e-15);
    CHECK(distance_mod_sign(evaluate(rep, parse_word("aA")), MoebiusMap::identity()) <= 1e-12);
    CHECK_THROWS_AS(parse_word("abx"), Error);
}

TEST_CASE("word_translation_length") {
    const MarkedRepresentation rep = from_traces({3.0, 3.0, 3.0});
    CHECK(word_translation_length(rep, parse_word("abAB")) == 0.0);
    CHECK(word_translation_length(rep, parse_word("a")) ==
          doctest::Approx(2.0 * std::log((3.0 + std::sqrt(5.0)) / 2.0)).epsilon(1e-12));
    CHECK(word_translation_length(rep, parse_word("a")) == doctest::Approx(1.92485).epsilon(1e-5));

    const MarkedRepresentation q = from_traces(bent());
    std::mt19937_64 rng(13);
    for (int i = 0; i < 200; ++i) {
        const Word w = random_reduced(rng, 1 + i % 9), u = random_reduced(rng, 1 + i % 5);
        for (const auto* r : {&rep, &q}) {
            const double l = word_translation_length(*r, w);
            CHECK(std::abs(word_translation_length(*r, concat(concat(u, w), inverse(u))) - l) <= 1e-9 * (1.0 + l));
            CHECK(std::abs(word_translation_length(*r, inverse(w)) - l) <= 1e-9 * (1.0 + l));
        }
    }
}

TEST_CASE("lengths do not depend on the sign of the lift") {
    const MarkedRepresentation rep = from_traces(bent());
    const MoebiusMap minus_a(-rep.gen_a().a(), -rep.gen_a().b(), -rep.gen_a().c(), -rep.gen_a().d());
    const auto other = MarkedRepresentation::from_matrices(minus_a, rep.gen_b());
    for (const char* w : {"a", "b", "ab", "aB", "aab", "abbAB"}) {
        CHECK(word_translation_length(other, parse_word(w)) ==
              doctest::Approx(word_translation_length(rep, parse_word(w))).epsilon(1e-12));
    }
}

TEST_CASE("conjugation preserves traces") {
    const MarkedRepresentation rep = from_traces(bent());
    const MarkedRepresentation c = conjugate(rep, MoebiusMap(2.0, Complex(1.0, 1.0), 1.0, Complex(1.0, 0.5)));
    for (const char* w : {"a", "b", "ab", "aBB", "abAbb"}) {
        const Complex t0 = trace(evaluate(rep, parse_word(w))), t1 = trace(evaluate(c, parse_word(w)));
        CHECK(std::abs(t0 * t0 - t1 * t1) <= 1e-9 * (1.0 + std::norm(t0)));
    }
}

TEST_CASE("is_fuchsian_point") {
    CHECK(is_fuchsian_point(TraceCoordinates{3.0, 3.0, 3.0}));
    CHECK(is_fuchsian_point(from_traces({3.0, 3.0, 3.0})));
    CHECK_FALSE(is_fuchsian_point(bent()));
    CHECK(is_fuchsian_point(TraceCoordinates{3.0, 3.0, 6.0}));
}

TEST_CASE("traces at a Fuchsian point are real") {
    const MarkedRepresentation rep = from_traces({3.0, 3.0, 6.0});
    std::mt19937_64 rng(14);
    for (int i = 0; i < 100; ++i) {
        const Complex t = trace(evaluate(rep, random_reduced(rng, 1 + i % 8)));
        CHECK(std::abs(t.imag()) <= 1e-8 * (1.0 + std::abs(t)));
    }
}

TEST_CASE("jorgensen_filter") {
    CHECK(jorgensen_filter(from_traces({3.0, 3.0, 3.0})).empty());
    CHECK(jorgensen_filter(from_traces(bent())).empty());
    // Generators near the identity: both Jorgensen summands are small.
    const double e = 1e-3;
    const MoebiusMap a(1.0, e, 0.0, 1.0), b(1.0, 0.0, e, 1.0);
    const auto near = MarkedRepresentation::from_matrices(a, b, "near", false);
    CHECK_FALSE(jorgensen_filter(near).empty());
}

TEST_CASE("apply_automorphism") {
    const TraceCoordinates t = bent();
    const TraceCoordinates s = apply_automorphism(t, Automorphism::swap);
    CHECK(std::abs(s.x - t.y) <= 1e-12);
    CHECK(std::abs(s.y - t.x) <= 1e-12);
    CHECK(std::abs(s.z - t.z) <= 1e-12);

    const MarkedRepresentation f = from_traces({3.0, 3.0, 3.0});
    const MarkedRepresentation tw = apply_automorphism(f, Automorphism::ab_twist);
    CHECK(std::abs(tw.traces().x * tw.traces().x - 9.0) <= 1e-9);  // z' = tr AB
    CHECK(std::abs(tw.traces().y * tw.traces().y - 9.0) <= 1e-9);
    CHECK(std::abs(tw.traces().markov_residual()) <= 1e-9);

    for (Automorphism phi : {Automorphism::ab_twist, Automorphism::ba_twist, Automorphism::swap, Automorphism::invert_a}) {
        const MarkedRepresentation q = apply_automorphism(from_traces(t), phi);
        CHECK(std::abs(q.traces().markov_residual()) <= 1e-9);
        const TraceCoordinates direct = apply_automorphism(t, phi);
        CHECK(std::abs(direct.markov_residual()) <= 1e-9);
        CHECK(std::abs(q.traces().x * q.traces().x - direct.x * direct.x) <= 1e-9);
        CHECK(std::abs(q.traces().z * q.traces().z - direct.z * direct.z) <= 1e-9);
        // rep'(w) = rep(phi(w)).
        for (const char* w : {"a", "aB", "abbA"}) {
            CHECK(distance_mod_sign(evaluate(q, parse_word(w)), evaluate(from_traces(t), apply_to_word(phi, parse_word(w)))) <= 1e-9);
        }
    }
}

TEST_CASE("invert-a permutes the length spectrum") {
    const MarkedRepresentation rep = from_traces(bent());
    const MarkedRepresentation inv = apply_automorphism(rep, Automorphism::invert_a);
    std::multiset<long long> before, after;
    for (const auto& c : conjugacy_classes_up_to(6)) {
        before.insert(std::llround(word_translation_length(rep, c.representative) * 1e8));
        after.insert(std::llround(word_translation_length(inv, c.representative) * 1e8));
    }
    CHECK(before == after);
}

TEST_CASE("conjugacy_classes_up_to") {
    const auto one = conjugacy_classes_up_to(1);
    CHECK(one.size() == 4);
    const auto two = conjugacy_classes_up_to(2);
    // 4 squares plus the rotation pairs {ab,ba}, {aB,Ba}, {Ab,bA}, {AB,BA}.
    CHECK(two.size() == 4 + 8);
    for (int n = 1; n <= 6; ++n) {
        std::size_t at_n = 0;
        for (const auto& c : conjugacy_classes_up_to(6)) at_n += c.word_length() == n;
        CHECK(at_n == brute_force_necklaces(n));
    }
    std::set<std::string> names;
    for (const auto& c : conjugacy_classes_up_to(6)) {
        CHECK(c.representative == least_rotation(c.representative));
        CHECK(is_cyclically_reduced(c.representative));
        CHECK(names.insert(to_string(c.representative)).second);
    }
    CHECK_THROWS_AS(conjugacy_classes_up_to(15), Error);
}

TEST_CASE("peripheral classes") {
    CHECK(is_peripheral(parse_word("abAB")));
    CHECK(is_peripheral(parse_word("BAba")));
    CHECK(is_peripheral(parse_word("abABabAB")));
    CHECK_FALSE(is_peripheral(parse_word("abAb")));
    CHECK_FALSE(is_peripheral(parse_word("ab")));
}

}  // TEST_SUITE
