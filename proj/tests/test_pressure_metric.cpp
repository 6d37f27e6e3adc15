#include <map>
#include <cmath>

#include "doctest.h"
#include "qfthermo/error.hpp"
#include "qfthermo/pressure_metric.hpp"

using namespace qft;

namespace {

const Complex kI(0.0, 1.0);
const TraceCoordinates kF{3.0, 3.0, 3.0};
const TraceCoordinates kQ{Complex(3.0, 0.3), 3.0, solve_z(Complex(3.0, 0.3), 3.0, Branch::minus)};
const TangentVector kReal{1.0, 0.0};
const TangentVector kBend{kI, 0.0};

const Thermo& shared() {
    static const Thermo th = [] {
        ThermoParams p;
        p.n_max = 6;
        return Thermo(p);
    }();
    return th;
}

// Forms along the three test directions are reused by several cases.
const PressureForm& form(const TraceCoordinates& base, const TangentVector& v) {
    static std::map<std::pair<int, int>, PressureForm> cache;
    const int b = &base == &kF ? 0 : 1;
    const int d = &v == &kReal ? 0 : 1;
    auto it = cache.find({b, d});
    if (it == cache.end()) it = cache.emplace(std::pair{b, d}, pressure_form(shared(), base, v)).first;
    return it->second;
}

double markov(const TraceCoordinates& t) { return std::abs(t.markov_residual()); }

}  // namespace

TEST_SUITE("pressure_metric") {

TEST_CASE("tangent vectors") {
    const TangentVector u = TangentVector::unit(3.0, 4.0 * kI);
    CHECK(u.norm() == doctest::Approx(1.0));
    CHECK(std::abs(u.dx - 0.6) <= 1e-15);
    CHECK_THROWS_AS(TangentVector::unit(0.0, 0.0), Error);
}

TEST_CASE("path_family") {
    const PathFamily still = path_family(kF, {0.0, 0.0});
    REQUIRE(still.points.size() == 5);
    for (const auto& p : still.points) {
        CHECK(p.x == kF.x);
        CHECK(p.y == kF.y);
        CHECK(p.z == kF.z);
    }

    const PathFamily real = path_family(kF, kReal);
    for (const auto& p : real.points) {
        CHECK(is_fuchsian_point(p));
        CHECK(markov(p) <= 1e-9);
    }

    const PathFamily bend = path_family(kF, kBend);
    for (int k = 0; k < 5; ++k) {
        const auto& p = bend.points[static_cast<std::size_t>(k)];
        const auto& m = bend.points[static_cast<std::size_t>(4 - k)];
        CHECK(markov(p) <= 1e-9);
        CHECK(std::abs(p.x - std::conj(m.x)) <= 1e-12);
        CHECK(std::abs(p.y - std::conj(m.y)) <= 1e-12);
        CHECK(std::abs(p.z - std::conj(m.z)) <= 1e-12);
    }
    CHECK(bend.points[2].z == kF.z);

    const PathFamily off = path_family(kQ, TangentVector::unit(1.0, kI));
    for (const auto& p : off.points) CHECK(markov(p) <= 1e-9);
    CHECK_THROWS_AS(path_family(kF, kReal, 0.0), Error);
}

TEST_CASE("continuation stops at the branch point") {
    // At x = y = 2 sqrt 2 the z quadratic has the double root 4.
    const double r = 2.0 * std::sqrt(2.0);
    const TraceCoordinates near{r + 0.05, r, solve_z(r + 0.05, r, Branch::plus)};
    try {
        path_family(near, {-1.0, 0.0}, 0.05);
        FAIL("expected BranchCollision");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::branch_collision);
    }
}

TEST_CASE("push_forward is the derivative of the induced map") {
    const TangentVector v = TangentVector::unit(Complex(0.3, 0.8), Complex(-0.5, 0.2));
    for (const TraceCoordinates& base : {kF, kQ}) {
        for (Automorphism phi : {Automorphism::ab_twist, Automorphism::ba_twist, Automorphism::swap, Automorphism::invert_a}) {
            CAPTURE(to_string(phi));
            const TangentVector w = push_forward(base, v, phi);
            const double h = 1e-5;
            const TraceCoordinates p = apply_automorphism(continue_point(base, v, h), phi);
            const TraceCoordinates m = apply_automorphism(continue_point(base, v, -h), phi);
            CHECK(std::abs((p.x - m.x) / (2.0 * h) - w.dx) <= 1e-6);
            CHECK(std::abs((p.y - m.y) / (2.0 * h) - w.dy) <= 1e-6);
        }
    }
}

TEST_CASE("zero direction") {
    const PressureForm f = pressure_form(shared(), kF, {0.0, 0.0});
    CHECK(f.value == 0.0);
    CHECK(f.error_bar == 0.0);
    const DegeneracyProbe d = degeneracy_probe(shared(), kF, {0.0, 0.0}, {parse_word("a"), parse_word("ab")});
    CHECK(d.max_abs == 0.0);
    CHECK(d.rows.size() == 2);
}

TEST_CASE("pressure form at the Fuchsian point") {
    const PressureForm& real = form(kF, kReal);
    const PressureForm& bend = form(kF, kBend);
    CHECK(real.value > real.error_bar);
    CHECK(std::abs(bend.value) <= 0.05 * real.value);
    CHECK(real.j.size() == 5);
    CHECK(real.j[2] == 1.0);
    CHECK(real.by_depth.size() == 3);
    // J is even along the bending family.
    CHECK(std::abs(bend.j[1] - bend.j[3]) <= 1e-9);
    CHECK(std::abs(bend.j[0] - bend.j[4]) <= 1e-9);
}

TEST_CASE("pressure form off the Fuchsian locus") {
    const PressureForm& real = form(kQ, kReal);
    const PressureForm& bend = form(kQ, kBend);
    CHECK(real.value > real.error_bar);
    CHECK(bend.value > bend.error_bar);
}

TEST_CASE("mapping classes preserve the form") {
    for (Automorphism phi : {Automorphism::swap, Automorphism::ab_twist}) {
        CAPTURE(to_string(phi));
        const PressureForm& f = form(kQ, kReal);
        const PressureForm g = pressure_form(shared(), apply_automorphism(kQ, phi), push_forward(kQ, kReal, phi));
        CHECK(std::abs(f.value - g.value) <= f.error_bar + g.error_bar);
    }
}

TEST_CASE("polarization") {
    const TangentVector w{0.0, 1.0};
    const PolarizedForm vv = pressure_form_polarized(shared(), kQ, kReal, kReal);
    const PressureForm& q = form(kQ, kReal);
    CHECK(std::abs(vv.value - q.value) <= vv.error_bar + q.error_bar);
    const PolarizedForm vw = pressure_form_polarized(shared(), kQ, kReal, w);
    const PolarizedForm wv = pressure_form_polarized(shared(), kQ, w, kReal);
    CHECK(std::abs(vw.value - wv.value) <= vw.error_bar + wv.error_bar);
    const PolarizedForm scaled = pressure_form_polarized(shared(), kQ, kReal * 2.0, w);
    CHECK(std::abs(scaled.value - 2.0 * vw.value) <= scaled.error_bar + 2.0 * vw.error_bar);
}

TEST_CASE("degeneracy probe") {
    const std::vector<Word> words{parse_word("a"), parse_word("b"), parse_word("ab"), parse_word("aB"), parse_word("aab")};
    const DegeneracyProbe bend = degeneracy_probe(shared(), kF, kBend, words);
    CHECK(bend.max_abs <= 1e-6);
    const DegeneracyProbe real = degeneracy_probe(shared(), kF, kReal, words);
    CHECK(real.max_abs > 1e-2);
    CHECK_THROWS_AS(degeneracy_probe(shared(), kF, kReal, {}), Error);
}

TEST_CASE("path_length") {
    const TraceCoordinates p0 = kF;
    const TraceCoordinates p1 = continue_point(kF, kReal, 0.1);
    const TraceCoordinates p2 = continue_point(kF, kReal, 0.2);
    const PathLength constant = path_length(shared(), {p0, p0, p0}, 0.15);
    CHECK(constant.value == 0.0);
    const PathLength forward = path_length(shared(), {p0, p1, p2}, 0.15);
    const PathLength backward = path_length(shared(), {p2, p1, p0}, 0.15);
    CHECK(forward.value > 0.0);
    CHECK(std::abs(forward.value - backward.value) <= forward.error_bar + backward.error_bar);
    const PathLength a = path_length(shared(), {p0, p1}, 0.15);
    const PathLength b = path_length(shared(), {p1, p2}, 0.15);
    CHECK(std::abs(a.value + b.value - forward.value) <= a.error_bar + b.error_bar + forward.error_bar);
    CHECK_THROWS_AS(path_length(shared(), {p0, p2}, 0.15), Error);
}

}  // TEST_SUITE
