#include <cmath>
#include <cstring>
#include <string>
#include <vector>

#include "doctest.h"
#include "qfthermo/qfthermo.h"

extern "C" int qft_c_smoke(double* h_out);

namespace {

struct Context {
    qft_context* ctx = nullptr;
    explicit Context(int n_max = 5) {
        qft_params p;
        qft_default_params(&p);
        p.n_max = n_max;
        REQUIRE(qft_context_create(&p, &ctx) == QFT_OK);
    }
    ~Context() { qft_context_destroy(ctx); }
    operator qft_context*() const { return ctx; }
};

qft_traces bent() {
    qft_traces t{{3.0, 0.3}, {3.0, 0.0}, {0.0, 0.0}};
    REQUIRE(qft_solve_z(t.x, t.y, 0, &t.z) == QFT_OK);
    return t;
}

const qft_traces kF{{3.0, 0.0}, {3.0, 0.0}, {3.0, 0.0}};

}  // namespace

TEST_SUITE("capi") {

TEST_CASE("C translation unit") {
    double h = 0.0;
    CHECK(qft_c_smoke(&h) == QFT_OK);
    CHECK(std::abs(h - 1.0) <= 0.2);
}

TEST_CASE("version and status names") {
    CHECK(std::string(qft_version()) == "0.1.0");
    CHECK(std::string(qft_status_name(QFT_OK)) == "Ok");
    CHECK(std::string(qft_status_name(QFT_ERR_MARKOV_VIOLATION)) == "MarkovViolation");
    CHECK(std::string(qft_status_name(QFT_ERR_BRACKET_FAILURE)) == "BracketFailure");
}

TEST_CASE("context parameters are validated") {
    qft_params p;
    qft_default_params(&p);
    qft_context* ctx = nullptr;
    p.n_max = 11;
    CHECK(qft_context_create(&p, &ctx) == QFT_ERR_CAP_EXCEEDED);
    CHECK(ctx == nullptr);
    CHECK(std::strlen(qft_last_error(nullptr)) > 0);
    qft_default_params(&p);
    p.s_max = 0;
    CHECK(qft_context_create(&p, &ctx) == QFT_ERR_DOMAIN);
    CHECK(qft_context_create(&p, nullptr) == QFT_ERR_DOMAIN);
    REQUIRE(qft_context_create(nullptr, &ctx) == QFT_OK);
    qft_context_destroy(ctx);
    qft_context_destroy(nullptr);
}

TEST_CASE("representations") {
    Context ctx;
    CHECK(qft_add_traces(ctx, "F", &kF) == QFT_OK);
    const qft_traces bad{{2.0, 0.0}, {2.0, 0.0}, {2.0, 0.0}};
    CHECK(qft_add_traces(ctx, "bad", &bad) == QFT_ERR_MARKOV_VIOLATION);
    CHECK(std::string(qft_last_error(ctx)).find("MarkovViolation") != std::string::npos);
    const qft_traces q = bent();
    CHECK(qft_add_traces(ctx, "Q", &q) == QFT_OK);

    int fuchsian = -1;
    CHECK(qft_is_fuchsian(ctx, "F", &fuchsian) == QFT_OK);
    CHECK(fuchsian == 1);
    CHECK(qft_is_fuchsian(ctx, "Q", &fuchsian) == QFT_OK);
    CHECK(fuchsian == 0);

    double len = 0.0;
    CHECK(qft_word_length(ctx, "F", "a", &len) == QFT_OK);
    CHECK(len == doctest::Approx(1.92485).epsilon(1e-5));
    CHECK(qft_word_length(ctx, "F", "abAB", &len) == QFT_OK);
    CHECK(len == 0.0);
    CHECK(qft_word_length(ctx, "F", "abx", &len) == QFT_ERR_DOMAIN);
    CHECK(qft_word_length(ctx, "nobody", "a", &len) == QFT_ERR_UNKNOWN_LABEL);

    const qft_matrix n{{2.0, 0.0}, {1.0, 1.0}, {1.0, 0.0}, {1.0, 0.5}};
    CHECK(qft_add_conjugate(ctx, "Q", "Qc", &n) == QFT_OK);
    CHECK(qft_add_automorphism(ctx, "Q", "Qt", QFT_AB_TWIST) == QFT_OK);
    qft_traces tt, direct;
    CHECK(qft_get_traces(ctx, "Qt", &tt) == QFT_OK);
    CHECK(qft_apply_automorphism_traces(&q, QFT_AB_TWIST, &direct) == QFT_OK);
    qft_complex r;
    CHECK(qft_markov_residual(&tt, &r) == QFT_OK);
    CHECK(std::hypot(r.re, r.im) <= 1e-9);
    double lq = 0.0, lc = 0.0, lt = 0.0;
    CHECK(qft_word_length(ctx, "Q", "aBB", &lq) == QFT_OK);
    CHECK(qft_word_length(ctx, "Qc", "aBB", &lc) == QFT_OK);
    CHECK(lc == doctest::Approx(lq).epsilon(1e-9));
    // phi(a B B) = ab B B = a B under the ab-twist.
    CHECK(qft_word_length(ctx, "Qt", "aBB", &lt) == QFT_OK);
    double lab = 0.0;
    CHECK(qft_word_length(ctx, "Q", "aB", &lab) == QFT_OK);
    CHECK(lt == doctest::Approx(lab).epsilon(1e-9));

    qft_matrix a{{3.0, 0.0}, {1.0, 0.0}, {-1.0, 0.0}, {0.0, 0.0}};
    qft_matrix b{{1.0, 0.0}, {0.0, 0.0}, {0.0, 0.0}, {1.0, 0.0}};
    CHECK(qft_add_matrices(ctx, "notype", &a, &b) == QFT_ERR_MARKOV_VIOLATION);
    CHECK(qft_add_traces(ctx, nullptr, &kF) == QFT_ERR_DOMAIN);
    CHECK(qft_add_traces(ctx, "F2", nullptr) == QFT_ERR_DOMAIN);
}

TEST_CASE("thermodynamics") {
    Context ctx;
    REQUIRE(qft_add_traces(ctx, "F", &kF) == QFT_OK);
    const qft_traces q = bent();
    REQUIRE(qft_add_traces(ctx, "Q", &q) == QFT_OK);

    qft_root hf, hq;
    REQUIRE(qft_entropy(ctx, "F", &hf) == QFT_OK);
    REQUIRE(qft_entropy(ctx, "Q", &hq) == QFT_OK);
    CHECK(std::abs(hf.value - 1.0) <= 0.1);
    CHECK(hf.pressure.ladder_len == 4);
    CHECK(hf.pressure.ladder_n[0] == 2);
    CHECK(hq.value > hf.value);

    const char* labels[] = {"F"};
    const double coeff[] = {1.0};
    qft_pressure p;
    CHECK(qft_pressure_at(ctx, labels, coeff, 1, 5.0, &p) == QFT_OK);
    CHECK(p.value < 0.0);
    CHECK(qft_pressure_at(ctx, labels, coeff, 1, 0.4, &p) == QFT_ERR_DOMAIN);

    qft_root w;
    CHECK(qft_weighted_entropy(ctx, "F", "Q", 1.0, 0.0, &w) == QFT_OK);
    CHECK(w.value == doctest::Approx(hf.value));

    double gap = 0.0, err = 0.0;
    CHECK(qft_entropy_gap(ctx, "F", "Q", &gap, &err) == QFT_OK);
    CHECK(gap > 0.0);

    qft_z1_probe z;
    const int schedule[] = {5, 10, 15, 20, 25, 30};
    CHECK(qft_z1_probe_run(0.6, schedule, 6, &z) == QFT_OK);
    CHECK(z.converging == 1);
    CHECK(qft_z1_probe_run(0.45, schedule, 6, &z) == QFT_OK);
    CHECK(z.converging == 0);
    CHECK(qft_z1_probe_run(0.45, schedule, 1, &z) == QFT_ERR_DOMAIN);
    CHECK(qft_entropy(ctx, "nobody", &hf) == QFT_ERR_UNKNOWN_LABEL);
}

TEST_CASE("census handles") {
    Context ctx;
    REQUIRE(qft_add_traces(ctx, "F", &kF) == QFT_OK);
    const qft_traces q = bent();
    REQUIRE(qft_add_traces(ctx, "Q", &q) == QFT_OK);
    const char* labels[] = {"F", "Q"};
    qft_census* c = nullptr;
    REQUIRE(qft_census_create(ctx, labels, 2, 6.0, 8, &c) == QFT_OK);
    REQUIRE(qft_census_size(c) > 0);
    for (size_t i = 0; i < qft_census_size(c); ++i) {
        double l = 0.0;
        REQUIRE(qft_word_length(ctx, "Q", qft_census_word(c, i), &l) == QFT_OK);
        CHECK(qft_census_length(c, i, 1) == doctest::Approx(l).epsilon(1e-12));
        CHECK(qft_census_length(c, i, 0) <= 6.0);
    }
    qft_census_destroy(c);
    qft_census_destroy(nullptr);
    CHECK(qft_census_create(ctx, labels, 2, 6.0, 15, &c) == QFT_ERR_CAP_EXCEEDED);

    size_t coding = 0, oracle = 0, mismatches = 0;
    double gap = 0.0;
    CHECK(qft_census_bijection(ctx, "Q", "Q", 6, 1e-9, &coding, &oracle, &mismatches, &gap) == QFT_OK);
    CHECK(mismatches == 0);
    CHECK(coding == oracle);
    CHECK(qft_census_bijection(ctx, "Q", "F", 6, 1e-9, &coding, &oracle, &mismatches, &gap) == QFT_OK);
    CHECK(mismatches > 0);

    unsigned long long n = 0;
    int warn = 0;
    CHECK(qft_ball_count(ctx, "F", 0.0, 6, &n, &warn) == QFT_OK);
    CHECK(n == 1);
}

TEST_CASE("curves and intersection") {
    Context ctx;
    REQUIRE(qft_add_traces(ctx, "F", &kF) == QFT_OK);
    const qft_traces q = bent();
    REQUIRE(qft_add_traces(ctx, "Q", &q) == QFT_OK);
    qft_curve* curve = nullptr;
    REQUIRE(qft_curve_create(ctx, "F", "Q", 6, &curve) == QFT_OK);
    CHECK(qft_curve_size(curve) == 7);
    qft_sample s;
    CHECK(qft_curve_sample(curve, 0, &s) == QFT_OK);
    CHECK(s.ok == 1);
    CHECK(std::string(qft_curve_sample_error(curve, 0)).empty());
    CHECK(qft_curve_sample(curve, 7, &s) == QFT_ERR_DOMAIN);
    CHECK(qft_curve_convex(curve, 1e-3) == 1);
    CHECK(qft_curve_decreasing(curve) == 1);
    qft_root hr, he;
    qft_curve_endpoints(curve, &hr, &he);
    CHECK(he.value > hr.value);
    double i = 0.0, ie = 0.0;
    CHECK(qft_curve_intersection(curve, &i, &ie) == QFT_OK);
    CHECK(i > 0.9);
    qft_curve_destroy(curve);
    CHECK(qft_curve_create(ctx, "F", "Q", 3, &curve) == QFT_ERR_DOMAIN);

    qft_intersection r;
    REQUIRE(qft_intersection_report(ctx, "F", "F", 6, 8.0, 10, &r) == QFT_OK);
    CHECK(r.verdict == QFT_EQUALITY);
    CHECK(std::abs(r.j - 1.0) <= 1e-6);

    double avg = 0.0;
    size_t classes = 0;
    CHECK(qft_orbit_average(ctx, "F", "Q", 0.5, 4, &avg, &classes) == QFT_ERR_EMPTY_CENSUS);
}

TEST_CASE("pressure metric entry points") {
    Context ctx(4);
    qft_metric_params mp;
    qft_default_metric_params(&mp);
    CHECK(mp.eps == 0.05);
    qft_pressure_form f;
    CHECK(qft_pressure_form_eval(ctx, &kF, {0.0, 0.0}, {0.0, 0.0}, &mp, &f) == QFT_OK);
    CHECK(f.value == 0.0);
    mp.eps = -1.0;
    CHECK(qft_pressure_form_eval(ctx, &kF, {1.0, 0.0}, {0.0, 0.0}, &mp, &f) == QFT_ERR_DOMAIN);

    qft_complex dx, dy;
    CHECK(qft_push_forward(&kF, {1.0, 0.0}, {0.0, 0.0}, QFT_SWAP, &dx, &dy) == QFT_OK);
    CHECK(dx.re == 0.0);
    CHECK(dy.re == 1.0);
    qft_traces moved;
    CHECK(qft_continue_point(&kF, {1.0, 0.0}, {0.0, 0.0}, 0.1, &moved) == QFT_OK);
    CHECK(moved.x.re == doctest::Approx(3.1));
    const char* words[] = {"a"};
    double d = 1.0, mx = 1.0;
    CHECK(qft_degeneracy_probe(ctx, &kF, {0.0, 0.0}, {0.0, 0.0}, words, 1, 0.05, &d, &mx) == QFT_OK);
    CHECK(mx == 0.0);
    const char* bad[] = {"aq"};
    CHECK(qft_degeneracy_probe(ctx, &kF, {1.0, 0.0}, {0.0, 0.0}, bad, 1, 0.05, &d, &mx) == QFT_ERR_DOMAIN);
    const qft_traces path[] = {kF, kF};
    double len = 1.0, err = 1.0;
    CHECK(qft_path_length(ctx, path, 2, 0.1, nullptr, &len, &err) == QFT_OK);
    CHECK(len == 0.0);
}

}  // TEST_SUITE
