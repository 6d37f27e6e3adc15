#include "qfthermo/surface_group.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "qfthermo/error.hpp"

namespace qft {

namespace {

constexpr std::array<char, 4> kLetterChars{'a', 'A', 'b', 'B'};

Complex commutator_trace(const MoebiusMap& a, const MoebiusMap& b) {
    return trace(a * b * a.inverse() * b.inverse());
}

}  // namespace

char to_char(Letter x) { return kLetterChars[index(x)]; }

std::string to_string(const Word& w) {
    std::string s;
    s.reserve(w.size());
    for (Letter x : w) s.push_back(to_char(x));
    return s;
}

Word parse_word(std::string_view s) {
    Word w;
    w.reserve(s.size());
    for (char ch : s) {
        auto it = std::find(kLetterChars.begin(), kLetterChars.end(), ch);
        if (it == kLetterChars.end()) fail(ErrorCode::domain, std::string("bad letter '") + ch + "'");
        w.push_back(static_cast<Letter>(it - kLetterChars.begin()));
    }
    return w;
}

bool is_reduced(const Word& w) {
    for (std::size_t i = 1; i < w.size(); ++i) {
        if (w[i] == inverse(w[i - 1])) return false;
    }
    return true;
}

bool is_cyclically_reduced(const Word& w) {
    return is_reduced(w) && (w.size() < 2 || w.front() != inverse(w.back()));
}

Word free_reduce(const Word& w) {
    Word out;
    out.reserve(w.size());
    for (Letter x : w) {
        if (!out.empty() && out.back() == inverse(x)) {
            out.pop_back();
        } else {
            out.push_back(x);
        }
    }
    return out;
}

Word cyclic_reduce(const Word& w) {
    Word r = free_reduce(w);
    std::size_t lo = 0, hi = r.size();
    while (hi - lo >= 2 && r[lo] == inverse(r[hi - 1])) {
        ++lo;
        --hi;
    }
    return Word(r.begin() + static_cast<std::ptrdiff_t>(lo), r.begin() + static_cast<std::ptrdiff_t>(hi));
}

Word inverse(const Word& w) {
    Word out(w.rbegin(), w.rend());
    for (Letter& x : out) x = inverse(x);
    return out;
}

Word concat(const Word& u, const Word& v) {
    Word out = u;
    out.insert(out.end(), v.begin(), v.end());
    return out;
}

Word power(const Word& w, int n) {
    Word out;
    if (n < 0) return power(inverse(w), -n);
    out.reserve(w.size() * static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) out.insert(out.end(), w.begin(), w.end());
    return out;
}

Word least_rotation(const Word& w) {
    const std::size_t n = w.size();
    std::size_t best = 0;
    for (std::size_t r = 1; r < n; ++r) {
        for (std::size_t i = 0; i < n; ++i) {
            const Letter p = w[(r + i) % n];
            const Letter q = w[(best + i) % n];
            if (p != q) {
                if (p < q) best = r;
                break;
            }
        }
    }
    Word out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = w[(best + i) % n];
    return out;
}

ConjugacyClass conjugacy_class_of(const Word& w) { return {least_rotation(cyclic_reduce(w))}; }

bool is_peripheral(const Word& cyclic_word) {
    static const std::array<Word, 2> kCommutators{parse_word("abAB"), parse_word("baBA")};
    const Word rep = least_rotation(cyclic_reduce(cyclic_word));
    if (rep.empty() || rep.size() % 4 != 0) return false;
    for (const Word& c : kCommutators) {
        if (rep == least_rotation(power(c, static_cast<int>(rep.size() / 4)))) return true;
    }
    return false;
}

std::vector<ConjugacyClass> conjugacy_classes_up_to(int max_length, int cap) {
    if (max_length > cap) {
        fail(ErrorCode::cap_exceeded, "class length " + std::to_string(max_length) + " > cap " + std::to_string(cap));
    }
    std::vector<ConjugacyClass> out;
    Word w;
    // Depth-first over reduced words; a word is kept when it is cyclically
    // reduced and equal to its least rotation.
    std::function<void(int)> grow = [&](int target) {
        if (static_cast<int>(w.size()) == target) {
            if (is_cyclically_reduced(w) && least_rotation(w) == w) out.push_back({w});
            return;
        }
        for (Letter x : kLetters) {
            if (!w.empty() && x == inverse(w.back())) continue;
            // A necklace representative starts with its least letter.
            if (!w.empty() && x < w.front()) continue;
            w.push_back(x);
            grow(target);
            w.pop_back();
        }
    };
    for (int n = 1; n <= max_length; ++n) grow(n);
    return out;
}

std::array<Complex, 2> solve_z_roots(Complex x, Complex y) {
    const Complex p = x * y;
    const Complex disc = std::sqrt(p * p - 4.0 * (x * x + y * y));
    Complex r1 = 0.5 * (p + disc);
    Complex r2 = 0.5 * (p - disc);
    auto larger = [](Complex u, Complex v) {
        const double mu = std::abs(u), mv = std::abs(v);
        const double scale = std::max({1.0, mu, mv});
        if (std::abs(mu - mv) > 1e-14 * scale) return mu > mv;
        if (std::abs(u.real() - v.real()) > 1e-14 * scale) return u.real() > v.real();
        return u.imag() > v.imag();
    };
    if (!larger(r1, r2)) std::swap(r1, r2);
    return {r1, r2};
}

Complex solve_z(Complex x, Complex y, Branch branch) {
    const auto roots = solve_z_roots(x, y);
    return branch == Branch::plus ? roots[0] : roots[1];
}

MarkedRepresentation MarkedRepresentation::from_matrices(const MoebiusMap& a, const MoebiusMap& b, std::string label,
                                                         bool check_markov) {
    MarkedRepresentation rep;
    rep.gens_ = {a, a.inverse(), b, b.inverse()};
    rep.traces_ = {trace(a), trace(b), trace(a * b)};
    rep.label_ = std::move(label);
    if (check_markov) {
        const Complex ct = commutator_trace(a, b);
        if (std::abs(ct + 2.0) > kMarkovTolerance * std::max(1.0, std::abs(rep.traces_.z * rep.traces_.x * rep.traces_.y))) {
            fail(ErrorCode::markov_violation, "commutator trace " + std::to_string(ct.real()) + "+" +
                                                  std::to_string(ct.imag()) + "i != -2");
        }
    }
    return rep;
}

MarkedRepresentation from_traces(const TraceCoordinates& t, std::string label) {
    const Complex res = t.markov_residual();
    const double scale = std::max(1.0, std::abs(t.x * t.y * t.z));
    if (!std::isfinite(std::abs(res)) || std::abs(res) > kMarkovTolerance * scale) {
        fail(ErrorCode::markov_violation, "x^2+y^2+z^2-xyz = " + std::to_string(std::abs(res)));
    }
    if (std::abs(t.x) <= 1e-9) fail(ErrorCode::degenerate_lift, "tr A vanishes; apply a generator swap");
    // s solves s^2 + z s + 1 = 0; pick the root of modulus >= 1.
    const Complex disc = std::sqrt(t.z * t.z - 4.0);
    Complex s = 0.5 * (-t.z + disc);
    if (std::abs(s) < 1.0) s = 0.5 * (-t.z - disc);
    if (!std::isfinite(std::abs(s)) || std::abs(s) < 1e-12) fail(ErrorCode::degenerate_lift, "singular lift");
    const MoebiusMap a(t.x, 1.0, -1.0, 0.0);
    const MoebiusMap b(0.0, s, -1.0 / s, t.y);
    MarkedRepresentation rep = MarkedRepresentation::from_matrices(a, b, std::move(label), false);
    return rep;
}

MoebiusMap evaluate(const MarkedRepresentation& rep, const Word& w) {
    MoebiusMap m;
    int since = 0;
    for (Letter x : w) {
        m = MoebiusMap::multiply_raw(m, rep.image(x));
        if (++since == 64) {
            m.renormalize();
            since = 0;
        }
    }
    return m.renormalize();
}

double word_translation_length(const MarkedRepresentation& rep, const Word& w) {
    return translation_length(evaluate(rep, w));
}

MarkedRepresentation conjugate(const MarkedRepresentation& rep, const MoebiusMap& n) {
    const MoebiusMap ni = n.inverse();
    return MarkedRepresentation::from_matrices(n * rep.gen_a() * ni, n * rep.gen_b() * ni, rep.label(), false);
}

bool is_fuchsian_point(const TraceCoordinates& t, double tol) {
    for (Complex v : {t.x, t.y, t.z}) {
        if (std::abs(v.imag()) > tol || std::abs(v.real()) <= 2.0) return false;
    }
    return true;
}

bool is_fuchsian_point(const MarkedRepresentation& rep, double tol) { return is_fuchsian_point(rep.traces(), tol); }

std::vector<std::string> jorgensen_filter(const MarkedRepresentation& rep) {
    const MoebiusMap& a = rep.gen_a();
    const MoebiusMap& b = rep.gen_b();
    const MoebiusMap ab = a * b;
    struct Pair {
        const char* name;
        MoebiusMap x, y;
    };
    const std::array<Pair, 4> pairs{{{"(A,B)", a, b}, {"(B,A)", b, a}, {"(AB,A)", ab, a}, {"(AB,B)", ab, b}}};
    std::vector<std::string> warnings;
    for (const Pair& p : pairs) {
        const Complex tx = trace(p.x);
        const double value = std::abs(tx * tx - 4.0) + std::abs(commutator_trace(p.x, p.y) - 2.0);
        if (value < 1.0) {
            warnings.push_back(std::string("Jorgensen inequality fails on ") + p.name + ": " + std::to_string(value) +
                               " < 1");
        }
    }
    return warnings;
}

const char* to_string(Automorphism phi) {
    switch (phi) {
        case Automorphism::ab_twist: return "ab-twist";
        case Automorphism::ba_twist: return "ba-twist";
        case Automorphism::swap: return "swap";
        case Automorphism::invert_a: return "invert-a";
    }
    return "?";
}

Automorphism parse_automorphism(std::string_view name) {
    for (Automorphism phi : {Automorphism::ab_twist, Automorphism::ba_twist, Automorphism::swap, Automorphism::invert_a}) {
        if (name == to_string(phi)) return phi;
    }
    fail(ErrorCode::domain, "unknown automorphism '" + std::string(name) + "'");
}

std::array<Word, 2> automorphism_images(Automorphism phi) {
    switch (phi) {
        case Automorphism::ab_twist: return {parse_word("ab"), parse_word("b")};
        case Automorphism::ba_twist: return {parse_word("a"), parse_word("ba")};
        case Automorphism::swap: return {parse_word("b"), parse_word("a")};
        case Automorphism::invert_a: return {parse_word("A"), parse_word("b")};
    }
    return {};
}

Word apply_to_word(Automorphism phi, const Word& w) {
    const auto images = automorphism_images(phi);
    Word out;
    for (Letter x : w) {
        const Word& img = images[index(x) / 2];
        out = concat(out, (index(x) % 2 == 0) ? img : inverse(img));
    }
    return free_reduce(out);
}

MarkedRepresentation apply_automorphism(const MarkedRepresentation& rep, Automorphism phi) {
    const auto images = automorphism_images(phi);
    return MarkedRepresentation::from_matrices(evaluate(rep, images[0]), evaluate(rep, images[1]), rep.label(), false);
}

TraceCoordinates apply_automorphism(const TraceCoordinates& t, Automorphism phi) {
    switch (phi) {
        case Automorphism::ab_twist: return {t.z, t.y, t.z * t.y - t.x};
        case Automorphism::ba_twist: return {t.x, t.z, t.x * t.z - t.y};
        case Automorphism::swap: return {t.y, t.x, t.z};
        case Automorphism::invert_a: return {t.x, t.y, t.x * t.y - t.z};
    }
    return t;
}

}  // namespace qft
