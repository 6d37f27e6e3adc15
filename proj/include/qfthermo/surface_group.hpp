#pragma once

// The free group <alpha, beta> of the once-punctured torus, its type-preserving
// representations in Fricke trace coordinates, and mapping-class actions.

#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "qfthermo/moebius.hpp"

namespace qft {

// Generators alpha, alpha^-1, beta, beta^-1 written a, A, b, B.  The order of
// the enumerators is the lexicographic order used for necklaces and states.
enum class Letter : std::uint8_t { a = 0, A = 1, b = 2, B = 3 };

inline constexpr std::array<Letter, 4> kLetters{Letter::a, Letter::A, Letter::b, Letter::B};

constexpr Letter inverse(Letter x) { return static_cast<Letter>(static_cast<std::uint8_t>(x) ^ 1u); }
constexpr int index(Letter x) { return static_cast<int>(x); }
char to_char(Letter x);

using Word = std::vector<Letter>;

std::string to_string(const Word& w);
// Parses "aBAb"-style strings; throws DomainError on other characters.
Word parse_word(std::string_view s);

bool is_reduced(const Word& w);
bool is_cyclically_reduced(const Word& w);
Word free_reduce(const Word& w);
Word cyclic_reduce(const Word& w);
Word inverse(const Word& w);
Word concat(const Word& u, const Word& v);
Word power(const Word& w, int n);

// Lexicographically least rotation.
Word least_rotation(const Word& w);

struct ConjugacyClass {
    Word representative;  // cyclically reduced and rotation-minimal
    int word_length() const { return static_cast<int>(representative.size()); }
    bool operator==(const ConjugacyClass&) const = default;
    auto operator<=>(const ConjugacyClass& o) const {
        if (auto c = representative.size() <=> o.representative.size(); c != 0) return c;
        return representative <=> o.representative;
    }
};

// Class of an arbitrary word (freely and cyclically reduced first).
ConjugacyClass conjugacy_class_of(const Word& w);

// True iff the class is a nontrivial power of a rotation of [a,b] or its
// inverse, i.e. a boundary-parallel (parabolic) class.
bool is_peripheral(const Word& cyclic_word);

inline constexpr int kDefaultClassCap = 14;

// All necklaces of cyclically reduced words of length 1..max_length.
std::vector<ConjugacyClass> conjugacy_classes_up_to(int max_length, int cap = kDefaultClassCap);

struct TraceCoordinates {
    Complex x{3.0}, y{3.0}, z{3.0};

    // x^2 + y^2 + z^2 - xyz; vanishes iff tr[A,B] = -2.
    Complex markov_residual() const { return x * x + y * y + z * z - x * y * z; }
};

enum class Branch { plus, minus };

// Root of z^2 - xyz + (x^2 + y^2) = 0.  "plus" is the root of larger modulus;
// ties go to the larger real part, then the larger imaginary part.
Complex solve_z(Complex x, Complex y, Branch branch);

// Both roots ordered (plus, minus).
std::array<Complex, 2> solve_z_roots(Complex x, Complex y);

inline constexpr double kMarkovTolerance = 1e-9;

class MarkedRepresentation {
public:
    const MoebiusMap& gen_a() const { return gens_[0]; }
    const MoebiusMap& gen_b() const { return gens_[2]; }
    // Image of a single letter.
    const MoebiusMap& image(Letter x) const { return gens_[index(x)]; }
    const TraceCoordinates& traces() const { return traces_; }
    const std::string& label() const { return label_; }
    void set_label(std::string label) { label_ = std::move(label); }

    // Wraps explicit generator matrices; traces are read off the matrices.
    // With check_markov the commutator must have trace -2 (MarkovViolation).
    static MarkedRepresentation from_matrices(const MoebiusMap& a, const MoebiusMap& b, std::string label = {},
                                              bool check_markov = true);

private:
    std::array<MoebiusMap, 4> gens_;
    TraceCoordinates traces_;
    std::string label_;
};

// Fricke lift A = [[x, 1], [-1, 0]], B = [[0, s], [-1/s, y]] with s + 1/s = -z.
// Throws MarkovViolation or DegenerateLift.
MarkedRepresentation from_traces(const TraceCoordinates& t, std::string label = {});

MoebiusMap evaluate(const MarkedRepresentation& rep, const Word& w);
double word_translation_length(const MarkedRepresentation& rep, const Word& w);

// N rep N^-1.
MarkedRepresentation conjugate(const MarkedRepresentation& rep, const MoebiusMap& n);

bool is_fuchsian_point(const MarkedRepresentation& rep, double tol = 1e-9);
bool is_fuchsian_point(const TraceCoordinates& t, double tol = 1e-9);

// Non-blocking Jorgensen screen |tr^2 A - 4| + |tr[A, B] - 2| >= 1 on a fixed
// list of generator pairs.  Returns one message per failing pair.
std::vector<std::string> jorgensen_filter(const MarkedRepresentation& rep);

enum class Automorphism { ab_twist, ba_twist, swap, invert_a };

const char* to_string(Automorphism phi);
Automorphism parse_automorphism(std::string_view name);

// Images phi(alpha), phi(beta) as words.
std::array<Word, 2> automorphism_images(Automorphism phi);
// phi applied to an arbitrary word.
Word apply_to_word(Automorphism phi, const Word& w);

// genA' = rep(phi(alpha)), genB' = rep(phi(beta)).
MarkedRepresentation apply_automorphism(const MarkedRepresentation& rep, Automorphism phi);
// The induced map on trace coordinates.
TraceCoordinates apply_automorphism(const TraceCoordinates& t, Automorphism phi);

}  // namespace qft
