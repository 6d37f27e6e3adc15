#pragma once

// Hyperbolic 3-space in the upper half-space model and its orientation
// preserving isometries PSL(2,C).

#include <complex>
#include <optional>

namespace qft {

using Complex = std::complex<double>;

enum class IsometryType { identity, parabolic, elliptic, loxodromic };

const char* to_string(IsometryType t);

// Unit-determinant representative of a sign class {M, -M}.
class MoebiusMap {
public:
    MoebiusMap() = default;
    // Rescales by a square root of the determinant; throws DomainError on a
    // singular matrix.
    MoebiusMap(Complex a, Complex b, Complex c, Complex d);

    static MoebiusMap identity() { return {}; }
    static MoebiusMap diagonal(Complex lambda);

    Complex a() const { return a_; }
    Complex b() const { return b_; }
    Complex c() const { return c_; }
    Complex d() const { return d_; }
    Complex det() const { return a_ * d_ - b_ * c_; }

    MoebiusMap inverse() const;

    // Raw product without the determinant check; used on the inner loops of
    // word evaluation where callers renormalize periodically.
    static MoebiusMap multiply_raw(const MoebiusMap& m, const MoebiusMap& n);
    MoebiusMap& renormalize();

private:
    struct Raw {};
    MoebiusMap(Raw, Complex a, Complex b, Complex c, Complex d) : a_(a), b_(b), c_(c), d_(d) {}

    Complex a_{1.0}, b_{0.0}, c_{0.0}, d_{1.0};
};

MoebiusMap compose(const MoebiusMap& m, const MoebiusMap& n);
MoebiusMap operator*(const MoebiusMap& m, const MoebiusMap& n);
MoebiusMap inverse(const MoebiusMap& m);

// Max entrywise distance between sign classes.
double distance_mod_sign(const MoebiusMap& m, const MoebiusMap& n);

struct UpperHalfSpacePoint {
    Complex horizontal;
    double height = 1.0;
};

// A point of the Riemann sphere; std::nullopt is the point at infinity.
struct BoundaryPoint {
    std::optional<Complex> finite;

    static BoundaryPoint infinity() { return {}; }
    static BoundaryPoint at(Complex z) { return {z}; }
    bool is_infinity() const { return !finite.has_value(); }
};

BoundaryPoint apply_boundary(const MoebiusMap& m, const BoundaryPoint& z);
UpperHalfSpacePoint apply_interior(const MoebiusMap& m, const UpperHalfSpacePoint& p);

double hyperbolic_distance(const UpperHalfSpacePoint& p, const UpperHalfSpacePoint& q);

// d((0,1), M(0,1)) without forming the image point.
double basepoint_displacement(const MoebiusMap& m);

Complex trace(const MoebiusMap& m);
IsometryType classify(const MoebiusMap& m, double tol = 1e-9);

// 2 log|lambda| for the eigenvalue with |lambda| >= 1; zero unless loxodromic.
double translation_length(const MoebiusMap& m);
double translation_length_from_trace(Complex tr);

// Busemann cocycle B_z(p, q) = log(|p - z|^2 h(q) / (|q - z|^2 h(p))), so that
// it is positive when q lies deeper in the horoballs centred at z.
double busemann(const BoundaryPoint& z, const UpperHalfSpacePoint& p, const UpperHalfSpacePoint& q);

// Finite-z closed form; throws DomainError for z = infinity.
double busemann_finite(const BoundaryPoint& z, const UpperHalfSpacePoint& p, const UpperHalfSpacePoint& q);

}  // namespace qft
