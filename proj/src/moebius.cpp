#include "qfthermo/moebius.hpp"

#include <algorithm>
#include <cmath>

#include "qfthermo/error.hpp"

namespace qft {

namespace {

constexpr double kDetTolerance = 1e-12;

UpperHalfSpacePoint point_from(const BoundaryPoint& z) {
    return {z.finite.value_or(Complex{}), 0.0};
}

}  // namespace

const char* to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::domain: return "DomainError";
        case ErrorCode::markov_violation: return "MarkovViolation";
        case ErrorCode::degenerate_lift: return "DegenerateLift";
        case ErrorCode::cap_exceeded: return "CapExceeded";
        case ErrorCode::unparseable: return "Unparseable";
        case ErrorCode::unknown_label: return "UnknownLabel";
        case ErrorCode::non_convergent: return "NonConvergent";
        case ErrorCode::bracket_failure: return "BracketFailure";
        case ErrorCode::empty_census: return "EmptyCensus";
        case ErrorCode::branch_collision: return "BranchCollision";
        case ErrorCode::config: return "ConfigError";
        case ErrorCode::validation: return "ValidationFailure";
    }
    return "Error";
}

void fail(ErrorCode code, const std::string& what) {
    throw Error(code, std::string(to_string(code)) + ": " + what);
}

const char* to_string(IsometryType t) {
    switch (t) {
        case IsometryType::identity: return "identity";
        case IsometryType::parabolic: return "parabolic";
        case IsometryType::elliptic: return "elliptic";
        case IsometryType::loxodromic: return "loxodromic";
    }
    return "?";
}

MoebiusMap::MoebiusMap(Complex a, Complex b, Complex c, Complex d) : a_(a), b_(b), c_(c), d_(d) {
    if (std::abs(det()) < 1e-300) fail(ErrorCode::domain, "singular matrix");
    renormalize();
}

MoebiusMap MoebiusMap::diagonal(Complex lambda) { return {lambda, 0.0, 0.0, 1.0 / lambda}; }

MoebiusMap MoebiusMap::inverse() const { return {Raw{}, d_, -b_, -c_, a_}; }

MoebiusMap MoebiusMap::multiply_raw(const MoebiusMap& m, const MoebiusMap& n) {
    return {Raw{}, m.a_ * n.a_ + m.b_ * n.c_, m.a_ * n.b_ + m.b_ * n.d_,
            m.c_ * n.a_ + m.d_ * n.c_, m.c_ * n.b_ + m.d_ * n.d_};
}

MoebiusMap& MoebiusMap::renormalize() {
    const Complex dt = det();
    // ad - bc carries cancellation error of order eps * (|ad| + |bc|), amplified
    // along long products; a deviation at that level is not measurable and
    // rescaling by it would corrupt a large matrix.
    const double noise = 1e3 * 2.2e-16 * (std::abs(a_ * d_) + std::abs(b_ * c_));
    if (std::abs(dt - 1.0) > std::max(kDetTolerance * 1e-3, noise)) {
        const Complex s = std::sqrt(dt);
        a_ /= s;
        b_ /= s;
        c_ /= s;
        d_ /= s;
    }
    return *this;
}

MoebiusMap compose(const MoebiusMap& m, const MoebiusMap& n) {
    MoebiusMap p = MoebiusMap::multiply_raw(m, n);
    if (std::abs(p.det() - 1.0) > kDetTolerance) p.renormalize();
    return p;
}

MoebiusMap operator*(const MoebiusMap& m, const MoebiusMap& n) { return compose(m, n); }

MoebiusMap inverse(const MoebiusMap& m) { return m.inverse(); }

double distance_mod_sign(const MoebiusMap& m, const MoebiusMap& n) {
    auto gap = [&](double s) {
        return std::max({std::abs(m.a() - s * n.a()), std::abs(m.b() - s * n.b()),
                         std::abs(m.c() - s * n.c()), std::abs(m.d() - s * n.d())});
    };
    return std::min(gap(1.0), gap(-1.0));
}

BoundaryPoint apply_boundary(const MoebiusMap& m, const BoundaryPoint& z) {
    if (z.is_infinity()) {
        if (m.c() == Complex{}) return BoundaryPoint::infinity();
        return BoundaryPoint::at(m.a() / m.c());
    }
    const Complex w = *z.finite;
    const Complex den = m.c() * w + m.d();
    if (den == Complex{}) return BoundaryPoint::infinity();
    return BoundaryPoint::at((m.a() * w + m.b()) / den);
}

UpperHalfSpacePoint apply_interior(const MoebiusMap& m, const UpperHalfSpacePoint& p) {
    // Quaternion form of the Poincare extension: with q = P + h j,
    // M(q) = (a q + b)(c q + d)^{-1}.
    const Complex P = p.horizontal;
    const double h = p.height;
    const Complex cPd = m.c() * P + m.d();
    const double den = std::norm(cPd) + std::norm(m.c()) * h * h;
    const Complex num = (m.a() * P + m.b()) * std::conj(cPd) + m.a() * std::conj(m.c()) * h * h;
    return {num / den, h / den};
}

double hyperbolic_distance(const UpperHalfSpacePoint& p, const UpperHalfSpacePoint& q) {
    const double gap2 = std::norm(p.horizontal - q.horizontal) +
                        (p.height - q.height) * (p.height - q.height);
    // d = 2 asinh(|p - q| / (2 sqrt(h_p h_q))) is stable for small gaps.
    return 2.0 * std::asinh(std::sqrt(gap2) / (2.0 * std::sqrt(p.height * q.height)));
}

double basepoint_displacement(const MoebiusMap& m) {
    // cosh d = (|a|^2 + |b|^2 + |c|^2 + |d|^2) / 2 for the point (0, 1).
    const double s = std::norm(m.a()) + std::norm(m.b()) + std::norm(m.c()) + std::norm(m.d());
    return std::acosh(std::max(1.0, 0.5 * s));
}

Complex trace(const MoebiusMap& m) { return m.a() + m.d(); }

IsometryType classify(const MoebiusMap& m, double tol) {
    const Complex tr = trace(m);
    const Complex tr2 = tr * tr;
    if (std::abs(tr2 - 4.0) <= tol) {
        const bool scalar = std::abs(m.b()) <= tol && std::abs(m.c()) <= tol &&
                            std::abs(m.a() - m.d()) <= tol;
        return scalar ? IsometryType::identity : IsometryType::parabolic;
    }
    if (std::abs(tr2.imag()) <= tol && tr2.real() >= -tol && tr2.real() < 4.0) {
        return IsometryType::elliptic;
    }
    return IsometryType::loxodromic;
}

double translation_length_from_trace(Complex tr) {
    const Complex disc = std::sqrt(tr * tr - 4.0);
    Complex lambda = 0.5 * (tr + disc);
    const Complex other = 0.5 * (tr - disc);
    if (std::abs(other) > std::abs(lambda)) lambda = other;
    const double len = 2.0 * std::log(std::abs(lambda));
    return len > 0.0 ? len : 0.0;
}

double translation_length(const MoebiusMap& m) {
    if (classify(m) != IsometryType::loxodromic) return 0.0;
    return translation_length_from_trace(trace(m));
}

double busemann_finite(const BoundaryPoint& z, const UpperHalfSpacePoint& p, const UpperHalfSpacePoint& q) {
    if (z.is_infinity()) fail(ErrorCode::domain, "finite-z Busemann formula called at infinity");
    const UpperHalfSpacePoint zp = point_from(z);
    auto dist2 = [&](const UpperHalfSpacePoint& x) {
        return std::norm(x.horizontal - zp.horizontal) + x.height * x.height;
    };
    return std::log(dist2(p) * q.height / (dist2(q) * p.height));
}

double busemann(const BoundaryPoint& z, const UpperHalfSpacePoint& p, const UpperHalfSpacePoint& q) {
    if (z.is_infinity()) return std::log(q.height / p.height);
    return busemann_finite(z, p, q);
}

}  // namespace qft
