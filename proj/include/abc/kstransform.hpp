#pragma once

// Kustaanheimo-Stiefel geometry layer: the quadratic map u -> x, its matrix
// and Jacobian, the flux-line one-form pulled back to u-space, and the
// double-polar / spherical parametrizations with the auxiliary fiber angle.

#include <array>
#include <cmath>

#include "abc/errors.hpp"

namespace abc::ks {

// Point in u-space (units length^(1/2)).
struct KSPoint {
    double u1 = 0.0, u2 = 0.0, u3 = 0.0, u4 = 0.0;

    double norm_sq() const { return u1 * u1 + u2 * u2 + u3 * u3 + u4 * u4; }
};

struct Cartesian3 {
    double x = 0.0, y = 0.0, z = 0.0;

    double norm() const { return std::sqrt(x * x + y * y + z * z); }
};

struct SphericalPoint {
    double r = 0.0;      // > 0
    double theta = 0.0;  // [0, pi]
    double phi = 0.0;    // [0, 2 pi)

    SphericalPoint() = default;
    SphericalPoint(double r_, double theta_, double phi_)
        : r(r_), theta(theta_), phi(phi_) {
        if (!(r > 0.0))
            throw precondition_error("SphericalPoint: r must be > 0");
        if (!(theta >= 0.0 && theta <= M_PI))
            throw precondition_error("SphericalPoint: theta outside [0, pi]");
        if (!(phi >= 0.0 && phi < 2.0 * M_PI))
            throw precondition_error("SphericalPoint: phi outside [0, 2 pi)");
    }

    Cartesian3 to_cartesian() const {
        return {r * std::sin(theta) * std::cos(phi),
                r * std::sin(theta) * std::sin(phi), r * std::cos(theta)};
    }
};

// (rho1, theta1) x (rho2, theta2) split of u-space into two planes.
struct DoublePolar {
    double rho1 = 0.0, rho2 = 0.0;  // >= 0, units length^(1/2)
    double theta1 = 0.0, theta2 = 0.0;
};

// Fiber angle of the KS map; the u-space circle closes only after 4 pi
// because of the half angles in the parametrization.
struct AuxAngle {
    double gamma = 0.0;

    AuxAngle() = default;
    AuxAngle(double g) : gamma(g) {
        if (!(gamma >= 0.0 && gamma < 4.0 * M_PI))
            throw precondition_error("AuxAngle: gamma outside [0, 4 pi)");
    }
};

using Matrix4 = std::array<std::array<double, 4>, 4>;

// The matrix A(u); rows are mutually orthogonal with norm |u|^2, and
// A(u) u has an identically vanishing fourth component.
inline Matrix4 ks_matrix(const KSPoint& u) {
    return {{{u.u3, u.u4, u.u1, u.u2},
             {u.u4, -u.u3, -u.u2, u.u1},
             {u.u1, u.u2, -u.u3, -u.u4},
             {u.u2, -u.u1, u.u4, -u.u3}}};
}

// x = A(u) u restricted to the first three rows; |x| = |u|^2.
inline Cartesian3 ks_map(const KSPoint& u) {
    return {2.0 * (u.u1 * u.u3 + u.u2 * u.u4),
            2.0 * (u.u1 * u.u4 - u.u2 * u.u3),
            u.u1 * u.u1 + u.u2 * u.u2 - u.u3 * u.u3 - u.u4 * u.u4};
}

// Differential of the extended map (x, y, z, eta): d = 2 A(u) du.
inline std::array<double, 4> ks_differential(const KSPoint& u,
                                             const std::array<double, 4>& du) {
    Matrix4 a = ks_matrix(u);
    std::array<double, 4> out{};
    for (int i = 0; i < 4; ++i)
        out[i] = 2.0 * (a[i][0] * du[0] + a[i][1] * du[1] + a[i][2] * du[2] +
                        a[i][3] * du[3]);
    return out;
}

// Measure factor |d(x, y, z, eta)/du| = 2^4 r^2 with r = |u|^2. The signed
// determinant of the map is -16 r^2 (the row convention of the matrix makes
// it orientation-reversing); integration only ever uses the modulus.
inline double ks_jacobian(const KSPoint& u) {
    double r = u.norm_sq();
    if (!(r > 0.0))
        throw domain_error("ks_jacobian: degenerate point u = 0");
    return 16.0 * r * r;
}

// Pullback of the flux one-form (alpha/e)(y dx - x dy)/(x^2+y^2) evaluated on
// (u, du); separates into the two planes. alpha/e is passed as one coupling.
inline double ab_oneform_pullback(const KSPoint& u,
                                  const std::array<double, 4>& du,
                                  double alpha = 1.0) {
    double p = u.u1 * u.u1 + u.u2 * u.u2;
    double q = u.u3 * u.u3 + u.u4 * u.u4;
    if (!(p > 0.0) || !(q > 0.0))
        throw precondition_error(
            "ab_oneform_pullback: point on the flux axis (vanishing plane norm)");
    return alpha * ((u.u1 * du[1] - u.u2 * du[0]) / p +
                    (u.u4 * du[2] - u.u3 * du[3]) / q);
}

// Same one-form evaluated downstairs through the KS map; used as the
// identity-check partner of ab_oneform_pullback.
inline double ab_oneform_cartesian(const KSPoint& u,
                                   const std::array<double, 4>& du,
                                   double alpha = 1.0) {
    Cartesian3 x = ks_map(u);
    std::array<double, 4> dx = ks_differential(u, du);
    double rho_sq = x.x * x.x + x.y * x.y;
    if (!(rho_sq > 0.0))
        throw precondition_error("ab_oneform_cartesian: image on the flux axis");
    return alpha * (x.y * dx[0] - x.x * dx[1]) / rho_sq;
}

// (rho1, theta1, rho2, theta2) of a spherical point with fiber angle gamma.
inline DoublePolar double_polar_of(const SphericalPoint& p, const AuxAngle& g) {
    double sr = std::sqrt(p.r);
    return {sr * std::cos(0.5 * p.theta), sr * std::sin(0.5 * p.theta),
            0.5 * (p.phi + g.gamma + M_PI), 0.5 * (p.phi - g.gamma)};
}

inline KSPoint ks_of_double_polar(const DoublePolar& d) {
    return {d.rho1 * std::sin(d.theta1), d.rho1 * std::cos(d.theta1),
            d.rho2 * std::cos(d.theta2), d.rho2 * std::sin(d.theta2)};
}

// u-space preimage of a spherical point on the gamma fiber; the ks_map image
// is independent of gamma.
inline KSPoint spherical_to_ks(const SphericalPoint& p, const AuxAngle& g) {
    return ks_of_double_polar(double_polar_of(p, g));
}

}  // namespace abc::ks
