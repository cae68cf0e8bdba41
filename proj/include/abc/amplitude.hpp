#pragma once

// Fixed-energy amplitude (x_b | x_a)_E of the flux-line-plus-Coulomb system,
// evaluated two independent ways:
//
//  * green_q_integral  - numerical q-integration of the Bessel-product
//    representation (prefactor -i M^2 w / pi, one integral per m channel);
//  * green_partial_wave - the closed sum over angular channels n with a
//    Whittaker W*M radial kernel per channel.
//
// Plus the identity-check operations certifying the reduction chain (Bessel
// product expansion, Legendre integral formula, fiber-angle reduction) and a
// pole scanner. The two evaluators share nothing beyond the special-function
// kernel; their agreement is the central acceptance test.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <string>
#include <utility>
#include <vector>

#include "abc/errors.hpp"
#include "abc/kstransform.hpp"
#include "abc/quadrature.hpp"
#include "abc/specfun.hpp"
#include "abc/spectrum.hpp"

namespace abc::amplitude {

using ks::AuxAngle;
using ks::SphericalPoint;
using spectrum::PhysParams;

// Bound-state-regime energy with its pseudotime frequency w = sqrt(-E/2M).
struct FixedEnergy {
    double energy = -1.0;
    double omega = 0.0;

    static FixedEnergy from_energy(const PhysParams& p, double e) {
        if (!(e < 0.0))
            throw precondition_error("FixedEnergy: requires E < 0");
        FixedEnergy fe;
        fe.energy = e;
        fe.omega = std::sqrt(-e / (2.0 * p.mass));
        return fe;
    }
};

struct EndpointPair {
    SphericalPoint a, b;
};

struct TruncationSpec {
    int m_max = 12;
    int n_max = 40;
    double quad_rel_tol = 1e-10;
    double quad_abs_tol = 1e-14;

    void validate() const {
        if (m_max < 0 || n_max < 0)
            throw precondition_error("TruncationSpec: cutoffs must be >= 0");
        if (!(quad_rel_tol > 0.0) || !(quad_abs_tol > 0.0))
            throw precondition_error("TruncationSpec: tolerances must be > 0");
    }
};

struct AmplitudeValue {
    std::complex<double> value{0.0, 0.0};
    double err_estimate = 0.0;
};

namespace detail {

inline void require_off_axis(const SphericalPoint& p, const char* which) {
    if (!(p.theta > 0.0 && p.theta < M_PI))
        throw precondition_error(std::string("endpoint ") + which +
                                 " on flux axis (theta in {0, pi})");
}

// Reject energies inside the relative guard band around any level.
inline void require_off_pole(const PhysParams& p, double e, double guard) {
    if (guard <= 0.0 || !(p.coulomb < 0.0)) return;
    double p_of_e = std::sqrt(-p.mass * p.coulomb * p.coulomb / (2.0 * e));
    double max_pr = p_of_e + 2.0;
    for (const auto& lvl : spectrum::enumerate_levels(p, max_pr)) {
        if (std::fabs(e - lvl.energy) < guard * std::fabs(lvl.energy))
            throw precondition_error(
                "energy within guard band of level E = " +
                std::to_string(lvl.energy) + " (principal " +
                std::to_string(lvl.principal) + ")");
    }
}

inline double log_sinh(double q) {
    // ln sinh q, stable for q from 1e-300 to large
    if (q > 36.0) return q - M_LN2;
    return std::log(std::sinh(q));
}

// ln of the angular channel normalization
//   N^2 = n! (n+s+1/2) Gamma(s+1/2)^2 4^s / (pi Gamma(n+2s+1)).
inline double log_norm_sq(int n, double s) {
    return specfun::gamma_ln(n + 1.0) + std::log(n + s + 0.5) +
           2.0 * specfun::gamma_ln(s + 0.5) + 2.0 * s * M_LN2 -
           std::log(M_PI) - specfun::gamma_ln(n + 2.0 * s + 1.0);
}

struct ChannelGeometry {
    double s = 0.0;          // |m + alpha|
    double arg_cos = 0.0;    // Z cos(th_a/2) cos(th_b/2)
    double arg_sin = 0.0;    // Z sin(th_a/2) sin(th_b/2)
    double rho = 0.0;        // 2 M w (r_a + r_b)
    double xi_over_w = 0.0;
};

inline ChannelGeometry channel_geometry(const PhysParams& p,
                                        const EndpointPair& pts,
                                        const FixedEnergy& fe, int m) {
    ChannelGeometry g;
    g.s = std::fabs(m + p.flux);
    double z = 4.0 * p.mass * fe.omega * std::sqrt(pts.a.r * pts.b.r);
    g.arg_cos = z * std::cos(0.5 * pts.a.theta) * std::cos(0.5 * pts.b.theta);
    g.arg_sin = z * std::sin(0.5 * pts.a.theta) * std::sin(0.5 * pts.b.theta);
    g.rho = 2.0 * p.mass * fe.omega * (pts.a.r + pts.b.r);
    g.xi_over_w = p.coulomb / fe.omega;
    return g;
}

// ln of the (positive) q-integrand of one m channel; -inf when it underflows.
inline double log_q_integrand(const ChannelGeometry& g, double q) {
    double ls = log_sinh(q);
    double inv_sinh = std::exp(-ls);
    specfun::SpecialValue ic =
        specfun::bessel_i_scaled(g.s, g.arg_cos * inv_sinh);
    specfun::SpecialValue is =
        specfun::bessel_i_scaled(g.s, g.arg_sin * inv_sinh);
    double vc = ic.value.real(), vs = is.value.real();
    if (vc <= 0.0 || vs <= 0.0)
        return -std::numeric_limits<double>::infinity();
    double coth = (q > 36.0) ? 1.0 : std::cosh(q) * std::exp(-ls);
    double expo = -g.xi_over_w * q - g.rho * coth - 2.0 * ls +
                  ic.scale_exponent + is.scale_exponent;
    return expo + std::log(vc) + std::log(vs);
}

}  // namespace detail

// Integrand of the q-representation for the m-th flux channel. Exponentially
// scaled Bessel factors keep it finite down to q ~ 1e-12, where the combined
// exponent drives it to zero.
inline double q_integrand(const PhysParams& p, const EndpointPair& pts,
                          const FixedEnergy& fe, int m, double q) {
    if (!(q > 0.0)) throw precondition_error("q_integrand: q must be > 0");
    double lg = detail::log_q_integrand(detail::channel_geometry(p, pts, fe, m), q);
    return (lg < -745.0) ? 0.0 : std::exp(lg);
}

namespace detail {

// One m-channel integral over q in (0, inf): adaptive Gauss-Kronrod on the
// t = tanh(q/2) image of (0, Q], plus the analytic large-q tail
//   integrand ~ e^{-c q} (g0 + g1 e^{-2q} + g2 e^{-4q}),  c = 2 + 2s - |xi|/w,
// fitted at three abscissas and integrated in closed form.
inline quadrature::Result channel_q_integral(const ChannelGeometry& g,
                                             const TruncationSpec& trunc) {
    const double q_split = 7.0;
    double c = 2.0 + 2.0 * g.s + g.xi_over_w;  // xi < 0: decay rate of the tail

    auto f = [&](double t) {
        double q = 2.0 * std::atanh(t);
        double lg = log_q_integrand(g, q);
        if (lg < -745.0) return 0.0;
        return std::exp(lg) * 2.0 / (1.0 - t * t);
    };
    quadrature::Result finite = quadrature::gauss_kronrod(
        f, 0.0, std::tanh(0.5 * q_split), trunc.quad_rel_tol, 15);

    // quadratic fit of F(q) = integrand * e^{c q} in powers of e^{-2q}
    const double dq = 0.7;
    std::array<double, 3> qs{q_split, q_split + dq, q_split + 2.0 * dq};
    std::array<double, 3> eps{}, fval{};
    for (int j = 0; j < 3; ++j) {
        eps[j] = std::exp(-2.0 * qs[j]);
        double lg = log_q_integrand(g, qs[j]);
        fval[j] = (lg < -700.0) ? 0.0 : std::exp(lg + c * qs[j]);
    }
    // Newton divided differences, then expand about eps = 0
    double f01 = (fval[1] - fval[0]) / (eps[1] - eps[0]);
    double f12 = (fval[2] - fval[1]) / (eps[2] - eps[1]);
    double f012 = (f12 - f01) / (eps[2] - eps[0]);
    double g2 = f012;
    double g1 = f01 - f012 * (eps[0] + eps[1]);
    double g0 = fval[0] - eps[0] * f01 + eps[0] * eps[1] * f012;
    double tail = g0 * std::exp(-c * q_split) / c +
                  g1 * std::exp(-(c + 2.0) * q_split) / (c + 2.0) +
                  g2 * std::exp(-(c + 4.0) * q_split) / (c + 4.0);
    double tail_err = std::fabs(g2) * std::exp(-(c + 6.0) * q_split) /
                          (c + 6.0) +
                      1e-15 * std::fabs(tail);

    return {finite.value + tail, finite.error + tail_err};
}

}  // namespace detail

// Fixed-energy amplitude by numerical q-integration,
//   (-i M^2 w / pi) Sum_m e^{i m (phi_b - phi_a)} Int_0^inf dq ...
// The representation converges only for E below the lowest channel of the
// m window (|xi|/w < 2 + 2 min_m |m+alpha|); other energies are rejected.
inline AmplitudeValue green_q_integral(const PhysParams& p,
                                       const EndpointPair& pts,
                                       const FixedEnergy& fe,
                                       const TruncationSpec& trunc) {
    trunc.validate();
    detail::require_off_axis(pts.a, "a");
    detail::require_off_axis(pts.b, "b");
    detail::require_off_pole(p, fe.energy, 1e-6);

    double s_min = std::numeric_limits<double>::max();
    for (int m = -trunc.m_max; m <= trunc.m_max; ++m)
        s_min = std::min(s_min, std::fabs(m + p.flux));
    double margin = 2.0 + 2.0 * s_min + p.coulomb / fe.omega;
    if (!(margin > 0.05))
        throw precondition_error(
            "q-integral representation divergent (or marginal) at this "
            "energy: 2 + 2 min|m+alpha| - |xi|/w = " +
            std::to_string(margin) + "; lower E or use green_partial_wave");

    double dphi = pts.b.phi - pts.a.phi;
    std::complex<double> sum{0.0, 0.0};
    double quad_err = 0.0;
    double last_shell = 0.0;
    for (int m = 0; m <= trunc.m_max; ++m) {
        // +-m pair summed together for cancellation control
        std::complex<double> shell{0.0, 0.0};
        quadrature::Result rp =
            detail::channel_q_integral(detail::channel_geometry(p, pts, fe, m),
                                       trunc);
        shell += std::polar(1.0, m * dphi) * rp.value;
        quad_err += rp.error;
        if (m > 0) {
            quadrature::Result rm = detail::channel_q_integral(
                detail::channel_geometry(p, pts, fe, -m), trunc);
            shell += std::polar(1.0, -m * dphi) * rm.value;
            quad_err += rm.error;
        }
        sum += shell;
        last_shell = std::abs(shell);
    }

    double pref = p.mass * p.mass * fe.omega / M_PI;
    AmplitudeValue out;
    out.value = std::complex<double>(0.0, -1.0) * pref * sum;
    out.err_estimate = pref * (quad_err + last_shell);
    double budget = std::max(trunc.quad_abs_tol,
                             trunc.quad_rel_tol * std::abs(out.value));
    if (pref * quad_err > 100.0 * budget)
        throw accuracy_error(
            "green_q_integral: quadrature failed to reach the requested "
            "tolerance",
            std::abs(out.value));
    return out;
}

namespace detail {

// Closed partial-wave form. The guard parameter is the relative pole guard
// band; pole_scan calls with guard = 0 to walk up to the poles.
inline AmplitudeValue green_partial_wave_impl(const PhysParams& p,
                                              const EndpointPair& pts,
                                              const FixedEnergy& fe,
                                              const TruncationSpec& trunc,
                                              double guard) {
    trunc.validate();
    require_off_axis(pts.a, "a");
    require_off_axis(pts.b, "b");
    require_off_pole(p, fe.energy, guard);

    const double w = fe.omega;
    const double kappa = -p.coulomb / (2.0 * w);
    const double z_lt = 4.0 * p.mass * w * std::min(pts.a.r, pts.b.r);
    const double z_gt = 4.0 * p.mass * w * std::max(pts.a.r, pts.b.r);
    const double xa = std::cos(pts.a.theta), xb = std::cos(pts.b.theta);
    const double lsin =
        std::log(std::sin(pts.a.theta)) + std::log(std::sin(pts.b.theta));
    const double dphi = pts.b.phi - pts.a.phi;

    std::complex<double> tot{0.0, 0.0};
    double last_m_shell = 0.0, last_n_shell = 0.0;
    for (int m = -trunc.m_max; m <= trunc.m_max; ++m) {
        double s = std::fabs(m + p.flux);
        double lam = s + 0.5;
        // rolling Gegenbauer recurrence per endpoint
        double ca_m1 = 0.0, ca_0 = 1.0, cb_m1 = 0.0, cb_0 = 1.0;
        std::complex<double> msum{0.0, 0.0};
        int small_streak = 0;
        for (int n = 0; n <= trunc.n_max; ++n) {
            if (n > 0) {
                double k = n - 1.0;
                double ca_p = (n == 1)
                                  ? 2.0 * lam * xa
                                  : (2.0 * (k + lam) * xa * ca_0 -
                                     (k + 2.0 * lam - 1.0) * ca_m1) / (k + 1.0);
                double cb_p = (n == 1)
                                  ? 2.0 * lam * xb
                                  : (2.0 * (k + lam) * xb * cb_0 -
                                     (k + 2.0 * lam - 1.0) * cb_m1) / (k + 1.0);
                ca_m1 = ca_0;
                ca_0 = ca_p;
                cb_m1 = cb_0;
                cb_0 = cb_p;
            }
            double mu = s + n + 0.5;
            double a_w = 1.0 + s + n + p.coulomb / (2.0 * w);  // Gamma numerator arg
            if (specfun::is_nonpositive_integer(a_w))
                throw precondition_error(
                    "green_partial_wave: energy exactly on a level");

            specfun::SpecialValue ww = specfun::whittaker_w(kappa, mu, z_gt);
            // Whittaker M of negative argument on the principal branch; its
            // phase e^{i pi (mu+1/2)} and the expansion prefactor combine to
            // the accumulated per-term phase applied here.
            specfun::SpecialValue wm =
                specfun::whittaker_m(p.coulomb / (2.0 * w), mu, -z_lt);
            std::complex<double> phase = std::polar(1.0, -M_PI * (mu + 0.5));

            double log_mag = log_norm_sq(n, s) + s * lsin +
                             specfun::gamma_ln(a_w) -
                             specfun::gamma_ln(2.0 + 2.0 * s + 2.0 * n) +
                             ww.scale_exponent + wm.scale_exponent;
            double coeff = specfun::gamma_sign(a_w) * ca_0 * cb_0;
            std::complex<double> term = phase * wm.value * ww.value.real() *
                                        coeff * std::exp(log_mag);
            msum += term;
            last_n_shell = std::abs(term);
            if (last_n_shell < 1e-17 * std::abs(msum)) {
                if (++small_streak >= 2) break;
            } else {
                small_streak = 0;
            }
        }
        std::complex<double> shell = std::polar(1.0, m * dphi) * msum;
        tot += shell;
        last_m_shell = std::abs(shell);
    }

    double pref = 1.0 / (4.0 * M_PI * w * pts.a.r * pts.b.r);
    AmplitudeValue out;
    out.value = std::complex<double>(0.0, -1.0) * pref * tot;
    out.err_estimate =
        pref * (last_m_shell + last_n_shell) + 1e-12 * std::abs(out.value);
    return out;
}

}  // namespace detail

// Fixed-energy amplitude from the closed channel sum: per (m, n) one
// Gamma(1+s+n+xi/2w) * W_{ -xi/2w, mu }(4 M w r_>) * M(-4 M w r_<) radial
// kernel times the normalized angular channel product, mu = (1+2s+2n)/2.
inline AmplitudeValue green_partial_wave(const PhysParams& p,
                                         const EndpointPair& pts,
                                         const FixedEnergy& fe,
                                         const TruncationSpec& trunc) {
    return detail::green_partial_wave_impl(p, pts, fe, trunc, 1e-6);
}

struct BesselProductCheck {
    double lhs = 0.0;
    std::complex<double> rhs{0.0, 0.0};
    double rel_err = 0.0;
};

// Direct product I_s(X u) I_s(X v), u = cos(th_a/2)cos(th_b/2),
// v = sin(th_a/2)sin(th_b/2), against its channel expansion
//   e^{-i pi (s+1/2)} (4/X) Sum_n (-1)^n N^2 (sin th_a sin th_b)^s
//       C_n(cos th_a) C_n(cos th_b) J_{1+2s+2n}(i X),
// with J of imaginary argument rewritten through I.
inline BesselProductCheck bessel_product_identity_check(
    double arg, specfun::RealOrder alpha_m, double theta_a, double theta_b,
    int n_max) {
    if (!(arg > 0.0))
        throw precondition_error("bessel_product_identity_check: arg must be > 0");
    if (!(theta_a > 0.0 && theta_a < M_PI && theta_b > 0.0 && theta_b < M_PI))
        throw precondition_error(
            "bessel_product_identity_check: angles must lie in (0, pi)");
    double s = alpha_m.value;
    double u = std::cos(0.5 * theta_a) * std::cos(0.5 * theta_b);
    double v = std::sin(0.5 * theta_a) * std::sin(0.5 * theta_b);

    specfun::SpecialValue iu = specfun::bessel_i_scaled(s, arg * u);
    specfun::SpecialValue iv = specfun::bessel_i_scaled(s, arg * v);
    double lhs = iu.value.real() * iv.value.real() *
                 std::exp(iu.scale_exponent + iv.scale_exponent);

    double lsin = std::log(std::sin(theta_a)) + std::log(std::sin(theta_b));
    double xa = std::cos(theta_a), xb = std::cos(theta_b);
    std::complex<double> acc{0.0, 0.0};
    for (int n = 0; n <= n_max; ++n) {
        double order = 1.0 + 2.0 * s + 2.0 * n;
        specfun::SpecialValue in = specfun::bessel_i_scaled(order, arg);
        // J_nu(i X) = e^{i pi nu / 2} I_nu(X)
        std::complex<double> j_im =
            std::polar(1.0, 0.5 * M_PI * order) * in.value.real() *
            std::exp(in.scale_exponent);
        double wgt = std::exp(detail::log_norm_sq(n, s) + s * lsin) *
                     specfun::gegenbauer_c(n, s + 0.5, xa) *
                     specfun::gegenbauer_c(n, s + 0.5, xb);
        acc += ((n % 2 == 0) ? 1.0 : -1.0) * wgt * j_im;
    }
    std::complex<double> rhs =
        std::polar(1.0, -M_PI * (s + 0.5)) * (4.0 / arg) * acc;

    BesselProductCheck out;
    out.lhs = lhs;
    out.rhs = rhs;
    out.rel_err = std::abs(lhs - rhs) / std::max(std::fabs(lhs), 1e-300);
    return out;
}

struct LegendreIntegralCheck {
    double lhs = 0.0;
    double rhs = 0.0;
    double rel_err = 0.0;
};

// Adaptive quadrature of Int_-1^1 (1-x^2)^{lambda-1} P_nu^mu(x) dx against
// the closed Gamma ratio. Vanishing Gamma-denominator configurations (parity
// zeros) are exact zeros on the closed side. The integrand takes the
// endpoint distance as a second argument so the singular weight keeps full
// precision at the innermost quadrature nodes.
inline LegendreIntegralCheck legendre_integral_identity_check(double lambda,
                                                              double mu,
                                                              double nu) {
    if (!(lambda - 0.5 * mu > 0.0) || !(lambda + 0.5 * mu > 0.0))
        throw precondition_error(
            "legendre_integral_identity_check: integral diverges "
            "(need lambda > |mu|/2)");

    auto f = [&](double /*x*/, double xc) {
        double d = std::fabs(xc);  // distance to the nearest endpoint
        if (d <= 0.0) return 0.0;
        double weight = std::pow(d * (2.0 - d), lambda - 1.0);
        double p = (xc < 0.0)
                       ? specfun::assoc_legendre_from_minus_one(nu, mu, 0.5 * d)
                       : specfun::assoc_legendre_from_plus_one(nu, mu, 0.5 * d);
        return weight * p;
    };
    quadrature::Result lq = quadrature::tanh_sinh_xc(f, -1.0, 1.0, 1e-12);
    auto af = [&](double x, double xc) { return std::fabs(f(x, xc)); };
    double l1 = quadrature::tanh_sinh_xc(af, -1.0, 1.0, 1e-8).value;

    double lg = std::log(M_PI) + mu * M_LN2 +
                specfun::gamma_ln(lambda + 0.5 * mu) +
                specfun::gamma_ln(lambda - 0.5 * mu);
    int sgn = specfun::gamma_sign(lambda + 0.5 * mu) *
              specfun::gamma_sign(lambda - 0.5 * mu);
    double rg = specfun::recip_gamma(lambda + 0.5 * nu + 0.5) *
                specfun::recip_gamma(lambda - 0.5 * nu) *
                specfun::recip_gamma(0.5 * nu - 0.5 * mu + 1.0) *
                specfun::recip_gamma(0.5 - 0.5 * mu - 0.5 * nu);
    double rhs = sgn * std::exp(lg) * rg;

    LegendreIntegralCheck out;
    out.lhs = lq.value;
    out.rhs = rhs;
    out.rel_err = std::fabs(out.lhs - out.rhs) /
                  std::max({std::fabs(out.lhs), std::fabs(out.rhs), l1, 1e-300});
    return out;
}

// Fiber-angle reduction: integrating the double flux sum of the oscillator
// form over gamma_a in [0, 4 pi) collapses it to the single m sum (the
// half-angle phases are orthogonal over the double cover). Returns the
// relative deviation; the Bessel arguments are evaluated at a fixed
// representative pseudotime q = 1.
inline double oscillator_sum_reduction_check(
    const PhysParams& p, const std::pair<SphericalPoint, AuxAngle>& pt_a,
    const std::pair<SphericalPoint, AuxAngle>& pt_b, const FixedEnergy& fe,
    int m_max) {
    const double q_rep = 1.0;
    const double sh = std::sinh(q_rep);
    ks::DoublePolar da = ks::double_polar_of(pt_a.first, pt_a.second);
    ks::DoublePolar db = ks::double_polar_of(pt_b.first, pt_b.second);
    double x1 = 4.0 * p.mass * fe.omega * da.rho1 * db.rho1 / sh;
    double x2 = 4.0 * p.mass * fe.omega * da.rho2 * db.rho2 / sh;
    double expo = -2.0 * p.mass * fe.omega *
                  (da.rho1 * da.rho1 + db.rho1 * db.rho1 + da.rho2 * da.rho2 +
                   db.rho2 * db.rho2) *
                  std::cosh(q_rep) / sh;

    std::vector<double> b1(2 * m_max + 1), b2(2 * m_max + 1);
    for (int m = -m_max; m <= m_max; ++m) {
        double s = std::fabs(m + p.flux);
        b1[m + m_max] = specfun::bessel_i_scaled(s, x1).real_unscaled();
        b2[m + m_max] = specfun::bessel_i_scaled(s, x2).real_unscaled();
    }

    double dphi = pt_b.first.phi - pt_a.first.phi;
    double gb = pt_b.second.gamma;

    // trapezoid over the 4 pi fiber; the integrand is a finite Fourier sum,
    // so enough nodes make the rule exact
    int n_nodes = 8 * m_max + 16;
    std::complex<double> integral{0.0, 0.0};
    for (int j = 0; j < n_nodes; ++j) {
        double ga = 4.0 * M_PI * j / n_nodes;
        std::complex<double> fsum{0.0, 0.0};
        for (int m1 = -m_max; m1 <= m_max; ++m1)
            for (int m2 = -m_max; m2 <= m_max; ++m2) {
                double ph = 0.5 * m1 * (dphi + gb - ga) +
                            0.5 * m2 * (dphi - gb + ga);
                fsum += std::polar(b1[m1 + m_max] * b2[m2 + m_max], ph);
            }
        integral += fsum;
    }
    integral *= std::exp(expo) / static_cast<double>(n_nodes);

    std::complex<double> direct{0.0, 0.0};
    for (int m = -m_max; m <= m_max; ++m)
        direct += std::polar(b1[m + m_max] * b2[m + m_max], m * dphi);
    direct *= std::exp(expo);

    return std::abs(integral - direct) / std::max(std::abs(direct), 1e-300);
}

struct PoleHit {
    double e_star = 0.0;
    double growth = 0.0;
};

// Scan |green_partial_wave| on an energy grid, flag local maxima that tower
// over their neighborhood, and refine each by golden-section shrinking of
// 1/|G| to a bracket below 1e-8 |E*|.
inline std::vector<PoleHit> pole_scan(const PhysParams& p,
                                      const EndpointPair& pts,
                                      const std::vector<double>& e_grid,
                                      const TruncationSpec& trunc) {
    if (e_grid.size() < 5)
        throw precondition_error("pole_scan: need at least 5 grid energies");
    for (std::size_t i = 0; i < e_grid.size(); ++i) {
        if (!(e_grid[i] < 0.0))
            throw precondition_error("pole_scan: grid energies must be < 0");
        if (i > 0 && !(e_grid[i] > e_grid[i - 1]))
            throw precondition_error("pole_scan: grid must be strictly increasing");
    }

    auto mag = [&](double e) {
        FixedEnergy fe = FixedEnergy::from_energy(p, e);
        return std::abs(
            detail::green_partial_wave_impl(p, pts, fe, trunc, 0.0).value);
    };

    std::vector<double> g(e_grid.size());
    for (std::size_t i = 0; i < e_grid.size(); ++i) g[i] = mag(e_grid[i]);

    std::vector<PoleHit> hits;
    for (std::size_t i = 1; i + 1 < e_grid.size(); ++i) {
        if (!(g[i] > g[i - 1] && g[i] > g[i + 1])) continue;
        double baseline = std::numeric_limits<double>::max();
        for (std::size_t j = (i >= 5 ? i - 5 : 0);
             j < std::min(e_grid.size(), i + 6); ++j)
            if (j != i) baseline = std::min(baseline, g[j]);
        // candidate if it towers moderately; certified by the growth seen
        // after refinement (a true pole blows past 1e3, a smooth bump cannot)
        if (g[i] < 5.0 * baseline) continue;

        // golden-section on 1/|G|
        const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
        double a = e_grid[i - 1], b = e_grid[i + 1];
        double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
        double f1 = 1.0 / mag(x1), f2 = 1.0 / mag(x2);
        while (b - a > 1e-8 * std::fabs(0.5 * (a + b))) {
            if (f1 < f2) {
                b = x2;
                x2 = x1;
                f2 = f1;
                x1 = b - gr * (b - a);
                f1 = 1.0 / mag(x1);
            } else {
                a = x1;
                x1 = x2;
                f1 = f2;
                x2 = a + gr * (b - a);
                f2 = 1.0 / mag(x2);
            }
        }
        double e_star = 0.5 * (a + b);
        double growth = mag(e_star) / baseline;
        if (growth >= 1e3) hits.push_back({e_star, growth});
    }
    return hits;
}

}  // namespace abc::amplitude
