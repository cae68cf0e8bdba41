// Amplitude evaluators and identity checks. The [frozen] amplitude values
// come from tests/gen_reference.py (independent 50-digit evaluation of both
// routes); the equivalence of the two C++ routes at tighter truncation is
// exercised here and at full scale in the acceptance suite.

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <random>

#include "abc/amplitude.hpp"

using namespace abc::amplitude;
using abc::spectrum::PhysParams;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

const PhysParams kParamsA(1.0, -1.0, 0.3);
const EndpointPair kPointsA{abc::ks::SphericalPoint(1.0, 1.0, 0.4),
                            abc::ks::SphericalPoint(2.0, 1.9, 2.5)};
const double kEnergyA = -0.35;

const PhysParams kParamsB(2.5, -0.7, 0.5);
const EndpointPair kPointsB{abc::ks::SphericalPoint(0.8, 2.2, 2.0),
                            abc::ks::SphericalPoint(1.7, 0.9, 0.7)};

TruncationSpec trunc(int m, int n, double tol = 1e-10) {
    TruncationSpec t;
    t.m_max = m;
    t.n_max = n;
    t.quad_rel_tol = tol;
    return t;
}

}  // namespace

TEST_CASE("q_integrand pinned values") {
    // M=1, xi=-1, alpha=0.3, E=-0.3, r_a=1, r_b=2, theta=pi/2 both, m=0
    PhysParams p(1.0, -1.0, 0.3);
    EndpointPair pts{abc::ks::SphericalPoint(1.0, M_PI_2, 0.0),
                     abc::ks::SphericalPoint(2.0, M_PI_2, 0.0)};
    FixedEnergy fe = FixedEnergy::from_energy(p, -0.3);
    CHECK_THAT(q_integrand(p, pts, fe, 0, 0.5),
               WithinRel(0.48451323278726031, 1e-12));  // [frozen]
    CHECK_THAT(q_integrand(p, pts, fe, 0, 1.0),
               WithinRel(0.49114747573319551, 1e-12));  // [frozen]
    CHECK_THAT(q_integrand(p, pts, fe, 0, 2.0),
               WithinRel(0.49353225879419848, 1e-12));  // [frozen]

    // index symmetry: equal integrands for equal |m+alpha|
    PhysParams ph(1.0, -1.0, 0.5);
    FixedEnergy fh = FixedEnergy::from_energy(ph, -0.4);
    for (double q : {0.3, 1.7}) {
        CHECK_THAT(q_integrand(ph, pts, fh, 0, q),
                   WithinRel(q_integrand(ph, pts, fh, -1, q), 1e-13));
        CHECK_THAT(q_integrand(ph, pts, fh, 2, q),
                   WithinRel(q_integrand(ph, pts, fh, -3, q), 1e-13));
    }

    // vanishes at both ends of the q axis (suppression ~ e^{-c/q} at q -> 0)
    CHECK(q_integrand(p, pts, fe, 0, 1e-10) == 0.0);
    CHECK(q_integrand(p, pts, fe, 0, 1e-3) < 1e-45);
    CHECK(q_integrand(p, pts, fe, 1, 60.0) < 1e-10);
    CHECK_THROWS_AS(q_integrand(p, pts, fe, 0, 0.0), abc::precondition_error);
}

TEST_CASE("green_q_integral pinned against independent evaluation") {
    FixedEnergy fe = FixedEnergy::from_energy(kParamsA, kEnergyA);
    AmplitudeValue g = green_q_integral(kParamsA, kPointsA, fe, trunc(10, 40));
    std::complex<double> want(-0.022367763330014182, -0.21444248073659115);  // [frozen]
    CHECK(std::abs(g.value - want) / std::abs(want) < 2e-9);
    CHECK(g.err_estimate < 1e-6 * std::abs(g.value));
}

TEST_CASE("green_partial_wave pinned against independent evaluation") {
    FixedEnergy fe = FixedEnergy::from_energy(kParamsA, kEnergyA);
    AmplitudeValue g = green_partial_wave(kParamsA, kPointsA, fe, trunc(10, 36));
    std::complex<double> want(-0.022367763330014884, -0.21444248073659233);  // [frozen]
    CHECK(std::abs(g.value - want) / std::abs(want) < 2e-9);

    FixedEnergy feb = FixedEnergy::from_energy(kParamsB, -0.75);
    AmplitudeValue gb = green_partial_wave(kParamsB, kPointsB, feb, trunc(10, 36));
    std::complex<double> wantb(0.016607600845622306, -0.02184623270134799);  // [frozen]
    CHECK(std::abs(gb.value - wantb) / std::abs(wantb) < 2e-9);
}

TEST_CASE("evaluator equivalence on two generic configurations") {
    FixedEnergy fea = FixedEnergy::from_energy(kParamsA, kEnergyA);
    AmplitudeValue qa = green_q_integral(kParamsA, kPointsA, fea, trunc(12, 40));
    AmplitudeValue pa = green_partial_wave(kParamsA, kPointsA, fea, trunc(12, 40));
    CHECK(std::abs(qa.value - pa.value) / std::abs(pa.value) < 1e-6);

    FixedEnergy feb = FixedEnergy::from_energy(kParamsB, -0.75);
    AmplitudeValue qb = green_q_integral(kParamsB, kPointsB, feb, trunc(12, 40));
    AmplitudeValue pb = green_partial_wave(kParamsB, kPointsB, feb, trunc(12, 40));
    CHECK(std::abs(qb.value - pb.value) / std::abs(pb.value) < 1e-6);
}

TEST_CASE("phases collapse for aligned azimuths at zero flux") {
    PhysParams p(1.0, -1.0, 0.0);
    EndpointPair pts{abc::ks::SphericalPoint(1.0, 1.2, 0.7),
                     abc::ks::SphericalPoint(2.2, 1.8, 0.7)};
    FixedEnergy fe = FixedEnergy::from_energy(p, -0.62);
    AmplitudeValue g = green_q_integral(p, pts, fe, trunc(8, 30));
    // -i times a real integral
    CHECK(std::fabs(g.value.real()) < 1e-10 * std::fabs(g.value.imag()));
    CHECK(g.value.imag() < 0.0);
}

TEST_CASE("endpoint exchange preserves the modulus") {
    FixedEnergy fe = FixedEnergy::from_energy(kParamsA, kEnergyA);
    EndpointPair swapped{kPointsA.b, kPointsA.a};
    AmplitudeValue g1 = green_partial_wave(kParamsA, kPointsA, fe, trunc(9, 32));
    AmplitudeValue g2 = green_partial_wave(kParamsA, swapped, fe, trunc(9, 32));
    CHECK_THAT(std::abs(g1.value), WithinRel(std::abs(g2.value), 1e-10));
    // exchange conjugates the phase structure: G(b,a) = -conj(G(a,b))
    CHECK_THAT(g2.value.real(), WithinRel(-g1.value.real(), 1e-9));
    CHECK_THAT(g2.value.imag(), WithinRel(g1.value.imag(), 1e-9));
}

TEST_CASE("m window covariance under alpha -> alpha + 1") {
    // relabeling m -> m-1 absorbs the flux shift up to the gauge phase
    // e^{-i(phi_b - phi_a)}; the modulus and the dephased value are invariant
    PhysParams pa(1.0, -1.0, 0.3), pb(1.0, -1.0, 1.3);
    EndpointPair pts = kPointsA;
    double dphi = pts.b.phi - pts.a.phi;
    FixedEnergy fe = FixedEnergy::from_energy(pa, -0.4);
    AmplitudeValue ga = green_q_integral(pa, pts, fe, trunc(13, 30, 1e-12));
    AmplitudeValue gb = green_q_integral(pb, pts, fe, trunc(14, 30, 1e-12));
    std::complex<double> gauge = std::polar(1.0, -dphi);
    CHECK(std::abs(gb.value - gauge * ga.value) / std::abs(ga.value) < 1e-8);
}

TEST_CASE("m truncation error bound") {
    FixedEnergy fe = FixedEnergy::from_energy(kParamsA, kEnergyA);
    AmplitudeValue lo = green_q_integral(kParamsA, kPointsA, fe, trunc(6, 30));
    AmplitudeValue hi = green_q_integral(kParamsA, kPointsA, fe, trunc(8, 30));
    CHECK(std::abs(lo.value - hi.value) <= lo.err_estimate);
}

TEST_CASE("m tail decays at least geometrically") {
    FixedEnergy fe = FixedEnergy::from_energy(kParamsA, kEnergyA);
    auto at = [&](int m) {
        return green_q_integral(kParamsA, kPointsA, fe, trunc(m, 30)).value;
    };
    std::complex<double> g4 = at(4), g6 = at(6), g8 = at(8), g10 = at(10);
    double d1 = std::abs(g6 - g4), d2 = std::abs(g8 - g6),
           d3 = std::abs(g10 - g8);
    CHECK(d2 < 0.7 * d1);
    CHECK(d3 < 0.7 * d2);
}

TEST_CASE("hydrogen residue anchors the absolute normalization") {
    // alpha = 0: the amplitude is i Sum_k psi_k psi_k / (E - E_k), so the
    // residue at the ground level E0 = -1/2 is
    // +i psi_100(x_a) psi_100(x_b) = (i/pi) e^{-(r_a+r_b)} for M=1, xi=-1.
    PhysParams p(1.0, -1.0, 0.0);
    EndpointPair pts{abc::ks::SphericalPoint(1.0, 1.3, 0.2),
                     abc::ks::SphericalPoint(1.6, 2.0, 1.1)};
    double e0 = -0.5, d = 5e-4;
    auto g_at = [&](double e) {
        return green_partial_wave(p, pts, FixedEnergy::from_energy(p, e),
                                  trunc(8, 30))
            .value;
    };
    std::complex<double> rp = (d) * g_at(e0 + d);
    std::complex<double> rm = (-d) * g_at(e0 - d);
    std::complex<double> residue = 0.5 * (rp + rm);
    std::complex<double> expect(0.0, std::exp(-(1.0 + 1.6)) / M_PI);
    CHECK(std::abs(residue - expect) / std::abs(expect) < 1e-4);
}

TEST_CASE("Bessel product identity") {
    // theta_a = theta_b = pi/2, s = 0, small argument: both sides I_0(x/2)^2
    auto c0 = bessel_product_identity_check(0.1, 0.0, M_PI_2, M_PI_2, 30);
    double i0 = abc::specfun::bessel_i_scaled(0.0, 0.05).real_unscaled();
    CHECK_THAT(c0.lhs, WithinRel(i0 * i0, 1e-12));
    CHECK(c0.rel_err < 1e-10);

    // half-integer order has elementary factors
    double x = 2.0, ta = 1.1, tb = 2.0;
    double u = std::cos(ta / 2) * std::cos(tb / 2);
    double v = std::sin(ta / 2) * std::sin(tb / 2);
    auto ch = bessel_product_identity_check(x, 0.5, ta, tb, 30);
    double closed = 2.0 / (M_PI * x * std::sqrt(u * v)) * std::sinh(x * u) *
                    std::sinh(x * v);
    CHECK_THAT(ch.lhs, WithinRel(closed, 1e-11));
    CHECK(ch.rel_err < 1e-10);

    // random panel
    std::mt19937_64 rng(424242);
    std::uniform_real_distribution<double> uarg(0.3, 18.0), us(0.0, 3.0),
        uth(0.3, M_PI - 0.3);
    for (int i = 0; i < 20; ++i) {
        double arg = uarg(rng), s = us(rng), a = uth(rng), b = uth(rng);
        auto c = bessel_product_identity_check(arg, s, a, b, 30);
        CAPTURE(arg, s, a, b);
        CHECK(c.rel_err <= 1e-8);
        CHECK(std::fabs(c.rhs.imag()) < 1e-10 * std::fabs(c.rhs.real()));
    }
}

TEST_CASE("Legendre integral identity") {
    auto c1 = legendre_integral_identity_check(1.0, 0.0, 0.0);
    CHECK_THAT(c1.lhs, WithinRel(2.0, 1e-12));
    CHECK_THAT(c1.rhs, WithinRel(2.0, 1e-14));

    auto c2 = legendre_integral_identity_check(1.0, 0.0, 1.0);  // odd integrand
    CHECK(c2.rhs == 0.0);
    CHECK(c2.rel_err < 1e-12);

    auto c3 = legendre_integral_identity_check(1.4, 0.6, 1.7);
    CHECK(c3.rel_err <= 1e-9);

    std::mt19937_64 rng(777);
    std::uniform_real_distribution<double> ul(0.7, 2.0), um(-1.0, 1.2),
        un(0.0, 3.0);
    int done = 0;
    while (done < 20) {
        double lam = ul(rng), mu = um(rng), nu = un(rng);
        if (!(lam - 0.5 * mu > 0.1) || !(lam + 0.5 * mu > 0.1)) continue;
        auto c = legendre_integral_identity_check(lam, mu, nu);
        CAPTURE(lam, mu, nu);
        CHECK(c.rel_err <= 1e-9);
        ++done;
    }

    CHECK_THROWS_AS(legendre_integral_identity_check(0.3, 1.0, 1.0),
                    abc::precondition_error);
}

TEST_CASE("fiber angle reduction to the diagonal flux sum") {
    PhysParams p(1.0, -1.0, 0.3);
    FixedEnergy fe = FixedEnergy::from_energy(p, -0.4);
    std::pair<abc::ks::SphericalPoint, abc::ks::AuxAngle> a{
        abc::ks::SphericalPoint(1.0, 1.1, 0.5), abc::ks::AuxAngle(1.7)};
    std::pair<abc::ks::SphericalPoint, abc::ks::AuxAngle> b{
        abc::ks::SphericalPoint(2.0, 2.0, 3.9), abc::ks::AuxAngle(8.2)};
    CHECK(oscillator_sum_reduction_check(p, a, b, fe, 0) < 1e-13);
    CHECK(oscillator_sum_reduction_check(p, a, b, fe, 4) < 1e-8);
}

TEST_CASE("pole scan finds the ground level for alpha = 0.3") {
    PhysParams p(1.0, -1.0, 0.3);
    EndpointPair pts{abc::ks::SphericalPoint(1.0, 1.2, 0.3),
                     abc::ks::SphericalPoint(2.1, 1.7, 1.4)};
    double e1 = -1.0 / (2.0 * 1.3 * 1.3);
    std::vector<double> grid;
    for (int i = 0; i <= 30; ++i) grid.push_back(-0.36 + 0.004 * i);
    auto hits = pole_scan(p, pts, grid, trunc(6, 25));
    REQUIRE(hits.size() == 1);
    CHECK_THAT(hits[0].e_star, WithinRel(e1, 1e-6));
    CHECK(hits[0].growth >= 1e3);

    // grid strictly between levels: empty
    std::vector<double> quiet;
    for (int i = 0; i <= 10; ++i) quiet.push_back(-0.27 + 0.005 * i);
    CHECK(pole_scan(p, pts, quiet, trunc(6, 25)).empty());
}

TEST_CASE("preconditions surface as errors") {
    FixedEnergy fe = FixedEnergy::from_energy(kParamsA, kEnergyA);
    EndpointPair on_axis{abc::ks::SphericalPoint(1.0, 0.0, 0.0), kPointsA.b};
    CHECK_THROWS_AS(green_q_integral(kParamsA, on_axis, fe, trunc(6, 20)),
                    abc::precondition_error);
    CHECK_THROWS_AS(green_partial_wave(kParamsA, on_axis, fe, trunc(6, 20)),
                    abc::precondition_error);

    // divergent q representation: E above the slowest channel threshold
    FixedEnergy shallow = FixedEnergy::from_energy(kParamsA, -0.2);
    CHECK_THROWS_AS(green_q_integral(kParamsA, kPointsA, shallow, trunc(6, 20)),
                    abc::precondition_error);
    // the closed form continues analytically to the same energy
    CHECK_NOTHROW(green_partial_wave(kParamsA, kPointsA, shallow, trunc(6, 20)));

    // near-pole guard
    PhysParams ph(1.0, -1.0, 0.0);
    FixedEnergy near_pole =
        FixedEnergy::from_energy(ph, -0.5 * (1.0 + 1e-8));
    EndpointPair pts{abc::ks::SphericalPoint(1.0, 1.0, 0.0),
                     abc::ks::SphericalPoint(2.0, 2.0, 1.0)};
    CHECK_THROWS_AS(green_partial_wave(ph, pts, near_pole, trunc(6, 20)),
                    abc::precondition_error);

    CHECK_THROWS_AS(FixedEnergy::from_energy(kParamsA, 0.1),
                    abc::precondition_error);
    TruncationSpec bad;
    bad.quad_rel_tol = 0.0;
    CHECK_THROWS_AS(green_q_integral(kParamsA, kPointsA, fe, bad),
                    abc::precondition_error);
}
