#pragma once

// Independent verification path: a finite-difference eigenvalue solver for
// the radial Coulomb problem with a (generally non-integer) centrifugal
// strength ell_eff,
//   -(1/2M) u'' + [ ell_eff (ell_eff+1) / (2 M r^2) + xi / r ] u = E u,
// Dirichlet walls at r_min and r_max. On the log-spaced grid the substitution
// u = sqrt(r) w(ln r) turns this into the generalized symmetric problem
// A w = E B w with tridiagonal A and diagonal B, solved by Sturm bisection.
// Nothing here touches the amplitude formulas.

#include <cmath>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include "abc/errors.hpp"
#include "abc/spectrum.hpp"

namespace abc::oracle {

struct RadialGrid {
    double r_min = 1e-4;
    double r_max = 80.0;
    int n_points = 4000;
    bool log_spaced = true;

    RadialGrid() = default;
    RadialGrid(double rmin, double rmax, int n, bool logsp = true)
        : r_min(rmin), r_max(rmax), n_points(n), log_spaced(logsp) {
        if (!(r_min > 0.0) || !(r_min < r_max))
            throw precondition_error("RadialGrid: need 0 < r_min < r_max");
        if (n_points < 100)
            throw precondition_error("RadialGrid: n_points must be >= 100");
    }
};

// Default grid scaled to the Coulomb length a = 1/(M |xi|); resolves the
// r^(ell+1) core and the exponential tail for principal numbers up to ~4.
// The inner wall sits at 1e-8 a: a Dirichlet wall at r_min biases s-state
// energies by ~|u'(0)|^2 r_min / (2M), so 1e-4 a would already cost 1e-4
// relative on the ground state.
inline RadialGrid default_grid(const spectrum::PhysParams& p, int n_points = 4000) {
    double a = 1.0 / (p.mass * std::fabs(p.coulomb));
    return RadialGrid(1e-8 * a, 80.0 * a, n_points, true);
}

struct OracleResult {
    std::vector<double> eigenvalues;      // Richardson-extrapolated, lowest first
    std::vector<double> error_estimates;  // from the two-grid difference
    RadialGrid grid;
    double ell_eff = 0.0;
};

namespace detail {

// Tridiagonal pencil (A, B): A symmetric with constant off-diagonal, B
// diagonal positive. Interior points only.
struct Pencil {
    std::vector<double> diag;  // a_i
    std::vector<double> bdiag; // b_i
    double off = 0.0;          // constant off-diagonal of A
    std::vector<double> r;     // interior radii (for node counting/diagnostics)
};

inline Pencil discretize(const spectrum::PhysParams& p, double ell_eff,
                         const RadialGrid& g) {
    Pencil pc;
    int n = g.n_points;
    double cf = ell_eff * (ell_eff + 1.0) / (2.0 * p.mass);
    pc.diag.resize(n);
    pc.bdiag.resize(n);
    pc.r.resize(n);
    if (g.log_spaced) {
        double y0 = std::log(g.r_min), y1 = std::log(g.r_max);
        double h = (y1 - y0) / (n + 1);
        pc.off = -1.0 / (2.0 * p.mass * h * h);
        for (int i = 0; i < n; ++i) {
            double ri = std::exp(y0 + (i + 1) * h);
            pc.r[i] = ri;
            double v = cf / (ri * ri) + p.coulomb / ri;
            pc.diag[i] = 1.0 / (p.mass * h * h) + 1.0 / (8.0 * p.mass) + v * ri * ri;
            pc.bdiag[i] = ri * ri;
        }
    } else {
        double h = (g.r_max - g.r_min) / (n + 1);
        pc.off = -1.0 / (2.0 * p.mass * h * h);
        for (int i = 0; i < n; ++i) {
            double ri = g.r_min + (i + 1) * h;
            pc.r[i] = ri;
            pc.diag[i] = 1.0 / (p.mass * h * h) + cf / (ri * ri) + p.coulomb / ri;
            pc.bdiag[i] = 1.0;
        }
    }
    return pc;
}

// Number of pencil eigenvalues below lambda (Sturm count via LDL^T pivots).
inline int sturm_count(const Pencil& pc, double lambda) {
    const double pivmin = 1e-300;
    double off_sq = pc.off * pc.off;
    int count = 0;
    double d = 1.0;
    for (std::size_t i = 0; i < pc.diag.size(); ++i) {
        double x = pc.diag[i] - lambda * pc.bdiag[i];
        d = (i == 0) ? x : x - off_sq / d;
        if (std::fabs(d) < pivmin) d = -pivmin;
        if (d < 0.0) ++count;
    }
    return count;
}

inline std::vector<double> lowest_eigenvalues(const Pencil& pc, int count) {
    // Gershgorin bounds for the pencil
    double lo = std::numeric_limits<double>::max();
    double hi = std::numeric_limits<double>::lowest();
    for (std::size_t i = 0; i < pc.diag.size(); ++i) {
        double radius = 2.0 * std::fabs(pc.off);
        lo = std::min(lo, (pc.diag[i] - radius) / pc.bdiag[i]);
        hi = std::max(hi, (pc.diag[i] + radius) / pc.bdiag[i]);
    }
    std::vector<double> out;
    out.reserve(count);
    for (int k = 0; k < count; ++k) {
        double a = lo, b = hi;
        for (int it = 0; it < 200; ++it) {
            double mid = 0.5 * (a + b);
            if (sturm_count(pc, mid) >= k + 1)
                b = mid;
            else
                a = mid;
            if (b - a <= std::fabs(mid) * 1e-14 + 1e-300) break;
        }
        out.push_back(0.5 * (a + b));
    }
    return out;
}

// Solve (A - sigma B) x = b in place; tridiagonal LU with adjacent-row
// pivoting (gtsv style), safe for the nearly singular shifts of inverse
// iteration.
inline void shifted_solve(const Pencil& pc, double sigma,
                          std::vector<double>& x) {
    int n = static_cast<int>(pc.diag.size());
    std::vector<double> dl(n, pc.off), d(n), du(n, 0.0), du2(n, 0.0);
    for (int i = 0; i < n; ++i) d[i] = pc.diag[i] - sigma * pc.bdiag[i];
    for (int i = 0; i + 1 < n; ++i) du[i] = pc.off;

    for (int i = 0; i + 1 < n; ++i) {
        if (std::fabs(d[i]) >= std::fabs(dl[i + 1])) {
            double piv = (d[i] == 0.0) ? 1e-300 : d[i];
            double m = dl[i + 1] / piv;
            d[i + 1] -= m * du[i];
            x[i + 1] -= m * x[i];
        } else {
            double m = d[i] / dl[i + 1];
            double ri_d = dl[i + 1], ri_du = d[i + 1], ri_du2 = du[i + 1];
            double new_d = du[i] - m * ri_du;
            double new_du = -m * ri_du2;
            d[i] = ri_d;
            du[i] = ri_du;
            du2[i] = ri_du2;
            d[i + 1] = new_d;
            du[i + 1] = new_du;
            std::swap(x[i], x[i + 1]);
            x[i + 1] -= m * x[i];
        }
    }
    x[n - 1] /= (d[n - 1] == 0.0 ? 1e-300 : d[n - 1]);
    if (n >= 2)
        x[n - 2] = (x[n - 2] - du[n - 2] * x[n - 1]) /
                   (d[n - 2] == 0.0 ? 1e-300 : d[n - 2]);
    for (int i = n - 3; i >= 0; --i)
        x[i] = (x[i] - du[i] * x[i + 1] - du2[i] * x[i + 2]) /
               (d[i] == 0.0 ? 1e-300 : d[i]);
}

}  // namespace detail

// Lowest `count` eigenvalues with Richardson extrapolation over n_points and
// 2 n_points. Throws if the box cannot hold `count` bound states.
inline OracleResult radial_eigenvalues(const spectrum::PhysParams& p,
                                       double ell_eff, int count,
                                       const RadialGrid& grid) {
    spectrum::require_attractive(p);
    if (!(ell_eff >= 0.0))
        throw precondition_error("radial_eigenvalues: ell_eff must be >= 0");
    if (count < 1)
        throw precondition_error("radial_eigenvalues: count must be >= 1");

    detail::Pencil coarse = detail::discretize(p, ell_eff, grid);
    RadialGrid fine_grid(grid.r_min, grid.r_max, 2 * grid.n_points,
                         grid.log_spaced);
    detail::Pencil fine = detail::discretize(p, ell_eff, fine_grid);

    std::vector<double> ec = detail::lowest_eigenvalues(coarse, count);
    std::vector<double> ef = detail::lowest_eigenvalues(fine, count);

    OracleResult res;
    res.grid = grid;
    res.ell_eff = ell_eff;
    for (int k = 0; k < count; ++k) {
        if (!(ef[k] < 0.0))
            throw accuracy_error(
                "radial_eigenvalues: state " + std::to_string(k) +
                    " is not bound on this box; increase r_max",
                ef[k]);
        // second-order scheme: halving h divides the error by ~4
        res.eigenvalues.push_back((4.0 * ef[k] - ec[k]) / 3.0);
        res.error_estimates.push_back(std::fabs(ef[k] - ec[k]) / 3.0);
    }
    return res;
}

// Eigenfunction u(r) of the k-th state (k = 0 is the ground state) by inverse
// iteration on the fine discretization; returned on the interior nodes
// together with the radii. For the log grid the returned values are u = sqrt(r) w.
inline void radial_eigenfunction(const spectrum::PhysParams& p, double ell_eff,
                                 int k, const RadialGrid& grid,
                                 std::vector<double>& r_out,
                                 std::vector<double>& u_out) {
    detail::Pencil pc = detail::discretize(p, ell_eff, grid);
    std::vector<double> evs = detail::lowest_eigenvalues(pc, k + 1);
    double sigma = evs[k] * (1.0 + 1e-9) - 1e-14;
    std::vector<double> x(pc.diag.size(), 1.0);
    for (int it = 0; it < 3; ++it) {
        // x <- (A - sigma B)^{-1} B x, then normalize
        for (std::size_t i = 0; i < x.size(); ++i) x[i] *= pc.bdiag[i];
        detail::shifted_solve(pc, sigma, x);
        double nrm = 0.0;
        for (double v : x) nrm = std::max(nrm, std::fabs(v));
        for (double& v : x) v /= nrm;
    }
    r_out = pc.r;
    u_out.resize(x.size());
    for (std::size_t i = 0; i < x.size(); ++i)
        u_out[i] = grid.log_spaced ? std::sqrt(pc.r[i]) * x[i] : x[i];
}

// Interior sign changes of an eigenfunction, ignoring entries drowned in
// rounding noise.
inline int count_nodes(const std::vector<double>& u) {
    double amax = 0.0;
    for (double v : u) amax = std::max(amax, std::fabs(v));
    double floor_ = 1e-8 * amax;
    int nodes = 0;
    double prev = 0.0;
    for (double v : u) {
        if (std::fabs(v) < floor_) continue;
        if (prev != 0.0 && ((v > 0) != (prev > 0))) ++nodes;
        prev = v;
    }
    return nodes;
}

struct SpectrumComparison {
    spectrum::QuantumNumbers qn;
    double formula_energy = 0.0;
    double oracle_energy = 0.0;
    double rel_diff = 0.0;
};

// Closed-form energies against the radial solver, one row per
// quantum-number triple. Solves are cached per distinct ell_eff.
inline std::vector<SpectrumComparison> compare_spectrum(
    const spectrum::PhysParams& p,
    const std::vector<spectrum::QuantumNumbers>& qns, const RadialGrid& grid) {
    std::map<double, OracleResult> cache;
    std::map<double, int> need;
    for (const auto& qn : qns) {
        double ell = spectrum::effective_ell(qn.m, p.flux, qn.n);
        need[ell] = std::max(need[ell], qn.nprime + 1);
    }
    for (const auto& [ell, cnt] : need)
        cache.emplace(ell, radial_eigenvalues(p, ell, cnt, grid));

    std::vector<SpectrumComparison> rows;
    rows.reserve(qns.size());
    for (const auto& qn : qns) {
        double ell = spectrum::effective_ell(qn.m, p.flux, qn.n);
        SpectrumComparison row;
        row.qn = qn;
        row.formula_energy = spectrum::energy(p, qn);
        row.oracle_energy = cache.at(ell).eigenvalues.at(qn.nprime);
        row.rel_diff = std::fabs(row.formula_energy - row.oracle_energy) /
                       std::fabs(row.formula_energy);
        rows.push_back(row);
    }
    return rows;
}

}  // namespace abc::oracle
