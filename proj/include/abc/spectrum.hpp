#pragma once

// Bound-state spectrum of the flux-line-plus-Coulomb system:
//   E(m, n, n') = -M xi^2 / (2 (1 + |m+alpha| + n + n')^2),
// level enumeration with degeneracy grouping, and the effective angular
// momentum bridge used by the independent radial solver.

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <vector>

#include "abc/errors.hpp"

namespace abc::spectrum {

// Physical constants: mass M, Coulomb strength xi (attractive for xi < 0),
// dimensionless flux alpha. Natural units, hbar = 1.
struct PhysParams {
    double mass = 1.0;
    double coulomb = -1.0;
    double flux = 0.0;

    PhysParams() = default;
    PhysParams(double mass_, double coulomb_, double flux_)
        : mass(mass_), coulomb(coulomb_), flux(flux_) {
        if (!(mass > 0.0) || !std::isfinite(mass))
            throw precondition_error("PhysParams: mass must be finite and > 0");
        if (!std::isfinite(coulomb) || !std::isfinite(flux))
            throw precondition_error("PhysParams: non-finite parameter");
    }
};

struct QuantumNumbers {
    int m = 0;
    int n = 0;       // >= 0
    int nprime = 0;  // >= 0

    QuantumNumbers() = default;
    QuantumNumbers(int m_, int n_, int nprime_) : m(m_), n(n_), nprime(nprime_) {
        if (n < 0 || nprime < 0)
            throw precondition_error("QuantumNumbers: n, n' must be >= 0");
    }
};

// One degenerate energy level.
struct Level {
    double energy = 0.0;
    double principal = 0.0;  // 1 + |m+alpha| + n + n'
    std::vector<QuantumNumbers> members;

    int degeneracy() const { return static_cast<int>(members.size()); }
};

inline double principal_number(const QuantumNumbers& qn, double alpha) {
    return 1.0 + std::fabs(qn.m + alpha) + qn.n + qn.nprime;
}

inline void require_attractive(const PhysParams& p) {
    if (!(p.coulomb < 0.0))
        throw precondition_error(
            "no bound states for repulsive coupling (coulomb must be < 0)");
}

inline double energy(const PhysParams& p, const QuantumNumbers& qn) {
    require_attractive(p);
    double pr = principal_number(qn, p.flux);
    return -p.mass * p.coulomb * p.coulomb / (2.0 * pr * pr);
}

// Effective angular momentum of the (m, n) channel; feeding it into a radial
// Coulomb solver with radial quantum number n' reproduces energy().
inline double effective_ell(int m, double alpha, int n) {
    if (n < 0) throw precondition_error("effective_ell: n must be >= 0");
    return n + std::fabs(m + alpha);
}

// All levels with principal number <= max_principal, grouped by energy equal
// to 1e-12 relative. Members are ordered (m, n, n') for reproducible output.
inline std::vector<Level> enumerate_levels(const PhysParams& p,
                                           double max_principal) {
    require_attractive(p);
    if (!(max_principal >= 1.0))
        throw precondition_error("enumerate_levels: max_principal must be >= 1");

    std::vector<QuantumNumbers> all;
    // |m + alpha| <= max_principal - 1 bounds the m window
    double span = max_principal - 1.0;
    int m_lo = static_cast<int>(std::ceil(-span - p.flux - 1.0));
    int m_hi = static_cast<int>(std::floor(span - p.flux + 1.0));
    for (int m = m_lo; m <= m_hi; ++m) {
        double s = std::fabs(m + p.flux);
        if (s > span) continue;
        int budget = static_cast<int>(std::floor(span - s + 1e-12));
        for (int n = 0; n <= budget; ++n)
            for (int np = 0; np + n <= budget; ++np)
                all.emplace_back(m, n, np);
    }
    std::sort(all.begin(), all.end(), [&](const QuantumNumbers& a,
                                          const QuantumNumbers& b) {
        double pa = principal_number(a, p.flux), pb = principal_number(b, p.flux);
        if (pa != pb) return pa < pb;
        if (a.m != b.m) return a.m < b.m;
        if (a.n != b.n) return a.n < b.n;
        return a.nprime < b.nprime;
    });

    std::vector<Level> levels;
    for (const auto& qn : all) {
        double e = energy(p, qn);
        if (!levels.empty() &&
            std::fabs(e - levels.back().energy) <=
                1e-12 * std::fabs(levels.back().energy)) {
            levels.back().members.push_back(qn);
        } else {
            Level lvl;
            lvl.energy = e;
            lvl.principal = principal_number(qn, p.flux);
            lvl.members.push_back(qn);
            levels.push_back(std::move(lvl));
        }
    }
    return levels;
}

}  // namespace abc::spectrum
