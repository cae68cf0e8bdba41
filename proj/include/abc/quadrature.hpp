#pragma once

// Thin wrappers around the Boost.Math quadrature engines so the rest of the
// library has one call style and one error convention.

#include <cmath>
#include <cstddef>
#include <utility>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/sinh_sinh.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

namespace abc::quadrature {

struct Result {
    double value = 0.0;
    double error = 0.0;  // absolute error estimate
};

// Adaptive 15-point Gauss-Kronrod on [a, b].
template <class F>
Result gauss_kronrod(F&& f, double a, double b, double rel_tol,
                     unsigned max_depth = 15) {
    double err = 0.0;
    double v = boost::math::quadrature::gauss_kronrod<double, 15>::integrate(
        std::forward<F>(f), a, b, max_depth, rel_tol, &err);
    return {v, err};
}

// Double-exponential rule on a finite interval; handles integrable endpoint
// singularities.
template <class F>
Result tanh_sinh(F&& f, double a, double b, double tol = 1e-13) {
    static thread_local boost::math::quadrature::tanh_sinh<double> rule(15);
    double err = 0.0, l1 = 0.0;
    double v = rule.integrate(std::forward<F>(f), a, b, tol, &err, &l1);
    return {v, std::fabs(err) * l1};
}

// Same rule for integrands taking (x, xc) with xc the signed distance to the
// nearest endpoint (negative near the left one); required when the endpoint
// behaviour would lose all precision if recomputed from x itself.
template <class F>
Result tanh_sinh_xc(F&& f, double a, double b, double tol = 1e-13) {
    static thread_local boost::math::quadrature::tanh_sinh<double> rule(15);
    double err = 0.0, l1 = 0.0;
    double v = rule.integrate(std::forward<F>(f), a, b, tol, &err, &l1);
    return {v, std::fabs(err) * l1};
}

// Double-exponential rule on (-inf, inf).
template <class F>
Result sinh_sinh(F&& f, double tol = 1e-13) {
    static thread_local boost::math::quadrature::sinh_sinh<double> rule(14);
    double err = 0.0, l1 = 0.0;
    double v = rule.integrate(std::forward<F>(f), tol, &err, &l1);
    return {v, std::fabs(err) * l1};
}

// Double-exponential rule on (0, inf) for integrands with exponential decay.
template <class F>
Result exp_sinh(F&& f, double tol = 1e-13) {
    static thread_local boost::math::quadrature::exp_sinh<double> rule(14);
    double err = 0.0, l1 = 0.0;
    double v = rule.integrate(std::forward<F>(f), tol, &err, &l1);
    return {v, std::fabs(err) * l1};
}

}  // namespace abc::quadrature
