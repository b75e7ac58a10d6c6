#pragma once

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>

namespace resolab {

struct QuadratureError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Adaptive Gauss-Kronrod on a finite interval. `tol` is the relative
// termination target; an absolute floor avoids endless refinement of
// integrals that are essentially zero.
template <class F>
double integrate(F&& f, double a, double b, double tol = 1e-12,
                 double abs_floor = 1e-300) {
    if (a == b) return 0.0;
    double err = 0.0, l1 = 0.0;
    double v = boost::math::quadrature::gauss_kronrod<double, 15>::integrate(
        f, a, b, 15, tol, &err, &l1);
    if (!std::isfinite(v))
        throw QuadratureError("non-finite quadrature result on [" +
                              std::to_string(a) + ", " + std::to_string(b) + "]");
    if (err > 1e3 * std::max({tol * l1, tol, abs_floor}))
        throw QuadratureError("quadrature failed to converge on [" +
                              std::to_string(a) + ", " + std::to_string(b) +
                              "], error estimate " + std::to_string(err));
    return v;
}

template <class F>
std::complex<double> integrate_complex(F&& f, double a, double b,
                                       double tol = 1e-12) {
    double re = integrate([&](double t) { return std::real(f(t)); }, a, b, tol);
    double im = integrate([&](double t) { return std::imag(f(t)); }, a, b, tol);
    return {re, im};
}

// Integral over [a, infinity) of a decaying integrand: fixed-width panels,
// stopping once two consecutive panels are negligible against the total.
template <class F>
double integrate_tail(F&& f, double a, double tol = 1e-12,
                      double panel_width = 5.0, double x_max = 1e4) {
    double sum = 0.0;
    int quiet = 0;
    double x = a;
    while (x < x_max) {
        double xe = x + panel_width;
        double p = integrate(f, x, xe, tol);
        sum += p;
        if (std::abs(p) < tol * std::max(1.0, std::abs(sum)))
            ++quiet;
        else
            quiet = 0;
        if (quiet >= 2) return sum;
        x = xe;
        panel_width *= 1.4;
    }
    return sum;
}

}  // namespace resolab
