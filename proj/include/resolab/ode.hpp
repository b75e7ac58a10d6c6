#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>

namespace resolab {

struct OdeError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline double ode_norm(double y) { return std::abs(y); }
inline double ode_norm(const std::complex<double>& y) { return std::abs(y); }
template <class Derived>
double ode_norm(const Eigen::MatrixBase<Derived>& y) {
    return y.norm();
}

// Adaptive embedded Runge-Kutta (Cash-Karp 4(5)) on a generic state.
// `post` is called after each accepted step with (x, y&) and may rescale
// the state (renormalization) or record it; it must preserve solutions of
// the ODE up to a scalar factor if rescaling.
template <class State, class RHS, class PostStep>
void rk45(RHS&& f, double x0, double x1, State& y, double rtol, double atol,
          PostStep&& post) {
    static constexpr double a2 = 1.0 / 5, a3 = 3.0 / 10, a4 = 3.0 / 5, a5 = 1.0,
                            a6 = 7.0 / 8;
    static constexpr double b21 = 1.0 / 5;
    static constexpr double b31 = 3.0 / 40, b32 = 9.0 / 40;
    static constexpr double b41 = 3.0 / 10, b42 = -9.0 / 10, b43 = 6.0 / 5;
    static constexpr double b51 = -11.0 / 54, b52 = 5.0 / 2, b53 = -70.0 / 27,
                            b54 = 35.0 / 27;
    static constexpr double b61 = 1631.0 / 55296, b62 = 175.0 / 512,
                            b63 = 575.0 / 13824, b64 = 44275.0 / 110592,
                            b65 = 253.0 / 4096;
    static constexpr double c1 = 37.0 / 378, c3 = 250.0 / 621, c4 = 125.0 / 594,
                            c6 = 512.0 / 1771;
    static constexpr double d1 = c1 - 2825.0 / 27648, d3 = c3 - 18575.0 / 48384,
                            d4 = c4 - 13525.0 / 55296, d5 = -277.0 / 14336,
                            d6 = c6 - 1.0 / 4;

    const double dir = (x1 >= x0) ? 1.0 : -1.0;
    double x = x0;
    double span = std::abs(x1 - x0);
    if (span == 0.0) return;
    double h = dir * span / 100.0;
    const double h_min = span * 1e-15;
    long steps = 0;
    const long max_steps = 50'000'000;

    while (dir * (x1 - x) > 0) {
        if (dir * (x + h - x1) > 0) h = x1 - x;
        State k1 = f(x, y);
        State k2 = f(x + a2 * h, State(y + h * (b21 * k1)));
        State k3 = f(x + a3 * h, State(y + h * (b31 * k1 + b32 * k2)));
        State k4 = f(x + a4 * h, State(y + h * (b41 * k1 + b42 * k2 + b43 * k3)));
        State k5 = f(x + a5 * h,
                     State(y + h * (b51 * k1 + b52 * k2 + b53 * k3 + b54 * k4)));
        State k6 = f(x + a6 * h, State(y + h * (b61 * k1 + b62 * k2 + b63 * k3 +
                                                b64 * k4 + b65 * k5)));
        State y5 = y + h * (c1 * k1 + c3 * k3 + c4 * k4 + c6 * k6);
        State err_v = h * (d1 * k1 + d3 * k3 + d4 * k4 + d5 * k5 + d6 * k6);
        double sc = atol + rtol * std::max(ode_norm(y), ode_norm(y5));
        double err = ode_norm(err_v) / sc;
        if (err <= 1.0) {
            x += h;
            y = y5;
            post(x, y);
        }
        double fac = 0.9 * std::pow(std::max(err, 1e-16), -0.2);
        fac = std::min(5.0, std::max(0.1, fac));
        h *= fac;
        if (std::abs(h) < h_min)
            throw OdeError("step size underflow at x = " + std::to_string(x));
        if (++steps > max_steps)
            throw OdeError("step budget exhausted at x = " + std::to_string(x));
    }
}

template <class State, class RHS>
void rk45(RHS&& f, double x0, double x1, State& y, double rtol, double atol) {
    rk45(f, x0, x1, y, rtol, atol, [](double, State&) {});
}

}  // namespace resolab
