// Shared independent oracles for the test suites.
#pragma once

#include <cmath>
#include <complex>
#include <optional>
#include <vector>

namespace oracles {

using cplx = std::complex<double>;

// Transcendental matching condition for the unit square barrier (height 1,
// width 1, h = 1): outgoing-wave defect at the right edge of the barrier for
// the Jost solution launched as e^{-i lambda x} from the left. Zeros are the
// resonances. Derived from plane-wave matching only; independent of the
// library's ODE solver.
inline cplx barrier_defect(cplx lambda) {
    cplx kp = std::sqrt(lambda * lambda - 1.0);
    cplx A = 0.5 * (1.0 + lambda / kp);
    cplx B = 0.5 * (1.0 - lambda / kp);
    cplx i(0.0, 1.0);
    cplx u = A * std::exp(-i * kp) + B * std::exp(i * kp);
    cplx du = -i * kp * A * std::exp(-i * kp) + i * kp * B * std::exp(i * kp);
    return du - i * lambda * u;
}

inline std::optional<cplx> barrier_newton(cplx z0) {
    cplx z = z0;
    for (int it = 0; it < 80; ++it) {
        double step = 1e-7 * (1.0 + std::abs(z));
        cplx w = barrier_defect(z);
        cplx dw = (barrier_defect(z + step) - barrier_defect(z - step)) /
                  (2.0 * step);
        if (dw == cplx(0.0)) return std::nullopt;
        cplx d = w / dw;
        z -= d;
        if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
            return std::nullopt;
        if (std::abs(d) < 1e-13 * (1.0 + std::abs(z))) return z;
    }
    return std::nullopt;
}

// All barrier resonances inside [re_lo, re_hi] x [im_lo, im_hi], found by
// Newton from a grid of starts and deduplicated.
inline std::vector<cplx> barrier_resonances(double re_lo, double re_hi,
                                            double im_lo, double im_hi) {
    std::vector<cplx> roots;
    for (double re = re_lo; re <= re_hi; re += 0.5) {
        for (double im = im_lo; im <= im_hi; im += 0.5) {
            auto z = barrier_newton({re, im});
            if (!z) continue;
            if (z->real() < re_lo - 1e-9 || z->real() > re_hi + 1e-9 ||
                z->imag() < im_lo - 1e-9 || z->imag() > im_hi + 1e-9)
                continue;
            bool dup = false;
            for (auto& r : roots)
                if (std::abs(r - *z) < 1e-6) dup = true;
            if (!dup) roots.push_back(*z);
        }
    }
    std::sort(roots.begin(), roots.end(), [](cplx a, cplx b) {
        return a.real() < b.real();
    });
    return roots;
}

}  // namespace oracles
