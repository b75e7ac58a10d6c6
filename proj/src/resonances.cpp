#include "resolab/resonances.hpp"

#include "resolab/ode.hpp"
#include "resolab/quadrature.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <deque>
#include <numbers>
#include <optional>

namespace resolab {

namespace {

constexpr double kPi = std::numbers::pi;
using cplx = std::complex<double>;

// Propagate (u, u') across [x_left, x_right] with u = outgoing plane wave at
// the left end, rescaling by the running norm to tame exponential growth.
Eigen::Vector2cd propagate_jost(const SpectralProblem& p, cplx lambda) {
    const cplx ik = cplx(0.0, 1.0) * lambda / p.h;
    Eigen::Vector2cd y;
    y << 1.0, -ik;  // u_- = e^{-i lambda (x - x_left)/h} at x_left
    const double h2 = p.h * p.h;
    auto rhs = [&](double x, const Eigen::Vector2cd& s) {
        Eigen::Vector2cd d;
        d << s[1], (p.field(x) - lambda * lambda) / h2 * s[0];
        return d;
    };
    auto renorm = [](double, Eigen::Vector2cd& s) {
        double n = s.norm();
        if (n > 1e6 || (n < 1e-6 && n > 0.0)) s /= n;
    };
    // Split at reduced-smoothness breakpoints (square barrier edges).
    std::vector<double> xs{p.x_left};
    for (double b : p.field.breakpoints_1d())
        if (b > p.x_left && b < p.x_right) xs.push_back(b);
    xs.push_back(p.x_right);
    std::sort(xs.begin(), xs.end());
    for (size_t i = 0; i + 1 < xs.size(); ++i)
        rk45(rhs, xs[i], xs[i + 1], y, p.ode_tol, 1e-300, renorm);
    double n = y.norm();
    if (n > 0.0) y /= n;
    return y;
}

std::optional<cplx> newton_refine(const SpectralProblem& p, cplx lambda0,
                                  double* residual) {
    cplx lam = lambda0;
    for (int it = 0; it < 50; ++it) {
        double step = 1e-6 * (1.0 + std::abs(lam));
        cplx w = wronskian(p, lam);
        cplx wp = wronskian(p, lam + step);
        cplx wm = wronskian(p, lam - step);
        cplx dw = (wp - wm) / (2.0 * step);
        if (dw == cplx(0.0)) return std::nullopt;
        cplx delta = w / dw;
        lam -= delta;
        if (!std::isfinite(lam.real()) || !std::isfinite(lam.imag()))
            return std::nullopt;
        if (std::abs(delta) < 1e-12 * (1.0 + std::abs(lam))) {
            if (residual) *residual = std::abs(wronskian(p, lam));
            return lam;
        }
    }
    return std::nullopt;
}

// Total change of arg W~ along the straight segment [za, zb], refining until
// adjacent samples differ by less than pi/2.
double edge_phase(const SpectralProblem& p, cplx za, cplx zb, cplx wa, cplx wb,
                  int depth) {
    // a zero essentially on the segment flips the phase by ~pi and silently
    // corrupts the count; bail out so the caller can nudge the rectangle
    if (std::abs(wa) < 1e-10 * std::abs(wb) ||
        std::abs(wb) < 1e-10 * std::abs(wa))
        throw ResonanceError("zero of W~ on contour");
    double d = std::arg(wb / wa);
    if (std::abs(d) < 0.5 * kPi) {
        // still possible to be off by 2 pi k; one midpoint consistency check
        if (depth > 28) return d;
        cplx zm = 0.5 * (za + zb);
        cplx wm = wronskian(p, zm);
        if (std::abs(wm) < 1e-280)
            throw ResonanceError("zero of W~ on contour");
        double d1 = std::arg(wm / wa), d2 = std::arg(wb / wm);
        if (std::abs(d1) < 0.5 * kPi && std::abs(d2) < 0.5 * kPi &&
            std::abs(d1 + d2 - d) < 1e-9)
            return d;
        return edge_phase(p, za, zm, wa, wm, depth + 1) +
               edge_phase(p, zm, zb, wm, wb, depth + 1);
    }
    if (depth > 44)
        throw ResonanceError("contour too coarse: phase jump exceeds pi "
                             "after maximal refinement");
    cplx zm = 0.5 * (za + zb);
    cplx wm = wronskian(p, zm);
    if (std::abs(wm) < 1e-280) throw ResonanceError("zero of W~ on contour");
    return edge_phase(p, za, zm, wa, wm, depth + 1) +
           edge_phase(p, zm, zb, wm, wb, depth + 1);
}

int winding_number(const SpectralProblem& p, const Rect& r) {
    std::array<cplx, 4> corners = {cplx(r.re_lo, r.im_lo), cplx(r.re_hi, r.im_lo),
                                   cplx(r.re_hi, r.im_hi), cplx(r.re_lo, r.im_hi)};
    std::array<cplx, 4> w;
    for (int i = 0; i < 4; ++i) {
        w[i] = wronskian(p, corners[i]);
        if (std::abs(w[i]) < 1e-280)
            throw ResonanceError("zero of W~ at contour corner");
    }
    // arg W~ drifts like (x_right - x_left)/h per unit of lambda; sample
    // finely enough up front that a whole turn can never alias away between
    // two adjacent samples, then let edge_phase refine near zeros.
    double rate = (p.x_right - p.x_left) / p.h;
    double max_step = 0.4 / std::max(rate, 1e-3);
    double total = 0.0;
    for (int i = 0; i < 4; ++i) {
        cplx za = corners[i], zb = corners[(i + 1) % 4];
        int parts = std::max(
            1, static_cast<int>(std::ceil(std::abs(zb - za) / max_step)));
        cplx zprev = za;
        cplx wprev = w[i];
        for (int j = 1; j <= parts; ++j) {
            cplx zc = (j == parts)
                          ? zb
                          : za + (zb - za) * (static_cast<double>(j) / parts);
            cplx wc = (j == parts) ? w[(i + 1) % 4] : wronskian(p, zc);
            if (std::abs(wc) < 1e-280)
                throw ResonanceError("zero of W~ on contour");
            total += edge_phase(p, zprev, zc, wprev, wc, 0);
            zprev = zc;
            wprev = wc;
        }
    }
    return static_cast<int>(std::llround(total / (2.0 * kPi)));
}

int winding_with_retry(const SpectralProblem& p, Rect r) {
    // A zero (numerically) on the boundary: nudge the rectangle slightly.
    for (int attempt = 0;; ++attempt) {
        try {
            return winding_number(p, r);
        } catch (const ResonanceError&) {
            if (attempt >= 3) throw;
            double dre = 3e-3 * std::max(r.width(), 1e-6);
            double dim = 3e-3 * std::max(r.height(), 1e-6);
            r.re_lo -= dre;
            r.re_hi += dre;
            r.im_lo -= dim;
            r.im_hi = std::min(r.im_hi + dim, -1e-12);
        }
    }
}

}  // namespace

SpectralProblem::SpectralProblem(PotentialField f, double h_in,
                                 double ode_tol_in, double trunc_tol)
    : field(std::move(f)), h(h_in), ode_tol(ode_tol_in),
      truncation_tol(trunc_tol) {
    if (!(h > 0.0)) throw ResonanceError("h must be positive");
    if (field.dimension() != 1)
        throw ResonanceError("resonance solver requires n = 1");
    double vmax = field.max_value();
    double L = (vmax > 0.0)
                   ? field.support_radius(truncation_tol * std::max(vmax, 1e-30))
                   : 1.0;
    double c = field.center().empty() ? 0.0 : field.center()[0];
    const auto& bp = field.breakpoints_1d();
    if (!bp.empty()) {
        // compactly supported piecewise potential: tight bounds
        x_left = *std::min_element(bp.begin(), bp.end());
        x_right = *std::max_element(bp.begin(), bp.end());
    } else {
        x_left = c - L;
        x_right = c + L;
    }
}

std::complex<double> wronskian(const SpectralProblem& problem, cplx lambda) {
    if (lambda == cplx(0.0))
        throw ResonanceError("wronskian undefined at lambda = 0");
    Eigen::Vector2cd y = propagate_jost(problem, lambda);
    return y[1] - cplx(0.0, 1.0) * lambda / problem.h * y[0];
}

int count_zeros(const SpectralProblem& problem, const Rect& rect) {
    if (rect.im_hi > 1e-12)
        throw ResonanceError("rectangle must lie in the closed lower half plane");
    return winding_with_retry(problem, rect);
}

int ResonanceSet::total_multiplicity() const {
    int m = 0;
    for (const auto& r : items) m += r.multiplicity;
    return m;
}

ResonanceSet find_resonances(const SpectralProblem& problem, Rect window,
                             int max_count) {
    ResonanceSet out;
    out.window = window;
    out.h = problem.h;

    // On the imaginary axis W~ is real and changes sign between antibound
    // states, so a contour edge at Re lambda = 0 passes through zeros.
    // Keep the window strictly in the open right half plane; zeros with
    // Re lambda = 0 are by convention not counted (their mirrors aren't
    // either).
    window.re_lo = std::max(window.re_lo, 1e-4);
    if (window.re_hi <= window.re_lo)
        throw ResonanceError("window must extend into Re lambda > 0");

    std::deque<std::pair<Rect, int>> queue;
    int total = winding_with_retry(problem, window);
    if (total > 0) queue.emplace_back(window, total);

    auto box_done = [&](const Rect& r, int count) {
        std::complex<double> c = r.center();
        double diam = std::hypot(r.width(), r.height());
        double res = 0.0;
        auto lam = newton_refine(problem, c, &res);
        bool inside = lam && lam->real() >= r.re_lo - 0.5 * r.width() &&
                      lam->real() <= r.re_hi + 0.5 * r.width() &&
                      lam->imag() >= r.im_lo - 0.5 * r.height() &&
                      lam->imag() <= std::min(r.im_hi + 0.5 * r.height(), 0.0);
        if (count == 1 && inside) {
            out.items.push_back({*lam, 1, res});
        } else if (diam < 1e-6 * (1.0 + std::abs(c))) {
            // unresolved cluster: report the box center with its total count
            out.items.push_back({inside ? *lam : c, count,
                                 std::abs(wronskian(problem, c))});
        } else {
            return false;
        }
        return true;
    };

    while (!queue.empty()) {
        auto [rect, count] = queue.front();
        queue.pop_front();
        if (out.total_multiplicity() >= max_count) {
            out.truncated = true;
            break;
        }
        // exclude the threshold disc
        if (std::abs(rect.center()) < 1e-3 &&
            std::hypot(rect.width(), rect.height()) < 4e-3)
            continue;
        double diam = std::hypot(rect.width(), rect.height());
        if (count == 1 || diam < 1e-6 * (1.0 + std::abs(rect.center()))) {
            if (box_done(rect, count)) continue;
        }
        // split along the longer side, retrying the fraction if a zero sits
        // on the cut
        bool horizontal = rect.width() >= rect.height();
        bool ok = false;
        for (double frac : {0.5, 0.46142, 0.54311, 0.50731}) {
            Rect a = rect, b = rect;
            if (horizontal) {
                double cut = rect.re_lo + frac * rect.width();
                a.re_hi = cut;
                b.re_lo = cut;
            } else {
                double cut = rect.im_lo + frac * rect.height();
                a.im_hi = cut;
                b.im_lo = cut;
            }
            try {
                int ca = winding_with_retry(problem, a);
                int cb = winding_with_retry(problem, b);
                if (ca + cb != count) continue;
                if (ca > 0) queue.emplace_back(a, ca);
                if (cb > 0) queue.emplace_back(b, cb);
                ok = true;
                break;
            } catch (const ResonanceError&) {
                continue;
            }
        }
        if (!ok)
            throw ResonanceError("failed to subdivide a rectangle without "
                                 "hitting a zero on the cut");
    }
    std::sort(out.items.begin(), out.items.end(),
              [](const Resonance& a, const Resonance& b) {
                  if (a.lambda.real() != b.lambda.real())
                      return a.lambda.real() < b.lambda.real();
                  return a.lambda.imag() < b.lambda.imag();
              });
    return out;
}

ResonanceSumResult resonance_sum(const ResonanceSet& set,
                                 const TestFunctionPair& pair) {
    ResonanceSumResult out;
    cplx sum = 0.0;
    const double a = pair.ghat_inner(), b = pair.ghat_outer();
    for (const auto& r : set.items) {
        cplx term = integrate_complex(
            [&](double t) {
                return pair.ghat(t) * std::exp(cplx(0.0, -t) * r.lambda);
            },
            a, b, 1e-12);
        sum += static_cast<double>(r.multiplicity) * term;
    }
    sum /= 2.0 * kPi;
    out.value = sum.real();
    out.imag_residual = sum.imag();
    // Missing resonances are deeper than the window: each contributes at
    // most (1/2pi) * e^{-t0 Gamma} * integral of ghat. Estimate their number
    // from the 1-D resonance counting asymptotics ~ (support length / pi h)
    // per unit of Re lambda, over a window-sized band.
    double gamma = -set.window.im_lo;
    double t0 = pair.ghat_inner();
    double re_span = set.window.re_hi - set.window.re_lo;
    double density = std::max(1.0, re_span / (kPi * set.h));
    double n_est = std::max({4.0, 2.0 * set.total_multiplicity(), density});
    out.truncation_bound =
        n_est * pair.ghat_integral() / (2.0 * kPi) * std::exp(-t0 * gamma);
    return out;
}

}  // namespace resolab
