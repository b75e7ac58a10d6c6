#include "resolab/trace.hpp"

#include "resolab/ode.hpp"
#include "resolab/parallel.hpp"
#include "resolab/quadrature.hpp"

#include <boost/math/interpolators/pchip.hpp>

#include <Eigen/Dense>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <vector>

namespace resolab {

namespace {

constexpr double kPi = std::numbers::pi;
using cplx = std::complex<double>;

// Integral over R^n of w(x) phi(V(x)) dx with w = 1 or |grad V|^2;
// n = 1 or radial fields.
template <class Phi>
double space_integral(const PotentialField& field, bool grad_weight,
                      Phi&& phi, double tol) {
    int n = field.dimension();
    double vmax = field.max_value();
    double L = field.support_radius(1e-14 * std::max(vmax, 1.0));
    if (n == 1) {
        double c = field.center().empty() ? 0.0 : field.center()[0];
        return integrate([&](double x) {
            double w = 1.0;
            if (grad_weight) {
                double d = field.deriv(x);
                w = d * d;
            }
            return w * phi(field(x));
        }, c - L, c + L, tol);
    }
    if (!field.is_radial())
        throw TraceError("n >= 3 requires a radial field");
    const auto& prof = field.profile();
    return sphere_area(n) *
           integrate([&](double r) {
               double w = 1.0;
               if (grad_weight) {
                   double d = prof.deriv(r);
                   w = d * d;
               }
               return w * phi(prof(r)) * std::pow(r, n - 1);
           }, 0.0, L, tol);
}

// Smallest lambda past which |f(lambda)| stays below 1e-13 |f(0)|.
template <class F>
double decay_cutoff(F&& f, double cap) {
    double f0 = std::abs(f(0.0)) + 1e-30;
    double lam = 4.0;
    int quiet = 0;
    while (lam < cap) {
        if (std::abs(f(lam)) < 1e-13 * f0) ++quiet; else quiet = 0;
        if (quiet >= 3) break;
        lam += 1.0;
    }
    return lam;
}

// Dense pchip table of a decaying momentum-side profile, zero past the
// cutoff; freq is the fastest oscillation e^{i lambda t} in the profile.
class MomentumProfile {
  public:
    template <class F>
    MomentumProfile(F&& f, double freq, double lam_hi) : cut_(lam_hi) {
        double dl = 2.0 * kPi / std::max(freq, 1e-3) / 40.0;
        int m = static_cast<int>(std::ceil(lam_hi / dl)) + 1;
        std::vector<double> xs(m + 1), ys(m + 1);
        for (int i = 0; i <= m; ++i) {
            xs[i] = lam_hi * i / double(m);
            ys[i] = f(xs[i]);
        }
        interp_.emplace(std::move(xs), std::move(ys));
    }
    double operator()(double lam) const {
        return lam >= cut_ ? 0.0 : (*interp_)(lam);
    }

  private:
    double cut_;
    std::optional<boost::math::interpolators::pchip<std::vector<double>>>
        interp_;
};

// Fixed composite Gauss-Kronrod over [0, hi], four panels per oscillation
// period: non-adaptive, so inner-quadrature noise in the tail panels cannot
// trigger runaway refinement.
template <class F>
double panel_integrate(F&& f, double hi, double freq) {
    double w = 2.0 * kPi / std::max(freq, 1e-3) / 4.0;
    int m = std::max(static_cast<int>(std::ceil(hi / w)), 8);
    double total = 0.0;
    for (int i = 0; i < m; ++i) {
        double a = hi * i / double(m), b = hi * (i + 1) / double(m);
        total += boost::math::quadrature::gauss_kronrod<double, 15>::integrate(
            f, a, b, 0);
    }
    return total;
}

// Taylor collapse of f(|xi|^2 + V) in powers of V: the invariant becomes
// sum_k C_k I_k / k! with C_k the momentum integrals and I_k the spatial
// moments (weighted by |grad V|^2 and shifted by three orders for the
// subleading family).  f is entire of order 1/2, so the series converges;
// report failure when it has not dropped below the target before the
// momentum integrals run out of reliable orders.
std::optional<double> series_invariant(const PotentialField& field,
                                       const TestFunctionPair& pair,
                                       bool subleading) {
    int n = field.dimension();
    int shift = subleading ? 3 : 0;
    double lam = pair.lambda();
    // terms only start decaying once k exceeds ~ (scaled ghat support)^2, so
    // wide pairs at small scale cannot converge within the carried orders;
    // skip the (expensive) attempt instead of discovering that at the end
    double outer = pair.ghat_outer();
    if (outer * outer > 40.0) return std::nullopt;
    // momentum integrals at unit scale with the lambda powers applied
    // analytically, so evaluations at different scales stay exactly
    // proportional (the moment fit amplifies any drift between them)
    auto unit = pair.scaled(1.0 / lam);
    double sum = 0.0, tail = 0.0;
    for (int j = subleading ? 0 : n; j + shift + 3 <= pair.max_order(); ++j) {
        double c = 0.0;
        try {
            c = momentum_integral(unit, j + shift, n);
        } catch (const TestFnError&) {
            break;  // orders beyond the reliable range
        }
        double mom = space_integral(field, subleading, [&](double v) {
            return std::pow(v, j);
        }, 1e-12);
        double term = std::pow(lam, 0.5 * n - (j + shift)) * c * mom /
                      std::tgamma(j + 1.0);
        double prev = tail;
        tail = std::abs(term);
        sum += term;
        if (tail + prev <= 1e-18 * std::abs(sum)) return sum;
    }
    if (tail <= 1e-11 * std::abs(sum)) return sum;
    return std::nullopt;
}

}  // namespace

// Phase-space invariants: the convergent Taylor collapse when its tail is
// certified small, otherwise direct quadrature with the inner momentum
// integral reduced to the tabulated profiles g(|xi|) and f'''(|xi|^2).
double direct_leading(const PotentialField& field, const TestFunctionPair& pair,
                      double tol) {
    if (field.max_value() <= 0.0) return 0.0;
    int n = field.dimension();
    double lam = pair.lambda();
    if (pair.kind() == TestFunctionPair::Kind::gaussian) {
        // f(sigma) = e^{-sigma/lambda}: the momentum integral is exact
        double pref = std::pow(kPi * lam, 0.5 * n);
        return space_integral(field, false, [&](double v) {
            return pref * (std::exp(-v / lam) - 1.0);
        }, tol);
    }
    if (n != 1 && !field.is_radial())
        throw TraceError("bump-pair invariants need n = 1 or a radial field");
    if (auto s = series_invariant(field, pair, false)) return *s;
    double cap = 120.0 * std::sqrt(lam);
    double cut = decay_cutoff([&](double l) { return pair.g(l); }, cap);
    MomentumProfile g([&](double l) { return pair.g(l); },
                      pair.ghat_outer(), cut);
    // oscillatory momentum variable outermost: the inner space integral is
    // smooth and cheap, so each rho costs only ~10^2 profile lookups
    double area = sphere_area(n);
    return area * panel_integrate([&](double rho) {
        return std::pow(rho, n - 1) *
               space_integral(field, false, [&](double v) {
                   return g(std::sqrt(rho * rho + std::max(v, 0.0))) - g(rho);
               }, 1e-8);
    }, cut, pair.ghat_outer());
}

double direct_subleading(const PotentialField& field,
                         const TestFunctionPair& pair, double tol) {
    if (field.max_value() <= 0.0) return 0.0;
    int n = field.dimension();
    double lam = pair.lambda();
    if (pair.kind() == TestFunctionPair::Kind::gaussian) {
        double pref = -std::pow(kPi * lam, 0.5 * n) * std::pow(lam, -3.0);
        return space_integral(field, true, [&](double v) {
            return pref * std::exp(-v / lam);
        }, tol);
    }
    if (n != 1 && !field.is_radial())
        throw TraceError("bump-pair invariants need n = 1 or a radial field");
    if (auto s = series_invariant(field, pair, true)) return *s;
    double cap = 120.0 * std::sqrt(lam);
    auto h3 = [&](double l) { return pair.f_deriv(3, l * l); };
    double cut = decay_cutoff(h3, cap);
    MomentumProfile prof(h3, pair.ghat_outer(), cut);
    double area = sphere_area(n);
    return area * panel_integrate([&](double rho) {
        return std::pow(rho, n - 1) *
               space_integral(field, true, [&](double v) {
                   return prof(std::sqrt(rho * rho + std::max(v, 0.0)));
               }, 1e-8);
    }, cut, pair.ghat_outer());
}

namespace {

// Raw (wrapped) scattering phase arg a(lambda): a is the transmitted
// right-mover coefficient; det S = e^{2 i arg a} for real V.
double raw_phase(const SpectralProblem& p, double lambda) {
    const cplx ik = cplx(0.0, 1.0) * lambda / p.h;
    Eigen::Vector2cd y;
    y << 1.0, ik;  // e^{i lambda (x - x_left)/h}
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
    std::vector<double> xs{p.x_left};
    for (double b : p.field.breakpoints_1d())
        if (b > p.x_left && b < p.x_right) xs.push_back(b);
    xs.push_back(p.x_right);
    std::sort(xs.begin(), xs.end());
    for (size_t i = 0; i + 1 < xs.size(); ++i)
        rk45(rhs, xs[i], xs[i + 1], y, p.ode_tol, 1e-300, renorm);
    cplx a = y[0] + y[1] * p.h / (cplx(0.0, 1.0) * lambda);
    double phase = std::arg(a) - lambda * (p.x_right - p.x_left) / p.h;
    return phase;  // defined mod 2 pi (the plane-wave factor is exact)
}

// delta'(lambda), computed pointwise: propagate the lambda-derivative of the
// Jost solution alongside it.  The running renormalization rescales both rows
// by the same factor, and Im(da/a) is scale invariant.
double phase_slope(const SpectralProblem& p, double lambda) {
    const cplx i(0.0, 1.0);
    Eigen::Vector4cd y;
    y << 1.0, i * lambda / p.h, 0.0, i / p.h;
    const double h2 = p.h * p.h;
    auto rhs = [&](double x, const Eigen::Vector4cd& s) {
        double q = (p.field(x) - lambda * lambda) / h2;
        Eigen::Vector4cd d;
        d << s[1], q * s[0], s[3], q * s[2] - 2.0 * lambda / h2 * s[0];
        return d;
    };
    auto renorm = [](double, Eigen::Vector4cd& s) {
        double n = s.norm();
        if (n > 1e6 || (n < 1e-6 && n > 0.0)) s /= n;
    };
    std::vector<double> xs{p.x_left};
    for (double b : p.field.breakpoints_1d())
        if (b > p.x_left && b < p.x_right) xs.push_back(b);
    xs.push_back(p.x_right);
    std::sort(xs.begin(), xs.end());
    for (size_t i2 = 0; i2 + 1 < xs.size(); ++i2)
        rk45(rhs, xs[i2], xs[i2 + 1], y, p.ode_tol, 1e-300, renorm);
    cplx a = y[0] - i * (p.h / lambda) * y[1];
    cplx da = y[2] - i * (p.h / lambda) * y[3] +
              i * (p.h / (lambda * lambda)) * y[1];
    return std::imag(da / a) - (p.x_right - p.x_left) / p.h;
}

}  // namespace

double spectral_shift_trace(const SpectralProblem& problem,
                            const TestFunctionPair& pair, double tol) {
    if (problem.field.dimension() != 1)
        throw TraceError("spectral shift oracle requires n = 1");
    if (problem.field.max_value() <= 0.0) return 0.0;

    // frequency range: past lambda_max the pairing weight is negligible
    double g0 = std::abs(pair.g(0.0)) + 1e-30;
    double lam_max = decay_cutoff([&](double l) { return pair.g(l); }, 120.0);
    const double lam_min = 1e-4;

    // Tr = (1/pi) int_0^inf g(l) delta'(l) dl.  Below lam_min the weight is
    // g(0) and, with V >= 0, Levinson gives delta(0) = 0, so the stub
    // contributes g(0) * delta(lam_min) with the phase taken on the principal
    // branch (|delta| < pi near threshold).
    double d0 = raw_phase(problem, lam_min);
    d0 -= 2.0 * kPi * std::round(d0 / (2.0 * kPi));
    double integral = pair.g(0.0) * d0;

    // fixed initial panels keep narrow resonance peaks in delta' from being
    // stepped over by the adaptive rule; finer near the barrier top
    double vtop = std::sqrt(problem.field.max_value());
    // keep the panel tolerance above the ODE noise floor, else the adaptive
    // rule refines forever against irreducible integrand jitter
    double quad_tol = std::max(tol, 1e-8);
    double a = lam_min;
    while (a < lam_max) {
        double w = (a < 2.0 * vtop + 1.0) ? 0.25 : (a < 20.0 ? 1.0 : 4.0);
        double b = std::min(a + w, lam_max);
        auto f = [&](double l) { return pair.g(l) * phase_slope(problem, l); };
        // where the pairing weight has decayed, a relative-tolerance rule
        // chases ODE noise; loosen the panel tolerance so the absolute
        // target stays ~1e-9 g(0) per panel, and skip negligible panels
        double gmax = 0.0;
        for (int j = 0; j <= 4; ++j)
            gmax = std::max(gmax, std::abs(pair.g(a + (b - a) * j / 4.0)));
        if (gmax >= 1e-10 * g0) {
            double panel_tol = std::min(
                0.05, std::max(quad_tol, 1e-9 * g0 / (gmax * (b - a))));
            integral += integrate(f, a, b, panel_tol, 1e-9);
        }
        a = b;
    }
    return integral / kPi;
}

TraceFit semiclassical_fit(const PotentialField& field,
                           const TestFunctionPair& pair,
                           const std::vector<double>& h_list) {
    if (h_list.size() < 4)
        throw TraceError("h-sweep needs at least 4 values");
    if (field.dimension() != 1 && field.max_value() > 0.0)
        throw TraceError("h-sweep trace oracles require n = 1");
    TraceFit fit;
    for (double h : h_list) {
        SpectralProblem prob(field, h);
        TraceSample s;
        s.h = h;
        // Feasible window depth for the Jost solver is limited by the
        // conditioning factor e^{2 Gamma L / h}; decide the source from the
        // truncation bound achievable inside that budget.
        double L = std::max(prob.x_right - prob.x_left, 1e-3);
        double gamma = 9.0 * h / L;
        double t0 = pair.ghat_inner();
        double bound_est = pair.ghat_integral() / (2.0 * kPi) *
                           std::exp(-t0 * gamma) * 4.0;
        if (field.max_value() <= 0.0) {
            s.value = 0.0;
            s.source = "zero-field";
        } else if (bound_est < 1e-6) {
            Rect window{-12.0 / h, 12.0 / h, -gamma, 0.0};
            auto set = find_resonances(prob, window);
            auto rs = resonance_sum(set, pair);
            s.resonance_value = rs.value;
            s.resonance_bound = rs.truncation_bound;
            s.value = rs.value;
            s.source = "resonance";
        } else {
            s.value = spectral_shift_trace(prob, pair);
            s.source = "spectral-shift";
        }
        fit.samples.push_back(s);
    }

    const int m = static_cast<int>(h_list.size());
    Eigen::MatrixXd A(m, 3);
    Eigen::VectorXd b(m);
    for (int i = 0; i < m; ++i) {
        double h = fit.samples[i].h;
        double w = 1.0 / (h * h * h * h);  // damp the O(h^6) model error at large h
        double y = std::pow(2.0 * kPi * h, field.dimension()) *
                   fit.samples[i].value;
        A(i, 0) = w;
        A(i, 1) = w * h * h;
        A(i, 2) = w * h * h * h * h;
        b(i) = w * y;
    }
    Eigen::MatrixXd As = A;
    Eigen::Vector3d col_scale;
    for (int j = 0; j < 3; ++j) {
        col_scale(j) = As.col(j).norm();
        if (col_scale(j) > 0.0) As.col(j) /= col_scale(j);
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(As, Eigen::ComputeThinU |
                                                  Eigen::ComputeThinV);
    fit.condition = svd.singularValues()(0) /
                    std::max(svd.singularValues()(2), 1e-300);
    Eigen::Vector3d coef_scaled = svd.solve(b);
    Eigen::Vector3d coef = coef_scaled.array() / col_scale.array().max(1e-300);
    fit.c0 = coef(0);
    fit.c2 = coef(1);
    fit.c4 = coef(2);
    fit.rms_residual = (A * coef - b).norm() / std::sqrt(double(m));
    return fit;
}

}  // namespace resolab
