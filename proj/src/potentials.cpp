#include "resolab/potentials.hpp"

#include <boost/math/tools/roots.hpp>

#include <algorithm>
#include <cmath>
#include <limits>

namespace resolab {

namespace {

constexpr double kDegenerateGrad = 1e-8;

double norm2(std::span<const double> x) {
    double s = 0.0;
    for (double v : x) s += v * v;
    return std::sqrt(s);
}

double bracketed_root(const std::function<double(double)>& f, double lo,
                      double hi, double tol = 1e-14) {
    boost::math::tools::eps_tolerance<double> eps(48);
    std::uintmax_t it = 200;
    auto r = boost::math::tools::toms748_solve(f, lo, hi, eps, it);
    double x = 0.5 * (r.first + r.second);
    (void)tol;
    return x;
}

}  // namespace

double sphere_area(int n) {
    if (n < 1) throw DomainError("dimension must be >= 1");
    constexpr double pi = 3.14159265358979323846;
    return 2.0 * std::pow(pi, 0.5 * n) / std::tgamma(0.5 * n);
}

double ball_volume(int n) { return sphere_area(n) / n; }

double DecayCertificate::radius_for(double tol) const {
    if (tol <= 0.0) throw DomainError("tolerance must be positive");
    if (tol >= A) return 0.0;
    return std::pow(std::log(A / tol) / B, 1.0 / (1.0 + eps));
}

RadialProfile::RadialProfile(std::function<double(double)> eval,
                             std::function<double(double)> deriv,
                             double max_value, DecayCertificate cert)
    : eval_(std::move(eval)),
      deriv_(std::move(deriv)),
      max_value_(max_value),
      cert_(std::move(cert)) {}

double RadialProfile::inverse(double s) const {
    if (!(s > 0.0) || s > max_value_)
        throw DomainError("inverse: level outside (0, max_value]");
    if (s == max_value_) return 0.0;
    double hi = 1.0;
    double r_max = effective_radius(std::min(s * 0.5, 1e-300));
    while (eval_(hi) > s) {
        hi *= 2.0;
        if (hi > 4.0 * r_max + 16.0)
            throw DomainError("inverse: failed to bracket level");
    }
    return bracketed_root([&](double r) { return eval_(r) - s; }, 0.0, hi);
}

RadialProfile make_gaussian_profile(double amplitude, double width) {
    if (!(amplitude > 0.0) || !(width > 0.0))
        throw DomainError("make_gaussian_profile: parameters must be positive");
    const double a = amplitude, w2 = width * width;
    DecayCertificate cert{1.0, amplitude, 1.0 / w2};
    return RadialProfile(
        [a, w2](double r) { return a * std::exp(-r * r / w2); },
        [a, w2](double r) { return -2.0 * r / w2 * a * std::exp(-r * r / w2); },
        amplitude, cert);
}

PotentialField PotentialField::radial(RadialProfile profile, int n,
                                      std::vector<double> center) {
    if (n < 1 || n % 2 == 0) throw DomainError("dimension must be odd >= 1");
    if (static_cast<int>(center.size()) != n)
        throw DomainError("center dimension mismatch");
    PotentialField v;
    v.n_ = n;
    v.max_value_ = profile.max_value();
    v.cert_ = profile.certificate();
    v.center_ = center;
    auto prof = std::make_shared<RadialProfile>(profile);
    auto c = std::make_shared<std::vector<double>>(std::move(center));
    v.eval_ = [prof, c](std::span<const double> x) {
        double r2 = 0.0;
        for (size_t i = 0; i < x.size(); ++i) {
            double d = x[i] - (*c)[i];
            r2 += d * d;
        }
        return (*prof)(std::sqrt(r2));
    };
    v.grad_ = [prof, c](std::span<const double> x) {
        double r2 = 0.0;
        for (size_t i = 0; i < x.size(); ++i) {
            double d = x[i] - (*c)[i];
            r2 += d * d;
        }
        double r = std::sqrt(r2);
        std::vector<double> g(x.size(), 0.0);
        if (r == 0.0) return g;  // R'(0) = 0 by hypothesis
        double dr = prof->deriv(r);
        for (size_t i = 0; i < x.size(); ++i)
            g[i] = dr * (x[i] - (*c)[i]) / r;
        return g;
    };
    v.profile_ = std::move(profile);
    return v;
}

PotentialField PotentialField::gaussian_mixture_1d(
    std::vector<GaussianBump> bumps) {
    if (bumps.empty()) throw DomainError("mixture needs at least one bump");
    for (const auto& b : bumps)
        if (!(b.amplitude > 0.0) || !(b.width > 0.0))
            throw DomainError("bump parameters must be positive");
    PotentialField v;
    v.n_ = 1;
    // |V(x)| <= sum a_i e^{c_i^2/w_i^2} e^{-x^2/(2 w_i^2)}
    double A = 0.0, B = std::numeric_limits<double>::infinity();
    for (const auto& b : bumps) {
        A += b.amplitude * std::exp(b.center * b.center / (b.width * b.width));
        B = std::min(B, 0.5 / (b.width * b.width));
    }
    v.cert_ = DecayCertificate{1.0, A, B};
    auto bs = std::make_shared<std::vector<GaussianBump>>(std::move(bumps));
    auto eval1 = [bs](double x) {
        double s = 0.0;
        for (const auto& b : *bs) {
            double u = (x - b.center) / b.width;
            s += b.amplitude * std::exp(-u * u);
        }
        return s;
    };
    auto deriv1 = [bs](double x) {
        double s = 0.0;
        for (const auto& b : *bs) {
            double u = (x - b.center) / b.width;
            s += -2.0 * u / b.width * b.amplitude * std::exp(-u * u);
        }
        return s;
    };
    v.eval_ = [eval1](std::span<const double> x) { return eval1(x[0]); };
    v.grad_ = [deriv1](std::span<const double> x) {
        return std::vector<double>{deriv1(x[0])};
    };
    // max over a scan + local refinement
    double lo = (*bs)[0].center, hi = lo;
    for (const auto& b : *bs) {
        lo = std::min(lo, b.center - 8.0 * b.width);
        hi = std::max(hi, b.center + 8.0 * b.width);
    }
    // golden-section polish around the scan maximum
    double gx = lo, gv = -1.0;
    for (int i = 0; i <= 4000; ++i) {
        double x = lo + (hi - lo) * i / 4000.0;
        if (eval1(x) > gv) {
            gv = eval1(x);
            gx = x;
        }
    }
    double a = gx - (hi - lo) / 4000.0, b2 = gx + (hi - lo) / 4000.0;
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double x1 = b2 - gr * (b2 - a), x2 = a + gr * (b2 - a);
    for (int it = 0; it < 200 && (b2 - a) > 1e-13; ++it) {
        if (eval1(x1) < eval1(x2)) {
            a = x1;
            x1 = x2;
            x2 = a + gr * (b2 - a);
        } else {
            b2 = x2;
            x2 = x1;
            x1 = b2 - gr * (b2 - a);
        }
    }
    v.max_value_ = eval1(0.5 * (a + b2));
    return v;
}

PotentialField PotentialField::square_barrier_1d(double height, double width) {
    if (!(height > 0.0) || !(width > 0.0))
        throw DomainError("square barrier parameters must be positive");
    PotentialField v;
    v.n_ = 1;
    v.max_value_ = height;
    v.cert_ = DecayCertificate{1.0, height * std::exp(width * width), 1.0};
    v.eval_ = [height, width](std::span<const double> x) {
        return (x[0] >= 0.0 && x[0] <= width) ? height : 0.0;
    };
    v.grad_ = [](std::span<const double>) { return std::vector<double>{0.0}; };
    v.breakpoints_ = {0.0, width};
    return v;
}

PotentialField PotentialField::zero_1d() {
    PotentialField v;
    v.n_ = 1;
    v.max_value_ = 0.0;
    v.cert_ = DecayCertificate{1.0, 1e-300, 1.0};
    v.eval_ = [](std::span<const double>) { return 0.0; };
    v.grad_ = [](std::span<const double>) { return std::vector<double>{0.0}; };
    return v;
}

double PotentialField::operator()(std::span<const double> x) const {
    if (static_cast<int>(x.size()) != n_)
        throw DomainError("point dimension mismatch");
    return eval_(x);
}

std::vector<double> PotentialField::gradient(std::span<const double> x) const {
    if (static_cast<int>(x.size()) != n_)
        throw DomainError("point dimension mismatch");
    return grad_(x);
}

double PotentialField::operator()(double x) const {
    if (n_ != 1) throw DomainError("scalar evaluation requires n = 1");
    return eval_(std::span<const double>(&x, 1));
}

double PotentialField::deriv(double x) const {
    if (n_ != 1) throw DomainError("scalar evaluation requires n = 1");
    return grad_(std::span<const double>(&x, 1))[0];
}

double PotentialField::support_radius(double tol) const {
    return cert_.radius_for(tol);
}

const RadialProfile& PotentialField::profile() const {
    if (!profile_) throw DomainError("field is not radial");
    return *profile_;
}

PotentialField radialize(const RadialProfile& profile, int n,
                         std::vector<double> center) {
    return PotentialField::radial(profile, n, std::move(center));
}

PotentialField make_asymmetric_field(const std::vector<GaussianBump>& bumps) {
    return PotentialField::gaussian_mixture_1d(bumps);
}

double LevelSetOracle::sum_inv_grad() const {
    double s = 0.0;
    for (double g : grad_norms) s += 1.0 / g;
    return s;
}

double LevelSetOracle::sum_grad() const {
    double s = 0.0;
    for (double g : grad_norms) s += g;
    return s;
}

LevelSetOracle level_set_oracle(const PotentialField& field, double s) {
    if (!(s > 0.0) || !(s < field.max_value()))
        throw DomainError("level must lie in (0, max V)");
    LevelSetOracle out;
    out.level = s;

    if (field.is_radial()) {
        const auto& prof = field.profile();
        double r = prof.inverse(s);
        double g = std::abs(prof.deriv(r));
        out.spherical = field.dimension() > 1;
        out.degenerate = g < kDegenerateGrad;
        if (field.dimension() == 1) {
            double c = field.center()[0];
            out.preimages = {c - r, c + r};
            out.grad_norms = {g, g};
        } else {
            out.preimages = {r};
            out.grad_norms = {g};
        }
        return out;
    }

    if (field.dimension() != 1)
        throw DomainError("level_set_oracle: non-radial fields require n = 1");

    // Bracket sign changes of V - s on a fine grid, refine each to 1e-12.
    double L = field.support_radius(std::min(s * 0.25, 1e-14));
    double c0 = field.center().empty() ? 0.0 : field.center()[0];
    double lo = c0 - L - 1.0, hi = c0 + L + 1.0;
    const int N = 20000;
    double prev_x = lo, prev_v = field(lo) - s;
    for (int i = 1; i <= N; ++i) {
        double x = lo + (hi - lo) * i / N;
        double v = field(x) - s;
        if ((prev_v <= 0.0 && v > 0.0) || (prev_v >= 0.0 && v < 0.0) ||
            (prev_v == 0.0)) {
            if (prev_v == 0.0) {
                out.preimages.push_back(prev_x);
            } else {
                double root = bracketed_root(
                    [&](double t) { return field(t) - s; }, prev_x, x);
                out.preimages.push_back(root);
            }
        }
        prev_x = x;
        prev_v = v;
    }
    for (double x : out.preimages) {
        double g = std::abs(field.deriv(x));
        out.grad_norms.push_back(g);
        if (g < kDegenerateGrad) out.degenerate = true;
    }
    return out;
}

}  // namespace resolab
