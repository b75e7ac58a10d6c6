#include "resolab/inversion.hpp"

#include "resolab/ode.hpp"
#include "resolab/quadrature.hpp"

#include <boost/math/interpolators/pchip.hpp>

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>

namespace resolab {

namespace {

// Lawson-Hanson nonnegative least squares: min |A x - b|, x >= 0.
Eigen::VectorXd nnls(const Eigen::MatrixXd& A, const Eigen::VectorXd& b) {
    const int n = static_cast<int>(A.cols());
    Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
    std::vector<char> passive(n, 0);
    const double tol = 1e-12 * A.cwiseAbs().maxCoeff() * b.cwiseAbs().maxCoeff()
                       + 1e-300;

    auto solve_passive = [&]() {
        std::vector<int> idx;
        for (int j = 0; j < n; ++j)
            if (passive[j]) idx.push_back(j);
        Eigen::MatrixXd Ap(A.rows(), idx.size());
        for (size_t c = 0; c < idx.size(); ++c) Ap.col(c) = A.col(idx[c]);
        Eigen::VectorXd zp = Ap.colPivHouseholderQr().solve(b);
        Eigen::VectorXd z = Eigen::VectorXd::Zero(n);
        for (size_t c = 0; c < idx.size(); ++c) z(idx[c]) = zp(c);
        return z;
    };

    for (int outer = 0; outer < 10 * n; ++outer) {
        Eigen::VectorXd w = A.transpose() * (b - A * x);
        int best = -1;
        double best_w = tol;
        for (int j = 0; j < n; ++j)
            if (!passive[j] && w(j) > best_w) {
                best_w = w(j);
                best = j;
            }
        if (best < 0) break;
        passive[best] = 1;
        for (int inner = 0; inner < 10 * n; ++inner) {
            Eigen::VectorXd z = solve_passive();
            double zmin = std::numeric_limits<double>::infinity();
            for (int j = 0; j < n; ++j)
                if (passive[j]) zmin = std::min(zmin, z(j));
            if (zmin > 0.0) {
                x = z;
                break;
            }
            double alpha = 1.0;
            for (int j = 0; j < n; ++j)
                if (passive[j] && z(j) <= 0.0)
                    alpha = std::min(alpha, x(j) / (x(j) - z(j)));
            x += alpha * (z - x);
            for (int j = 0; j < n; ++j)
                if (passive[j] && x(j) <= 1e-14 * x.cwiseAbs().maxCoeff()) {
                    passive[j] = 0;
                    x(j) = 0.0;
                }
        }
    }
    return x;
}

struct FamilyInversion {
    std::vector<double> mass;      // cell masses on the reported grid
    std::vector<double> density;   // mass / cell width
    double residual = 0.0;         // max moment mismatch, row-scaled
};

// Moments m_k = int s^k rho(s) ds with rho >= 0 piecewise constant on the
// cells of s_grid plus hidden tail cells below the grid that absorb the
// sub-grid mass.  Superexponential decay makes mu smooth in the coordinate
// u = sqrt(ln(smax/s)) (for a nondegenerate peak, exactly linear near the
// top), so the tail continues the grid uniformly in u and the Tikhonov term
// penalizes second differences of the mass density with respect to u: that
// prior selects the smooth representative of the (ill-posed) moment fit.
FamilyInversion invert_moment_family(const std::vector<int>& k_list,
                                     const std::vector<double>& moments,
                                     const std::vector<double>& s_grid) {
    const int M = static_cast<int>(s_grid.size());
    if (M < 3) throw InversionError("level grid too small");
    const int n_cells = M - 1;
    const double smax = s_grid.back();
    auto u_of = [smax](double s) {
        return std::sqrt(std::max(std::log(smax / s), 0.0));
    };
    const double u_top = u_of(s_grid.front());
    const double du = u_top / n_cells;
    const int n_tail = static_cast<int>(std::ceil(2.0 / du));
    std::vector<double> edges;  // tail edges then grid edges, increasing in s
    for (int i = n_tail; i >= 1; --i)
        edges.push_back(smax * std::exp(-std::pow(u_top + i * du, 2)));
    for (double s : s_grid) edges.push_back(s);
    const int n_unknown = static_cast<int>(edges.size()) - 1;
    std::vector<double> width_u(n_unknown);
    for (int c = 0; c < n_unknown; ++c)
        width_u[c] = u_of(edges[c]) - u_of(edges[c + 1]);

    double scale0 = 0.0;
    for (double m : moments) scale0 = std::max(scale0, std::abs(m));
    FamilyInversion out;
    out.mass.assign(n_cells, 0.0);
    out.density.assign(n_cells, 0.0);
    if (scale0 == 0.0) return out;

    const int n_rows_m = static_cast<int>(k_list.size());
    const int n_rows_s = n_unknown - 2;
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n_rows_m + n_rows_s, n_unknown);
    Eigen::VectorXd b = Eigen::VectorXd::Zero(n_rows_m + n_rows_s);
    for (int r = 0; r < n_rows_m; ++r) {
        int k = k_list[r];
        double w = 1.0 / (std::abs(moments[r]) + 1e-12 * scale0);
        for (int c = 0; c < n_unknown; ++c) {
            double lo = edges[c], hi = edges[c + 1];
            // cell-average of s^k: the mass unknown multiplies this
            double avg = (std::pow(hi, k + 1) - std::pow(lo, k + 1)) /
                         ((k + 1) * (hi - lo));
            A(r, c) = w * avg;
        }
        b(r) = w * moments[r];
    }
    const double tau = 1e-3;
    for (int r = 0; r < n_rows_s; ++r) {
        int c = r + 1;  // second difference of u-density centered at cell c
        A(n_rows_m + r, c - 1) += tau / width_u[c - 1];
        A(n_rows_m + r, c) += -2.0 * tau / width_u[c];
        A(n_rows_m + r, c + 1) += tau / width_u[c + 1];
    }

    Eigen::VectorXd mass = nnls(A, b);

    for (int r = 0; r < n_rows_m; ++r) {
        double pred = 0.0;
        for (int c = 0; c < n_unknown; ++c) pred += A(r, c) * mass(c);
        // rows are already scaled by 1/|m_k|; b(r) likewise
        out.residual = std::max(out.residual, std::abs(pred - b(r)));
    }
    for (int i = 0; i < n_cells; ++i) {
        double m = mass(n_tail + i);
        out.mass[i] = m;
        out.density[i] = m / (s_grid[i + 1] - s_grid[i]);
    }
    return out;
}

}  // namespace

std::vector<double> level_grid(double max_value, int nodes, double lo_frac) {
    if (!(max_value > 0.0)) throw InversionError("max value must be positive");
    if (nodes < 3) throw InversionError("need at least 3 grid nodes");
    // uniform in u = sqrt(ln(max/s)): log-like at the bottom, clustered like
    // sqrt(max - s) at the top where mu has its square-root behavior
    std::vector<double> s(nodes);
    double u_top = std::sqrt(std::log(1.0 / lo_frac));
    for (int i = 0; i < nodes; ++i) {
        double u = u_top * (1.0 - i / (nodes - 1.0));
        s[i] = max_value * std::exp(-u * u);
    }
    s.front() = lo_frac * max_value;
    s.back() = max_value;
    return s;
}

double DistributionFunction::operator()(double level) const {
    if (s.empty()) return 0.0;
    if (level <= s.front()) return mu.front();
    if (level >= s.back()) return mu.back();
    auto it = std::upper_bound(s.begin(), s.end(), level);
    size_t i = static_cast<size_t>(it - s.begin()) - 1;
    double t = (level - s[i]) / (s[i + 1] - s[i]);
    return mu[i] + t * (mu[i + 1] - mu[i]);
}

DistributionFunction moments_to_distribution(const MomentTable& table,
                                             const std::vector<double>& s_grid) {
    if (table.k_max - table.k_min + 1 < 7)
        throw InversionError("need at least 7 moments (K >= n + 6)");
    for (size_t i = 1; i < s_grid.size(); ++i)
        if (s_grid[i] <= s_grid[i - 1])
            throw InversionError("level grid must be strictly increasing");
    std::vector<int> ks;
    std::vector<double> ms;
    for (int k = table.k_min; k <= table.k_max; ++k) {
        ks.push_back(k);
        ms.push_back(table.M_at(k));
    }
    FamilyInversion inv = invert_moment_family(ks, ms, s_grid);

    DistributionFunction d;
    d.s = s_grid;
    d.density = inv.density;
    d.mu.assign(s_grid.size(), 0.0);
    for (int i = static_cast<int>(s_grid.size()) - 2; i >= 0; --i)
        d.mu[i] = d.mu[i + 1] + inv.mass[i];
    d.fit_residual = inv.residual;
    // residual rows are scaled by 1/M_k, so compare against the relative gate
    d.ill_posed = inv.residual > 1e-4;
    return d;
}

CoareaDensities coarea_densities(const DistributionFunction& distribution,
                                 const MomentTable& table) {
    const auto& s = distribution.s;
    if (s.size() < 3) throw InversionError("distribution grid too small");
    for (double rho : distribution.density)
        if (rho < -1e-8)
            throw InversionError("monotonicity violation: negative density");
    std::vector<int> ks;
    std::vector<double> ns;
    for (int k = table.k_min; k <= table.k_max; ++k) {
        ks.push_back(k);
        ns.push_back(table.N_at(k));
    }
    FamilyInversion binv = invert_moment_family(ks, ns, s);

    CoareaDensities out;
    out.n = table.n;
    for (size_t i = 0; i + 1 < s.size(); ++i) {
        double mid = 0.5 * (s[i] + s[i + 1]);
        out.s.push_back(mid);
        out.a.push_back(distribution.density[i]);
        out.b.push_back(binv.density[i]);
        out.mu.push_back(distribution(mid));
    }
    return out;
}

CoareaDensities oracle_densities(const PotentialField& field,
                                 const std::vector<double>& levels) {
    CoareaDensities out;
    out.n = field.dimension();
    for (double s : levels) {
        auto ls = level_set_oracle(field, s);
        if (ls.degenerate || ls.count() == 0) continue;
        out.s.push_back(s);
        if (ls.spherical) {
            double r = ls.preimages[0];
            double area = sphere_area(out.n) * std::pow(r, out.n - 1);
            out.a.push_back(area / ls.grad_norms[0]);
            out.b.push_back(area * ls.grad_norms[0]);
            out.mu.push_back(ball_volume(out.n) * std::pow(r, out.n));
        } else {
            out.a.push_back(ls.sum_inv_grad());
            out.b.push_back(ls.sum_grad());
            // n = 1: mu is the measure of the super-level set
            double len = 0.0;
            for (size_t i = 0; i + 1 < ls.preimages.size(); i += 2)
                len += ls.preimages[i + 1] - ls.preimages[i];
            out.mu.push_back(len);
        }
    }
    return out;
}

Certificate cs_certificate(const CoareaDensities& densities) {
    if (densities.s.size() < 10)
        throw InversionError("certificate needs at least 10 levels");
    Certificate cert;
    for (size_t i = 0; i < densities.s.size(); ++i) {
        double p0sq;
        if (densities.n == 1) {
            p0sq = 4.0;
        } else {
            double r = std::pow(densities.mu[i] / ball_volume(densities.n),
                                1.0 / densities.n);
            double p0 = sphere_area(densities.n) * std::pow(r, densities.n - 1);
            p0sq = p0 * p0;
        }
        cert.s.push_back(densities.s[i]);
        cert.defect.push_back(densities.a[i] * densities.b[i] / p0sq - 1.0);
        cert.sup_defect = std::max(cert.sup_defect,
                                   std::abs(cert.defect.back()));
    }
    cert.verdict = cert.sup_defect <= 1e-3 ? "RADIAL-CONSISTENT" : "NON-RADIAL";
    return cert;
}

RadialProfile distribution_to_profile(const DistributionFunction& distribution,
                                      int n) {
    if (n < 1 || n % 2 == 0) throw InversionError("dimension must be odd >= 1");
    const auto& s = distribution.s;
    const auto& mu = distribution.mu;
    if (s.size() < 4) throw InversionError("distribution grid too small");
    double omega = ball_volume(n);
    // walk from the top level down, keeping strictly increasing radii
    std::vector<double> r_nodes, s_nodes;
    r_nodes.push_back(std::pow(mu.back() / omega, 1.0 / n));
    s_nodes.push_back(s.back());
    for (int i = static_cast<int>(s.size()) - 2; i >= 0; --i) {
        double r = std::pow(mu[i] / omega, 1.0 / n);
        if (r > r_nodes.back() + 1e-12 * (1.0 + r)) {
            r_nodes.push_back(r);
            s_nodes.push_back(s[i]);
        }
    }
    if (r_nodes.size() < 5)
        throw InversionError("mu is not strictly decreasing on the grid");
    if (r_nodes.front() > 1e-9)  // pin the peak: mu -> 0 at the top level
        throw InversionError("mu does not vanish at the top level");
    r_nodes.front() = 0.0;

    double max_value = s_nodes.front();
    double r_max = r_nodes.back();
    double s_min = s_nodes.back();
    // interpolate ln s against u = r^2: a smooth nondegenerate peak is linear
    // in these variables near u = 0, so the pchip stays accurate at the top
    std::vector<double> u_nodes(r_nodes.size()), y_nodes(s_nodes.size());
    for (size_t i = 0; i < r_nodes.size(); ++i) {
        u_nodes[i] = r_nodes[i] * r_nodes[i];
        y_nodes[i] = std::log(s_nodes[i]);
    }
    auto interp = std::make_shared<
        boost::math::interpolators::pchip<std::vector<double>>>(
        std::move(u_nodes), std::move(y_nodes));
    double u_max = r_max * r_max;
    // exponential continuation below the grid
    double kappa = std::max(-interp->prime(u_max) * 2.0 * r_max, 1e-8);
    auto eval = [interp, r_max, u_max, s_min, kappa](double r) {
        if (r <= r_max) return std::exp((*interp)(r * r));
        return s_min * std::exp(-kappa * (r - r_max));
    };
    auto deriv = [interp, r_max, u_max, s_min, kappa](double r) {
        if (r <= r_max)
            return std::exp((*interp)(r * r)) * interp->prime(r * r) * 2.0 * r;
        return -kappa * s_min * std::exp(-kappa * (r - r_max));
    };
    DecayCertificate cert{0.0, max_value * std::exp(kappa * r_max), kappa};
    return RadialProfile(eval, deriv, max_value, cert);
}

namespace {

double golden_max(const std::function<double(double)>& f, double a, double b) {
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
    double f1 = f(x1), f2 = f(x2);
    while (b - a > 1e-10) {
        if (f1 < f2) {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + gr * (b - a);
            f2 = f(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - gr * (b - a);
            f1 = f(x1);
        }
    }
    return 0.5 * (a + b);
}

}  // namespace

ReconstructionReport reconstruct_field_1d(const RadialProfile& profile,
                                          const PotentialField& target) {
    if (target.dimension() != 1)
        throw InversionError("flowline reconstruction is n = 1 only");
    double vmax_t = target.max_value();
    if (!(vmax_t > 0.0)) throw InversionError("target field vanishes");

    // locate x0 = argmax of the target: coarse scan + golden-section polish
    double c0 = target.center().empty() ? 0.0 : target.center()[0];
    double L = target.support_radius(1e-10 * vmax_t) + 1.0;
    double best_x = c0, best_v = -1.0;
    const int N = 8000;
    for (int i = 0; i <= N; ++i) {
        double x = c0 - L + 2.0 * L * i / N;
        double v = target(x);
        if (v > best_v) {
            best_v = v;
            best_x = x;
        }
    }
    double dx = 2.0 * L / N;
    double x0 = golden_max([&](double x) { return target(x); },
                           best_x - dx, best_x + dx);

    ReconstructionReport rep;
    rep.x0 = x0;

    double max_r = profile.max_value();
    double floor_v = std::max(1e-4 * max_r, 1e-300);
    const double eta = 1e-4;
    double r_stop = profile.inverse(floor_v);

    // flowline V' = -|R'(R^{-1}(V))| seeded just off the peak; the two
    // directions are mirror images, so integrate once in the offset u >= 0
    std::vector<double> xs, vs;
    {
        double v = profile(eta);
        auto rhs = [&](double, const double& vv) {
            double vc = std::min(std::max(vv, floor_v * 0.5), max_r);
            double g = std::abs(profile.deriv(profile.inverse(vc)));
            if (g < 1e-13 * (1.0 + vc) && vc > 2.0 * floor_v)
                throw InversionError("flowline stalled: R' vanishes away "
                                     "from the peak");
            return -g;
        };
        const int steps = 800;
        xs = {0.0, eta};
        vs = {max_r, v};
        for (int i = 1; i <= steps; ++i) {
            double r0 = eta + (r_stop - eta) * (i - 1) / double(steps);
            double r1 = eta + (r_stop - eta) * i / double(steps);
            rk45(rhs, r0, r1, v, 1e-11, 1e-14);
            if (v < floor_v) v = floor_v;
            xs.push_back(r1);
            vs.push_back(v);
            if (v <= floor_v) break;
        }
    }
    double span = xs.back();
    auto rxs = xs;
    auto rvs = vs;
    boost::math::interpolators::pchip<std::vector<double>> vr(
        std::move(rxs), std::move(rvs));

    const int grid_n = 1600;
    for (int i = -grid_n / 2; i <= grid_n / 2; ++i) {
        double u = span * 2.0 * i / grid_n;  // offset from x0
        double rec = vr(std::min(std::abs(u), span));
        double x = x0 + u;
        rep.x.push_back(x);
        rep.reconstructed.push_back(rec);
        rep.target.push_back(target(x));
        rep.sup_error = std::max(rep.sup_error,
                                 std::abs(rec - rep.target.back()));
    }
    return rep;
}

}  // namespace resolab
