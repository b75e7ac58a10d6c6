#include "resolab/moments.hpp"

#include "resolab/parallel.hpp"
#include "resolab/quadrature.hpp"
#include "resolab/trace.hpp"

#include <Eigen/Dense>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>

namespace resolab {

namespace {

// Spatial integral of w(x) over the certified support box; the cutoff level
// 1e-20 max V keeps the truncated tail below tol for every moment order.
template <class W>
double support_integral(const PotentialField& field, W&& w, double tol) {
    double vmax = field.max_value();
    if (vmax <= 0.0) return 0.0;
    double L = field.support_radius(1e-20 * vmax);
    int n = field.dimension();
    if (n == 1) {
        double c = field.center().empty() ? 0.0 : field.center()[0];
        return integrate(w, c - L, c + L, tol);
    }
    if (!field.is_radial()) throw MomentError("n >= 3 requires a radial field");
    return sphere_area(n) *
           integrate([&](double r) { return w(r) * std::pow(r, n - 1); }, 0.0,
                     L, tol);
}

}  // namespace

MomentTable direct_moments(const PotentialField& field, int k_min, int k_max,
                           double tol) {
    if (k_min < 1 || k_max < k_min)
        throw MomentError("k-range must satisfy 1 <= k_min <= k_max");
    MomentTable t;
    t.n = field.dimension();
    t.k_min = k_min;
    t.k_max = k_max;
    t.source = "direct-oracle";
    bool radial = field.dimension() > 1;
    for (int k = k_min; k <= k_max; ++k) {
        auto vk = [&](double x) {
            double v = radial ? field.profile()(x) : field(x);
            return std::pow(v, k);
        };
        auto vk_grad2 = [&](double x) {
            double v = radial ? field.profile()(x) : field(x);
            double g = radial ? field.profile().deriv(x) : field.deriv(x);
            return std::pow(v, k) * g * g;
        };
        t.M.push_back(support_integral(field, vk, tol));
        t.N.push_back(support_integral(field, vk_grad2, tol));
        t.M_residual.push_back(0.0);
        t.N_residual.push_back(0.0);
        t.M_unreliable.push_back(0);
        t.N_unreliable.push_back(0);
    }
    return t;
}

InvariantEvaluators direct_evaluators(const PotentialField& field,
                                      const TestFunctionPair& pair) {
    return {
        [&field, pair](double l) {
            return direct_leading(field, pair.scaled(l));
        },
        [&field, pair](double l) {
            return direct_subleading(field, pair.scaled(l));
        },
    };
}

std::vector<double> default_lambda_list() {
    std::vector<double> out;
    for (int j = 0; j <= 16; ++j) out.push_back(4.0 * std::pow(2.0, j / 4.0));
    out.back() = 64.0;
    return out;
}

namespace {

struct FamilySolve {
    std::vector<double> value;     // unknowns, index 0 .. K_solve - lo
    std::vector<double> residual;  // jackknife spread
};

// Least squares for one scaling family:
//   I_i = sum_{k = lo}^{hi} lambda_i^{expo(k)} coef(k) U_k,
// rows weighted by 1/|I_i|, columns scaled to unit norm; residuals by
// leave-one-out jackknife.
FamilySolve solve_family(const std::vector<double>& lambdas,
                         const std::vector<double>& values, int lo, int hi,
                         const std::function<double(int)>& expo,
                         const std::function<double(int)>& coef) {
    const int m = static_cast<int>(lambdas.size());
    const int p = hi - lo + 1;
    if (m < p) throw MomentError("lambda list too short for requested k-range");
    Eigen::MatrixXd A(m, p);
    Eigen::VectorXd b(m);
    double scale0 = 0.0;
    for (double v : values) scale0 = std::max(scale0, std::abs(v));
    if (scale0 == 0.0) {
        FamilySolve out;
        out.value.assign(p, 0.0);
        out.residual.assign(p, 0.0);
        return out;
    }
    for (int i = 0; i < m; ++i) {
        double w = 1.0 / (std::abs(values[i]) + 1e-12 * scale0);
        for (int k = lo; k <= hi; ++k)
            A(i, k - lo) = w * std::pow(lambdas[i], expo(k)) * coef(k);
        b(i) = w * values[i];
    }
    Eigen::VectorXd col_scale(p);
    Eigen::MatrixXd As = A;
    for (int j = 0; j < p; ++j) {
        col_scale(j) = As.col(j).norm();
        if (col_scale(j) > 0.0) As.col(j) /= col_scale(j);
        else col_scale(j) = 1.0;
    }
    auto solve_rows = [&](const std::vector<int>& rows) {
        Eigen::MatrixXd Ar(rows.size(), p);
        Eigen::VectorXd br(rows.size());
        for (size_t r = 0; r < rows.size(); ++r) {
            Ar.row(r) = As.row(rows[r]);
            br(r) = b(rows[r]);
        }
        Eigen::VectorXd u = Ar.bdcSvd(Eigen::ComputeThinU | Eigen::ComputeThinV)
                                .solve(br);
        return Eigen::VectorXd((u.array() / col_scale.array()).matrix());
    };
    std::vector<int> all(m);
    for (int i = 0; i < m; ++i) all[i] = i;
    Eigen::VectorXd full = solve_rows(all);
    Eigen::VectorXd spread = Eigen::VectorXd::Zero(p);
    if (m > p) {
        for (int drop = 0; drop < m; ++drop) {
            std::vector<int> rows;
            for (int i = 0; i < m; ++i)
                if (i != drop) rows.push_back(i);
            Eigen::VectorXd u = solve_rows(rows);
            spread = spread.cwiseMax((u - full).cwiseAbs());
        }
    }
    FamilySolve out;
    out.value.assign(full.data(), full.data() + p);
    out.residual.assign(spread.data(), spread.data() + p);
    return out;
}

}  // namespace

MomentTable extract_moments(const InvariantEvaluators& evaluators,
                            const TestFunctionPair& pair, int n, int K,
                            const std::vector<double>& lambda_list) {
    if (n < 1 || n % 2 == 0) throw MomentError("dimension must be odd >= 1");
    if (K < n) throw MomentError("K must be >= n");
    if (lambda_list.size() < 2) throw MomentError("lambda list too short");
    for (size_t i = 1; i < lambda_list.size(); ++i)
        if (lambda_list[i] <= lambda_list[i - 1])
            throw MomentError("lambda list must be strictly increasing");

    const int m = static_cast<int>(lambda_list.size());
    // momentum coefficients up to the highest reliable order we could use
    const int want = std::min(K + 8, pair.max_order());
    std::vector<double> C(want + 1, 0.0);
    int usable = 0;
    for (int k = std::min(n, 3); k <= want; ++k) {
        try {
            C[k] = momentum_integral(pair, k, n);
        } catch (const TestFnError&) {
            break;  // two-route self-check failed: orders end here
        }
        usable = k;
    }
    // guard unknowns absorb the neglected tail of the expansion; how many are
    // needed depends on how fast the pair's momentum coefficients decay, so
    // the count is chosen per family below from the solution's stability
    const int g_max = std::min({4, usable - K - 4, m - K - 2});
    if (g_max < 1)
        throw MomentError("test-function pair order too small: need reliable "
                          "f^(k) up to k = " + std::to_string(K + 5));

    std::vector<double> I1 =
        parallel_map(lambda_list, [&](double l) { return evaluators.leading(l); });
    std::vector<double> I2 = parallel_map(
        lambda_list, [&](double l) { return evaluators.subleading(l); });

    auto fact = [](int k) {
        double f = 1.0;
        for (int i = 2; i <= k; ++i) f *= i;
        return f;
    };

    // Solve with guard counts 1..g_max+1 and keep the guard whose requested
    // coefficients are the most stable: small jackknife spread and small
    // change when one more guard column is added (the latter catches the
    // truncation bias that the jackknife cannot see).
    auto pick = [&](const std::vector<double>& vals, int lo,
                    const std::function<double(int)>& expo,
                    const std::function<double(int)>& coef) {
        std::vector<FamilySolve> sols;
        for (int g = 1; g <= g_max + 1; ++g)
            sols.push_back(
                solve_family(lambda_list, vals, lo, K + g, expo, coef));
        int best = 0;
        double best_score = 1e300;
        for (int g = 1; g <= g_max; ++g) {
            double score = 0.0;
            for (int k = n; k <= K; ++k) {
                int i = k - lo;
                double diff =
                    std::abs(sols[g - 1].value[i] - sols[g].value[i]);
                double ref = std::abs(sols[g - 1].value[i]) + 1e-300;
                score = std::max(
                    score, std::max(sols[g - 1].residual[i], diff) / ref);
            }
            if (score < best_score) {
                best_score = score;
                best = g - 1;
            }
        }
        FamilySolve out = sols[best];
        for (size_t i = 0; i < out.value.size(); ++i)
            out.residual[i] = std::max(
                out.residual[i],
                std::abs(out.value[i] - sols[best + 1].value[i]));
        return out;
    };

    FamilySolve first = pick(
        I1, n,
        [&](int k) { return 0.5 * n - k; },
        [&](int k) { return C[k] / fact(k); });
    FamilySolve second = pick(
        I2, 0,
        [&](int j) { return 0.5 * n - 3.0 - j; },
        [&](int j) { return C[j + 3] / fact(j); });

    MomentTable t;
    t.n = n;
    t.k_min = n;
    t.k_max = K;
    t.source = "fitted";
    for (int k = n; k <= K; ++k) {
        double Mk = first.value[k - n];
        double Mr = first.residual[k - n];
        double Nk = second.value[k];  // second family indexed from j = 0
        double Nr = second.residual[k];
        t.M.push_back(Mk);
        t.M_residual.push_back(Mr);
        t.M_unreliable.push_back(Mr > 1e-3 * std::abs(Mk) ? 1 : 0);
        t.N.push_back(Nk);
        t.N_residual.push_back(Nr);
        t.N_unreliable.push_back(Nr > 1e-3 * std::abs(Nk) ? 1 : 0);
    }
    return t;
}

}  // namespace resolab
