// resolab: resonances and trace invariants of 1-D semiclassical Schrödinger
// operators, with the moment-inversion pipeline recovering radial potentials
// up to translation.

#include "resolab/config.hpp"
#include "resolab/inversion.hpp"
#include "resolab/io.hpp"
#include "resolab/moments.hpp"
#include "resolab/resonances.hpp"
#include "resolab/trace.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <iostream>

using json = nlohmann::ordered_json;
namespace fs = std::filesystem;

namespace {

using namespace resolab;

std::string out_path(const RunConfig& c, const std::string& name) {
    fs::create_directories(c.out_dir);
    return (fs::path(c.out_dir) / name).string();
}

TestFunctionPair pair_from(const RunConfig& c) {
    return build_pair(BumpSpec{c.t0, c.T}, c.order);
}

int cmd_resonances(const RunConfig& c) {
    PotentialField field = make_field(c);
    if (field.dimension() != 1) throw ConfigError("potential.n: resonances require n = 1");
    SpectralProblem prob(field, c.h, c.ode_tol);
    Rect window{0.0, c.window_re, -c.window_depth, 0.0};
    ResonanceSet set = find_resonances(prob, window);

    Csv csv;
    csv.header = {"re", "im", "multiplicity", "residual"};
    json jr = json::array();
    for (const auto& r : set.items) {
        csv.rows.push_back({r.lambda.real(), r.lambda.imag(),
                            double(r.multiplicity), r.residual});
        jr.push_back({{"re", r.lambda.real()},
                      {"im", r.lambda.imag()},
                      {"multiplicity", r.multiplicity},
                      {"residual", r.residual}});
    }
    write_csv(out_path(c, "resonances.csv"), csv);
    json j{{"h", c.h},
           {"window", {{"re_max", c.window_re}, {"depth", c.window_depth}}},
           {"count", set.items.size()},
           {"total_multiplicity", set.total_multiplicity()},
           {"truncated", set.truncated},
           {"resonances", jr}};
    write_text(out_path(c, "resonances.json"), j.dump(2) + "\n");
    return set.truncated ? 2 : 0;
}

int cmd_trace(const RunConfig& c) {
    PotentialField field = make_field(c);
    TestFunctionPair pair = pair_from(c);
    std::vector<double> hs = c.h_list;
    if (hs.empty())
        for (int j = 0; j <= 6; ++j) hs.push_back(std::pow(2.0, -j));
    TraceFit fit = semiclassical_fit(field, pair, hs);
    double i1 = direct_leading(field, pair);
    double i2 = direct_subleading(field, pair);

    Csv csv;
    csv.header = {"h", "value", "resonance_value", "resonance_bound"};
    for (const auto& s : fit.samples)
        csv.rows.push_back({s.h, s.value, s.resonance_value, s.resonance_bound});
    write_csv(out_path(c, "trace_sweep.csv"), csv);

    json j{{"c0", fit.c0},
           {"c2", fit.c2},
           {"c4", fit.c4},
           {"rms_residual", fit.rms_residual},
           {"condition", fit.condition},
           {"direct_leading", i1},
           {"direct_subleading", i2},
           {"c0_rel_error", i1 != 0.0 ? fit.c0 / i1 - 1.0 : fit.c0},
           {"c2_rel_error",
            i2 != 0.0 ? fit.c2 / (i2 / 12.0) - 1.0 : fit.c2}};
    write_text(out_path(c, "fit.json"), j.dump(2) + "\n");
    return 0;
}

int cmd_invariants(const RunConfig& c) {
    PotentialField field = make_field(c);
    TestFunctionPair pair = pair_from(c);
    int n = field.dimension();
    int K = c.k_max > 0 ? c.k_max : n + 12;
    std::vector<double> lambdas =
        c.lambda_list.empty() ? default_lambda_list() : c.lambda_list;
    MomentTable fitted =
        extract_moments(direct_evaluators(field, pair), pair, n, K, lambdas);
    MomentTable direct = direct_moments(field, n, K);

    Csv csv;
    csv.header = {"k", "M_fitted", "M_direct", "M_residual", "M_unreliable",
                  "N_fitted", "N_direct", "N_residual", "N_unreliable"};
    for (int k = n; k <= K; ++k)
        csv.rows.push_back({double(k), fitted.M_at(k), direct.M_at(k),
                            fitted.M_residual[k - n],
                            double(fitted.M_unreliable[k - n]), fitted.N_at(k),
                            direct.N_at(k), fitted.N_residual[k - n],
                            double(fitted.N_unreliable[k - n])});
    write_csv(out_path(c, "moments.csv"), csv);

    double worst_m = 0.0, worst_n = 0.0;
    for (int k = n; k <= std::min(K, n + 6); ++k) {
        worst_m = std::max(worst_m, std::abs(fitted.M_at(k) / direct.M_at(k) - 1.0));
        worst_n = std::max(worst_n, std::abs(fitted.N_at(k) / direct.N_at(k) - 1.0));
    }
    json j{{"n", n},
           {"K", K},
           {"lambda_list", lambdas},
           {"max_rel_error_M_first7", worst_m},
           {"max_rel_error_N_first7", worst_n}};
    write_text(out_path(c, "invariants.json"), j.dump(2) + "\n");
    return 0;
}

json certificate_json(const Certificate& cert) {
    return json{{"verdict", cert.verdict},
                {"sup_defect", cert.sup_defect},
                {"levels", cert.s},
                {"defect", cert.defect}};
}

int cmd_pipeline(const RunConfig& c) {
    PotentialField field = make_field(c);
    if (!(field.max_value() > 0.0))
        throw ConfigError("potential: pipeline requires max V > 0");
    int n = field.dimension();
    int K = c.k_max > 0 ? c.k_max : 40;
    MomentTable table = direct_moments(field, n, K);

    Csv mcsv;
    mcsv.header = {"k", "M", "N"};
    for (int k = n; k <= K; ++k)
        mcsv.rows.push_back({double(k), table.M_at(k), table.N_at(k)});
    write_csv(out_path(c, "moments.csv"), mcsv);

    auto grid = level_grid(field.max_value(), c.grid_nodes);
    DistributionFunction dist = moments_to_distribution(table, grid);
    Csv dcsv;
    dcsv.header = {"s", "mu"};
    for (size_t i = 0; i < dist.s.size(); ++i)
        dcsv.rows.push_back({dist.s[i], dist.mu[i]});
    write_csv(out_path(c, "distribution.csv"), dcsv);

    CoareaDensities dens = coarea_densities(dist, table);
    Certificate cert = cs_certificate(dens);
    write_text(out_path(c, "certificate.json"),
               certificate_json(cert).dump(2) + "\n");

    json jr{{"verdict", cert.verdict}};
    if (cert.verdict == "RADIAL-CONSISTENT") {
        RadialProfile profile = distribution_to_profile(dist, n);
        if (n == 1) {
            ReconstructionReport rep = reconstruct_field_1d(profile, field);
            jr["x0"] = rep.x0;
            jr["sup_error"] = rep.sup_error;
        }
    }
    jr["ill_posed"] = dist.ill_posed;
    jr["fit_residual"] = dist.fit_residual;
    write_text(out_path(c, "reconstruction.json"), jr.dump(2) + "\n");
    return 0;
}

int cmd_certify(const RunConfig& c) {
    PotentialField field = make_field(c);
    if (!(field.max_value() > 0.0))
        throw ConfigError("potential: certify requires max V > 0");
    auto grid = level_grid(field.max_value(), std::min(c.grid_nodes, 60), 5e-3);
    grid.pop_back();  // the top level is critical by construction
    Certificate cert = cs_certificate(oracle_densities(field, grid));
    write_text(out_path(c, "certificate.json"),
               certificate_json(cert).dump(2) + "\n");
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"resonance laboratory for 1-D semiclassical potentials"};
    app.require_subcommand(1);
    std::string config_path;
    std::string out_override;
    int threads = 0;
    app.add_option("--config", config_path, "run configuration file")
        ->required();
    app.add_option("--out", out_override, "output directory override");
    app.add_option("--threads", threads, "worker thread count");
    for (const char* name : {"resonances", "trace", "invariants", "pipeline",
                             "certify"})
        app.add_subcommand(name);
    CLI11_PARSE(app, argc, argv);

    if (threads > 0)
        setenv("RESOLAB_THREADS", std::to_string(threads).c_str(), 1);

    try {
        resolab::RunConfig config = resolab::parse_config(config_path);
        if (!out_override.empty()) config.out_dir = out_override;
        resolab::validate(config);
        std::string cmd = app.get_subcommands().front()->get_name();
        int rc = 0;
        if (cmd == "resonances") rc = cmd_resonances(config);
        else if (cmd == "trace") rc = cmd_trace(config);
        else if (cmd == "invariants") rc = cmd_invariants(config);
        else if (cmd == "pipeline") rc = cmd_pipeline(config);
        else rc = cmd_certify(config);
        return rc;
    } catch (const resolab::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
