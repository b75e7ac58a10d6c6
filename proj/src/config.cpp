#include "resolab/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace resolab {

namespace {

std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

std::vector<double> parse_doubles(const std::string& key,
                                  const std::string& value) {
    std::vector<double> out;
    std::istringstream in(value);
    double v;
    while (in >> v) out.push_back(v);
    if (!in.eof())
        throw ConfigError("invalid numeric list for '" + key + "'");
    return out;
}

double parse_double(const std::string& key, const std::string& value) {
    auto v = parse_doubles(key, value);
    if (v.size() != 1)
        throw ConfigError("expected a single number for '" + key + "'");
    return v[0];
}

int parse_int(const std::string& key, const std::string& value) {
    double d = parse_double(key, value);
    if (d != std::floor(d))
        throw ConfigError("expected an integer for '" + key + "'");
    return static_cast<int>(d);
}

}  // namespace

RunConfig parse_config_text(const std::string& text) {
    RunConfig c;
    std::istringstream in(text);
    std::string line, section;
    std::vector<GaussianBump> bumps;
    bool saw_center = false;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        size_t hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw ConfigError("line " + std::to_string(lineno) +
                                  ": malformed section header");
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("line " + std::to_string(lineno) +
                              ": expected 'key = value'");
        std::string key = section + "." + trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (key == "potential.kind") c.kind = value;
        else if (key == "potential.n") c.n = parse_int(key, value);
        else if (key == "potential.amplitude") c.amplitude = parse_double(key, value);
        else if (key == "potential.width") c.width = parse_double(key, value);
        else if (key == "potential.center") { c.center = parse_doubles(key, value); saw_center = true; }
        else if (key == "potential.height") c.height = parse_double(key, value);
        else if (key == "potential.barrier_width") c.barrier_width = parse_double(key, value);
        else if (key == "potential.bump") {
            auto v = parse_doubles(key, value);
            if (v.size() != 3)
                throw ConfigError("'potential.bump' needs: amplitude width center");
            bumps.push_back(GaussianBump{v[0], v[1], v[2]});
        }
        else if (key == "testfn.t0") c.t0 = parse_double(key, value);
        else if (key == "testfn.T") c.T = parse_double(key, value);
        else if (key == "testfn.order") c.order = parse_int(key, value);
        else if (key == "sweep.h_list") c.h_list = parse_doubles(key, value);
        else if (key == "sweep.lambda_list") c.lambda_list = parse_doubles(key, value);
        else if (key == "window.re_max") c.window_re = parse_double(key, value);
        else if (key == "window.depth") c.window_depth = parse_double(key, value);
        else if (key == "run.h") c.h = parse_double(key, value);
        else if (key == "run.k_min") c.k_min = parse_int(key, value);
        else if (key == "run.k_max") c.k_max = parse_int(key, value);
        else if (key == "run.grid_nodes") c.grid_nodes = parse_int(key, value);
        else if (key == "run.ode_tol") c.ode_tol = parse_double(key, value);
        else if (key == "run.quad_tol") c.quad_tol = parse_double(key, value);
        else if (key == "run.seed") c.seed = static_cast<unsigned>(parse_int(key, value));
        else if (key == "run.out") c.out_dir = value;
        else throw ConfigError("unknown config key '" + key + "'");
    }
    c.bumps = bumps;
    if (!saw_center) c.center.assign(static_cast<size_t>(std::max(c.n, 1)), 0.0);
    return c;
}

RunConfig parse_config(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ConfigError("cannot open config file '" + path + "'");
    std::stringstream buf;
    buf << f.rdbuf();
    return parse_config_text(buf.str());
}

std::string render_config(const RunConfig& c) {
    std::ostringstream out;
    out.precision(17);
    out << "[potential]\n";
    out << "kind = " << c.kind << "\n";
    out << "n = " << c.n << "\n";
    if (c.kind == "gaussian") {
        out << "amplitude = " << c.amplitude << "\n";
        out << "width = " << c.width << "\n";
        out << "center =";
        for (double x : c.center) out << " " << x;
        out << "\n";
    } else if (c.kind == "square-barrier") {
        out << "height = " << c.height << "\n";
        out << "barrier_width = " << c.barrier_width << "\n";
    }
    for (const auto& b : c.bumps)
        out << "bump = " << b.amplitude << " " << b.width << " " << b.center
            << "\n";
    out << "\n[testfn]\n";
    out << "t0 = " << c.t0 << "\nT = " << c.T << "\norder = " << c.order << "\n";
    out << "\n[sweep]\n";
    if (!c.h_list.empty()) {
        out << "h_list =";
        for (double h : c.h_list) out << " " << h;
        out << "\n";
    }
    if (!c.lambda_list.empty()) {
        out << "lambda_list =";
        for (double l : c.lambda_list) out << " " << l;
        out << "\n";
    }
    out << "\n[window]\n";
    out << "re_max = " << c.window_re << "\ndepth = " << c.window_depth << "\n";
    out << "\n[run]\n";
    out << "h = " << c.h << "\n";
    out << "k_min = " << c.k_min << "\nk_max = " << c.k_max << "\n";
    out << "grid_nodes = " << c.grid_nodes << "\n";
    out << "ode_tol = " << c.ode_tol << "\nquad_tol = " << c.quad_tol << "\n";
    out << "seed = " << c.seed << "\nout = " << c.out_dir << "\n";
    return out.str();
}

void validate(const RunConfig& c) {
    static const std::set<std::string> kinds{"gaussian", "mixture",
                                             "square-barrier", "zero"};
    if (!kinds.count(c.kind))
        throw ConfigError("potential.kind: unknown kind '" + c.kind + "'");
    if (c.n < 1 || c.n % 2 == 0)
        throw ConfigError("potential.n: dimension must be odd and >= 1");
    if (c.kind == "gaussian") {
        if (!(c.amplitude > 0.0))
            throw ConfigError("potential.amplitude: must be positive");
        if (!(c.width > 0.0))
            throw ConfigError("potential.width: must be positive");
        if (static_cast<int>(c.center.size()) != c.n)
            throw ConfigError("potential.center: needs n components");
    }
    if (c.kind == "mixture") {
        if (c.bumps.empty())
            throw ConfigError("potential.bump: mixture needs at least one bump");
        if (c.n != 1) throw ConfigError("potential.n: mixture requires n = 1");
    }
    if (c.kind == "square-barrier") {
        if (!(c.height > 0.0))
            throw ConfigError("potential.height: must be positive");
        if (!(c.barrier_width > 0.0))
            throw ConfigError("potential.barrier_width: must be positive");
        if (c.n != 1)
            throw ConfigError("potential.n: square barrier requires n = 1");
    }
    if (!(c.t0 > 0.0) || !(c.T > c.t0))
        throw ConfigError("testfn.t0/testfn.T: need 0 < t0 < T");
    if (c.order < 4) throw ConfigError("testfn.order: must be >= 4");
    for (size_t i = 1; i < c.h_list.size(); ++i)
        if (c.h_list[i] >= c.h_list[i - 1])
            throw ConfigError("sweep.h_list: must be strictly decreasing");
    for (double h : c.h_list)
        if (!(h > 0.0)) throw ConfigError("sweep.h_list: entries must be positive");
    for (size_t i = 1; i < c.lambda_list.size(); ++i)
        if (c.lambda_list[i] <= c.lambda_list[i - 1])
            throw ConfigError("sweep.lambda_list: must be strictly increasing");
    if (!(c.h > 0.0)) throw ConfigError("run.h: must be positive");
    if (c.grid_nodes < 10)
        throw ConfigError("run.grid_nodes: must be at least 10");
    if (!(c.ode_tol > 0.0)) throw ConfigError("run.ode_tol: must be positive");
    if (!(c.quad_tol > 0.0)) throw ConfigError("run.quad_tol: must be positive");
    if (c.window_re <= 0.0 || c.window_depth <= 0.0)
        throw ConfigError("window.re_max/window.depth: must be positive");
    if (c.k_min < 0 || c.k_max < 0 || (c.k_max != 0 && c.k_max < c.k_min))
        throw ConfigError("run.k_min/run.k_max: invalid moment range");
}

PotentialField make_field(const RunConfig& c) {
    validate(c);
    if (c.kind == "zero") return PotentialField::zero_1d();
    if (c.kind == "square-barrier")
        return PotentialField::square_barrier_1d(c.height, c.barrier_width);
    if (c.kind == "mixture")
        return PotentialField::gaussian_mixture_1d(c.bumps);
    return PotentialField::radial(make_gaussian_profile(c.amplitude, c.width),
                                  c.n, c.center);
}

}  // namespace resolab
