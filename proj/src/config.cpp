#include "stefan/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <cmath>
#include <fstream>
#include <sstream>

namespace stefan {

namespace pt = boost::property_tree;

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, sep)) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

double to_double(const std::string& s, const std::string& key) {
    try {
        std::size_t used = 0;
        const double v = std::stod(s, &used);
        if (trim(s.substr(used)).empty()) return v;
    } catch (const std::exception&) {
    }
    throw ConfigError("config: '" + key + "' expects a number, got '" + s + "'");
}

int to_int(const std::string& s, const std::string& key) {
    const double v = to_double(s, key);
    if (v != std::floor(v)) throw ConfigError("config: '" + key + "' expects an integer, got '" + s + "'");
    return static_cast<int>(v);
}

std::vector<double> to_list(const std::string& s, const std::string& key) {
    std::vector<double> out;
    for (const auto& item : split(s, ',')) out.push_back(to_double(item, key));
    return out;
}

Expr to_expr(const std::string& s, const std::string& key) {
    try {
        return Expr::parse(s);
    } catch (const ParseError& e) {
        throw ConfigError("config: '" + key + "': " + e.what());
    }
}

std::uint64_t fnv1a(const std::string& text) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

class Reader {
public:
    explicit Reader(const pt::ptree& tree) : tree_(tree) {}

    std::optional<std::string> get(const std::string& key) const {
        if (auto v = tree_.get_optional<std::string>(pt::ptree::path_type(key, '.'))) return trim(*v);
        return std::nullopt;
    }
    double number(const std::string& key, double fallback) const {
        auto v = get(key);
        return v ? to_double(*v, key) : fallback;
    }
    int integer(const std::string& key, int fallback) const {
        auto v = get(key);
        return v ? to_int(*v, key) : fallback;
    }
    Expr expr(const std::string& key, const Expr& fallback) const {
        auto v = get(key);
        return v ? to_expr(*v, key) : fallback;
    }

private:
    const pt::ptree& tree_;
};

}  // namespace

Config parse_config(const std::string& text) {
    pt::ptree tree;
    try {
        std::istringstream in(text);
        pt::read_ini(in, tree);
    } catch (const pt::ini_parser_error& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    const Reader r(tree);
    Config cfg;
    cfg.hash = fnv1a(text);

    cfg.ell = r.number("domain.ell", cfg.ell);
    cfg.T = r.number("domain.T", cfg.T);

    if (auto v = r.get("beta.phase_temps")) cfg.phase_temps = to_list(*v, "beta.phase_temps");
    if (auto v = r.get("beta.jumps")) cfg.jumps = to_list(*v, "beta.jumps");
    cfg.slope_lo = r.number("beta.slope_lo", cfg.slope_lo);
    cfg.slope_hi = r.number("beta.slope_hi", std::max(cfg.slope_hi, cfg.slope_lo));
    for (std::size_t j = 1; j <= cfg.phase_temps.size() + 1; ++j) {
        const std::string key = "beta.branch" + std::to_string(j);
        auto v = r.get(key);
        if (!v) {
            if (cfg.phase_temps.empty()) {
                cfg.branches.push_back(LinearBranch::line(cfg.slope_lo));
                continue;
            }
            throw ConfigError("config: missing '" + key + "'");
        }
        LinearBranch br;
        for (const auto& pair : split(*v, ',')) {
            std::istringstream ps(pair);
            double x, y;
            std::string rest;
            if (!(ps >> x >> y) || (ps >> rest)) throw ConfigError("config: '" + key + "' expects 'x y' pairs");
            br.x.push_back(x);
            br.y.push_back(y);
        }
        cfg.branches.push_back(std::move(br));
    }

    cfg.a = r.expr("coefficients.a", cfg.a);
    cfg.b = r.expr("coefficients.b", cfg.b);
    cfg.c = r.expr("coefficients.c", cfg.c);
    cfg.f = r.expr("coefficients.f", cfg.f);
    cfg.a0 = r.number("coefficients.a0", cfg.a0);

    cfg.phi = r.expr("data.phi", cfg.phi);
    cfg.p = r.expr("data.p", cfg.p);
    cfg.omega = r.expr("data.omega", cfg.omega);
    if (auto v = r.get("data.omega_mode")) {
        if (*v == "nodal")
            cfg.nodal_omega = true;
        else if (*v != "average")
            throw ConfigError("config: data.omega_mode must be 'average' or 'nodal'");
    }
    if (auto v = r.get("data.exact")) cfg.exact = to_expr(*v, "data.exact");
    if (cfg.phi.uses_t()) cfg.warnings.push_back("data.phi depends on t; it is evaluated at t = 0");
    if (cfg.omega.uses_t()) cfg.warnings.push_back("data.omega depends on t; it is evaluated at t = 0");
    if (cfg.p.uses_x()) cfg.warnings.push_back("data.p depends on x; it is evaluated at x = 0");

    cfg.R = r.number("control.R", cfg.R);
    if (auto v = r.get("control.initial")) {
        if (*v == "random") {
            cfg.random_initial = true;
        } else {
            cfg.initial = to_expr(*v, "control.initial");
            if (cfg.initial->uses_x()) cfg.warnings.push_back("control.initial depends on x; it is evaluated at x = 0");
        }
    }
    if (auto v = r.get("control.initial_csv")) cfg.initial_csv = *v;

    cfg.m = r.integer("grid.m", cfg.m);
    cfg.n = r.integer("grid.n", cfg.n);
    if (auto v = r.get("grid.levels")) {
        for (const auto& item : split(*v, ',')) {
            const auto parts = split(item, 'x');
            if (parts.size() != 2) throw ConfigError("config: grid.levels expects entries like '16x32'");
            cfg.levels.push_back({to_int(parts[0], "grid.levels"), to_int(parts[1], "grid.levels")});
        }
    }

    if (auto v = r.get("grid.study")) {
        if (*v == "optimize")
            cfg.study = StudyMode::Optimize;
        else if (*v != "forward")
            throw ConfigError("config: grid.study must be 'forward' or 'optimize'");
    }

    if (auto v = r.get("solver.fp_tol")) cfg.solver.fp_tol = to_double(*v, "solver.fp_tol");
    cfg.solver.residual_tol = r.number("solver.residual_tol", cfg.solver.residual_tol);
    cfg.solver.max_sweeps = r.integer("solver.max_sweeps", cfg.solver.max_sweeps);

    cfg.optimizer.tol = r.number("optimizer.tol", cfg.optimizer.tol);
    cfg.optimizer.max_iters = r.integer("optimizer.max_iters", cfg.optimizer.max_iters);
    cfg.optimizer.fd_epsilon = r.number("optimizer.fd_epsilon", cfg.optimizer.fd_epsilon);
    cfg.seed = static_cast<std::uint64_t>(r.number("optimizer.seed", 0.0));

    if (auto v = r.get("mollifier.n")) cfg.mollifier_n = to_double(*v, "mollifier.n");

    if (!(cfg.ell > 0.0) || !(cfg.T > 0.0)) throw ConfigError("config: domain.ell and domain.T must be positive");
    if (!(cfg.R > 0.0)) throw ConfigError("config: control.R must be positive");
    if (cfg.m < 1 || cfg.n < 1) throw ConfigError("config: grid.m and grid.n must be at least 1");
    return cfg;
}

Config load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot read '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

ProblemData Config::problem_data() const {
    ProblemData d;
    d.ell = ell;
    d.T = T;
    d.a = as_field(a);
    d.b = as_field(b);
    d.c = as_field(c);
    d.f = as_field(f);
    const Expr ph = phi, om = omega, pp = p;
    d.phi = [ph](double x, double) { return ph.eval(x, 0.0); };
    d.omega = [om](double x, double) { return om.eval(x, 0.0); };
    d.p = [pp](double, double t) { return pp.eval(0.0, t); };
    d.a0 = a0;
    d.R = R;
    return d;
}

BetaGraph Config::beta_graph() const { return BetaGraph::build(phase_temps, jumps, branches, slope_lo, slope_hi); }

DiscreteControl read_control_csv(const std::string& path, const Grid& grid) {
    std::ifstream in(path);
    if (!in) throw ConfigError("control csv: cannot read '" + path + "'");
    DiscreteControl gd = DiscreteControl::zeros(grid);
    std::vector<bool> seen(grid.n + 1, false);
    std::string line;
    while (std::getline(in, line)) {
        line = trim(line);
        if (line.empty() || line[0] == '#' || line[0] == 'k') continue;
        const auto cols = split(line, ',');
        if (cols.size() != 3) throw ConfigError("control csv: expected k,t,g columns in '" + line + "'");
        const int k = to_int(cols[0], "k");
        if (k < 0 || k > grid.n) throw ConfigError("control csv: index out of range in '" + line + "'");
        gd.g[k] = to_double(cols[2], "g");
        seen[k] = true;
    }
    for (int k = 0; k <= grid.n; ++k)
        if (!seen[k]) throw ConfigError("control csv: missing entry k=" + std::to_string(k));
    return gd;
}

}  // namespace stefan
