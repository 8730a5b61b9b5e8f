#include "stefan/cli.hpp"

#include <chrono>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <random>
#include <sstream>

#include "stefan/config.hpp"
#include "stefan/scenarios.hpp"

namespace stefan::cli {

namespace {

namespace fs = std::filesystem;

std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

struct Context {
    Config cfg;
    Flags flags;
    std::uint64_t seed = 0;
    std::string command;
    std::ostream& out;
    std::ostream& err;
};

class CsvFile {
public:
    CsvFile(const Context& ctx, const std::string& name, const std::string& columns)
        : path_(fs::path(ctx.flags.out_dir) / name), file_(path_) {
        if (!file_) throw ValidationError("cannot write '" + path_.string() + "'");
        char buf[160];
        std::snprintf(buf, sizeof buf, "# stefan-control %s config-hash=%016" PRIx64 " seed=%" PRIu64 " command=%s",
                      kVersion, ctx.cfg.hash, ctx.seed, ctx.command.c_str());
        file_ << buf << '\n' << columns << '\n';
    }
    template <typename... Cells>
    void row(const Cells&... cells) {
        bool first = true;
        ((file_ << (first ? "" : ",") << cell(cells), first = false), ...);
        file_ << '\n';
    }
    const fs::path& path() const { return path_; }

private:
    static std::string cell(double v) { return num(v); }
    static std::string cell(int v) { return std::to_string(v); }
    static std::string cell(long v) { return std::to_string(v); }
    static std::string cell(const std::string& v) {
        if (v.find_first_of(",\"\n") == std::string::npos) return v;
        std::string q = "\"";
        for (char c : v) q += (c == '"') ? std::string("\"\"") : std::string(1, c);
        return q + "\"";
    }
    static std::string cell(const char* v) { return cell(std::string(v)); }
    static std::string cell(bool v) { return v ? "1" : "0"; }

    fs::path path_;
    std::ofstream file_;
};

Problem build_problem(const Context& ctx, int m, int n) {
    std::vector<std::string> warnings;
    Problem pb = make_problem(ctx.cfg.problem_data(), ctx.cfg.beta_graph(), m, n, ctx.cfg.mollifier_n,
                              ctx.cfg.nodal_omega, &warnings);
    for (const auto& w : warnings) ctx.err << "warning: " << w << '\n';
    pb.solver = ctx.cfg.solver;
    pb.threads = ctx.flags.threads;
    return pb;
}

DiscreteControl initial_control(const Context& ctx, const Grid& grid) {
    const Config& cfg = ctx.cfg;
    if (!cfg.initial_csv.empty()) return read_control_csv(cfg.initial_csv, grid);
    if (cfg.random_initial) {
        std::mt19937_64 rng(ctx.seed);
        std::uniform_real_distribution<double> dist(-1.0, 1.0);
        DiscreteControl gd = DiscreteControl::zeros(grid);
        for (double& g : gd.g) g = dist(rng);
        const double norm = discrete_norm(gd);
        if (norm > 0.0)
            for (double& g : gd.g) g *= 0.5 * cfg.R / norm;
        return gd;
    }
    if (cfg.initial) return qn_map(as_field(*cfg.initial), grid);
    return DiscreteControl::zeros(grid);
}

std::vector<Level> study_levels(const Config& cfg) {
    if (!cfg.levels.empty()) return cfg.levels;
    return {{cfg.m, cfg.n}, {2 * cfg.m, 2 * cfg.n}, {4 * cfg.m, 4 * cfg.n}};
}

StudySetup study_setup(const Context& ctx) {
    const Config& cfg = ctx.cfg;
    StudySetup s;
    s.data = cfg.problem_data();
    s.beta = cfg.beta_graph();
    if (cfg.initial) s.control = as_field(*cfg.initial);
    if (cfg.exact) s.exact = as_field(*cfg.exact);
    s.mollifier_n = cfg.mollifier_n;
    s.nodal_omega = cfg.nodal_omega;
    s.solver = cfg.solver;
    s.optimizer = cfg.optimizer;
    s.threads = ctx.flags.threads;
    return s;
}

void write_state(const Context& ctx, const DiscreteState& state, const std::string& name) {
    CsvFile csv(ctx, name, "i,k,x,t,v");
    const Grid& g = state.grid;
    for (int k = 0; k <= g.n; ++k)
        for (int i = 0; i <= g.m; ++i) csv.row(i, k, g.x(i), g.t(k), state(i, k));
}

void write_field(const Context& ctx, const DiscreteState& state, const std::string& name) {
    CsvFile csv(ctx, name, "x,t,value");
    const Interpolant vhat(state, InterpKind::Bilinear);
    const Grid& g = state.grid;
    const int nx = 2 * g.m, nt = 2 * g.n;
    for (int k = 0; k <= nt; ++k) {
        const double t = (k == nt) ? g.T : g.T * k / nt;
        for (int i = 0; i <= nx; ++i) {
            const double x = (i == nx) ? g.ell : g.ell * i / nx;
            csv.row(x, t, vhat(x, t));
        }
    }
}

void write_control(const Context& ctx, const DiscreteControl& gd, const Grid& grid, const std::string& name) {
    CsvFile csv(ctx, name, "k,t,g");
    for (int k = 0; k <= gd.n(); ++k) csv.row(k, grid.t(k), gd.g[k]);
}

int cmd_solve(const Context& ctx) {
    const Problem pb = build_problem(ctx, ctx.cfg.m, ctx.cfg.n);
    const DiscreteControl gd = initial_control(ctx, pb.grid);
    SolverReport rep;
    const DiscreteState state = solve_forward(gd, pb.data, pb.sb, pb.grid, pb.solver, &rep);

    write_state(ctx, state, "state.csv");
    write_field(ctx, state, "field.csv");
    write_control(ctx, gd, pb.grid, "control.csv");
    CsvFile steps(ctx, "steps.csv", "k,sweeps,max_ratio,final_change,fp_tol,max_residual,delta_theory");
    for (const auto& s : rep.steps)
        steps.row(s.k, s.sweeps, s.max_ratio(), s.final_change, s.fp_tol, s.max_residual, s.delta_theory);

    const EstimateNorms norms = estimate_norms(ctx.cfg.problem_data(), pb.grid, gd);
    const double energy = energy_norm(state).total;
    ctx.out << "grid m=" << pb.grid.m << " n=" << pb.grid.n << '\n'
            << "cost " << num(cost(state, pb.omega, pb.grid)) << '\n'
            << "linf " << num(state.linf()) << '\n'
            << "energy " << num(energy) << '\n'
            << "max sweeps per step " << rep.max_sweeps_per_step << '\n'
            << "wall seconds " << rep.wall_seconds << '\n';
    try {
        ctx.out << "linf ratio " << num(linf_ratio(state, norms)) << '\n';
    } catch (const ValidationError&) {
        ctx.out << "linf ratio undefined (all data norms vanish)\n";
    }
    return Ok;
}

int cmd_optimize(const Context& ctx) {
    const Problem pb = build_problem(ctx, ctx.cfg.m, ctx.cfg.n);
    const DiscreteControl start = project(initial_control(ctx, pb.grid), ctx.cfg.R);
    const OptimizationResult res = optimize(pb, ctx.cfg.R, start, ctx.cfg.optimizer);

    write_control(ctx, res.control, pb.grid, "control.csv");
    CsvFile hist(ctx, "history.csv", "iter,cost,step,norm");
    for (const auto& h : res.history) hist.row(h.iter, h.cost, h.step, h.norm);
    const DiscreteState state = solve_forward(res.control, pb.data, pb.sb, pb.grid, pb.solver);
    write_state(ctx, state, "state.csv");

    ctx.out << "cost " << num(res.cost) << '\n'
            << "iterations " << (res.history.empty() ? 0 : res.history.back().iter) << '\n'
            << "forward solves " << res.forward_solves << '\n'
            << "eps_n " << num(res.eps_n) << '\n'
            << "control norm " << num(discrete_norm(res.control)) << '\n'
            << "stop " << res.reason << '\n';
    return Ok;
}

void write_table(const Context& ctx, const ConvergenceTable& table, const std::string& name) {
    CsvFile csv(ctx, name,
                "m,n,cost,linf_ratio,energy_total,energy_ratio,weak_residual,l2_prev,l2_finest,l2_exact,"
                "control_l2_prev,control_norm,max_sweeps,max_ratio,status");
    for (const auto& r : table.rows)
        csv.row(r.m, r.n, r.cost, r.linf_ratio, r.energy_total, r.energy_ratio, r.weak_residual, r.l2_prev,
                r.l2_finest, r.l2_exact, r.control_l2_prev, r.control_norm, r.max_sweeps, r.max_ratio, r.status);
}

int cmd_refine(const Context& ctx) {
    const ConvergenceTable table = refine_study(study_setup(ctx), study_levels(ctx.cfg), ctx.cfg.study);
    write_table(ctx, table, "table.csv");
    int failed = 0;
    for (std::size_t j = 0; j < table.rows.size(); ++j) {
        const auto& r = table.rows[j];
        ctx.out << "level " << r.m << "x" << r.n << " cost " << num(r.cost) << " l2_prev " << num(r.l2_prev);
        if (r.l2_exact >= 0.0) ctx.out << " l2_exact " << num(r.l2_exact);
        ctx.out << " wall " << r.wall_seconds << "s " << r.status << '\n';
        if (r.status != "ok") {
            ++failed;
            continue;
        }
        write_field(ctx, table.states[j], "field_" + std::to_string(r.m) + "x" + std::to_string(r.n) + ".csv");
    }
    if (failed) {
        ctx.err << "error: " << failed << " level(s) failed\n";
        return SolverFailure;
    }
    return Ok;
}

// ---------------------------------------------------------------------------
// verify

struct Check {
    std::string name;
    bool pass;
    std::string detail;
};

bool decreasing(const std::vector<double>& v) {
    for (std::size_t j = 1; j < v.size(); ++j)
        if (!(v[j] < v[j - 1])) return false;
    return v.size() >= 2;
}

std::string join(const std::vector<double>& v) {
    std::ostringstream os;
    for (std::size_t j = 0; j < v.size(); ++j) os << (j ? " " : "") << num(v[j]);
    return os.str();
}

Check check_contraction(const Context& ctx) {
    const Problem pb = build_problem(ctx, ctx.cfg.m, ctx.cfg.n);
    const DiscreteControl gd = initial_control(ctx, pb.grid);
    SolverReport rep;
    solve_forward(gd, pb.data, pb.sb, pb.grid, pb.solver, &rep);
    double worst = 0.0;
    for (const auto& s : rep.steps) worst = std::max(worst, s.max_ratio());
    return {"contraction", worst < 1.0,
            "max ratio " + num(worst) + ", max sweeps " + std::to_string(rep.max_sweeps_per_step)};
}

std::vector<Check> check_study(const Context& ctx) {
    const ConvergenceTable table = refine_study(study_setup(ctx), study_levels(ctx.cfg), StudyMode::Forward);
    std::vector<double> lr, er, wr;
    for (const auto& r : table.rows) {
        if (r.status != "ok") throw SolverError(SolverError::Kind::MaxSweepsExceeded, r.status, {});
        lr.push_back(r.linf_ratio);
        er.push_back(r.energy_ratio);
        wr.push_back(std::abs(r.weak_residual));
    }
    const double sl = spread(lr), se = spread(er);
    return {{"linf bound", sl < 1.5, "spread " + num(sl) + " over " + join(lr)},
            {"energy bound", se < 1.5, "spread " + num(se) + " over " + join(er)},
            {"weak residual", decreasing(wr), "|residual| " + join(wr)}};
}

Check check_mapping(const Context& ctx) {
    const double T = ctx.cfg.T, R = ctx.cfg.R;
    const Field g = scenarios::scaled_sine(T, 0.95 * R);
    std::vector<double> errs;
    bool feasible = true;
    for (int n = 8; n <= 128; n *= 2) {
        Grid grid;
        grid.T = T;
        grid.n = n;
        grid.tau = T / n;
        const DiscreteControl q = qn_map(g, grid);
        feasible = feasible && discrete_norm(q) <= R;
        errs.push_back(l2_distance(pn_map(q), g));
    }
    bool ratios_ok = true;
    std::vector<double> ratios;
    for (std::size_t j = 1; j < errs.size(); ++j) {
        ratios.push_back(errs[j] / errs[j - 1]);
        ratios_ok = ratios_ok && ratios.back() >= 0.4 && ratios.back() <= 0.7;
    }
    return {"mapping consistency", feasible && ratios_ok,
            std::string(feasible ? "feasible" : "infeasible") + ", error ratios " + join(ratios)};
}

Check check_neumann(const Context& ctx) {
    scenarios::NeumannCase nc = scenarios::neumann();
    nc.setup.threads = ctx.flags.threads;
    const ConvergenceTable table = refine_study(nc.setup, scenarios::neumann_levels(), StudyMode::Forward);
    std::vector<double> errs;
    for (std::size_t j = 0; j < table.rows.size(); ++j) {
        if (table.rows[j].status != "ok")
            throw SolverError(SolverError::Kind::MaxSweepsExceeded, "neumann: " + table.rows[j].status, {});
        errs.push_back(l2_error_final(table.states[j], nc.setup.exact.value()));
    }
    const auto crossings = level_crossings(table.states.back(), nc.T, nc.solution.params().phase_temp);
    const double exact = nc.solution.front(nc.t0 + nc.T);
    const double rel = crossings.empty() ? 1.0 : std::abs(crossings.front() - exact) / exact;
    return {"neumann comparison", rel < 0.05 && decreasing(errs),
            "front error " + num(rel) + ", final profile errors " + join(errs)};
}

int cmd_verify(const Context& ctx) {
    std::vector<Check> checks;
    checks.push_back(check_contraction(ctx));
    for (auto& c : check_study(ctx)) checks.push_back(std::move(c));
    checks.push_back(check_mapping(ctx));
    checks.push_back(check_neumann(ctx));

    CsvFile csv(ctx, "verify.csv", "check,pass,detail");
    bool all = true;
    for (const auto& c : checks) {
        csv.row(c.name, c.pass, c.detail);
        ctx.out << (c.pass ? "PASS " : "FAIL ") << c.name << ": " << c.detail << '\n';
        all = all && c.pass;
    }
    return all ? Ok : VerifyFailure;
}

}  // namespace

int run(const std::string& command, const std::string& config_path, const Flags& flags, std::ostream& out,
        std::ostream& err) {
    try {
        Context ctx{load_config(config_path), flags, 0, command, out, err};
        ctx.seed = flags.seed ? *flags.seed : ctx.cfg.seed;
        if (ctx.flags.threads < 1) throw ValidationError("--threads must be at least 1");
        for (const auto& w : ctx.cfg.warnings) err << "warning: " << w << '\n';
        std::error_code ec;
        fs::create_directories(flags.out_dir, ec);
        if (ec) throw ValidationError("cannot create output directory '" + flags.out_dir + "': " + ec.message());

        if (command == "solve") return cmd_solve(ctx);
        if (command == "optimize") return cmd_optimize(ctx);
        if (command == "refine") return cmd_refine(ctx);
        if (command == "verify") return cmd_verify(ctx);
        throw ValidationError("unknown command '" + command + "' (expected solve, optimize, refine or verify)");
    } catch (const MeshConditionViolated& e) {
        err << "error: mesh condition violated: " << e.what() << '\n';
        return InvalidInput;
    } catch (const ValidationError& e) {
        err << "error: " << e.what() << '\n';
        return InvalidInput;
    } catch (const ParseError& e) {
        err << "error: " << e.what() << '\n';
        return InvalidInput;
    } catch (const EvalError& e) {
        err << "error: " << e.what() << '\n';
        return InvalidInput;
    } catch (const SolverError& e) {
        err << "error: solver failure: " << e.what() << '\n';
        return SolverFailure;
    }
}

}  // namespace stefan::cli
