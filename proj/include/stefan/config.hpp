#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "stefan/analysis.hpp"

namespace stefan {

/// Raised for unreadable or inconsistent configuration files.
class ConfigError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

/// Problem configuration read from an INI-style file:
///
///   [domain]       ell, T
///   [beta]         phase_temps, jumps, branch1..branchJ+1, slope_lo, slope_hi
///   [coefficients] a, b, c, f, a0
///   [data]         phi, p, omega, omega_mode (average|nodal), exact (optional reference v(x, t))
///   [control]      R, initial (expression in t or "random"), initial_csv
///   [grid]         m, n, levels ("8x16, 16x32, ..."), study (forward|optimize)
///   [solver]       fp_tol, residual_tol, max_sweeps
///   [optimizer]    tol, max_iters, fd_epsilon, seed
///   [mollifier]    n
///
/// Lists are comma separated; a branch is a comma separated list of "x y" pairs.
struct Config {
    double ell = 1.0;
    double T = 1.0;

    std::vector<double> phase_temps;
    std::vector<double> jumps;
    std::vector<LinearBranch> branches;
    double slope_lo = 1.0;
    double slope_hi = 1.0;

    Expr a = Expr::constant(1.0), b, c, f;
    double a0 = 1.0;
    Expr phi, p, omega;
    bool nodal_omega = false;
    std::optional<Expr> exact;

    double R = 1.0;
    std::optional<Expr> initial;  // unset: zero control
    bool random_initial = false;
    std::string initial_csv;

    int m = 16;
    int n = 16;
    std::vector<Level> levels;
    StudyMode study = StudyMode::Forward;

    SolverOptions solver;
    OptimizerOptions optimizer;
    std::uint64_t seed = 0;
    std::optional<double> mollifier_n;

    /// FNV-1a hash of the file contents.
    std::uint64_t hash = 0;
    std::vector<std::string> warnings;

    ProblemData problem_data() const;
    BetaGraph beta_graph() const;
};

Config parse_config(const std::string& text);
Config load_config(const std::string& path);

/// Control vector from a CSV with columns k,t,g (header and '#' lines skipped).
DiscreteControl read_control_csv(const std::string& path, const Grid& grid);

}  // namespace stefan
