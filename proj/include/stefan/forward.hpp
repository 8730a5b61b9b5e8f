#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "stefan/beta.hpp"
#include "stefan/control.hpp"
#include "stefan/grid.hpp"

namespace stefan {

/// Discrete state v_i(k), i = 0..m, k = 0..n, stored with k as the row index.
struct DiscreteState {
    Grid grid;
    Table v;  // (k, i)

    double operator()(int i, int k) const { return v(k, i); }
    std::vector<double> row(int k) const;
    double linf() const;
};

struct SolverOptions {
    /// Stop the sweeps once max_i |v^{N+1} - v^N| drops to this value.
    /// Unset means 1e-12 (1 + ||v(k-1)||_inf).
    std::optional<double> fp_tol;
    double residual_tol = 1e-11;
    int max_sweeps = 10000;
    /// Consecutive sweeps with ratio >= 1 before NonContracting is raised.
    int noncontract_window = 10;
};

struct StepReport {
    int k = 0;
    int sweeps = 0;
    /// A_N / A_{N-1} for every sweep whose previous change was above the
    /// round-off floor.
    std::vector<double> ratios;
    double final_change = 0.0;
    double fp_tol = 0.0;
    double max_residual = 0.0;
    long scalar_iterations = 0;
    /// Theoretical contraction factor with zeta replaced by slope_lo.
    double delta_theory = 0.0;
    /// Some recorded ratio was >= 1.
    bool flagged = false;

    double max_ratio() const;
};

struct SolverReport {
    std::vector<StepReport> steps;
    double wall_seconds = 0.0;
    long total_sweeps = 0;
    int max_sweeps_per_step = 0;
};

class SolverError : public std::runtime_error {
public:
    enum class Kind { NonContracting, MaxSweepsExceeded, ScalarBracket };

    SolverError(Kind kind, const std::string& what, StepReport report)
        : std::runtime_error(what), kind_(kind), report_(std::move(report)) {}

    Kind kind() const noexcept { return kind_; }
    const StepReport& report() const noexcept { return report_; }

private:
    Kind kind_;
    StepReport report_;
};

/// Unique root of alpha v + s b_n(v) = r (strictly increasing when alpha + s slope_lo > 0),
/// by Newton steps guarded with a bisection bracket grown from guess +- 1.
/// Residual tolerance 1e-13 max(1, |r|).
double scalar_solve(double alpha, double s, double r, const SmoothedBeta& sb, double guess = 0.0,
                    int* iterations = nullptr);

/// Coefficients of the nonlinear tridiagonal system for one time level.
/// Row i reads lower[i] v_{i-1} + diag[i] v_i + s b_n(v_i) [i < m] + upper[i] v_{i+1} = rhs[i].
struct StepSystem {
    std::vector<double> lower, diag, upper, rhs;
    double s = 0.0;  // h^2 / tau

    std::vector<double> residual(const std::vector<double>& v, const SmoothedBeta& sb) const;
};

StepSystem assemble_step(const std::vector<double>& v_prev, int k, const AveragedData& data, double g_k,
                         const SmoothedBeta& sb, const Grid& grid);

/// Contraction bound max_i delta_i^{-1} with zeta replaced by slope_lo.
double contraction_bound(int k, const AveragedData& data, double slope_lo, const Grid& grid);

/// Solve time level k by successive approximations: rows 0..m-1 are scalar
/// solves with neighbours frozen at the previous sweep, then the last row uses
/// the fresh v_{m-1}. `start` overrides the initial sweep iterate (default v_prev).
std::vector<double> solve_step(const std::vector<double>& v_prev, int k, const AveragedData& data, double g_k,
                               const SmoothedBeta& sb, const Grid& grid, const SolverOptions& opts,
                               StepReport& report, const std::vector<double>* start = nullptr);

/// Full discrete state for the control gd. The boundary flux at step k is the
/// mean of the interpolant P_n(gd) over [t_{k-1}, t_k].
DiscreteState solve_forward(const DiscreteControl& gd, const AveragedData& data, const SmoothedBeta& sb,
                            const Grid& grid, const SolverOptions& opts, SolverReport* report = nullptr);

/// Divided difference (b_n(v_new) - b_n(v_old)) / (v_new - v_old), or b_n'(v_new)
/// when the two values are within 1e-12.
double zeta(const SmoothedBeta& sb, double v_new, double v_old);

/// Residual of the per-step summation identity tested with each basis vector
/// e_j, j = 0..m. g_kn is the boundary flux used at step k.
std::vector<double> residual_dsvsum(const DiscreteState& state, const AveragedData& data, const SmoothedBeta& sb,
                                    int k, double g_kn);

}  // namespace stefan
