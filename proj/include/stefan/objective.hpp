#pragma once

#include <string>
#include <vector>

#include "stefan/forward.hpp"

namespace stefan {

/// One discretised optimal control problem: grid, averaged data, mollified
/// graph, target omega_i and solver settings.
struct Problem {
    Grid grid;
    AveragedData data;
    SmoothedBeta sb;
    std::vector<double> omega;  // omega_i, i = 0..m (entry 0 is not used by the cost)
    SolverOptions solver;
    int threads = 1;
};

/// Assemble a Problem from continuous data. The mollification index defaults
/// to the number of time steps. With `nodal_omega` the target is sampled at
/// the nodes instead of averaged over the cells.
Problem make_problem(const ProblemData& data, const BetaGraph& beta, int m, int n,
                     std::optional<double> mollifier_n = std::nullopt, bool nodal_omega = false,
                     std::vector<std::string>* warnings = nullptr);

/// I_n = sum_{i=1..m} h (v_i(n) - omega_i)^2.
double cost(const DiscreteState& state, const std::vector<double>& omega, const Grid& grid);

double evaluate_cost(const DiscreteControl& gd, const Problem& problem);

/// Central differences dI_n/dg_k, k = 0..n. Perturbing g_k changes the flux only
/// from step k on, so each perturbed solve restarts from the base state at k-1.
/// eps <= 0 selects 1e-6 (1 + ||gd||).
std::vector<double> fd_gradient(const DiscreteControl& gd, const Problem& problem, double eps = 0.0);

struct OptimizerOptions {
    double tol = 1e-8;
    int max_iters = 200;
    double fd_epsilon = 0.0;
    double armijo_c1 = 1e-4;
    int max_halvings = 30;
    int stall_iterations = 3;
    /// First trial step; <= 0 means 1 / discrete_norm of the first search direction.
    double initial_step = 0.0;
};

struct HistoryEntry {
    int iter = 0;
    double cost = 0.0;
    double step = 0.0;
    double norm = 0.0;
};

struct OptimizationResult {
    DiscreteControl control;
    double cost = 0.0;
    std::vector<HistoryEntry> history;
    std::string reason;
    long forward_solves = 0;
    /// Last observed cost decrease, reported as the epsilon of the epsilon-minimiser.
    double eps_n = 0.0;
};

/// Projected gradient descent on the ball of radius R with Armijo backtracking. The
/// search direction is the gradient with respect to discrete_inner (see riesz_map).
/// Step sizes after the first follow the Barzilai-Borwein rule.
OptimizationResult optimize(const Problem& problem, double R, const DiscreteControl& initial,
                            const OptimizerOptions& opts = {});

}  // namespace stefan
