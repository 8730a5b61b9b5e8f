#include "stefan/objective.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

namespace stefan {

Problem make_problem(const ProblemData& data, const BetaGraph& beta, int m, int n,
                     std::optional<double> mollifier_n, bool nodal_omega, std::vector<std::string>* warnings) {
    Grid grid = make_grid(data, beta.slope_lo(), m, n, warnings);
    AveragedData avg = average_data(data, grid);
    std::vector<double> omega = avg.omega;
    if (nodal_omega)
        for (int i = 0; i <= m; ++i) omega[i] = data.omega(grid.x(i), 0.0);
    return Problem{grid, std::move(avg), SmoothedBeta(beta, mollifier_n.value_or(n)), std::move(omega), {}, 1};
}

double cost(const DiscreteState& state, const std::vector<double>& omega, const Grid& grid) {
    double s = 0.0;
    for (int i = 1; i <= grid.m; ++i) {
        const double d = state(i, grid.n) - omega[i];
        s += grid.h * d * d;
    }
    return s;
}

double evaluate_cost(const DiscreteControl& gd, const Problem& problem) {
    const DiscreteState st = solve_forward(gd, problem.data, problem.sb, problem.grid, problem.solver);
    return cost(st, problem.omega, problem.grid);
}

namespace {

// Cost of the control whose step fluxes are `flux`, reusing base rows 0..first-1.
double cost_from(const DiscreteState& base, int first, const std::vector<double>& flux, const Problem& pb) {
    const Grid& g = pb.grid;
    std::vector<double> row = base.row(first - 1);
    for (int k = first; k <= g.n; ++k) {
        StepReport rep;
        row = solve_step(row, k, pb.data, flux[k], pb.sb, g, pb.solver, rep);
    }
    double s = 0.0;
    for (int i = 1; i <= g.m; ++i) {
        const double d = row[i] - pb.omega[i];
        s += g.h * d * d;
    }
    return s;
}

}  // namespace

std::vector<double> fd_gradient(const DiscreteControl& gd, const Problem& problem, double eps) {
    const Grid& g = problem.grid;
    if (eps <= 0.0) eps = 1e-6 * (1.0 + discrete_norm(gd));
    const DiscreteState base = solve_forward(gd, problem.data, problem.sb, g, problem.solver);
    const std::vector<double> flux = PiecewiseLinearControl(gd).cell_means();

    std::vector<double> grad(g.n + 1, 0.0);
    auto component = [&](int k) {
        // g_k enters the fluxes of steps k and k+1 with weight 1/2 each.
        const int first = std::max(1, k);
        std::vector<double> fp = flux, fm = flux;
        for (int j : {k, k + 1}) {
            if (j < 1 || j > g.n) continue;
            fp[j] += 0.5 * eps;
            fm[j] -= 0.5 * eps;
        }
        grad[k] = (cost_from(base, first, fp, problem) - cost_from(base, first, fm, problem)) / (2.0 * eps);
    };

    const int threads = std::clamp(problem.threads, 1, g.n + 1);
    if (threads == 1) {
        for (int k = 0; k <= g.n; ++k) component(k);
        return grad;
    }
    std::atomic<int> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::thread> pool;
    for (int w = 0; w < threads; ++w) {
        pool.emplace_back([&] {
            for (int k = next++; k <= g.n; k = next++) {
                try {
                    component(k);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(failure_mutex);
                    if (!failure) failure = std::current_exception();
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
    return grad;
}

namespace {

double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

}  // namespace

OptimizationResult optimize(const Problem& problem, double R, const DiscreteControl& initial,
                            const OptimizerOptions& opts) {
    const int n = problem.grid.n;
    OptimizationResult res;
    res.control = project(initial, R);
    res.cost = evaluate_cost(res.control, problem);
    res.forward_solves = 1;
    res.history.push_back({0, res.cost, 0.0, discrete_norm(res.control)});
    if (res.cost == 0.0) {
        res.reason = "zero cost";
        return res;
    }

    // Steps follow the gradient in the discrete W_2^1 metric, the metric in
    // which the radial projection is the nearest-point map.
    std::vector<double> grad = fd_gradient(res.control, problem, opts.fd_epsilon);
    res.forward_solves += 2 * (n + 1);
    DiscreteControl dir = riesz_map(grad, problem.grid.tau);
    const double gnorm = discrete_norm(dir);
    if (gnorm == 0.0) {
        res.reason = "stationary";
        return res;
    }
    double trial = opts.initial_step > 0.0 ? opts.initial_step : 1.0 / gnorm;
    int stalled = 0;
    res.reason = "iteration limit";

    for (int iter = 1; iter <= opts.max_iters; ++iter) {
        DiscreteControl cand;
        double cand_cost = 0.0;
        double step = trial;
        bool accepted = false;
        for (int halving = 0; halving <= opts.max_halvings; ++halving) {
            DiscreteControl moved = res.control;
            for (int k = 0; k <= n; ++k) moved.g[k] -= step * dir.g[k];
            cand = project(moved, R);
            cand_cost = evaluate_cost(cand, problem);
            ++res.forward_solves;
            double directional = 0.0;
            for (int k = 0; k <= n; ++k) directional += grad[k] * (cand.g[k] - res.control.g[k]);
            if (cand_cost <= res.cost + opts.armijo_c1 * directional) {
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if (!accepted) {
            res.reason = "line search failed";
            break;
        }

        const double decrease = res.cost - cand_cost;
        const double rel = res.cost > 0.0 ? decrease / res.cost : 0.0;
        DiscreteControl sk = cand;
        for (int k = 0; k <= n; ++k) sk.g[k] -= res.control.g[k];
        res.control = cand;
        res.cost = cand_cost;
        res.eps_n = decrease;
        res.history.push_back({iter, cand_cost, step, discrete_norm(cand)});

        stalled = rel < opts.tol ? stalled + 1 : 0;
        if (stalled >= opts.stall_iterations) {
            res.reason = "converged";
            break;
        }
        if (cand_cost == 0.0) {
            res.reason = "zero cost";
            break;
        }
        if (iter == opts.max_iters) break;

        std::vector<double> new_grad = fd_gradient(res.control, problem, opts.fd_epsilon);
        res.forward_solves += 2 * (n + 1);
        std::vector<double> yk(n + 1);
        for (int k = 0; k <= n; ++k) yk[k] = new_grad[k] - grad[k];
        grad = std::move(new_grad);
        dir = riesz_map(grad, problem.grid.tau);
        // Barzilai-Borwein: <s, s>_M / <s, M^{-1} y>_M = <s, s>_M / (s . y).
        const double sy = dot(sk.g, yk);
        trial = sy > 0.0 ? discrete_inner(sk, sk) / sy : 2.0 * step;
        trial = std::clamp(trial, 1e-12, 1e12);
    }
    return res;
}

}  // namespace stefan
