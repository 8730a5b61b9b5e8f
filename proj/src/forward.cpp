#include "stefan/forward.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <sstream>

namespace stefan {

std::vector<double> DiscreteState::row(int k) const {
    std::vector<double> out(grid.m + 1);
    for (int i = 0; i <= grid.m; ++i) out[i] = v(k, i);
    return out;
}

double DiscreteState::linf() const {
    double s = 0.0;
    for (double x : v.data()) s = std::max(s, std::fabs(x));
    return s;
}

double StepReport::max_ratio() const {
    double r = 0.0;
    for (double x : ratios) r = std::max(r, x);
    return r;
}

// ---------------------------------------------------------------------------

double scalar_solve(double alpha, double s, double r, const SmoothedBeta& sb, double guess, int* iterations) {
    if (!(alpha + s * sb.graph().slope_lo() > 0.0))
        throw ValidationError("scalar_solve: alpha + s*slope_lo must be positive");
    const double tol = 1e-13 * std::max(1.0, std::fabs(r));
    double lo = -HUGE_VAL, hi = HUGE_VAL;
    double v = guess;
    double prev_abs = HUGE_VAL;
    double width = 1.0;
    int doublings = 0;
    int it = 0;
    for (; it < 400; ++it) {
        double bv, dbv;
        sb.eval_with_deriv(v, bv, dbv);
        const double psi = alpha * v + s * bv - r;
        const double dpsi = alpha + s * dbv;
        if (psi > 0.0)
            hi = std::min(hi, v);
        else
            lo = std::max(lo, v);
        const double step = psi / dpsi;
        if (std::fabs(psi) <= tol) {
            // One more Newton correction when it is still visible in v.
            if (std::fabs(step) <= 1e-15 * std::max(1.0, std::fabs(v)) || psi == 0.0) break;
            const double next = v - step;
            if (next > lo && next < hi) v = next;
            break;
        }
        const double newton = v - step;
        const bool inside = newton > lo && newton < hi;
        if (inside && std::fabs(psi) < 0.5 * prev_abs) {
            prev_abs = std::fabs(psi);
            v = newton;
            continue;
        }
        prev_abs = std::fabs(psi);
        if (std::isfinite(lo) && std::isfinite(hi)) {
            v = 0.5 * (lo + hi);
            if (!(v > lo && v < hi)) break;  // bracket at round-off width
            continue;
        }
        if (++doublings > 200)
            throw SolverError(SolverError::Kind::ScalarBracket, "scalar_solve: bracket expansion failed", {});
        v = std::isfinite(lo) ? lo + width : hi - width;
        width *= 2.0;
    }
    if (iterations) *iterations = it + 1;
    return v;
}

// ---------------------------------------------------------------------------

std::vector<double> StepSystem::residual(const std::vector<double>& v, const SmoothedBeta& sb) const {
    const int m = static_cast<int>(v.size()) - 1;
    std::vector<double> res(m + 1);
    for (int i = 0; i <= m; ++i) {
        double r = diag[i] * v[i] - rhs[i];
        if (i > 0) r += lower[i] * v[i - 1];
        if (i < m) r += upper[i] * v[i + 1] + s * sb.eval(v[i]);
        res[i] = r;
    }
    return res;
}

StepSystem assemble_step(const std::vector<double>& v_prev, int k, const AveragedData& data, double g_k,
                         const SmoothedBeta& sb, const Grid& grid) {
    const int m = grid.m;
    const double h = grid.h, h2 = h * h;
    StepSystem sys;
    sys.s = h2 / grid.tau;
    sys.lower.assign(m + 1, 0.0);
    sys.diag.assign(m + 1, 0.0);
    sys.upper.assign(m + 1, 0.0);
    sys.rhs.assign(m + 1, 0.0);
    for (int i = 0; i < m; ++i) {
        const double a = data.a(i, k), b = data.b(i, k), c = data.c(i, k);
        sys.rhs[i] = sys.s * sb.eval(v_prev[i]) + h2 * data.f(i, k);
        sys.upper[i] = -a;
        if (i == 0) {
            sys.diag[i] = a - h * b + h2 * c;
            sys.rhs[i] -= h * g_k;
        } else {
            const double am = data.a(i - 1, k), bm = data.b(i - 1, k);
            sys.lower[i] = -am + h * bm;
            sys.diag[i] = am + a - h * b + h2 * c;
        }
    }
    const double am = data.a(m - 1, k), bm = data.b(m - 1, k);
    sys.lower[m] = -am + h * bm;
    sys.diag[m] = am;
    sys.rhs[m] = h * data.p[k];
    return sys;
}

double contraction_bound(int k, const AveragedData& data, double slope_lo, const Grid& grid) {
    const int m = grid.m;
    const double h = grid.h, h2 = h * h, st = h2 / grid.tau * slope_lo;
    double worst = 0.0;
    double last_row = 0.0;
    for (int i = 0; i < m; ++i) {
        const double a = data.a(i, k), b = data.b(i, k), c = data.c(i, k);
        double bound;
        if (i == 0) {
            bound = std::fabs(a / (a - h * b + h2 * c + st));
        } else {
            const double am = data.a(i - 1, k);
            const double num = am + a - h * b;
            bound = std::fabs(num / (num + h2 * c + st));
        }
        worst = std::max(worst, bound);
        last_row = bound;
    }
    const double bound_m = std::fabs(1.0 - h * data.b(m - 1, k) / data.a(m - 1, k)) * last_row;
    return std::max(worst, bound_m);
}

std::vector<double> solve_step(const std::vector<double>& v_prev, int k, const AveragedData& data, double g_k,
                               const SmoothedBeta& sb, const Grid& grid, const SolverOptions& opts,
                               StepReport& report, const std::vector<double>* start) {
    const int m = grid.m;
    const StepSystem sys = assemble_step(v_prev, k, data, g_k, sb, grid);
    double prev_norm = 0.0;
    for (double x : v_prev) prev_norm = std::max(prev_norm, std::fabs(x));

    report = StepReport{};
    report.k = k;
    report.fp_tol = opts.fp_tol.value_or(1e-12 * (1.0 + prev_norm));
    report.delta_theory = contraction_bound(k, data, sb.graph().slope_lo(), grid);

    std::vector<double> v = start ? *start : v_prev;
    std::vector<double> next(m + 1);
    double change_prev = -1.0;
    int above_one = 0;
    for (int sweep = 0; sweep < opts.max_sweeps; ++sweep) {
        for (int i = 0; i < m; ++i) {
            double r = sys.rhs[i] - sys.upper[i] * v[i + 1];
            if (i > 0) r -= sys.lower[i] * v[i - 1];
            int its = 0;
            next[i] = scalar_solve(sys.diag[i], sys.s, r, sb, v[i], &its);
            report.scalar_iterations += its;
        }
        next[m] = (sys.rhs[m] - sys.lower[m] * next[m - 1]) / sys.diag[m];

        double change = 0.0, scale = 0.0;
        for (int i = 0; i <= m; ++i) {
            change = std::max(change, std::fabs(next[i] - v[i]));
            scale = std::max(scale, std::fabs(next[i]));
        }
        v.swap(next);
        report.sweeps = sweep + 1;
        report.final_change = change;

        const double noise_floor = 64.0 * std::numeric_limits<double>::epsilon() * (1.0 + scale);
        if (change_prev > noise_floor) {
            const double ratio = change / change_prev;
            report.ratios.push_back(ratio);
            if (ratio >= 1.0) {
                report.flagged = true;
                if (++above_one >= opts.noncontract_window) {
                    std::ostringstream msg;
                    msg << "step " << k << ": successive approximations not contracting (ratio " << ratio
                        << " at sweep " << sweep + 1 << ")";
                    throw SolverError(SolverError::Kind::NonContracting, msg.str(), report);
                }
            } else {
                above_one = 0;
            }
        }
        change_prev = change;

        if (change <= report.fp_tol) {
            double worst = 0.0;
            for (double r : sys.residual(v, sb)) worst = std::max(worst, std::fabs(r));
            report.max_residual = worst;
            if (worst <= opts.residual_tol) return v;
        }
    }
    std::ostringstream msg;
    msg << "step " << k << ": " << opts.max_sweeps << " sweeps exhausted (last change " << report.final_change
        << ", residual " << report.max_residual << ")";
    throw SolverError(SolverError::Kind::MaxSweepsExceeded, msg.str(), report);
}

DiscreteState solve_forward(const DiscreteControl& gd, const AveragedData& data, const SmoothedBeta& sb,
                            const Grid& grid, const SolverOptions& opts, SolverReport* report) {
    if (gd.n() != grid.n) throw ValidationError("solve_forward: control length does not match the grid");
    const auto start = std::chrono::steady_clock::now();
    const std::vector<double> flux = PiecewiseLinearControl(gd).cell_means();

    DiscreteState state{grid, Table(grid.n + 1, grid.m + 1)};
    std::vector<double> row = data.phi;
    for (int i = 0; i <= grid.m; ++i) state.v(0, i) = row[i];
    SolverReport local;
    for (int k = 1; k <= grid.n; ++k) {
        StepReport step;
        row = solve_step(row, k, data, flux[k], sb, grid, opts, step);
        for (int i = 0; i <= grid.m; ++i) state.v(k, i) = row[i];
        local.total_sweeps += step.sweeps;
        local.max_sweeps_per_step = std::max(local.max_sweeps_per_step, step.sweeps);
        if (report) local.steps.push_back(std::move(step));
    }
    local.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (report) *report = std::move(local);
    return state;
}

double zeta(const SmoothedBeta& sb, double v_new, double v_old) {
    const double d = v_new - v_old;
    if (std::fabs(d) > 1e-12) return (sb.eval(v_new) - sb.eval(v_old)) / d;
    return sb.deriv(v_new);
}

std::vector<double> residual_dsvsum(const DiscreteState& state, const AveragedData& data, const SmoothedBeta& sb,
                                    int k, double g_kn) {
    const Grid& g = state.grid;
    const int m = g.m;
    std::vector<double> r(m + 1, 0.0);
    for (int i = 0; i < m; ++i) {
        const double vi = state(i, k), vold = state(i, k - 1);
        const double vt = zeta(sb, vi, vold) * (vi - vold) / g.tau;
        const double vx = (state(i + 1, k) - vi) / g.h;
        r[i] += g.h * (vt + data.c(i, k) * vi - data.f(i, k));
        const double flux = data.a(i, k) * vx + data.b(i, k) * vi;
        r[i + 1] += flux;
        r[i] -= flux;
    }
    r[m] -= data.p[k];
    r[0] += g_kn;
    return r;
}

}  // namespace stefan
