#include "stefan/analysis.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "stefan/quadrature.hpp"

namespace stefan {

namespace {

constexpr double kEdgeSlack = 1e-12;

int time_level(double t, double tau, int n) {
    if (t <= 0.0) return 0;
    const int k = static_cast<int>(std::ceil(t / tau - 1e-9));
    return std::clamp(k, 0, n);
}

int space_cell(double x, double h, int m) {
    const int i = static_cast<int>(std::floor(x / h + 1e-12));
    return std::clamp(i, 0, m - 1);
}

double vhat(const DiscreteState& s, int i, int k, double x) {
    const double xi = i * s.grid.h;
    return s(i, k) + (s(i + 1, k) - s(i, k)) * (x - xi) / s.grid.h;
}

// Bilinear interpolant without bounds checks.
double bilinear(const DiscreteState& s, double x, double t) {
    const Grid& g = s.grid;
    const int i = space_cell(x, g.h, g.m);
    const int k = std::max(1, time_level(t, g.tau, g.n));
    const double theta = (t - (k - 1) * g.tau) / g.tau;
    return (1.0 - theta) * vhat(s, i, k - 1, x) + theta * vhat(s, i, k, x);
}

}  // namespace

// ---------------------------------------------------------------------------

Interpolant::Interpolant(DiscreteState state, InterpKind kind) : state_(std::move(state)), kind_(kind) {}

double Interpolant::operator()(double x, double t) const {
    const Grid& g = state_.grid;
    if (x < -kEdgeSlack || x > g.ell * (1.0 + kEdgeSlack) + kEdgeSlack || t < -kEdgeSlack ||
        t > g.T * (1.0 + kEdgeSlack) + kEdgeSlack)
        throw std::out_of_range("interpolant evaluated outside [0, ell] x [0, T]");
    x = std::clamp(x, 0.0, g.ell);
    t = std::clamp(t, 0.0, g.T);
    const int i = space_cell(x, g.h, g.m);
    switch (kind_) {
        case InterpKind::PiecewiseConstant: return state_(i, time_level(t, g.tau, g.n));
        case InterpKind::SpaceLinear: return vhat(state_, i, time_level(t, g.tau, g.n), x);
        case InterpKind::Bilinear: return bilinear(state_, x, t);
    }
    return 0.0;
}

Interpolant interpolate(const DiscreteState& state, InterpKind kind) { return Interpolant(state, kind); }

double l2_distance(const DiscreteState& s1, const DiscreteState& s2) {
    auto merge = [](int n1, double d1, int n2, double d2, double L) {
        std::vector<double> pts;
        for (int i = 0; i <= n1; ++i) pts.push_back(i == n1 ? L : i * d1);
        for (int i = 0; i <= n2; ++i) pts.push_back(i == n2 ? L : i * d2);
        std::sort(pts.begin(), pts.end());
        pts.erase(std::unique(pts.begin(), pts.end(), [L](double a, double b) { return b - a < 1e-13 * L; }),
                  pts.end());
        return pts;
    };
    const auto xs = merge(s1.grid.m, s1.grid.h, s2.grid.m, s2.grid.h, s1.grid.ell);
    const auto ts = merge(s1.grid.n, s1.grid.tau, s2.grid.n, s2.grid.tau, s1.grid.T);
    // Three-point Gauss-Legendre integrates the squared bilinear difference exactly.
    static constexpr double nodes[3] = {-0.7745966692414833770358531, 0.0, 0.7745966692414833770358531};
    static constexpr double weights[3] = {5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0};
    double total = 0.0;
    for (std::size_t a = 0; a + 1 < xs.size(); ++a) {
        const double xm = 0.5 * (xs[a] + xs[a + 1]), xh = 0.5 * (xs[a + 1] - xs[a]);
        for (std::size_t b = 0; b + 1 < ts.size(); ++b) {
            const double tm = 0.5 * (ts[b] + ts[b + 1]), th = 0.5 * (ts[b + 1] - ts[b]);
            double cell = 0.0;
            for (int p = 0; p < 3; ++p)
                for (int q = 0; q < 3; ++q) {
                    const double x = xm + xh * nodes[p], t = tm + th * nodes[q];
                    const double d = bilinear(s1, x, t) - bilinear(s2, x, t);
                    cell += weights[p] * weights[q] * d * d;
                }
            total += cell * xh * th;
        }
    }
    return std::sqrt(total);
}

double l2_error(const DiscreteState& state, const Field& exact) {
    const Grid& g = state.grid;
    double total = 0.0;
    for (int i = 0; i < g.m; ++i)
        for (int k = 1; k <= g.n; ++k) {
            auto sq = [&](double x, double t) {
                const double theta = (t - g.t(k - 1)) / g.tau;
                const double v = (1.0 - theta) * vhat(state, i, k - 1, x) + theta * vhat(state, i, k, x);
                const double d = v - exact(x, t);
                return d * d;
            };
            total += g.h * g.tau * quad::mean_gl5x5(sq, g.x(i), g.x(i + 1), g.t(k - 1), g.t(k));
        }
    return std::sqrt(total);
}

double l2_error_final(const DiscreteState& state, const Field& exact) {
    const Grid& g = state.grid;
    double total = 0.0;
    for (int i = 0; i < g.m; ++i) {
        auto sq = [&](double x) {
            const double d = vhat(state, i, g.n, x) - exact(x, g.T);
            return d * d;
        };
        total += g.h * quad::mean_gl5(sq, g.x(i), g.x(i + 1));
    }
    return std::sqrt(total);
}

// ---------------------------------------------------------------------------

EnergyBreakdown energy_norm(const DiscreteState& state) {
    const Grid& g = state.grid;
    EnergyBreakdown e;
    for (int k = 1; k <= g.n; ++k) {
        double t1 = 0.0, t2 = 0.0, t3 = 0.0;
        for (int i = 0; i < g.m; ++i) {
            const double vt = (state(i, k) - state(i, k - 1)) / g.tau;
            const double vx = (state(i + 1, k) - state(i, k)) / g.h;
            const double vx_old = (state(i + 1, k - 1) - state(i, k - 1)) / g.h;
            const double vxt = (vx - vx_old) / g.tau;
            t1 += g.h * vt * vt;
            t2 += g.h * vx * vx;
            t3 += g.h * vxt * vxt;
        }
        e.term1 += g.tau * t1;
        e.term2 = std::max(e.term2, t2);
        e.term3 += g.tau * g.tau * t3;
    }
    e.total = e.term1 + e.term2 + e.term3;
    return e;
}

double EstimateNorms::energy_denominator() const {
    return phi_w21 * phi_w21 + f_inf * f_inf + p_w21 * p_w21 + g_w21 * g_w21;
}

EstimateNorms estimate_norms(const ProblemData& data, const Grid& grid, const DiscreteControl& gd) {
    const DataNorms dn = estimate_norms(data, grid.m, grid.n);
    const PiecewiseLinearControl gn(gd);
    EstimateNorms out;
    out.f_inf = dn.f_inf;
    out.p_inf = dn.p_inf;
    out.phi_inf = dn.phi_inf;
    out.phi_w21 = dn.phi_w21;
    out.p_w21 = dn.p_w21;
    out.g_inf = gn.linf_norm();
    out.g_w21 = gn.w21_norm();
    return out;
}

double linf_ratio(const DiscreteState& state, const EstimateNorms& norms) {
    const double denom = norms.f_inf + norms.p_inf + norms.g_inf + norms.phi_inf;
    if (!(denom > 0.0)) throw ValidationError("linf_ratio: all data norms vanish, ratio undefined");
    return state.linf() / denom;
}

// ---------------------------------------------------------------------------

double weak_residual(const DiscreteState& state, const ProblemData& data, const AveragedData& avg,
                     const SmoothedBeta& sb, const DiscreteControl& gd, const Field& psi, WeakForm form) {
    const Grid& g = state.grid;
    const int m = g.m, n = g.n;
    for (int j = 0; j <= 4 * m; ++j) {
        const double x = g.ell * j / (4 * m);
        if (std::fabs(psi(x, g.T)) > 1e-10) throw ValidationError("weak_residual: test function must vanish at t = T");
    }
    const std::vector<double> flux = PiecewiseLinearControl(gd).cell_means();
    double total = 0.0;

    if (form == WeakForm::Sampled) {
        Table ps(n + 1, m + 1);
        for (int k = 0; k <= n; ++k)
            for (int i = 0; i <= m; ++i) ps(k, i) = psi(g.x(i), g.t(k));
        for (int k = 1; k <= n; ++k) {
            double inner = 0.0;
            for (int i = 0; i < m; ++i) {
                const double vi = state(i, k);
                const double vx = (state(i + 1, k) - vi) / g.h;
                const double px = (ps(k, i + 1) - ps(k, i)) / g.h;
                double term = avg.a(i, k) * vx * px + avg.b(i, k) * vi * px + avg.c(i, k) * vi * ps(k, i) -
                              avg.f(i, k) * ps(k, i);
                if (k < n) term -= sb.eval(vi) * (ps(k + 1, i) - ps(k, i)) / g.tau;
                inner += g.h * term;
            }
            total += g.tau * inner;
            total += -g.tau * avg.p[k] * ps(k, m) + g.tau * flux[k] * ps(k, 0);
        }
        for (int i = 0; i < m; ++i) total -= g.h * sb.eval(state(i, 0)) * ps(1, i);
        return total;
    }

    const double dx = 1e-6 * g.ell;
    auto psi_x = [&](double x, double t) {
        const double lo = std::max(0.0, x - dx), hi = std::min(g.ell, x + dx);
        return (psi(hi, t) - psi(lo, t)) / (hi - lo);
    };
    for (int i = 0; i < m; ++i) {
        const double x0 = g.x(i), x1 = g.x(i + 1);
        for (int k = 1; k <= n; ++k) {
            const double t0 = g.t(k - 1), t1 = g.t(k);
            const double vi = state(i, k);
            const double vx = (state(i + 1, k) - vi) / g.h;
            // -b_n(v~) psi_t integrated in t exactly: psi(., t_k) - psi(., t_{k-1}).
            const double dpsi = quad::mean_gl5([&](double x) { return psi(x, t1) - psi(x, t0); }, x0, x1);
            total -= g.h * sb.eval(vi) * dpsi;
            auto integrand = [&](double x, double t) {
                const double p = psi(x, t), px = psi_x(x, t);
                return data.a(x, t) * vx * px + data.b(x, t) * vi * px + data.c(x, t) * vi * p - data.f(x, t) * p;
            };
            total += g.h * g.tau * quad::mean_gl5x5(integrand, x0, x1, t0, t1);
        }
        total -= g.h * sb.eval(state(i, 0)) * quad::mean_gl5([&](double x) { return psi(x, 0.0); }, x0, x1);
    }
    const PiecewiseLinearControl gn(gd);
    for (int k = 1; k <= n; ++k) {
        const double t0 = g.t(k - 1), t1 = g.t(k);
        total -= g.tau * quad::mean_gl5([&](double t) { return data.p(0.0, t) * psi(g.ell, t); }, t0, t1);
        // Evaluate g^n on this piece from its end values to stay inside the interval.
        const double ga = gd.g[k - 1], gb = gd.g[k];
        total += g.tau * quad::mean_gl5([&](double t) { return (ga + (gb - ga) * (t - t0) / g.tau) * psi(0.0, t); },
                                        t0, t1);
    }
    return total;
}

// ---------------------------------------------------------------------------

std::vector<double> level_crossings(const DiscreteState& state, double t, double level) {
    const Grid& g = state.grid;
    std::vector<double> u(g.m + 1);
    for (int i = 0; i <= g.m; ++i) u[i] = bilinear(state, g.x(i), std::clamp(t, 0.0, g.T));
    std::vector<double> out;
    for (int i = 0; i < g.m; ++i) {
        const double a = u[i] - level, b = u[i + 1] - level;
        if (a == 0.0) {
            out.push_back(g.x(i));
        } else if (a * b < 0.0) {
            out.push_back(g.x(i) + g.h * a / (a - b));
        }
    }
    if (u[g.m] == level) out.push_back(g.ell);
    return out;
}

// ---------------------------------------------------------------------------

double spread(const std::vector<double>& values) {
    if (values.empty()) return 1.0;
    const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
    if (!(*lo > 0.0)) return HUGE_VAL;
    return *hi / *lo;
}

ConvergenceTable refine_study(const StudySetup& setup, const std::vector<Level>& levels, StudyMode mode) {
    ConvergenceTable table;
    const double ell = setup.data.ell, T = setup.data.T;
    const Field psi = setup.psi ? setup.psi : Field([ell, T](double x, double t) {
        return (T - t) * std::cos(std::numbers::pi * x / ell);
    });
    std::vector<int> good;
    for (const Level& lv : levels) {
        ConvergenceRow row;
        row.m = lv.m;
        row.n = lv.n;
        const auto start = std::chrono::steady_clock::now();
        DiscreteState state;
        DiscreteControl gd;
        try {
            Problem pb = make_problem(setup.data, setup.beta, lv.m, lv.n, setup.mollifier_n, setup.nodal_omega);
            pb.solver = setup.solver;
            pb.threads = setup.threads;
            gd = qn_map(setup.control, pb.grid);
            if (mode == StudyMode::Optimize) {
                const OptimizationResult res = optimize(pb, setup.data.R, gd, setup.optimizer);
                gd = res.control;
            }
            SolverReport rep;
            state = solve_forward(gd, pb.data, pb.sb, pb.grid, pb.solver, &rep);
            row.cost = cost(state, pb.omega, pb.grid);
            const EstimateNorms norms = estimate_norms(setup.data, pb.grid, gd);
            row.linf_ratio = linf_ratio(state, norms);
            row.energy_total = energy_norm(state).total;
            row.energy_ratio = row.energy_total / norms.energy_denominator();
            row.weak_residual = weak_residual(state, setup.data, pb.data, pb.sb, gd, psi, WeakForm::Continuous);
            if (setup.exact) row.l2_exact = l2_error(state, *setup.exact);
            row.control_norm = discrete_norm(gd);
            row.max_sweeps = rep.max_sweeps_per_step;
            for (const auto& s : rep.steps) row.max_ratio = std::max(row.max_ratio, s.max_ratio());
            good.push_back(static_cast<int>(table.rows.size()));
        } catch (const std::exception& e) {
            row.status = e.what();
        }
        row.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        table.rows.push_back(row);
        table.states.push_back(std::move(state));
        table.controls.push_back(std::move(gd));
    }
    if (!good.empty()) {
        const int finest = good.back();
        for (std::size_t j = 0; j < good.size(); ++j) {
            auto& row = table.rows[good[j]];
            row.l2_finest = l2_distance(table.states[good[j]], table.states[finest]);
            if (j > 0) {
                row.l2_prev = l2_distance(table.states[good[j]], table.states[good[j - 1]]);
                if (mode == StudyMode::Optimize)
                    row.control_l2_prev =
                        l2_distance(PiecewiseLinearControl(table.controls[good[j]]),
                                    PiecewiseLinearControl(table.controls[good[j - 1]]));
            }
        }
    }
    return table;
}

}  // namespace stefan
