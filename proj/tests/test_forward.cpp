#include <gtest/gtest.h>

#include <boost/math/tools/roots.hpp>
#include <cmath>

#include "stefan/forward.hpp"

using namespace stefan;

namespace {

struct Discretised {
    Grid grid;
    AveragedData data;
    SmoothedBeta sb;
};

Discretised make(const ProblemData& d, const BetaGraph& beta, int m, int n, double moll) {
    const Grid g = make_grid(d, beta.slope_lo(), m, n);
    return {g, average_data(d, g), SmoothedBeta(beta, moll)};
}

ProblemData varied() {
    ProblemData d;
    d.ell = 1.0;
    d.T = 0.25;
    d.a = [](double x, double t) { return 1.0 + 0.5 * x + t; };
    d.b = [](double x, double) { return 0.1 * std::cos(x); };
    d.c = [](double x, double) { return 0.3 + x; };
    d.f = [](double x, double t) { return std::sin(3 * x) + t; };
    d.phi = [](double x, double) { return 0.4 * std::cos(3 * x); };
    d.p = [](double, double t) { return -0.2 + t; };
    return d;
}

}  // namespace

TEST(ScalarSolve, MatchesToms748) {
    const SmoothedBeta sb(BetaGraph::two_phase(0.1, 2.0, 1.0, 3.0), 10.0);
    for (double alpha : {0.5, 2.0, 7.0})
        for (double s : {0.01, 1.0, 20.0})
            for (double r : {-30.0, -1.0, 0.0, 0.2, 1.3, 50.0}) {
                int its = 0;
                const double v = scalar_solve(alpha, s, r, sb, 0.0, &its);
                auto F = [&](double x) { return alpha * x + s * sb.eval(x) - r; };
                std::uintmax_t max_iter = 200;
                const auto [lo, hi] = boost::math::tools::toms748_solve(
                    F, -1e3, 1e3, boost::math::tools::eps_tolerance<double>(50), max_iter);
                EXPECT_NEAR(v, 0.5 * (lo + hi), 1e-11 * std::max(1.0, std::abs(v)));
                EXPECT_LE(std::abs(F(v)), 1e-12 * std::max(1.0, std::abs(r)));
                EXPECT_GT(its, 0);
            }
}

TEST(ScalarSolve, FarGuessStillBrackets) {
    const SmoothedBeta sb(BetaGraph::linear(1.0), 4.0);
    EXPECT_NEAR(scalar_solve(1.0, 1.0, 2e6, sb, -5.0), 1e6, 1e-6);
}

TEST(Zeta, DividedDifferenceAndDerivative) {
    const SmoothedBeta sb(BetaGraph::two_phase(0.0, 1.0, 1.0, 2.0), 8.0);
    EXPECT_NEAR(zeta(sb, 0.5, -0.5), (sb.eval(0.5) - sb.eval(-0.5)), 1e-14);
    EXPECT_EQ(zeta(sb, 0.03, 0.03), sb.deriv(0.03));
    EXPECT_GE(zeta(sb, 0.2, 0.1), 1.0);
}

TEST(SolveStep, SolvesTheSystem) {
    const Discretised S = make(varied(), BetaGraph::two_phase(0.0, 1.0, 1.0, 2.0), 8, 4, 4.0);
    StepReport rep;
    const std::vector<double> v = solve_step(S.data.phi, 1, S.data, 0.3, S.sb, S.grid, {}, rep);
    const StepSystem sys = assemble_step(S.data.phi, 1, S.data, 0.3, S.sb, S.grid);
    for (double r : sys.residual(v, S.sb)) EXPECT_LE(std::abs(r), 1e-11);
    EXPECT_LE(rep.final_change, rep.fp_tol);
    EXPECT_FALSE(rep.flagged);
    EXPECT_LT(rep.max_ratio(), 1.0);
    EXPECT_GT(rep.sweeps, 1);
    EXPECT_NEAR(rep.fp_tol, 1e-12 * (1.0 + 0.4), 1e-14);
}

TEST(SolveStep, RatiosStayBelowTheoreticalBound) {
    const Discretised S = make(varied(), BetaGraph::two_phase(0.0, 1.0, 1.0, 2.0), 8, 4, 4.0);
    for (int k = 1; k <= 4; ++k) {
        StepReport rep;
        solve_step(S.data.phi, k, S.data, 0.0, S.sb, S.grid, {}, rep);
        EXPECT_GT(rep.delta_theory, 0.0);
        EXPECT_LT(rep.delta_theory, 1.0);
        EXPECT_LE(rep.max_ratio(), rep.delta_theory + 1e-6) << k;
    }
}

TEST(SolveStep, LinearCaseMatchesThomasSolve) {
    ProblemData d = varied();
    const Discretised S = make(d, BetaGraph::linear(2.0), 10, 5, 5.0);
    const std::vector<double>& vp = S.data.phi;
    const StepSystem sys = assemble_step(vp, 1, S.data, -0.4, S.sb, S.grid);
    // With beta(v) = 2 v the system is linear: add 2 s to the diagonal of rows 0..m-1.
    const int m = S.grid.m;
    std::vector<double> a(sys.lower), b(sys.diag), c(sys.upper), r(sys.rhs);
    for (int i = 0; i < m; ++i) b[i] += 2.0 * sys.s;
    for (int i = 1; i <= m; ++i) {
        const double w = a[i] / b[i - 1];
        b[i] -= w * c[i - 1];
        r[i] -= w * r[i - 1];
    }
    std::vector<double> x(m + 1);
    x[m] = r[m] / b[m];
    for (int i = m - 1; i >= 0; --i) x[i] = (r[i] - c[i] * x[i + 1]) / b[i];

    StepReport rep;
    const auto v = solve_step(vp, 1, S.data, -0.4, S.sb, S.grid, {}, rep);
    for (int i = 0; i <= m; ++i) EXPECT_NEAR(v[i], x[i], 1e-10) << i;
}

TEST(SolveStep, StartOverride) {
    const Discretised S = make(varied(), BetaGraph::two_phase(0.0, 1.0, 1.0, 2.0), 8, 4, 4.0);
    StepReport a, b;
    const auto v1 = solve_step(S.data.phi, 1, S.data, 0.3, S.sb, S.grid, {}, a);
    const auto v2 = solve_step(S.data.phi, 1, S.data, 0.3, S.sb, S.grid, {}, b, &v1);
    for (std::size_t i = 0; i < v1.size(); ++i) EXPECT_NEAR(v1[i], v2[i], 1e-10);
    EXPECT_LT(b.sweeps, a.sweeps);
}

TEST(SolveStep, MaxSweepsExceeded) {
    const Discretised S = make(varied(), BetaGraph::two_phase(0.0, 1.0, 1.0, 2.0), 8, 4, 4.0);
    SolverOptions opts;
    opts.max_sweeps = 3;
    StepReport rep;
    try {
        solve_step(S.data.phi, 1, S.data, 0.3, S.sb, S.grid, opts, rep);
        FAIL();
    } catch (const SolverError& e) {
        EXPECT_EQ(e.kind(), SolverError::Kind::MaxSweepsExceeded);
        EXPECT_EQ(e.report().sweeps, 3);
    }
}

TEST(SolveForward, ConstantSolutionIsExact) {
    const double C = -0.6, b0 = 0.2;
    ProblemData d;
    d.T = 0.5;
    d.a = [](double x, double t) { return 2.0 + x - t; };
    d.b = constant_field(b0);
    d.phi = constant_field(C);
    d.p = constant_field(b0 * C);
    const Discretised S = make(d, BetaGraph::two_phase(0.0, 1.0, 1.0, 2.0), 8, 32, 8.0);
    DiscreteControl gd{std::vector<double>(33, b0 * C), S.grid.tau};
    SolverReport rep;
    const DiscreteState st = solve_forward(gd, S.data, S.sb, S.grid, {}, &rep);
    for (int k = 0; k <= 32; ++k)
        for (int i = 0; i <= 8; ++i) EXPECT_NEAR(st(i, k), C, 1e-12);
    EXPECT_EQ(rep.steps.size(), 32u);
    EXPECT_DOUBLE_EQ(st.linf(), std::abs(C));
}

TEST(SolveForward, SummationIdentityHolds) {
    const Discretised S = make(varied(), BetaGraph::two_phase(0.0, 1.0, 1.0, 2.0), 8, 4, 4.0);
    DiscreteControl gd{{0.1, 0.3, -0.2, 0.0, 0.4}, S.grid.tau};
    const DiscreteState st = solve_forward(gd, S.data, S.sb, S.grid, {});
    const auto means = PiecewiseLinearControl(gd).cell_means();
    for (int k = 1; k <= 4; ++k) {
        const auto r = residual_dsvsum(st, S.data, S.sb, k, means[k]);
        // The identity is the step system divided by h.
        for (double x : r) EXPECT_LE(std::abs(x), 1e-9) << k;
    }
}

TEST(SolveForward, FirstRowIsInitialData) {
    const Discretised S = make(varied(), BetaGraph::linear(1.0), 4, 2, 2.0);
    const DiscreteState st = solve_forward(DiscreteControl::zeros(S.grid), S.data, S.sb, S.grid, {});
    EXPECT_EQ(st.row(0), S.data.phi);
}
