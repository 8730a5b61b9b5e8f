#include <gtest/gtest.h>

#include <cmath>

#include "stefan/grid.hpp"

using namespace stefan;

namespace {

ProblemData basic() {
    ProblemData d;
    d.ell = 2.0;
    d.T = 1.0;
    return d;
}

}  // namespace

TEST(Grid, Spacing) {
    const Grid g = make_grid(basic(), 1.0, 8, 4);
    EXPECT_DOUBLE_EQ(g.h, 0.25);
    EXPECT_DOUBLE_EQ(g.tau, 0.25);
    EXPECT_EQ(g.x(8), 2.0);
    EXPECT_EQ(g.t(4), 1.0);
    EXPECT_DOUBLE_EQ(g.x(3), 0.75);
}

TEST(Grid, MeshConditionEnforced) {
    ProblemData d = basic();
    d.b = constant_field(0.5);
    // h/tau = 0.25/0.25 = 1 but 8 * 0.5 / 1 = 4 is needed.
    try {
        make_grid(d, 1.0, 8, 4);
        FAIL();
    } catch (const MeshConditionViolated& e) {
        EXPECT_NE(std::string(e.what()).find("mesh condition"), std::string::npos);
    }
    // h/tau = 0.25/(1/16) = 4 is enough.
    EXPECT_NO_THROW(make_grid(d, 1.0, 8, 16));
    // A larger slope_lo relaxes the requirement.
    EXPECT_NO_THROW(make_grid(d, 4.0, 8, 4));
}

TEST(Grid, TauWarning) {
    ProblemData d = basic();
    d.c = constant_field(10.0);
    std::vector<std::string> warnings;
    make_grid(d, 1.0, 4, 2, &warnings);
    ASSERT_EQ(warnings.size(), 1u);
    EXPECT_NE(warnings[0].find("uniqueness"), std::string::npos);
    warnings.clear();
    make_grid(d, 1.0, 4, 64, &warnings);
    EXPECT_TRUE(warnings.empty());
}

TEST(Grid, RejectsBadCoefficients) {
    ProblemData d = basic();
    d.a = [](double x, double) { return 1.0 - x; };
    EXPECT_THROW(make_grid(d, 1.0, 4, 4), ValidationError);
    d = basic();
    d.f = [](double x, double) { return 1.0 / (x - x); };
    EXPECT_THROW(make_grid(d, 1.0, 4, 4), ValidationError);
    EXPECT_THROW(make_grid(basic(), 1.0, 0, 4), ValidationError);
}

TEST(DataNorms, Estimates) {
    ProblemData d = basic();
    d.a = [](double x, double t) { return 1.0 + x * t; };
    d.f = [](double x, double) { return -3.0 * x; };
    d.phi = [](double x, double) { return x; };
    d.p = [](double, double t) { return 2.0 * t; };
    const DataNorms n = estimate_norms(d, 4, 4);
    EXPECT_DOUBLE_EQ(n.a_max, 3.0);
    EXPECT_DOUBLE_EQ(n.a_min, 1.0);
    EXPECT_DOUBLE_EQ(n.f_inf, 6.0);
    EXPECT_DOUBLE_EQ(n.phi_inf, 2.0);
    EXPECT_DOUBLE_EQ(n.p_inf, 2.0);
    // ||x||^2_{W_2^1(0,2)} = 8/3 + 2.
    EXPECT_NEAR(n.phi_w21, std::sqrt(8.0 / 3.0 + 2.0), 1e-8);
    // ||2t||^2_{W_2^1(0,1)} = 4/3 + 4.
    EXPECT_NEAR(n.p_w21, std::sqrt(4.0 / 3.0 + 4.0), 1e-8);
}

TEST(Steklov, TimeAverages) {
    const Grid g = make_grid(basic(), 1.0, 4, 4);
    const auto w = steklov_time([](double, double t) { return t * t; }, g);
    ASSERT_EQ(w.size(), 5u);
    EXPECT_EQ(w[0], 0.0);
    for (int k = 1; k <= 4; ++k) {
        const double a = g.t(k - 1), b = g.t(k);
        EXPECT_NEAR(w[k], (b * b * b - a * a * a) / (3 * (b - a)), 1e-14);
    }
}

TEST(Steklov, SpaceAveragesKeepEndpoint) {
    const Grid g = make_grid(basic(), 1.0, 4, 4);
    const auto phi = steklov_space([](double x, double) { return std::exp(x); }, g);
    ASSERT_EQ(phi.size(), 5u);
    for (int i = 0; i < 4; ++i)
        EXPECT_NEAR(phi[i], (std::exp(g.x(i + 1)) - std::exp(g.x(i))) / g.h, 1e-12);
    EXPECT_DOUBLE_EQ(phi[4], std::exp(2.0));
}

TEST(Steklov, CellAverages) {
    const Grid g = make_grid(basic(), 1.0, 4, 2);
    const Table q = steklov_cell([](double x, double t) { return x * t + std::sin(x); }, g);
    EXPECT_EQ(q.rows(), 4);
    EXPECT_EQ(q.cols(), 3);
    for (int i = 0; i < 4; ++i)
        for (int k = 1; k <= 2; ++k) {
            const double x0 = g.x(i), x1 = g.x(i + 1), t0 = g.t(k - 1), t1 = g.t(k);
            const double exact = 0.5 * (x0 + x1) * 0.5 * (t0 + t1) + (std::cos(x0) - std::cos(x1)) / (x1 - x0);
            EXPECT_NEAR(q(i, k), exact, 1e-13);
        }
}

TEST(Steklov, NonSmoothDataRefines) {
    // |x - 0.3| has a kink inside a cell; the refined average stays accurate.
    ProblemData d = basic();
    d.ell = 1.0;
    const Grid g = make_grid(d, 1.0, 2, 1);
    const auto phi = steklov_space([](double x, double) { return std::abs(x - 0.3); }, g);
    const double exact = (0.3 * 0.3 / 2 + 0.2 * 0.2 / 2) / 0.5;
    EXPECT_NEAR(phi[0], exact, 1e-9);
}

TEST(AveragedData, ShapesAndValues) {
    ProblemData d = basic();
    d.a = constant_field(2.0);
    d.phi = constant_field(1.5);
    d.p = [](double, double t) { return t; };
    const Grid g = make_grid(d, 1.0, 4, 2);
    const AveragedData avg = average_data(d, g);
    EXPECT_EQ(avg.a.rows(), 4);
    EXPECT_EQ(avg.a.cols(), 3);
    EXPECT_DOUBLE_EQ(avg.a(3, 2), 2.0);
    EXPECT_EQ(avg.phi.size(), 5u);
    EXPECT_DOUBLE_EQ(avg.phi[4], 1.5);
    EXPECT_EQ(avg.p.size(), 3u);
    EXPECT_NEAR(avg.p[2], 0.75, 1e-14);
}
