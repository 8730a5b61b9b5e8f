#pragma once

#include <vector>

#include "stefan/grid.hpp"

namespace stefan {

/// Grid control [g]_n = (g_0, ..., g_n) on a uniform time grid with step tau.
struct DiscreteControl {
    std::vector<double> g;
    double tau = 1.0;

    int n() const { return static_cast<int>(g.size()) - 1; }

    static DiscreteControl zeros(const Grid& grid) { return {std::vector<double>(grid.n + 1, 0.0), grid.tau}; }
};

/// Discrete w_2^1 norm: sqrt( sum_{k=1..n} tau g_k^2 + sum_{k=1..n} tau ((g_k - g_{k-1})/tau)^2 ).
/// g_0 enters only through the first difference.
double discrete_norm(const DiscreteControl& gd);

/// Inner product that induces discrete_norm.
double discrete_inner(const DiscreteControl& u, const DiscreteControl& v);

/// Riesz representative of a linear functional given by its Euclidean
/// coefficients: the u with discrete_inner(u, v) = sum_k euclid[k] v_k for all v.
/// Solves the tridiagonal Gram system of discrete_inner.
DiscreteControl riesz_map(const std::vector<double>& euclid, double tau);

/// Continuous piecewise-linear interpolant g^n(t) = g_{k-1} + (g_k - g_{k-1})(t - t_{k-1})/tau
/// on [t_{k-1}, t_k); the last interval is closed at T.
class PiecewiseLinearControl {
public:
    explicit PiecewiseLinearControl(DiscreteControl gd);

    double operator()(double t) const;
    double T() const { return gd_.tau * gd_.n(); }
    const DiscreteControl& nodes() const { return gd_; }

    /// Exact ||g^n||_{W_2^1(0,T)}.
    double w21_norm() const;
    double linf_norm() const;

    /// Mean of g^n over [t_{k-1}, t_k], i.e. (g_{k-1} + g_k)/2, for k = 1..n; entry 0 is g_0.
    std::vector<double> cell_means() const;

private:
    DiscreteControl gd_;
};

/// Q_n: w_0 = g(0), w_k = mean of g over [t_{k-1}, t_k].
DiscreteControl qn_map(const Field& g, const Grid& grid);

/// P_n: piecewise-linear interpolation.
PiecewiseLinearControl pn_map(const DiscreteControl& gd);

/// Radial projection onto { ||[g]_n|| <= R }, the metric projection for this
/// inner-product norm.
DiscreteControl project(const DiscreteControl& gd, double R);

/// ||u - g||_{L_2(0,T)} for a piecewise-linear u and an arbitrary g, by
/// composite Gauss-Legendre on each control interval.
double l2_distance(const PiecewiseLinearControl& u, const Field& g, int subdivisions = 4);

/// Exact ||u - v||_{L_2(0,T)} for two piecewise-linear controls on the same horizon
/// (possibly different grids), integrated on the union of breakpoints.
double l2_distance(const PiecewiseLinearControl& u, const PiecewiseLinearControl& v);

/// Continuous ||g||_{W_2^1(0,T)} by quadrature with a central-difference derivative.
double w21_norm(const Field& g, double T, int cells = 512);

}  // namespace stefan
