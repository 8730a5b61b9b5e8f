#pragma once

#include <vector>

#include "stefan/field.hpp"

namespace stefan {

/// Continuous piecewise-linear function through (x[i], y[i]), extended
/// linearly past both ends with the end slopes.
struct LinearBranch {
    std::vector<double> x;
    std::vector<double> y;

    double operator()(double v) const;
    double slope_at(double v) const;

    static LinearBranch line(double slope, double intercept = 0.0);
};

/// Closed interval [lo, hi]; lo == hi away from the phase temperatures.
struct GraphValue {
    double lo;
    double hi;
    bool single() const { return lo == hi; }
};

/// Maximal monotone enthalpy graph: branches beta_1..beta_{J+1}, one per phase,
/// joined continuously at the phase temperatures v^1 < ... < v^J where the
/// graph jumps upward by the latent heats nu_1..nu_J.
class BetaGraph {
public:
    static BetaGraph build(std::vector<double> phase_temps, std::vector<double> jumps,
                           std::vector<LinearBranch> branches, double slope_lo, double slope_hi);

    /// Single-phase graph beta(v) = slope * v.
    static BetaGraph linear(double slope);

    /// Two-phase graph with constant slopes below and above `phase_temp`.
    static BetaGraph two_phase(double phase_temp, double jump, double slope_below, double slope_above);

    GraphValue eval(double v) const;

    const std::vector<double>& phase_temps() const { return phase_temps_; }
    const std::vector<double>& jumps() const { return jumps_; }
    const std::vector<LinearBranch>& branches() const { return branches_; }
    double slope_lo() const { return slope_lo_; }
    double slope_hi() const { return slope_hi_; }
    int phases() const { return static_cast<int>(branches_.size()); }

private:
    std::vector<double> phase_temps_;
    std::vector<double> jumps_;
    std::vector<LinearBranch> branches_;
    double slope_lo_ = 1.0;
    double slope_hi_ = 1.0;
};

namespace mollifier {

/// Normalising constant C such that C * int_{-1}^{1} exp(-1/(1-u^2)) du = 1.
double constant();

/// omega_1(u) = C exp(-1/(1-u^2)) on |u| < 1, zero elsewhere.
double density(double u);

/// omega_n(v) = n omega_1(n v).
inline double kernel(double v, double n) { return n * density(n * v); }

/// Cumulative moments K0(u) = int_{-1}^{u} omega_1, K1(u) = int_{-1}^{u} s omega_1(s) ds.
/// Interpolated from a cached table; K0 = 1 and K1 = 0 exactly for u >= 1.
double cumulative0(double u);
double cumulative1(double u);

}  // namespace mollifier

/// Mollified enthalpy b_n(v) = int beta(y) omega_n(v - y) dy and its derivative.
///
/// The graph is split into a continuous piecewise-linear part and the jumps.
/// The continuous part is a line plus ramps (y - y_b)_+ at each kink, and each
/// ramp and each jump convolves with the kernel in closed form through K0, K1.
class SmoothedBeta {
public:
    SmoothedBeta(BetaGraph graph, double n);

    double eval(double v) const;
    double deriv(double v) const;
    /// eval and deriv in one pass.
    void eval_with_deriv(double v, double& value, double& derivative) const;

    const BetaGraph& graph() const { return graph_; }
    double n() const { return n_; }
    double half_width() const { return 1.0 / n_; }

private:
    struct Kink {
        double y;
        double dslope;
    };

    BetaGraph graph_;
    double n_;
    double anchor_y_ = 0.0;
    double anchor_value_ = 0.0;
    double base_slope_ = 1.0;
    std::vector<Kink> kinks_;
};

}  // namespace stefan
