#pragma once

#include <optional>
#include <string>
#include <vector>

#include "stefan/objective.hpp"

namespace stefan {

// ---------------------------------------------------------------------------
// Interpolation of discrete states

enum class InterpKind {
    PiecewiseConstant,  // v~(x,t) = v_i(k) on [x_i, x_{i+1}) x (t_{k-1}, t_k]
    SpaceLinear,        // v^tau(x,t) = vhat(x; k) on (t_{k-1}, t_k]
    Bilinear,           // vhat^tau, linear in t between vhat(x; k-1) and vhat(x; k)
};

class Interpolant {
public:
    Interpolant(DiscreteState state, InterpKind kind);

    /// Throws std::out_of_range outside [0, ell] x [0, T].
    double operator()(double x, double t) const;

    InterpKind kind() const { return kind_; }
    const DiscreteState& state() const { return state_; }

private:
    DiscreteState state_;
    InterpKind kind_;
};

Interpolant interpolate(const DiscreteState& state, InterpKind kind);

/// ||vhat^tau_1 - vhat^tau_2||_{L_2(D)}, integrated exactly on the union grid.
double l2_distance(const DiscreteState& s1, const DiscreteState& s2);

/// ||vhat^tau - u||_{L_2(D)} by 5x5 Gauss-Legendre on each grid cell.
double l2_error(const DiscreteState& state, const Field& exact);

/// ||vhat(.; n) - u(., T)||_{L_2(0, ell)} at the final time level.
double l2_error_final(const DiscreteState& state, const Field& exact);

// ---------------------------------------------------------------------------
// Estimate diagnostics

struct EnergyBreakdown {
    double term1 = 0.0;  // sum_k tau sum_i h v_{i tbar}^2
    double term2 = 0.0;  // max_k sum_i h v_{ix}^2
    double term3 = 0.0;  // sum_k tau^2 sum_i h v_{ix tbar}^2
    double total = 0.0;
};

EnergyBreakdown energy_norm(const DiscreteState& state);

/// Data norms entering the sup-norm and energy bounds.
struct EstimateNorms {
    double f_inf = 0.0;
    double p_inf = 0.0;
    double g_inf = 0.0;
    double phi_inf = 0.0;
    double phi_w21 = 0.0;
    double p_w21 = 0.0;
    double g_w21 = 0.0;

    /// ||phi||^2_{W_2^1} + ||f||^2_inf + ||p||^2_{W_2^1} + ||g^n||^2_{W_2^1}
    double energy_denominator() const;
};

EstimateNorms estimate_norms(const ProblemData& data, const Grid& grid, const DiscreteControl& gd);

/// ||[v]_n||_inf / (||f|| + ||p|| + ||g^n|| + ||phi||). Throws ValidationError when
/// all four data norms vanish.
double linf_ratio(const DiscreteState& state, const EstimateNorms& norms);

// ---------------------------------------------------------------------------
// Weak-form residual

enum class WeakForm {
    /// Test function sampled at the nodes and held piecewise constant; equals the
    /// time-summed per-step identity and vanishes up to solver tolerance.
    Sampled,
    /// Smooth test function and continuous data; measures consistency with the
    /// limit integral identity and shrinks under refinement.
    Continuous,
};

/// Left side of the integral identity for the discrete state. psi must vanish at t = T.
double weak_residual(const DiscreteState& state, const ProblemData& data, const AveragedData& avg,
                     const SmoothedBeta& sb, const DiscreteControl& gd, const Field& psi,
                     WeakForm form = WeakForm::Continuous);

// ---------------------------------------------------------------------------
// Free boundary extraction

/// Positions where vhat^tau(., t) crosses `level`, by linear inverse interpolation,
/// in increasing x.
std::vector<double> level_crossings(const DiscreteState& state, double t, double level);

// ---------------------------------------------------------------------------
// Refinement studies

struct Level {
    int m = 0;
    int n = 0;
};

enum class StudyMode { Forward, Optimize };

struct StudySetup {
    ProblemData data;
    BetaGraph beta = BetaGraph::linear(1.0);
    /// Fixed control for forward studies (mapped with Q_n) and the optimiser's starting point.
    Field control = constant_field(0.0);
    std::optional<Field> exact;  // reference solution, if known
    Field psi;                   // test function for the weak residual (default (T-t) cos(pi x/ell))
    std::optional<double> mollifier_n;
    bool nodal_omega = false;
    SolverOptions solver;
    OptimizerOptions optimizer;
    int threads = 1;
};

struct ConvergenceRow {
    int m = 0;
    int n = 0;
    double cost = 0.0;
    double linf_ratio = 0.0;
    double energy_total = 0.0;
    double energy_ratio = 0.0;
    double weak_residual = 0.0;
    double l2_prev = 0.0;     // to the previous level's interpolant
    double l2_finest = 0.0;   // to the finest level's interpolant
    double l2_exact = -1.0;   // to the reference solution; -1 when none
    double control_l2_prev = -1.0;  // optimise mode: ||P_n g - P_{n'} g'||_{L_2(0,T)}
    double control_norm = 0.0;
    int max_sweeps = 0;
    double max_ratio = 0.0;
    double wall_seconds = 0.0;
    std::string status = "ok";
};

struct ConvergenceTable {
    std::vector<ConvergenceRow> rows;
    std::vector<DiscreteState> states;
    std::vector<DiscreteControl> controls;
};

ConvergenceTable refine_study(const StudySetup& setup, const std::vector<Level>& levels, StudyMode mode);

/// max/min over positive entries; the bounded-constant criterion is < 1.5.
double spread(const std::vector<double>& values);

// ---------------------------------------------------------------------------
// Two-phase similarity solution (L = k d^2/dx^2, melting from x = 0)

struct NeumannParams {
    double conductivity = 1.0;    // k, common to both phases
    double capacity_solid = 1.0;  // beta slope below the phase temperature
    double capacity_liquid = 1.0; // beta slope above it
    double latent = 1.0;          // jump nu at the phase temperature
    double phase_temp = 0.0;      // v^1
    double hot_temp = 1.0;        // liquid far field (value at x = 0)
    double cold_temp = -1.0;      // solid far field (x -> infinity)
};

class NeumannSolution {
public:
    /// Solves the flux balance at the front for alpha by bisection (to 1e-12).
    /// Throws ValidationError when no root exists.
    explicit NeumannSolution(NeumannParams params);

    double alpha() const { return alpha_; }
    double front(double t) const;
    double temperature(double x, double t) const;
    double gradient(double x, double t) const;
    /// Flux balance residual F(alpha) whose root defines the front speed.
    double balance(double alpha) const;

    const NeumannParams& params() const { return params_; }
    BetaGraph beta() const;

    /// Problem on [0, ell] over [t0, t0 + T] (time shifted to start at 0) with the
    /// exact boundary fluxes; omega is the exact final profile.
    ProblemData problem(double ell, double t0, double T) const;
    /// k v_x(0, t0 + t), the flux control reproducing the exact solution.
    Field boundary_flux(double t0) const;
    /// Exact solution in the shifted time.
    Field shifted(double t0) const;

private:
    NeumannParams params_;
    double alpha_ = 0.0;
};

}  // namespace stefan
