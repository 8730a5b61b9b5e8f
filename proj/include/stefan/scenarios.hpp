#pragma once

#include <vector>

#include "stefan/analysis.hpp"

namespace stefan::scenarios {

/// Constant state C: c = f = 0, b = b0 constant, fluxes b0 C at both ends.
/// The control reproducing it is constant_field(b0 C).
StudySetup constant_solution(double C, double b0);

/// Single phase, identity slope, exact solution exp(-t) sin(pi x / ell).
StudySetup manufactured(double ell = 1.0, double T = 1.0);

/// Fixed two-phase scenario with compatible initial data, used for the
/// boundedness diagnostics and the weak residual.
StudySetup two_phase();

/// Two-phase similarity problem shifted to start at t0.
struct NeumannCase {
    NeumannSolution solution;
    double ell;
    double t0;
    double T;
    StudySetup setup;
};
NeumannCase neumann();

/// Levels used with the Neumann case (tau proportional to h^2).
std::vector<Level> neumann_levels();

/// g(t) = sin(2 pi t / T), scaled to W_2^1(0, T) norm `target`.
Field scaled_sine(double T, double target);

}  // namespace stefan::scenarios
