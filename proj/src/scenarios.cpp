#include "stefan/scenarios.hpp"

#include <cmath>
#include <numbers>

namespace stefan::scenarios {

using std::numbers::pi;

StudySetup constant_solution(double C, double b0) {
    StudySetup s;
    s.data.ell = 1.0;
    s.data.T = 1.0;
    s.data.a = [](double x, double t) { return 1.0 + 0.5 * x + 0.25 * t; };
    s.data.b = constant_field(b0);
    s.data.phi = constant_field(C);
    s.data.omega = constant_field(C);
    s.data.p = constant_field(b0 * C);
    s.data.a0 = 1.0;
    s.data.R = 10.0;
    s.beta = BetaGraph::two_phase(0.0, 1.0, 1.0, 2.0);
    s.control = constant_field(b0 * C);
    s.exact = constant_field(C);
    return s;
}

StudySetup manufactured(double ell, double T) {
    const double a = 1.0, b = 0.1, c = 0.5, w = pi / ell;
    StudySetup s;
    s.data.ell = ell;
    s.data.T = T;
    s.data.a = constant_field(a);
    s.data.b = constant_field(b);
    s.data.c = constant_field(c);
    s.data.f = [=](double x, double t) {
        const double v = std::exp(-t) * std::sin(w * x);
        return -v + a * w * w * v - b * w * std::exp(-t) * std::cos(w * x) + c * v;
    };
    s.data.phi = [w](double x, double) { return std::sin(w * x); };
    s.data.omega = [w, T](double x, double) { return std::exp(-T) * std::sin(w * x); };
    s.data.p = [=](double, double t) { return -a * w * std::exp(-t); };
    s.data.a0 = a;
    s.data.R = 10.0;
    s.beta = BetaGraph::linear(1.0);
    s.control = [=](double, double t) { return a * w * std::exp(-t); };
    s.exact = [w](double x, double t) { return std::exp(-t) * std::sin(w * x); };
    return s;
}

StudySetup two_phase() {
    StudySetup s;
    s.data.ell = 1.0;
    s.data.T = 0.5;
    s.data.a = [](double x, double) { return 1.0 + 0.5 * x; };
    s.data.c = constant_field(0.5);
    s.data.f = constant_field(1.0);
    s.data.phi = [](double x, double) { return 0.5 * std::cos(pi * x); };
    s.data.omega = constant_field(0.2);
    s.data.p = [](double, double t) { return -0.5 * std::sin(pi * t); };
    s.data.a0 = 1.0;
    s.data.R = 10.0;
    s.beta = BetaGraph::two_phase(0.0, 1.0, 1.0, 2.0);
    s.control = [](double, double t) { return 0.5 * std::sin(pi * t); };
    return s;
}

NeumannCase neumann() {
    NeumannParams p;
    p.conductivity = 1.0;
    p.capacity_solid = 1.0;
    p.capacity_liquid = 1.5;
    p.latent = 1.0;
    p.phase_temp = 0.0;
    p.hot_temp = 1.0;
    p.cold_temp = -0.5;
    NeumannSolution sol(p);
    const double ell = 1.0, t0 = 0.02, T = 0.2;
    StudySetup s;
    s.data = sol.problem(ell, t0, T);
    s.data.R = 1e3;
    s.beta = sol.beta();
    s.control = sol.boundary_flux(t0);
    s.exact = sol.shifted(t0);
    return {sol, ell, t0, T, s};
}

std::vector<Level> neumann_levels() { return {{16, 16}, {32, 64}, {64, 256}}; }

Field scaled_sine(double T, double target) {
    const Field g = [T](double, double t) { return std::sin(2.0 * pi * t / T); };
    const double scale = target / w21_norm(g, T, 4096);
    return [T, scale](double, double t) { return scale * std::sin(2.0 * pi * t / T); };
}

}  // namespace stefan::scenarios
