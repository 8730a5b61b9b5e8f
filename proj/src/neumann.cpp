#include <cmath>
#include <numbers>

#include "stefan/analysis.hpp"

namespace stefan {

namespace {

double diffusivity(double k, double capacity) { return k / capacity; }

}  // namespace

NeumannSolution::NeumannSolution(NeumannParams params) : params_(params) {
    const auto& p = params_;
    if (!(p.conductivity > 0.0) || !(p.capacity_solid > 0.0) || !(p.capacity_liquid > 0.0) || !(p.latent > 0.0))
        throw ValidationError("neumann: conductivity, capacities and latent heat must be positive");
    if (!(p.hot_temp > p.phase_temp))
        throw ValidationError("neumann: no melting front, hot temperature must exceed the phase temperature");
    if (p.cold_temp > p.phase_temp)
        throw ValidationError("neumann: solid far field lies above the phase temperature");

    double lo = 0.0, hi = 1.0;
    int expand = 0;
    while (balance(hi) <= 0.0) {
        lo = hi;
        hi *= 2.0;
        if (++expand > 200) throw ValidationError("neumann: flux balance has no root");
    }
    while (hi - lo > 1e-12 * std::max(1.0, hi)) {
        const double mid = 0.5 * (lo + hi);
        if (balance(mid) > 0.0)
            hi = mid;
        else
            lo = mid;
    }
    alpha_ = 0.5 * (lo + hi);
}

double NeumannSolution::balance(double alpha) const {
    const auto& p = params_;
    const double kl = diffusivity(p.conductivity, p.capacity_liquid);
    const double ks = diffusivity(p.conductivity, p.capacity_solid);
    const double ll = alpha / std::sqrt(kl), ls = alpha / std::sqrt(ks);
    const double sqrt_pi = std::sqrt(std::numbers::pi);
    const double liquid = (p.hot_temp - p.phase_temp) * std::exp(-ll * ll) / (sqrt_pi * std::sqrt(kl) * std::erf(ll));
    const double solid =
        (p.phase_temp - p.cold_temp) * std::exp(-ls * ls) / (sqrt_pi * std::sqrt(ks) * std::erfc(ls));
    return p.latent * alpha - p.conductivity * (liquid - solid);
}

double NeumannSolution::front(double t) const { return 2.0 * alpha_ * std::sqrt(t); }

double NeumannSolution::temperature(double x, double t) const {
    const auto& p = params_;
    const double kl = diffusivity(p.conductivity, p.capacity_liquid);
    const double ks = diffusivity(p.conductivity, p.capacity_solid);
    if (x <= front(t)) {
        return p.hot_temp -
               (p.hot_temp - p.phase_temp) * std::erf(x / (2.0 * std::sqrt(kl * t))) / std::erf(alpha_ / std::sqrt(kl));
    }
    return p.cold_temp +
           (p.phase_temp - p.cold_temp) * std::erfc(x / (2.0 * std::sqrt(ks * t))) / std::erfc(alpha_ / std::sqrt(ks));
}

double NeumannSolution::gradient(double x, double t) const {
    const auto& p = params_;
    const double kl = diffusivity(p.conductivity, p.capacity_liquid);
    const double ks = diffusivity(p.conductivity, p.capacity_solid);
    const double two_over_sqrt_pi = 2.0 / std::sqrt(std::numbers::pi);
    if (x <= front(t)) {
        const double z = x / (2.0 * std::sqrt(kl * t));
        return -(p.hot_temp - p.phase_temp) / std::erf(alpha_ / std::sqrt(kl)) * two_over_sqrt_pi *
               std::exp(-z * z) / (2.0 * std::sqrt(kl * t));
    }
    const double z = x / (2.0 * std::sqrt(ks * t));
    return -(p.phase_temp - p.cold_temp) / std::erfc(alpha_ / std::sqrt(ks)) * two_over_sqrt_pi * std::exp(-z * z) /
           (2.0 * std::sqrt(ks * t));
}

BetaGraph NeumannSolution::beta() const {
    return BetaGraph::two_phase(params_.phase_temp, params_.latent, params_.capacity_solid, params_.capacity_liquid);
}

Field NeumannSolution::boundary_flux(double t0) const {
    const NeumannSolution self = *this;
    const double k = params_.conductivity;
    return [self, k, t0](double, double t) { return k * self.gradient(0.0, t0 + t); };
}

Field NeumannSolution::shifted(double t0) const {
    const NeumannSolution self = *this;
    return [self, t0](double x, double t) { return self.temperature(x, t0 + t); };
}

ProblemData NeumannSolution::problem(double ell, double t0, double T) const {
    if (!(t0 > 0.0)) throw ValidationError("neumann: the start time t0 must be positive");
    const NeumannSolution self = *this;
    const double k = params_.conductivity;
    ProblemData d;
    d.ell = ell;
    d.T = T;
    d.a = constant_field(k);
    d.b = constant_field(0.0);
    d.c = constant_field(0.0);
    d.f = constant_field(0.0);
    d.a0 = k;
    d.phi = [self, t0](double x, double) { return self.temperature(x, t0); };
    d.omega = [self, t0, T](double x, double) { return self.temperature(x, t0 + T); };
    d.p = [self, k, t0, ell](double, double t) { return k * self.gradient(ell, t0 + t); };
    return d;
}

}  // namespace stefan
