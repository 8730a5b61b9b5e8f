#include "stefan/control.hpp"

#include <algorithm>
#include <cmath>

#include "stefan/quadrature.hpp"

namespace stefan {

double discrete_inner(const DiscreteControl& u, const DiscreteControl& v) {
    const double tau = u.tau;
    double s = 0.0;
    for (int k = 1; k <= u.n(); ++k) {
        const double du = (u.g[k] - u.g[k - 1]) / tau;
        const double dv = (v.g[k] - v.g[k - 1]) / tau;
        s += tau * u.g[k] * v.g[k] + tau * du * dv;
    }
    return s;
}

double discrete_norm(const DiscreteControl& gd) { return std::sqrt(discrete_inner(gd, gd)); }

DiscreteControl riesz_map(const std::vector<double>& euclid, double tau) {
    const int n = static_cast<int>(euclid.size()) - 1;
    if (n < 1) throw ValidationError("control: riesz_map needs at least two nodes");
    const double off = -1.0 / tau;
    std::vector<double> diag(n + 1, tau + 2.0 / tau);
    diag[0] = 1.0 / tau;
    diag[n] = tau + 1.0 / tau;
    // Thomas algorithm; the Gram matrix is symmetric positive definite.
    std::vector<double> c(n + 1), d(n + 1);
    c[0] = off / diag[0];
    d[0] = euclid[0] / diag[0];
    for (int k = 1; k <= n; ++k) {
        const double denom = diag[k] - off * c[k - 1];
        c[k] = off / denom;
        d[k] = (euclid[k] - off * d[k - 1]) / denom;
    }
    DiscreteControl u{std::vector<double>(n + 1), tau};
    u.g[n] = d[n];
    for (int k = n - 1; k >= 0; --k) u.g[k] = d[k] - c[k] * u.g[k + 1];
    return u;
}

PiecewiseLinearControl::PiecewiseLinearControl(DiscreteControl gd) : gd_(std::move(gd)) {
    if (gd_.g.empty()) throw ValidationError("control: empty control vector");
}

double PiecewiseLinearControl::operator()(double t) const {
    const int n = gd_.n();
    if (n == 0) return gd_.g[0];
    int k = static_cast<int>(std::floor(t / gd_.tau)) + 1;
    k = std::clamp(k, 1, n);
    const double t0 = (k - 1) * gd_.tau;
    return gd_.g[k - 1] + (gd_.g[k] - gd_.g[k - 1]) / gd_.tau * (t - t0);
}

double PiecewiseLinearControl::w21_norm() const {
    // Each piece is linear: int (g0 + (g1-g0) s)^2 over a cell of width tau is
    // tau (g0^2 + g0 g1 + g1^2)/3, and the slope term is tau ((g1-g0)/tau)^2.
    double s = 0.0;
    const double tau = gd_.tau;
    for (int k = 1; k <= gd_.n(); ++k) {
        const double a = gd_.g[k - 1], b = gd_.g[k];
        const double slope = (b - a) / tau;
        s += tau * (a * a + a * b + b * b) / 3.0 + tau * slope * slope;
    }
    return std::sqrt(s);
}

double PiecewiseLinearControl::linf_norm() const {
    double s = 0.0;
    for (double v : gd_.g) s = std::max(s, std::fabs(v));
    return s;
}

std::vector<double> PiecewiseLinearControl::cell_means() const {
    std::vector<double> out(gd_.g.size());
    out[0] = gd_.g[0];
    for (int k = 1; k <= gd_.n(); ++k) out[k] = 0.5 * (gd_.g[k - 1] + gd_.g[k]);
    return out;
}

DiscreteControl qn_map(const Field& g, const Grid& grid) { return {steklov_time(g, grid), grid.tau}; }

PiecewiseLinearControl pn_map(const DiscreteControl& gd) { return PiecewiseLinearControl(gd); }

DiscreteControl project(const DiscreteControl& gd, double R) {
    if (!(R > 0.0)) throw ValidationError("control: radius R must be positive");
    const double norm = discrete_norm(gd);
    if (norm <= R) return gd;
    DiscreteControl out = gd;
    const double scale = R / norm;
    for (double& v : out.g) v *= scale;
    return out;
}

double l2_distance(const PiecewiseLinearControl& u, const Field& g, int subdivisions) {
    const double tau = u.nodes().tau;
    const int pieces = u.nodes().n() * subdivisions;
    const double w = tau / subdivisions;
    double s = 0.0;
    for (int j = 0; j < pieces; ++j) {
        const double a = j * w, b = (j + 1) * w;
        // Evaluate u through its own piece to avoid picking the neighbour at the right end.
        const int k = j / subdivisions + 1;
        const double g0 = u.nodes().g[k - 1], g1 = u.nodes().g[k];
        auto diff2 = [&](double t) {
            const double uv = g0 + (g1 - g0) * (t - (k - 1) * tau) / tau;
            const double d = uv - g(0.0, t);
            return d * d;
        };
        s += w * quad::mean_gl5(diff2, a, b);
    }
    return std::sqrt(s);
}

double l2_distance(const PiecewiseLinearControl& u, const PiecewiseLinearControl& v) {
    std::vector<double> bp;
    for (int k = 0; k <= u.nodes().n(); ++k) bp.push_back(k * u.nodes().tau);
    for (int k = 0; k <= v.nodes().n(); ++k) bp.push_back(k * v.nodes().tau);
    std::sort(bp.begin(), bp.end());
    bp.erase(std::unique(bp.begin(), bp.end(), [](double a, double b) { return std::fabs(a - b) < 1e-14; }),
             bp.end());
    double s = 0.0;
    for (std::size_t j = 0; j + 1 < bp.size(); ++j) {
        const double a = bp[j], b = bp[j + 1];
        const double mid = 0.5 * (a + b);
        // Both interpolants are linear on [a, b]; Simpson is exact for the square.
        const double d0 = u(a) - v(a);
        const double dm = u(mid) - v(mid);
        const double db = u(b) - v(b);
        s += (b - a) * (d0 * d0 + 4.0 * dm * dm + db * db) / 6.0;
    }
    return std::sqrt(s);
}

double w21_norm(const Field& g, double T, int cells) {
    const double d = 1e-6 * std::max(1.0, T);
    const double hc = T / cells;
    double s = 0.0;
    for (int i = 0; i < cells; ++i) {
        auto integrand = [&](double t) {
            const double lo = std::max(0.0, t - d), hi = std::min(T, t + d);
            const double deriv = (g(0.0, hi) - g(0.0, lo)) / (hi - lo);
            const double v = g(0.0, t);
            return v * v + deriv * deriv;
        };
        s += hc * quad::mean_gl5(integrand, i * hc, (i + 1) * hc);
    }
    return std::sqrt(s);
}

}  // namespace stefan
