#include "stefan/grid.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>

#include "stefan/quadrature.hpp"

namespace stefan {

namespace {

constexpr double kRefineTol = 1e-10;

// Adaptive bisection: a piece is accepted once GL5 on it agrees with GL5 on its halves.
double mean_1d_rec(const std::function<double(double)>& f, double a, double b, double coarse, int depth) {
    const double mid = 0.5 * (a + b);
    const double left = quad::mean_gl5(f, a, mid), right = quad::mean_gl5(f, mid, b);
    const double fine = 0.5 * (left + right);
    if (depth == 0 || std::fabs(coarse - fine) <= kRefineTol * std::max(1.0, std::fabs(fine))) return fine;
    return 0.5 * (mean_1d_rec(f, a, mid, left, depth - 1) + mean_1d_rec(f, mid, b, right, depth - 1));
}

double mean_1d(const Field& w, bool space, double a, double b) {
    const std::function<double(double)> f = [&](double s) { return space ? w(s, 0.0) : w(0.0, s); };
    return mean_1d_rec(f, a, b, quad::mean_gl5(f, a, b), 30);
}

double mean_cell_rec(const Field& q, double x0, double x1, double t0, double t1, double coarse, int depth) {
    const double xm = 0.5 * (x0 + x1), tm = 0.5 * (t0 + t1);
    const double parts[4] = {quad::mean_gl5x5(q, x0, xm, t0, tm), quad::mean_gl5x5(q, xm, x1, t0, tm),
                             quad::mean_gl5x5(q, x0, xm, tm, t1), quad::mean_gl5x5(q, xm, x1, tm, t1)};
    const double fine = 0.25 * (parts[0] + parts[1] + parts[2] + parts[3]);
    if (depth == 0 || std::fabs(coarse - fine) <= kRefineTol * std::max(1.0, std::fabs(fine))) return fine;
    return 0.25 * (mean_cell_rec(q, x0, xm, t0, tm, parts[0], depth - 1) +
                   mean_cell_rec(q, xm, x1, t0, tm, parts[1], depth - 1) +
                   mean_cell_rec(q, x0, xm, tm, t1, parts[2], depth - 1) +
                   mean_cell_rec(q, xm, x1, tm, t1, parts[3], depth - 1));
}

double mean_cell(const Field& q, double x0, double x1, double t0, double t1) {
    return mean_cell_rec(q, x0, x1, t0, t1, quad::mean_gl5x5(q, x0, x1, t0, t1), 6);
}

void require_finite(double v, const char* name, double x, double t) {
    if (!std::isfinite(v)) {
        std::ostringstream msg;
        msg << name << " is not finite at (x=" << x << ", t=" << t << ")";
        throw ValidationError(msg.str());
    }
}

// ||w||_{W_2^1} over [0, L] by composite Gauss-Legendre with a central
// difference for the derivative.
double w21_norm(const Field& w, bool space, double L, int cells) {
    auto f = [&](double s) { return space ? w(s, 0.0) : w(0.0, s); };
    const double d = 1e-6 * std::max(1.0, L);
    double sum = 0.0;
    const double hc = L / cells;
    for (int i = 0; i < cells; ++i) {
        auto integrand = [&](double s) {
            const double lo = std::max(0.0, s - d), hi = std::min(L, s + d);
            const double deriv = (f(hi) - f(lo)) / (hi - lo);
            const double v = f(s);
            return v * v + deriv * deriv;
        };
        sum += hc * quad::mean_gl5(integrand, i * hc, (i + 1) * hc);
    }
    return std::sqrt(sum);
}

}  // namespace

DataNorms estimate_norms(const ProblemData& data, int m, int n) {
    const int mx = 4 * m, nt = 4 * n;
    DataNorms norms;
    norms.a_min = HUGE_VAL;
    for (int i = 0; i <= mx; ++i) {
        const double x = data.ell * i / mx;
        for (int k = 0; k <= nt; ++k) {
            const double t = data.T * k / nt;
            const double a = data.a(x, t), b = data.b(x, t), c = data.c(x, t), f = data.f(x, t);
            require_finite(a, "a", x, t);
            require_finite(b, "b", x, t);
            require_finite(c, "c", x, t);
            require_finite(f, "f", x, t);
            if (a < data.a0) {
                std::ostringstream msg;
                msg << "coefficient a = " << a << " below a0 = " << data.a0 << " at (x=" << x << ", t=" << t << ")";
                throw ValidationError(msg.str());
            }
            norms.a_min = std::min(norms.a_min, a);
            norms.a_max = std::max(norms.a_max, a);
            norms.b_inf = std::max(norms.b_inf, std::fabs(b));
            norms.c_inf = std::max(norms.c_inf, std::fabs(c));
            norms.f_inf = std::max(norms.f_inf, std::fabs(f));
        }
    }
    for (int k = 0; k <= nt; ++k) {
        const double t = data.T * k / nt;
        const double p = data.p(0.0, t);
        require_finite(p, "p", 0.0, t);
        norms.p_inf = std::max(norms.p_inf, std::fabs(p));
    }
    for (int i = 0; i <= mx; ++i) {
        const double x = data.ell * i / mx;
        const double phi = data.phi(x, 0.0);
        require_finite(phi, "phi", x, 0.0);
        require_finite(data.omega(x, 0.0), "omega", x, 0.0);
        norms.phi_inf = std::max(norms.phi_inf, std::fabs(phi));
    }
    norms.phi_w21 = w21_norm(data.phi, true, data.ell, mx);
    norms.p_w21 = w21_norm(data.p, false, data.T, nt);
    return norms;
}

Grid make_grid(const ProblemData& data, double slope_lo, int m, int n, std::vector<std::string>* warnings) {
    if (m < 1 || n < 1) throw ValidationError("grid: m and n must be at least 1");
    if (!(data.ell > 0.0) || !(data.T > 0.0)) throw ValidationError("grid: ell and T must be positive");
    if (!(data.a0 > 0.0)) throw ValidationError("grid: a0 must be positive");
    Grid g;
    g.ell = data.ell;
    g.T = data.T;
    g.m = m;
    g.n = n;
    g.h = data.ell / m;
    g.tau = data.T / n;

    const DataNorms norms = estimate_norms(data, m, n);
    if (norms.b_inf > 0.0) {
        const double needed = 8.0 * norms.b_inf / slope_lo;
        if (g.h / g.tau < needed) {
            std::ostringstream msg;
            msg << "mesh condition h/tau >= 8*||b||/slope_lo violated: h/tau = " << g.h / g.tau
                << " < " << needed << " (m=" << m << ", n=" << n << ")";
            throw MeshConditionViolated(msg.str());
        }
    }
    const double denom = norms.c_inf + norms.b_inf * norms.b_inf / (2.0 * data.a0);
    if (warnings && denom > 0.0 && g.tau >= slope_lo / denom) {
        std::ostringstream msg;
        msg << "tau = " << g.tau << " is not below slope_lo/(||c|| + ||b||^2/(2 a0)) = " << slope_lo / denom
            << "; uniqueness of the discrete state is not guaranteed";
        warnings->push_back(msg.str());
    }
    return g;
}

std::vector<double> steklov_time(const Field& w, const Grid& grid) {
    std::vector<double> out(grid.n + 1);
    out[0] = w(0.0, 0.0);
    for (int k = 1; k <= grid.n; ++k) out[k] = mean_1d(w, false, grid.t(k - 1), grid.t(k));
    return out;
}

std::vector<double> steklov_space(const Field& phi, const Grid& grid) {
    std::vector<double> out(grid.m + 1);
    for (int i = 0; i < grid.m; ++i) out[i] = mean_1d(phi, true, grid.x(i), grid.x(i + 1));
    out[grid.m] = phi(grid.ell, 0.0);
    return out;
}

Table steklov_cell(const Field& q, const Grid& grid) {
    Table out(grid.m, grid.n + 1);
    for (int i = 0; i < grid.m; ++i)
        for (int k = 1; k <= grid.n; ++k)
            out(i, k) = mean_cell(q, grid.x(i), grid.x(i + 1), grid.t(k - 1), grid.t(k));
    return out;
}

AveragedData average_data(const ProblemData& data, const Grid& grid) {
    AveragedData avg;
    avg.a = steklov_cell(data.a, grid);
    avg.b = steklov_cell(data.b, grid);
    avg.c = steklov_cell(data.c, grid);
    avg.f = steklov_cell(data.f, grid);
    avg.phi = steklov_space(data.phi, grid);
    avg.omega = steklov_space(data.omega, grid);
    avg.p = steklov_time(data.p, grid);
    return avg;
}

}  // namespace stefan
