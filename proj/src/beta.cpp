#include "stefan/beta.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <sstream>

namespace stefan {

// ---------------------------------------------------------------------------
// LinearBranch

namespace {

std::size_t piece_index(const std::vector<double>& x, double v) {
    // Piece p spans [x[p], x[p+1]]; outside the range the end pieces extend.
    if (v <= x.front()) return 0;
    if (v >= x.back()) return x.size() - 2;
    const auto it = std::upper_bound(x.begin(), x.end(), v);
    return static_cast<std::size_t>(it - x.begin()) - 1;
}

}  // namespace

double LinearBranch::operator()(double v) const {
    const std::size_t p = piece_index(x, v);
    const double s = (y[p + 1] - y[p]) / (x[p + 1] - x[p]);
    return y[p] + s * (v - x[p]);
}

double LinearBranch::slope_at(double v) const {
    const std::size_t p = piece_index(x, v);
    return (y[p + 1] - y[p]) / (x[p + 1] - x[p]);
}

LinearBranch LinearBranch::line(double slope, double intercept) {
    return LinearBranch{{0.0, 1.0}, {intercept, intercept + slope}};
}

// ---------------------------------------------------------------------------
// BetaGraph

BetaGraph BetaGraph::build(std::vector<double> phase_temps, std::vector<double> jumps,
                           std::vector<LinearBranch> branches, double slope_lo, double slope_hi) {
    if (!(slope_lo > 0.0)) throw ValidationError("beta: slope_lo must be positive");
    if (!(slope_hi >= slope_lo)) throw ValidationError("beta: slope_hi must be >= slope_lo");
    if (jumps.size() != phase_temps.size())
        throw ValidationError("beta: need one jump per phase temperature");
    if (branches.size() != phase_temps.size() + 1)
        throw ValidationError("beta: need exactly one branch more than phase temperatures");
    for (std::size_t j = 0; j < phase_temps.size(); ++j) {
        if (!std::isfinite(phase_temps[j])) throw ValidationError("beta: phase temperature not finite");
        if (j > 0 && !(phase_temps[j] > phase_temps[j - 1]))
            throw ValidationError("beta: phase temperatures must be strictly ascending");
        if (!(jumps[j] > 0.0)) throw ValidationError("beta: jumps must be positive");
    }
    const double rel = 1e-12;
    for (std::size_t b = 0; b < branches.size(); ++b) {
        const auto& br = branches[b];
        if (br.x.size() < 2 || br.x.size() != br.y.size())
            throw ValidationError("beta: branch " + std::to_string(b + 1) + " needs at least two points");
        for (std::size_t p = 0; p + 1 < br.x.size(); ++p) {
            if (!(br.x[p + 1] > br.x[p]))
                throw ValidationError("beta: branch " + std::to_string(b + 1) + " breakpoints not ascending");
            const double s = (br.y[p + 1] - br.y[p]) / (br.x[p + 1] - br.x[p]);
            if (!(s > 0.0))
                throw ValidationError("beta: branch " + std::to_string(b + 1) + " is not monotone increasing");
            if (s < slope_lo * (1.0 - rel) || s > slope_hi * (1.0 + rel)) {
                std::ostringstream msg;
                msg << "beta: branch " << b + 1 << " slope " << s << " outside [" << slope_lo << ", " << slope_hi
                    << "]";
                throw ValidationError(msg.str());
            }
        }
    }
    for (std::size_t j = 0; j < phase_temps.size(); ++j) {
        const double left = branches[j](phase_temps[j]);
        const double right = branches[j + 1](phase_temps[j]);
        if (std::fabs(left - right) > 1e-10 * std::max(1.0, std::fabs(left)))
            throw ValidationError("beta: branches " + std::to_string(j + 1) + " and " + std::to_string(j + 2) +
                                  " disagree at the phase temperature");
    }
    BetaGraph g;
    g.phase_temps_ = std::move(phase_temps);
    g.jumps_ = std::move(jumps);
    g.branches_ = std::move(branches);
    g.slope_lo_ = slope_lo;
    g.slope_hi_ = slope_hi;
    return g;
}

BetaGraph BetaGraph::linear(double slope) {
    return build({}, {}, {LinearBranch::line(slope)}, slope, slope);
}

BetaGraph BetaGraph::two_phase(double phase_temp, double jump, double slope_below, double slope_above) {
    LinearBranch below{{phase_temp - 1.0, phase_temp}, {-slope_below, 0.0}};
    LinearBranch above{{phase_temp, phase_temp + 1.0}, {0.0, slope_above}};
    return build({phase_temp}, {jump}, {below, above}, std::min(slope_below, slope_above),
                 std::max(slope_below, slope_above));
}

GraphValue BetaGraph::eval(double v) const {
    double offset = 0.0;
    std::size_t phase = 0;
    while (phase < phase_temps_.size() && v > phase_temps_[phase]) offset += jumps_[phase++];
    const double base = branches_[phase](v) + offset;
    if (phase < phase_temps_.size() && v == phase_temps_[phase]) return {base, base + jumps_[phase]};
    return {base, base};
}

// ---------------------------------------------------------------------------
// Mollifier kernel tables

namespace mollifier {

namespace {

double raw_density(double u) {
    const double q = 1.0 - u * u;
    return q > 0.0 ? std::exp(-1.0 / q) : 0.0;
}

struct KernelTable {
    static constexpr int kIntervals = 4096;
    double c = 0.0;
    double du = 2.0 / kIntervals;
    std::vector<double> k0, k1, rho;

    KernelTable() {
        using boost::math::quadrature::gauss;
        using boost::math::quadrature::gauss_kronrod;
        const double integral = gauss_kronrod<double, 61>::integrate(raw_density, -1.0, 1.0, 10, 1e-13);
        c = 1.0 / integral;
        k0.resize(kIntervals + 1);
        k1.resize(kIntervals + 1);
        rho.resize(kIntervals + 1);
        double s0 = 0.0, s1 = 0.0;
        for (int i = 0; i <= kIntervals; ++i) {
            const double u = node(i);
            rho[i] = c * raw_density(u);
            if (i > 0) {
                const double a = node(i - 1);
                s0 += gauss<double, 20>::integrate([&](double s) { return c * raw_density(s); }, a, u);
                s1 += gauss<double, 20>::integrate([&](double s) { return s * c * raw_density(s); }, a, u);
            }
            k0[i] = s0;
            k1[i] = s1;
        }
        k0.back() = 1.0;
        k1.back() = 0.0;
    }

    double node(int i) const { return -1.0 + du * i; }

    // Cubic Hermite interpolation; derivatives are rho (for K0) and u*rho (for K1).
    double interp(const std::vector<double>& vals, bool first_moment, double u) const {
        double pos = (u + 1.0) / du;
        int i = static_cast<int>(pos);
        if (i >= kIntervals) i = kIntervals - 1;
        const double s = pos - i;
        const double u0 = node(i), u1 = node(i + 1);
        const double d0 = (first_moment ? u0 : 1.0) * rho[i] * du;
        const double d1 = (first_moment ? u1 : 1.0) * rho[i + 1] * du;
        const double s2 = s * s, s3 = s2 * s;
        return (2 * s3 - 3 * s2 + 1) * vals[i] + (s3 - 2 * s2 + s) * d0 + (-2 * s3 + 3 * s2) * vals[i + 1] +
               (s3 - s2) * d1;
    }
};

const KernelTable& table() {
    static const KernelTable t;
    return t;
}

}  // namespace

double constant() { return table().c; }

double density(double u) { return table().c * raw_density(u); }

double cumulative0(double u) {
    if (u <= -1.0) return 0.0;
    if (u >= 1.0) return 1.0;
    return table().interp(table().k0, false, u);
}

double cumulative1(double u) {
    if (u <= -1.0 || u >= 1.0) return 0.0;
    return table().interp(table().k1, true, u);
}

}  // namespace mollifier

// ---------------------------------------------------------------------------
// SmoothedBeta

namespace {

// Continuous part of the graph: branch j on phase interval j, no jump offsets.
double continuous_part(const BetaGraph& g, double y) {
    std::size_t phase = 0;
    while (phase < g.phase_temps().size() && y > g.phase_temps()[phase]) ++phase;
    return g.branches()[phase](y);
}

double continuous_slope(const BetaGraph& g, double y) {
    std::size_t phase = 0;
    while (phase < g.phase_temps().size() && y > g.phase_temps()[phase]) ++phase;
    return g.branches()[phase].slope_at(y);
}

}  // namespace

SmoothedBeta::SmoothedBeta(BetaGraph graph, double n) : graph_(std::move(graph)), n_(n) {
    if (!(n > 0.0)) throw ValidationError("mollification index must be positive");
    (void)mollifier::constant();

    const auto& temps = graph_.phase_temps();
    std::vector<double> cand(temps.begin(), temps.end());
    for (std::size_t b = 0; b < graph_.branches().size(); ++b) {
        const double lo = b == 0 ? -HUGE_VAL : temps[b - 1];
        const double hi = b + 1 == graph_.branches().size() ? HUGE_VAL : temps[b];
        for (double x : graph_.branches()[b].x)
            if (x > lo && x < hi) cand.push_back(x);
    }
    std::sort(cand.begin(), cand.end());
    cand.erase(std::unique(cand.begin(), cand.end()), cand.end());

    anchor_y_ = cand.empty() ? 0.0 : cand.front();
    anchor_value_ = continuous_part(graph_, anchor_y_);
    base_slope_ = continuous_slope(graph_, anchor_y_ - 1.0);
    for (std::size_t i = 0; i < cand.size(); ++i) {
        const double left = i == 0 ? cand[i] - 1.0 : 0.5 * (cand[i - 1] + cand[i]);
        const double right = i + 1 == cand.size() ? cand[i] + 1.0 : 0.5 * (cand[i] + cand[i + 1]);
        const double ds = continuous_slope(graph_, right) - continuous_slope(graph_, left);
        if (ds != 0.0) kinks_.push_back({cand[i], ds});
    }
}

void SmoothedBeta::eval_with_deriv(double v, double& value, double& derivative) const {
    const double inv_n = 1.0 / n_;
    double val = anchor_value_ + base_slope_ * (v - anchor_y_);
    double der = base_slope_;
    for (const auto& k : kinks_) {
        const double d = v - k.y;
        if (d <= -inv_n) continue;
        if (d >= inv_n) {
            val += k.dslope * d;
            der += k.dslope;
            continue;
        }
        const double u = n_ * d;
        const double c0 = mollifier::cumulative0(u);
        val += k.dslope * (d * c0 - mollifier::cumulative1(u) * inv_n);
        der += k.dslope * c0;
    }
    const auto& temps = graph_.phase_temps();
    const auto& jumps = graph_.jumps();
    for (std::size_t j = 0; j < temps.size(); ++j) {
        const double d = v - temps[j];
        if (d <= -inv_n) continue;
        if (d >= inv_n) {
            val += jumps[j];
            continue;
        }
        const double u = n_ * d;
        val += jumps[j] * mollifier::cumulative0(u);
        der += jumps[j] * n_ * mollifier::density(u);
    }
    value = val;
    derivative = der;
}

double SmoothedBeta::eval(double v) const {
    double val, der;
    eval_with_deriv(v, val, der);
    return val;
}

double SmoothedBeta::deriv(double v) const {
    double val, der;
    eval_with_deriv(v, val, der);
    return der;
}

}  // namespace stefan
