#pragma once

#include <array>

namespace stefan::quad {

/// Five-point Gauss-Legendre rule on [-1, 1].
inline constexpr std::array<double, 5> kGL5Nodes{
    -0.9061798459386639927976269, -0.5384693101056830910363144, 0.0,
    0.5384693101056830910363144, 0.9061798459386639927976269};
inline constexpr std::array<double, 5> kGL5Weights{
    0.2369268850561890875142640, 0.4786286704993664680412915, 0.5688888888888888888888889,
    0.4786286704993664680412915, 0.2369268850561890875142640};

/// Mean value of f over [a, b] by 5-point Gauss-Legendre.
template <class F>
double mean_gl5(F&& f, double a, double b) {
    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    double s = 0.0;
    for (int q = 0; q < 5; ++q) s += kGL5Weights[q] * f(mid + half * kGL5Nodes[q]);
    return 0.5 * s;
}

/// Mean value of f over [x0, x1] x [t0, t1] by the 5x5 tensor rule.
template <class F>
double mean_gl5x5(F&& f, double x0, double x1, double t0, double t1) {
    const double xm = 0.5 * (x0 + x1), xh = 0.5 * (x1 - x0);
    const double tm = 0.5 * (t0 + t1), th = 0.5 * (t1 - t0);
    double s = 0.0;
    for (int p = 0; p < 5; ++p) {
        const double x = xm + xh * kGL5Nodes[p];
        double row = 0.0;
        for (int q = 0; q < 5; ++q) row += kGL5Weights[q] * f(x, tm + th * kGL5Nodes[q]);
        s += kGL5Weights[p] * row;
    }
    return 0.25 * s;
}

}  // namespace stefan::quad
