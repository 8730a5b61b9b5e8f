#pragma once

#include <string>
#include <vector>

#include "stefan/field.hpp"

namespace stefan {

/// Dense row-major matrix of doubles.
class Table {
public:
    Table() = default;
    Table(int rows, int cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(static_cast<std::size_t>(rows) * cols, fill) {}

    double& operator()(int r, int c) { return data_[static_cast<std::size_t>(r) * cols_ + c]; }
    double operator()(int r, int c) const { return data_[static_cast<std::size_t>(r) * cols_ + c]; }

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    const std::vector<double>& data() const { return data_; }

private:
    int rows_ = 0;
    int cols_ = 0;
    std::vector<double> data_;
};

/// Continuous problem data. a, b, c, f are functions of (x, t); phi and omega
/// depend on x only and p on t only.
struct ProblemData {
    double ell = 1.0;
    double T = 1.0;
    Field a = constant_field(1.0);
    Field b = constant_field(0.0);
    Field c = constant_field(0.0);
    Field f = constant_field(0.0);
    Field phi = constant_field(0.0);
    Field omega = constant_field(0.0);
    Field p = constant_field(0.0);
    double a0 = 1.0;
    double R = 1.0;
};

/// Sup-norm estimates taken on a lattice four times finer than the grid.
/// These are estimates, not certified bounds.
struct DataNorms {
    double a_max = 0.0;
    double a_min = 0.0;
    double b_inf = 0.0;
    double c_inf = 0.0;
    double f_inf = 0.0;
    double p_inf = 0.0;
    double phi_inf = 0.0;
    double phi_w21 = 0.0;  // ||phi||_{W_2^1(0,ell)}
    double p_w21 = 0.0;    // ||p||_{W_2^1(0,T)}
};

/// Uniform space-time mesh x_i = i h, t_k = k tau.
struct Grid {
    double ell = 1.0;
    double T = 1.0;
    int m = 1;
    int n = 1;
    double h = 1.0;
    double tau = 1.0;

    double x(int i) const { return i == m ? ell : i * h; }
    double t(int k) const { return k == n ? T : k * tau; }
};

class MeshConditionViolated : public ValidationError {
public:
    using ValidationError::ValidationError;
};

/// Estimate the sup norms of the data on the (4m+1) x (4n+1) lattice and
/// check a >= a0 there. Throws ValidationError on a violation or on
/// non-finite samples.
DataNorms estimate_norms(const ProblemData& data, int m, int n);

/// Build the grid and check the mesh condition h/tau >= 8 ||b|| / slope_lo.
/// The tau smallness condition of the uniqueness argument only produces a
/// warning, appended to `warnings` when given.
Grid make_grid(const ProblemData& data, double slope_lo, int m, int n,
               std::vector<std::string>* warnings = nullptr);

/// w_0 = w(0), w_k = mean of w over [t_{k-1}, t_k].
std::vector<double> steklov_time(const Field& w, const Grid& grid);

/// phi_i = mean of phi over [x_i, x_{i+1}] for i < m, phi_m = phi(ell).
std::vector<double> steklov_space(const Field& phi, const Grid& grid);

/// q_ik = mean of q over [x_i, x_{i+1}] x [t_{k-1}, t_k]. The result has m rows
/// and n + 1 columns; column 0 is unused and left at zero.
Table steklov_cell(const Field& q, const Grid& grid);

/// Everything the discrete scheme needs, averaged on one grid.
struct AveragedData {
    Table a, b, c, f;         // (i, k), i = 0..m-1, k = 1..n
    std::vector<double> phi;  // i = 0..m
    std::vector<double> omega;
    std::vector<double> p;    // k = 0..n
};

AveragedData average_data(const ProblemData& data, const Grid& grid);

}  // namespace stefan
