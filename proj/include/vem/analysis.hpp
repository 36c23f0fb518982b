#pragma once

#include "vem/assembly.hpp"
#include "vem/solve.hpp"

#include <Eigen/Dense>

#include <functional>
#include <vector>

namespace vem {

/// Closed-form velocity, velocity gradient (row c = grad u_c), pressure and
/// the matching load f = -Laplacian(u) + grad(p).
struct ExactSolution {
    VectorField u;
    std::function<Eigen::Matrix2d(const Point2&)> grad_u;
    ScalarField p;
    VectorField f;
};

/// u = (cos 2pi x sin 2pi y, -sin 2pi x cos 2pi y), p = e^{x+y} - (e-1)^2.
ExactSolution manufactured();

/// Divergence-free polynomial velocity of degree k from a stream function of
/// degree k+1, and a pressure of degree k_pressure with zero mean on the
/// unit square (identically zero for k_pressure = 0).
ExactSolution polynomial_solution(int k, int k_pressure);

struct ErrorReport {
    double h1_velocity_rel = 0.0;
    double l2_velocity_rel = 0.0;
    double l2_pressure_rel = 0.0;
    double div_l2 = 0.0;
    bool elliptic_substitute = false;  // regular space: Pi^nabla_k replaces Pi^0_k
    bool pressure_absolute = false;    // exact pressure is zero: absolute error reported
};

/// Error quadrature degree is 2k + 4 unless `quad_degree` > 0.
ErrorReport compute_errors(const VemSpace& space, const StokesSolution& solution, const ExactSolution& exact,
                           int quad_degree = 0);

/// || Pi^0_{k_pressure} div u_h ||_{L2(Omega)} of a velocity DOF vector.
double divergence_norm(const VemSpace& space, const Eigen::VectorXd& velocity);

/// DOF interpolant of a vector field (quadrature degree 2k + 4 by default).
Eigen::VectorXd interpolate_velocity(const VemSpace& space, const VectorField& u, int quad_degree = 0);

/// Element-wise L2 projection of p in the configured pressure basis.
Eigen::VectorXd project_pressure(const VemSpace& space, const ScalarField& p, int quad_degree = 0);

/// Broken L2 norm of a discontinuous pressure vector.
double pressure_l2_norm(const VemSpace& space, const Eigen::VectorXd& pressure);

struct OrthogonalityReport {
    double absolute = 0.0;  // |b_h(u_h - u_I, p_h - p_I)|
    double relative = 0.0;  // absolute / (|u_h|_1 ||p_h||_0)
};

OrthogonalityReport orthogonality_check(const VemSpace& space, const SaddleSystem& system,
                                        const StokesSolution& solution, const ExactSolution& exact);

struct ConvergenceRow {
    int level = 0;
    double h = 0.0;
    int n_elements = 0;
    int n_dofs = 0;
    ErrorReport errors;
};

/// log(e0/e1) / log(h0/h1); NaN when an error is not positive.
double convergence_rate(double e0, double e1, double h0, double h1);

struct RateRow {
    double h1_velocity;
    double l2_velocity;
    double l2_pressure;
};

/// One rate row per consecutive pair of rows.
std::vector<RateRow> rates(const std::vector<ConvergenceRow>& table);

}  // namespace vem
