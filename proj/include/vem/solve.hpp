#pragma once

#include "vem/assembly.hpp"

#include <Eigen/Dense>

#include <stdexcept>
#include <string>
#include <vector>

namespace vem {

/// Saddle-point system without a unique solution (expected for the
/// unstable k = 1 pairs on triangles and squares).
class SingularSystemError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct StokesSolution {
    Eigen::VectorXd velocity;  // full velocity vector (boundary values included)
    Eigen::VectorXd pressure;  // per-element coefficients in the configured basis
    double multiplier = 0.0;
    double residual = 0.0;     // relative residual of the constrained system
    bool minimum_norm = false; // solved by the least-squares fallback
};

struct SolveOptions {
    // On a singular system return the minimum-norm solution instead of
    // throwing (dense, coarse meshes only).
    bool allow_minimum_norm = false;
    std::string context;  // prepended to error messages
};

inline constexpr double kResidualTolerance = 1e-9;

/// Estimated number of kernel directions of B^T on the reduced unknowns:
/// 1 means the constant pressure only, anything larger flags spurious modes
/// (the count is a lower bound once the first spurious pivot is hit).
int pressure_kernel_dimension(const ReducedSystem& reduced);

StokesSolution solve_saddle(const ReducedSystem& reduced, const SolveOptions& options = {});

/// Assemble, impose g on the boundary and solve in one go.
StokesSolution solve_stokes(const VemSpace& space, const VectorField& f, const VectorField& g,
                            const SolveOptions& options = {});

struct InfSupReport {
    double beta = 0.0;
    int kernel_dim = 0;
    std::vector<double> eigenvalues;  // ascending
    double mesh_h = 0.0;
    bool ambiguous = false;  // kernel size changes when the threshold moves by 10x
    double beta_monomial = 0.0;  // same quantity from the generalized problem in the monomial basis
};

inline constexpr double kKernelThreshold = 1e-10;

/// beta = sqrt of the smallest non-zero eigenvalue of B A^{-1} B^T on the
/// interior velocity DOFs with an L2-orthonormal pressure basis.
InfSupReport infsup_constant(const PolygonalMesh& mesh, int k, int k_pressure,
                             SpaceVariant variant = SpaceVariant::Enhanced);

/// Kernel size and beta from an ascending eigenvalue list.
void classify_spectrum(const std::vector<double>& eigenvalues, double tau, int& kernel_dim, double& beta,
                       bool& ambiguous);

}  // namespace vem
