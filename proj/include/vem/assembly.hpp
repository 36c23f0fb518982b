#pragma once

#include "vem/mesh.hpp"
#include "vem/vem_local.hpp"

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace vem {

using SparseMatrix = Eigen::SparseMatrix<double>;

/// Failure while building or assembling one element.
class AssemblyError : public std::runtime_error {
public:
    AssemblyError(int element, const std::string& what)
        : std::runtime_error("element " + std::to_string(element) + ": " + what), element_(element)
    {
    }
    int element() const { return element_; }

private:
    int element_;
};

struct DiscretizationConfig {
    int k = 2;
    int k_pressure = 1;
    SpaceVariant variant = SpaceVariant::Enhanced;
    int rhs_degree = -1;  // < 0 selects k
    StabilizationProjector stab_projector = StabilizationProjector::Elliptic;
    StabilizationScaling stab_scaling = StabilizationScaling::Unit;
    PressureBasis pressure_basis = PressureBasis::Monomial;
    int quad_degree = 0;  // <= 0 selects 2k + 2
    // Shift the boundary interpolant by a linear field so that its discrete
    // flux vanishes (the divergence-free constraint is otherwise incompatible
    // for k = 1 with curved boundary data).
    bool flux_correction = true;

    int effective_rhs_degree() const { return rhs_degree < 0 ? k : rhs_degree; }
};

/// Scalar velocity DOFs are numbered vertices, then k-1 moments per edge,
/// then n_{k-2} moments per element; the y component is offset by
/// n_scalar. Pressure DOF (P, alpha) is P * n_{k_pressure} + alpha.
struct GlobalDofMap {
    int k = 1;
    int k_pressure = 0;
    int n_vertices = 0;
    int n_edges = 0;
    int n_elements = 0;
    int n_scalar = 0;
    int n_pressure_local = 0;

    std::vector<std::vector<int>> element_dofs;  // local scalar DOF -> global scalar DOF
    std::vector<char> boundary;                  // per scalar DOF

    int n_velocity() const { return 2 * n_scalar; }
    int n_pressure() const { return n_pressure_local * n_elements; }
    int vertex_dof(int v) const { return v; }
    int edge_dof(int e, int j) const { return n_vertices + e * (k - 1) + j; }
    int cell_dof(int element, int alpha) const
    {
        return n_vertices + n_edges * (k - 1) + element * poly_dim(k - 2) + alpha;
    }
    int pressure_dof(int element, int alpha) const { return element * n_pressure_local + alpha; }

    /// Global velocity ids (both components) of one element, local order.
    std::vector<int> element_velocity_dofs(int element) const;
    std::vector<int> boundary_velocity_dofs() const;
    std::vector<int> interior_velocity_dofs() const;
};

GlobalDofMap build_dof_map(const PolygonalMesh& mesh, int k, int k_pressure);

/// Number of worker threads for element loops, read from VEMSV_THREADS
/// (default: hardware concurrency).
int worker_threads();

/// Mesh plus the local element objects of one discretization.
class VemSpace {
public:
    VemSpace(const PolygonalMesh& mesh, DiscretizationConfig config);

    const PolygonalMesh& mesh() const { return *mesh_; }
    const DiscretizationConfig& config() const { return config_; }
    const GlobalDofMap& dofs() const { return dofs_; }
    const LocalVem& local(int element) const { return *locals_[static_cast<std::size_t>(element)]; }
    int num_elements() const { return static_cast<int>(locals_.size()); }

    /// Local velocity DOF vector of one element gathered from a global one.
    Eigen::VectorXd gather(int element, const Eigen::VectorXd& velocity) const;
    /// Monomial coefficients of the pressure on one element.
    Eigen::VectorXd pressure_monomials(int element, const Eigen::VectorXd& pressure) const;

private:
    std::shared_ptr<const PolygonalMesh> mesh_;
    DiscretizationConfig config_;
    GlobalDofMap dofs_;
    std::vector<std::unique_ptr<LocalVem>> locals_;
};

struct SaddleSystem {
    SparseMatrix A;            // velocity x velocity
    SparseMatrix B;            // pressure x velocity, entries -int_P q div(Phi)
    Eigen::VectorXd f;         // velocity load
    Eigen::VectorXd mean_row;  // int_P q_alpha per pressure DOF
    Eigen::VectorXd dirichlet_values;  // full velocity vector, boundary entries set
    std::vector<Eigen::MatrixXd> pressure_transforms;  // per element, basis -> monomials
};

SaddleSystem assemble(const VemSpace& space, const VectorField& f);

struct BoundaryData {
    VectorField g;
    Eigen::VectorXd values;  // full velocity vector; interior entries zero
    double flux_before = 0.0;  // discrete boundary flux of the plain interpolant
};

/// Vertex values g(x_V) and edge moments by Gauss quadrature of degree 2k+2.
BoundaryData interpolate_boundary(const VemSpace& space, const VectorField& g);

/// Discrete flux int_dOmega v_h . n of a velocity vector.
double boundary_flux(const VemSpace& space, const Eigen::VectorXd& velocity);

/// System restricted to interior velocity DOFs with the boundary values
/// moved to the right-hand side.
struct ReducedSystem {
    SparseMatrix A;        // interior x interior
    SparseMatrix B;        // pressure x interior
    Eigen::VectorXd f;     // velocity rhs
    Eigen::VectorXd g;     // pressure rhs (-B_boundary g_boundary)
    Eigen::VectorXd mean_row;
    std::vector<int> interior;   // global velocity id of each reduced unknown
    Eigen::VectorXd dirichlet;   // full velocity vector with the boundary values
};

ReducedSystem apply_dirichlet(const SaddleSystem& system, const GlobalDofMap& dofs, const BoundaryData& bc);

/// [[A, B^T, 0], [B, 0, m], [0, m^T, 0]] with m = mean_row.
struct KktSystem {
    SparseMatrix K;
    Eigen::VectorXd rhs;
    int n_u = 0;
    int n_p = 0;
};

KktSystem zero_mean_constraint(const ReducedSystem& reduced);

/// Matrix Market dumps of A, B and f (A.mtx, B.mtx, f.mtx) into `dir`.
void dump_system(const SaddleSystem& system, const std::string& dir);

}  // namespace vem
