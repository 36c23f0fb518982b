#pragma once

#include "vem/mesh.hpp"
#include "vem/poly.hpp"

#include <Eigen/Dense>

#include <functional>
#include <vector>

namespace vem {

/// Local virtual element space: the original one (Laplacian in P_{k-2}) or
/// the enhanced one, in which the full L2 projection onto P_k is computable.
enum class SpaceVariant { Regular, Enhanced };

/// Projector whose complement the stabilization penalizes.
enum class StabilizationProjector { Elliptic, Orthogonal };

/// Unit: S = (I - Pi)^T (I - Pi). ConsistencyTrace: the same matrix scaled
/// by trace(A_C) / N_dof (kept for conditioning studies).
enum class StabilizationScaling { Unit, ConsistencyTrace };

enum class PressureBasis { Monomial, Orthonormal };

using ScalarField = std::function<double(const Point2&)>;
using VectorField = std::function<Eigen::Vector2d(const Point2&)>;

/// Scalar DOFs of one element: vertex values (counter-clockwise), then k-1
/// edge moments per edge (edges counter-clockwise, moments by degree), then
/// the cell moments against the scaled monomials of degree <= k-2.
struct DofLayout {
    int k = 1;
    int n_vertices = 0;
    int edge_moments = 0;  // per edge
    int cell_moments = 0;

    int size() const { return n_vertices * (1 + edge_moments) + cell_moments; }
    int vertex_dof(int v) const { return v; }
    int edge_dof(int edge, int j) const { return n_vertices + edge * edge_moments + j; }
    int cell_dof(int alpha) const { return n_vertices * (1 + edge_moments) + alpha; }
};

DofLayout dof_layout(int n_vertices, int k);

struct ProjectorPack {
    Eigen::MatrixXd Pn_star;   // n_k x N: elliptic projection, monomial coefficients
    Eigen::MatrixXd Pn_dof;    // N x N: elliptic projection in DOF coordinates
    Eigen::MatrixXd P0;        // n_l x N: L2 projection of degree l (see l2_degree)
    int l2_degree = -1;
    Eigen::MatrixXd P0grad_x;  // n_{k-1} x N
    Eigen::MatrixXd P0grad_y;
};

struct LocalStokesMatrices {
    Eigen::MatrixXd A_C;  // 2N x 2N
    Eigen::MatrixXd A_S;  // 2N x 2N
    Eigen::MatrixXd B_P;  // n_{k_pressure} x 2N, rows int_P q_alpha div(Phi_j)
    Eigen::VectorXd f_P;  // 2N
};

/// Per-element virtual element machinery. Vector-valued DOF vectors stack
/// the x-component DOFs before the y-component DOFs.
class LocalVem {
public:
    /// quad_degree <= 0 selects 2k + 2.
    LocalVem(ElementGeometry geometry, int k, int quad_degree = 0);

    const ElementGeometry& geometry() const { return geom_; }
    int k() const { return k_; }
    const DofLayout& layout() const { return layout_; }
    int num_dofs() const { return layout_.size(); }
    const QuadratureRule& rule() const { return rule_; }
    ScaledMonomialBasis basis(int degree) const { return {geom_.centroid, geom_.diameter, degree}; }

    /// int_P m_alpha m_beta for |alpha|, |beta| <= degree (degree <= k).
    Eigen::MatrixXd mass(int degree) const;

    /// N x n_degree: column beta holds the DOFs of m_beta.
    Eigen::MatrixXd dofs_of_monomials(int degree) const;

    /// DOF functionals applied to a scalar function, with quadrature exact
    /// to `quad_degree` on edges and cell.
    Eigen::VectorXd interpolate(const ScalarField& f, int quad_degree) const;

    const Eigen::MatrixXd& elliptic_star() const { return pn_star_; }
    Eigen::MatrixXd elliptic_dof() const;

    /// L2 projection onto P_degree. Regular: degree <= k-2. Enhanced:
    /// degree <= k. Throws std::invalid_argument when not computable.
    Eigen::MatrixXd l2_projector(SpaceVariant variant, int degree) const;

    const Eigen::MatrixXd& gradient_x() const { return grad_x_; }
    const Eigen::MatrixXd& gradient_y() const { return grad_y_; }

    ProjectorPack projectors(SpaceVariant variant) const;

    /// Scalar consistency and stabilization matrices (N x N).
    Eigen::MatrixXd consistency_scalar() const;
    Eigen::MatrixXd stabilization_scalar(SpaceVariant variant, StabilizationProjector projector,
                                         StabilizationScaling scaling) const;

    /// Block-diagonal vector stiffness pair (A_C, A_S), 2N x 2N.
    std::pair<Eigen::MatrixXd, Eigen::MatrixXd> stiffness(
        SpaceVariant variant, StabilizationProjector projector = StabilizationProjector::Elliptic,
        StabilizationScaling scaling = StabilizationScaling::Unit) const;

    /// Rows: int_P q_alpha div(Phi_j) for q in P_{k_pressure}. Throws
    /// std::invalid_argument for k_pressure > k - 1.
    Eigen::MatrixXd divergence(int k_pressure, PressureBasis basis = PressureBasis::Monomial) const;

    /// Coefficients of the pressure basis in the scaled monomials (identity
    /// for the monomial basis).
    Eigen::MatrixXd pressure_transform(int k_pressure, PressureBasis basis) const;

    /// int_P (Pi0_rhs f) . Phi_j; the regular space with k = 1 uses the
    /// vertex average in place of Pi0_0.
    Eigen::VectorXd load(const VectorField& f, SpaceVariant variant, int rhs_degree) const;

    LocalStokesMatrices local_matrices(SpaceVariant variant, int k_pressure, int rhs_degree,
                                       const VectorField& f,
                                       StabilizationProjector projector = StabilizationProjector::Elliptic,
                                       StabilizationScaling scaling = StabilizationScaling::Unit,
                                       PressureBasis pressure = PressureBasis::Monomial) const;

    /// Boundary quadrature point with the trace of every local basis function.
    struct BoundaryPoint {
        Point2 x;
        double weight;             // includes the edge length
        Point2 normal;             // outward for the element
        int edge;                  // local edge index
        Eigen::VectorXd trace;     // values of the k + 1 basis functions living on the edge
        std::vector<int> dofs;     // their local DOF indices
    };
    const std::vector<BoundaryPoint>& boundary_points() const { return boundary_; }
    double perimeter() const { return perimeter_; }

private:
    void build_boundary();
    void build_elliptic();
    void build_gradient();

    ElementGeometry geom_;
    int k_;
    DofLayout layout_;
    QuadratureRule rule_;
    Eigen::MatrixXd mass_;  // degree k
    std::vector<BoundaryPoint> boundary_;
    double perimeter_ = 0.0;
    Eigen::MatrixXd pn_star_;
    Eigen::MatrixXd grad_x_;
    Eigen::MatrixXd grad_y_;
};

/// Gauss points per edge used for all boundary integrals of order k.
int boundary_points_per_edge(int k);

/// Maps DOFs of an edge trace (start value, end value, moments against
/// (t - 1/2)^j, j <= k-2) to the coefficients of the trace in the basis
/// (t - 1/2)^i, i <= k, where t runs along the global edge orientation.
Eigen::MatrixXd edge_trace_operator(int k);

}  // namespace vem
