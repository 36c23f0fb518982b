#pragma once

#include "vem/geometry.hpp"
#include "vem/mesh.hpp"

#include <Eigen/Dense>

#include <stdexcept>
#include <vector>

namespace vem {

class DegenerateElementError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Exponents of x and y; |alpha| = a1 + a2.
struct MultiIndex {
    int a1 = 0;
    int a2 = 0;
    constexpr int degree() const { return a1 + a2; }
    bool operator==(const MultiIndex&) const = default;
};

/// Dimension of P_l in two variables; zero for l < 0.
constexpr int poly_dim(int degree) { return degree < 0 ? 0 : (degree + 1) * (degree + 2) / 2; }

/// All multi-indices up to `degree` in graded lexicographic order:
/// 1, x, y, x^2, xy, y^2, ...
std::vector<MultiIndex> multi_indices(int degree);

/// Position of a multi-index in the graded lexicographic enumeration.
constexpr int index_of(MultiIndex a)
{
    const int d = a.degree();
    return poly_dim(d - 1) + a.a2;
}

/// Scaled monomials ((x - x_P)/h_P)^a1 ((y - y_P)/h_P)^a2, |alpha| <= degree.
class ScaledMonomialBasis {
public:
    ScaledMonomialBasis(Point2 center, double scale, int degree);

    const Point2& center() const { return center_; }
    double scale() const { return scale_; }
    int degree() const { return degree_; }
    int dim() const { return poly_dim(degree_); }

    Eigen::VectorXd eval(const Point2& p) const;
    /// Row alpha holds the gradient of m_alpha.
    Eigen::MatrixX2d eval_grads(const Point2& p) const;

    /// Value of the polynomial sum_alpha coeffs(alpha) m_alpha at p.
    double eval_poly(const Eigen::VectorXd& coeffs, const Point2& p) const;
    Eigen::Vector2d eval_poly_grad(const Eigen::VectorXd& coeffs, const Point2& p) const;

private:
    Point2 center_;
    double scale_;
    int degree_;
    std::vector<MultiIndex> indices_;
};

struct QuadratureRule {
    std::vector<Point2> points;
    std::vector<double> weights;
    int exactness_degree = 0;

    std::size_t size() const { return points.size(); }
    template <typename F>
    double integrate(F&& f) const
    {
        double sum = 0.0;
        for (std::size_t q = 0; q < points.size(); ++q) {
            sum += weights[q] * f(points[q]);
        }
        return sum;
    }
};

/// Gauss-Legendre nodes and weights on [0,1], exact to degree 2n - 1.
struct GaussRule1D {
    std::vector<double> nodes;
    std::vector<double> weights;
};
GaussRule1D gauss_legendre(int points);

/// Collapsed (Duffy) Gauss rule on a triangle, exact to `degree`.
QuadratureRule triangle_quadrature(const Point2& a, const Point2& b, const Point2& c, int degree);

/// Fan sub-triangulation from the star center; throws when the polygon has
/// an empty kernel.
QuadratureRule polygon_quadrature(const ElementGeometry& element, int degree);

/// Gauss-Legendre rule on the segment [a, b], exact to `degree`.
QuadratureRule edge_quadrature(const Point2& a, const Point2& b, int degree);

/// Mass matrix int_P m_alpha m_beta of a basis under a rule.
Eigen::MatrixXd mass_matrix(const ScaledMonomialBasis& basis, const QuadratureRule& rule);

/// Modified Gram-Schmidt in the inner product given by `gram`. Returns the
/// lower-triangular L with L * gram * L^T = I (row i of L expresses the
/// i-th orthonormal function in the original basis).
Eigen::MatrixXd gram_schmidt(const Eigen::MatrixXd& gram);

struct OrthonormalBasis {
    ScaledMonomialBasis underlying;
    Eigen::MatrixXd coeffs;

    int dim() const { return underlying.dim(); }
    Eigen::VectorXd eval(const Point2& p) const { return coeffs * underlying.eval(p); }
};

/// L2(P)-orthonormal basis of P_degree(P) built from the scaled monomials.
OrthonormalBasis gram_schmidt(const ElementGeometry& element, int degree);

}  // namespace vem
