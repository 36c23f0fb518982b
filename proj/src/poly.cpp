#include "vem/poly.hpp"

#include <cmath>
#include <numbers>

namespace vem {

std::vector<MultiIndex> multi_indices(int degree)
{
    std::vector<MultiIndex> out;
    out.reserve(static_cast<std::size_t>(poly_dim(degree)));
    for (int d = 0; d <= degree; ++d) {
        for (int a2 = 0; a2 <= d; ++a2) {
            out.push_back({d - a2, a2});
        }
    }
    return out;
}

ScaledMonomialBasis::ScaledMonomialBasis(Point2 center, double scale, int degree)
    : center_(std::move(center)), scale_(scale), degree_(degree), indices_(multi_indices(degree))
{
}

Eigen::VectorXd ScaledMonomialBasis::eval(const Point2& p) const
{
    const double sx = (p.x() - center_.x()) / scale_;
    const double sy = (p.y() - center_.y()) / scale_;
    Eigen::VectorXd v(dim());
    for (std::size_t i = 0; i < indices_.size(); ++i) {
        v(static_cast<Eigen::Index>(i)) = std::pow(sx, indices_[i].a1) * std::pow(sy, indices_[i].a2);
    }
    return v;
}

Eigen::MatrixX2d ScaledMonomialBasis::eval_grads(const Point2& p) const
{
    const double sx = (p.x() - center_.x()) / scale_;
    const double sy = (p.y() - center_.y()) / scale_;
    Eigen::MatrixX2d g(dim(), 2);
    for (std::size_t i = 0; i < indices_.size(); ++i) {
        const auto [a1, a2] = indices_[i];
        const auto r = static_cast<Eigen::Index>(i);
        g(r, 0) = a1 == 0 ? 0.0 : a1 * std::pow(sx, a1 - 1) * std::pow(sy, a2) / scale_;
        g(r, 1) = a2 == 0 ? 0.0 : a2 * std::pow(sx, a1) * std::pow(sy, a2 - 1) / scale_;
    }
    return g;
}

double ScaledMonomialBasis::eval_poly(const Eigen::VectorXd& coeffs, const Point2& p) const
{
    return eval(p).head(coeffs.size()).dot(coeffs);
}

Eigen::Vector2d ScaledMonomialBasis::eval_poly_grad(const Eigen::VectorXd& coeffs, const Point2& p) const
{
    return eval_grads(p).topRows(coeffs.size()).transpose() * coeffs;
}

GaussRule1D gauss_legendre(int points)
{
    if (points < 1) {
        throw std::invalid_argument("Gauss-Legendre rule needs at least one point");
    }
    GaussRule1D rule;
    rule.nodes.resize(static_cast<std::size_t>(points));
    rule.weights.resize(static_cast<std::size_t>(points));
    const int n = points;
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0;
            double p1 = x;
            for (int j = 2; j <= n; ++j) {
                const double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
                p0 = p1;
                p1 = p2;
            }
            if (n == 1) {
                p1 = x;
                p0 = 1.0;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) {
                break;
            }
        }
        // Recompute the derivative at the converged root for the weight.
        double p0 = 1.0;
        double p1 = x;
        for (int j = 2; j <= n; ++j) {
            const double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
            p0 = p1;
            p1 = p2;
        }
        dp = n == 1 ? 1.0 : n * (x * p1 - p0) / (x * x - 1.0);
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        // Map [-1,1] -> [0,1].
        const auto lo = static_cast<std::size_t>(i);
        const auto hi = static_cast<std::size_t>(n - 1 - i);
        rule.nodes[lo] = 0.5 * (1.0 - x);
        rule.nodes[hi] = 0.5 * (1.0 + x);
        rule.weights[lo] = 0.5 * w;
        rule.weights[hi] = 0.5 * w;
    }
    if (n == 1) {
        rule.nodes[0] = 0.5;
        rule.weights[0] = 1.0;
    }
    return rule;
}

QuadratureRule triangle_quadrature(const Point2& a, const Point2& b, const Point2& c, int degree)
{
    // x = u, y = v (1 - u) on the reference triangle; the Jacobian adds one
    // degree in u.
    const int n = std::max(1, (degree + 3) / 2);
    const GaussRule1D g = gauss_legendre(n);
    const double jac = std::abs((b - a).x() * (c - a).y() - (b - a).y() * (c - a).x());
    QuadratureRule rule;
    rule.exactness_degree = degree;
    rule.points.reserve(static_cast<std::size_t>(n * n));
    rule.weights.reserve(static_cast<std::size_t>(n * n));
    for (int i = 0; i < n; ++i) {
        const double u = g.nodes[static_cast<std::size_t>(i)];
        for (int j = 0; j < n; ++j) {
            const double v = g.nodes[static_cast<std::size_t>(j)] * (1.0 - u);
            rule.points.push_back(a + u * (b - a) + v * (c - a));
            rule.weights.push_back(jac * g.weights[static_cast<std::size_t>(i)] *
                                   g.weights[static_cast<std::size_t>(j)] * (1.0 - u));
        }
    }
    return rule;
}

QuadratureRule polygon_quadrature(const ElementGeometry& element, int degree)
{
    if (!(element.kernel_radius > 0.0)) {
        throw DegenerateElementError("polygon has an empty kernel; cannot fan-triangulate");
    }
    QuadratureRule rule;
    rule.exactness_degree = degree;
    const auto& v = element.vertices;
    const std::size_t n = v.size();
    for (std::size_t i = 0; i < n; ++i) {
        const Point2& p = v[i];
        const Point2& q = v[(i + 1) % n];
        const double twice = (p - element.star_center).x() * (q - element.star_center).y() -
                             (p - element.star_center).y() * (q - element.star_center).x();
        if (twice <= 0.0) {
            // Star center on the edge line: the fan triangle is degenerate.
            continue;
        }
        const QuadratureRule tri = triangle_quadrature(element.star_center, p, q, degree);
        rule.points.insert(rule.points.end(), tri.points.begin(), tri.points.end());
        rule.weights.insert(rule.weights.end(), tri.weights.begin(), tri.weights.end());
    }
    return rule;
}

QuadratureRule edge_quadrature(const Point2& a, const Point2& b, int degree)
{
    const int n = std::max(1, degree / 2 + 1);
    const GaussRule1D g = gauss_legendre(n);
    const double len = (b - a).norm();
    QuadratureRule rule;
    rule.exactness_degree = degree;
    for (int i = 0; i < n; ++i) {
        rule.points.push_back(a + g.nodes[static_cast<std::size_t>(i)] * (b - a));
        rule.weights.push_back(len * g.weights[static_cast<std::size_t>(i)]);
    }
    return rule;
}

Eigen::MatrixXd mass_matrix(const ScaledMonomialBasis& basis, const QuadratureRule& rule)
{
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(basis.dim(), basis.dim());
    for (std::size_t q = 0; q < rule.size(); ++q) {
        const Eigen::VectorXd v = basis.eval(rule.points[q]);
        m.noalias() += rule.weights[q] * v * v.transpose();
    }
    return m;
}

Eigen::MatrixXd gram_schmidt(const Eigen::MatrixXd& gram)
{
    const Eigen::Index n = gram.rows();
    Eigen::MatrixXd q = Eigen::MatrixXd::Zero(n, n);
    auto inner = [&](const Eigen::VectorXd& u, const Eigen::VectorXd& v) { return u.dot(gram * v); };
    for (Eigen::Index i = 0; i < n; ++i) {
        Eigen::VectorXd v = Eigen::VectorXd::Unit(n, i);
        // Two sweeps of modified Gram-Schmidt keep orthogonality at round-off.
        for (int sweep = 0; sweep < 2; ++sweep) {
            for (Eigen::Index j = 0; j < i; ++j) {
                const Eigen::VectorXd qj = q.row(j).transpose();
                v -= inner(v, qj) * qj;
            }
        }
        const double norm2 = inner(v, v);
        if (!(norm2 > 1e-13 * std::abs(gram(i, i)))) {
            throw DegenerateElementError("Gram matrix is numerically singular");
        }
        q.row(i) = v.transpose() / std::sqrt(norm2);
    }
    return q;
}

OrthonormalBasis gram_schmidt(const ElementGeometry& element, int degree)
{
    ScaledMonomialBasis basis(element.centroid, element.diameter, degree);
    const QuadratureRule rule = polygon_quadrature(element, 2 * degree);
    return {basis, gram_schmidt(mass_matrix(basis, rule))};
}

}  // namespace vem
