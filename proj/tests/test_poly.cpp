#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "oracles.hpp"
#include "vem/mesh.hpp"
#include "vem/poly.hpp"

#include <cmath>
#include <random>

using namespace vem;

namespace {

ElementGeometry unit_square() { return make_geometry({{0, 0}, {1, 0}, {1, 1}, {0, 1}}); }

ElementGeometry hexagon()
{
    std::vector<Point2> pts;
    for (int i = 0; i < 6; ++i) {
        const double t = M_PI / 3.0 * i + 0.1;
        pts.emplace_back(0.3 + 0.2 * std::cos(t), -0.1 + 0.17 * std::sin(t));
    }
    return make_geometry(pts);
}

// int_P x^a y^b through the divergence theorem and a Gauss rule per edge.
double boundary_moment(const std::vector<Point2>& loop, int a, int b)
{
    const oracle::Rule1D g = oracle::golub_welsch(a + b + 3);
    double s = 0.0;
    for (std::size_t i = 0; i < loop.size(); ++i) {
        const Point2& p = loop[i];
        const Point2& q = loop[(i + 1) % loop.size()];
        const Point2 d = q - p;
        for (std::size_t j = 0; j < g.x.size(); ++j) {
            const Point2 x = p + g.x[j] * d;
            // n_x ds = dy along a counter-clockwise loop.
            s += g.w[j] * std::pow(x.x(), a + 1) / (a + 1) * std::pow(x.y(), b) * d.y();
        }
    }
    return s;
}

}  // namespace

TEST_CASE("monomial index order")
{
    const auto idx = multi_indices(2);
    REQUIRE(idx.size() == 6);
    CHECK(idx[1] == MultiIndex{1, 0});
    CHECK(idx[2] == MultiIndex{0, 1});
    CHECK(idx[4] == MultiIndex{1, 1});
    for (int i = 0; i < poly_dim(4); ++i) CHECK(index_of(multi_indices(4)[static_cast<std::size_t>(i)]) == i);
    CHECK(poly_dim(-1) == 0);
    CHECK(poly_dim(3) == 10);
}

TEST_CASE("scaled monomial values and gradients")
{
    const Point2 c(0.3, -0.2);
    const double h = 0.7;
    const ScaledMonomialBasis basis(c, h, 2);

    const Eigen::VectorXd v0 = basis.eval(Point2(5, 6));
    CHECK(v0(0) == 1.0);
    CHECK(basis.eval_grads(Point2(5, 6)).row(0).norm() == 0.0);

    CHECK(basis.eval(c)(1) == 0.0);
    CHECK(basis.eval_grads(c)(1, 0) == doctest::Approx(1.0 / h));
    CHECK(basis.eval_grads(c)(1, 1) == 0.0);

    const Point2 p = c + Point2(0, h);
    CHECK(basis.eval(p)(5) == doctest::Approx(1.0));
    CHECK(basis.eval_grads(p)(5, 1) == doctest::Approx(2.0 / h));
    CHECK(basis.eval_grads(p)(5, 0) == 0.0);
}

TEST_CASE("scaled monomials are invariant under translation and dilation")
{
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    const Point2 c(u(rng), u(rng));
    const double h = 0.4;
    const ScaledMonomialBasis b0(c, h, 4);
    const Point2 shift(0.5, -0.25);
    const double s = 0.125;
    const ScaledMonomialBasis b1(s * c + shift, s * h, 4);
    for (int i = 0; i < 20; ++i) {
        const Point2 p = c + h * Point2(u(rng), u(rng));
        CHECK((b0.eval(p) - b1.eval(s * p + shift)).cwiseAbs().maxCoeff() <= 1e-13);
    }
}

TEST_CASE("polygon quadrature on the unit square")
{
    const QuadratureRule r = polygon_quadrature(unit_square(), 4);
    CHECK(r.integrate([](const Point2&) { return 1.0; }) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(r.integrate([](const Point2& p) { return p.x(); }) == doctest::Approx(0.5).epsilon(1e-14));
    // Closed form: (int_0^1 x^2 dx)^2 = 1/9.
    const double closed = (1.0 / 3.0) * (1.0 / 3.0);
    CHECK(std::abs(r.integrate([](const Point2& p) { return p.x() * p.x() * p.y() * p.y(); }) - closed) <= 1e-14);
}

TEST_CASE("polygon quadrature rejects an empty kernel")
{
    ElementGeometry g;
    // A comb whose teeth hide each other: no point sees the whole polygon.
    g.vertices = {{0, 0}, {5, 0}, {5, 1}, {4, 1}, {4, 0.2}, {3, 0.2}, {3, 1}, {2, 1}, {2, 0.2}, {1, 0.2}, {1, 1}, {0, 1}};
    g.edge_signs.assign(g.vertices.size(), 1);
    g.area = signed_area(g.vertices);
    g.centroid = polygon_centroid(g.vertices);
    g.diameter = polygon_diameter(g.vertices);
    g.kernel_radius = 0.0;
    CHECK_THROWS_AS(polygon_quadrature(g, 2), DegenerateElementError);
    CHECK_THROWS_AS(make_geometry(g.vertices), MeshError);
}

TEST_CASE("polygon quadrature matches divergence-theorem moments on every family")
{
    for (char tag : std::string("abcdef")) {
        const PolygonalMesh m = generate_family(parse_family(std::string(1, tag)), 2);
        for (int el = 0; el < static_cast<int>(m.num_elements()); el += 3) {
            const ElementGeometry g = element_geometry(m, el);
            for (int deg : {2, 5, 8}) {
                const QuadratureRule r = polygon_quadrature(g, deg);
                CHECK(r.exactness_degree >= deg);
                for (const MultiIndex& a : multi_indices(deg)) {
                    const double q = r.integrate([&](const Point2& p) {
                        return std::pow(p.x(), a.a1) * std::pow(p.y(), a.a2);
                    });
                    CAPTURE(tag);
                    CHECK(std::abs(q - boundary_moment(g.vertices, a.a1, a.a2)) <= 1e-11);
                }
            }
        }
    }
}

TEST_CASE("edge quadrature")
{
    const QuadratureRule e = edge_quadrature(Point2(0, 0), Point2(3, 4), 0);
    CHECK(e.integrate([](const Point2&) { return 1.0; }) == doctest::Approx(5.0));
    const QuadratureRule s = edge_quadrature(Point2(0, 0), Point2(1, 0), 4);
    CHECK(s.integrate([](const Point2& p) { return p.x(); }) == doctest::Approx(0.5).epsilon(1e-15));
    // Antiderivative s^5 / 5 at 1.
    CHECK(std::abs(s.integrate([](const Point2& p) { return std::pow(p.x(), 4); }) - 0.2) <= 1e-15);
    const GaussRule1D g = gauss_legendre(5);
    double sum = 0.0;
    for (double w : g.weights) sum += w;
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("unit-square degree-1 Gram matrix agrees with a tensor-Gauss oracle")
{
    const ElementGeometry g = unit_square();
    const ScaledMonomialBasis basis(g.centroid, g.diameter, 1);
    const Eigen::MatrixXd m = mass_matrix(basis, polygon_quadrature(g, 2));

    const auto idx = oracle::graded(1);
    Eigen::Matrix3d ref;
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
            ref(i, j) = oracle::integrate_rect(0, 1, 0, 1, 4, [&](const oracle::Vec2& p) {
                return oracle::scaled_monomial(idx[static_cast<std::size_t>(i)], g.centroid, g.diameter, p) *
                       oracle::scaled_monomial(idx[static_cast<std::size_t>(j)], g.centroid, g.diameter, p);
            });
        }
    }
    CHECK((m - ref).cwiseAbs().maxCoeff() <= 1e-14);
    CHECK(ref(1, 1) == doctest::Approx(1.0 / 24.0));

    // L is the inverse of the Cholesky factor of the Gram matrix.
    const OrthonormalBasis on = gram_schmidt(g, 1);
    const Eigen::Matrix3d chol = Eigen::LLT<Eigen::Matrix3d>(ref).matrixL();
    CHECK((on.coeffs - Eigen::Matrix3d(chol.inverse())).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("orthonormal basis on a hexagon")
{
    const ElementGeometry g = hexagon();
    const OrthonormalBasis on = gram_schmidt(g, 3);
    const QuadratureRule r = polygon_quadrature(g, 6);
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(on.dim(), on.dim());
    for (std::size_t q = 0; q < r.size(); ++q) {
        const Eigen::VectorXd v = on.eval(r.points[q]);
        m += r.weights[q] * v * v.transpose();
    }
    CHECK((m - Eigen::MatrixXd::Identity(on.dim(), on.dim())).cwiseAbs().maxCoeff() <= 1e-10);
    CHECK(on.eval(g.centroid + Point2(0.01, 0.02))(0) == doctest::Approx(1.0 / std::sqrt(g.area)));

    // Orthonormalizing an orthonormal basis is the identity.
    const Eigen::MatrixXd again = gram_schmidt(m);
    CHECK((again - Eigen::MatrixXd::Identity(on.dim(), on.dim())).cwiseAbs().maxCoeff() <= 1e-10);
}

TEST_CASE("singular Gram matrix is rejected")
{
    Eigen::Matrix2d g;
    g << 1, 1, 1, 1;
    CHECK_THROWS_AS(gram_schmidt(Eigen::MatrixXd(g)), DegenerateElementError);
}
