#include "oracle_suite.hpp"

#include "oracles.hpp"
#include "vem/analysis.hpp"
#include "vem/assembly.hpp"
#include "vem/mesh.hpp"
#include "vem/poly.hpp"
#include "vem/solve.hpp"
#include "vem/vem_local.hpp"

#include <Eigen/Dense>

#include <cmath>

using namespace vem;
using oracle::Vec2;

namespace {

const std::vector<Point2> kSquare = {{0, 0}, {1, 0}, {1, 1}, {0, 1}};
const std::vector<Point2> kLHexagon = {{0, 0}, {1, 0}, {1, 0.5}, {0.5, 0.5}, {0.5, 1}, {0, 1}};

std::vector<Point2> pentagon()
{
    return {{0.1, 0.0}, {0.9, 0.1}, {1.0, 0.7}, {0.5, 1.1}, {-0.1, 0.6}};
}

std::vector<Point2> small_hexagon()
{
    std::vector<Point2> pts;
    for (int i = 0; i < 6; ++i) {
        const double t = M_PI / 3.0 * i + 0.2;
        pts.emplace_back(0.37 + 0.06 * std::cos(t), 0.61 + 0.05 * std::sin(t));
    }
    return pts;
}

double max_abs(const Eigen::MatrixXd& m) { return m.cwiseAbs().maxCoeff(); }

// Boundary integral of phi * n over a polygon where phi is the piecewise
// linear hat of vertex i (the k = 1 trace), by Gauss quadrature per edge.
Vec2 hat_flux(const std::vector<Point2>& loop, int i)
{
    const oracle::Rule1D g = oracle::golub_welsch(3);
    const int n = static_cast<int>(loop.size());
    Vec2 s = Vec2::Zero();
    for (int e = 0; e < n; ++e) {
        const Point2& a = loop[static_cast<std::size_t>(e)];
        const Point2& b = loop[static_cast<std::size_t>((e + 1) % n)];
        const Vec2 d = b - a;
        const Vec2 normal(d.y() / d.norm(), -d.x() / d.norm());
        for (std::size_t q = 0; q < g.x.size(); ++q) {
            const double t = g.x[q];
            const double phi = (e == i ? 1.0 - t : 0.0) + ((e + 1) % n == i ? t : 0.0);
            s += g.w[q] * d.norm() * phi * normal;
        }
    }
    return s;
}

// Dense k = 1 stiffness on a convex polygon, written from the hat fluxes:
// each gradient projection is constant, the elliptic projection is fixed by
// the boundary average, and the stabilization is (I - Pi)^T (I - Pi).
Eigen::MatrixXd k1_stiffness(const std::vector<Point2>& loop)
{
    const int n = static_cast<int>(loop.size());
    const double area = oracle::area_by_triangles({loop.begin(), loop.end()});
    Eigen::MatrixXd grads(n, 2);
    for (int i = 0; i < n; ++i) grads.row(i) = hat_flux(loop, i).transpose() / area;

    // Boundary centroid and per-hat boundary averages.
    double perimeter = 0.0;
    Vec2 bc = Vec2::Zero();
    Eigen::VectorXd avg = Eigen::VectorXd::Zero(n);
    for (int e = 0; e < n; ++e) {
        const Point2& a = loop[static_cast<std::size_t>(e)];
        const Point2& b = loop[static_cast<std::size_t>((e + 1) % n)];
        const double len = (b - a).norm();
        perimeter += len;
        bc += len * 0.5 * (a + b);
        avg(e) += 0.5 * len;
        avg((e + 1) % n) += 0.5 * len;
    }
    bc /= perimeter;
    avg /= perimeter;

    Eigen::MatrixXd pi(n, n);
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) pi(i, j) = avg(j) + grads.row(j).dot(loop[static_cast<std::size_t>(i)] - bc);
    }
    const Eigen::MatrixXd r = Eigen::MatrixXd::Identity(n, n) - pi;
    return area * grads * grads.transpose() + r.transpose() * r;
}

OracleCheck centroid_check()
{
    const PolygonalMesh m = build_mesh(kLHexagon, {{0, 1, 2, 3, 4, 5}});
    const Vec2 c = oracle::centroid_by_triangles({kLHexagon.begin(), kLHexagon.end()});
    const double a = oracle::area_by_triangles({kLHexagon.begin(), kLHexagon.end()});
    return {"L-hexagon area and centroid vs triangle-sum moments",
            std::max((m.elements[0].centroid - c).cwiseAbs().maxCoeff(), std::abs(m.elements[0].area - a)), 1e-14};
}

OracleCheck kernel_check()
{
    const oracle::RasterKernel r = oracle::raster_kernel({kLHexagon.begin(), kLHexagon.end()}, 1e-3);
    const std::vector<Point2> k = polygon_kernel(kLHexagon);
    double xmin = 1e9, xmax = -1e9, ymin = 1e9, ymax = -1e9;
    for (const Point2& p : k) {
        xmin = std::min(xmin, p.x());
        xmax = std::max(xmax, p.x());
        ymin = std::min(ymin, p.y());
        ymax = std::max(ymax, p.y());
    }
    const double d = std::max({std::abs(xmin - r.xmin), std::abs(xmax - r.xmax), std::abs(ymin - r.ymin),
                               std::abs(ymax - r.ymax)});
    return {"L-hexagon kernel bounds vs raster at 1e-3", d, 1e-3};
}

OracleCheck area_moment_check()
{
    const ElementGeometry sq = make_geometry(kSquare);
    const double v = polygon_quadrature(sq, 4).integrate([](const Point2& p) { return p.x() * p.x() * p.y() * p.y(); });
    return {"int x^2 y^2 over the unit square vs 1/9", std::abs(v - 1.0 / 9.0), 1e-14};
}

OracleCheck edge_power_check()
{
    const double s = edge_quadrature(Point2(0, 0), Point2(1, 0), 4).integrate([](const Point2& p) {
        return std::pow(p.x(), 4);
    });
    return {"int s^4 on [0,1] vs 1/5", std::abs(s - 0.2), 1e-15};
}

OracleCheck gram_check()
{
    const ElementGeometry g = make_geometry(kSquare);
    const auto idx = oracle::graded(1);
    Eigen::Matrix3d ref;
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
            ref(i, j) = oracle::integrate_rect(0, 1, 0, 1, 3, [&](const Vec2& p) {
                return oracle::scaled_monomial(idx[static_cast<std::size_t>(i)], g.centroid, g.diameter, p) *
                       oracle::scaled_monomial(idx[static_cast<std::size_t>(j)], g.centroid, g.diameter, p);
            });
        }
    }
    const Eigen::MatrixXd m = mass_matrix(ScaledMonomialBasis(g.centroid, g.diameter, 1), polygon_quadrature(g, 2));
    const Eigen::Matrix3d l = Eigen::LLT<Eigen::Matrix3d>(ref).matrixL();
    const OrthonormalBasis on = gram_schmidt(g, 1);
    return {"unit-square degree-1 Gram matrix and Cholesky-consistent coefficients",
            std::max(max_abs(m - ref), max_abs(on.coeffs - Eigen::Matrix3d(l.inverse()))), 1e-12};
}

OracleCheck hat_projection_check()
{
    // 3x3 system in physical coordinates: rows are the boundary-average
    // closure and the gradient equations for x and y.
    const double perimeter = 4.0;
    Eigen::Matrix3d a;
    Eigen::Vector3d rhs;
    // q = 1, x, y with boundary averages 1, 1/2, 1/2.
    a.row(0) << 1.0, 0.5, 0.5;
    a.row(1) << 0.0, 1.0, 0.0;  // int grad(q) . grad(x) for q = a0 + a1 x + a2 y
    a.row(2) << 0.0, 0.0, 1.0;
    const Vec2 flux = hat_flux(kSquare, 0);
    // Boundary average of the hat: each adjacent edge contributes 1/2.
    rhs << 1.0 / perimeter, flux.x(), flux.y();
    const Eigen::Vector3d phys = a.fullPivLu().solve(rhs);

    const ElementGeometry g = make_geometry(kSquare);
    const LocalVem vem(g, 1);
    const Eigen::VectorXd lib = vem.elliptic_star().col(0);
    // Scaled basis: m1 = (x - 1/2) / h, so the physical slope times h.
    Eigen::Vector3d expect;
    expect << phys(0) + 0.5 * phys(1) + 0.5 * phys(2), phys(1) * g.diameter, phys(2) * g.diameter;
    return {"k=1 square hat elliptic projection vs 3x3 Gram oracle", max_abs(lib - expect), 1e-13};
}

OracleCheck moment_system_check()
{
    // k = 2 on the unit square, enhanced L2 projection of the basis function
    // whose only non-zero DOF is the bottom-edge moment: trace 6t(1-t).
    const auto idx = oracle::graded(2);
    auto mono = [&](int i, const Vec2& p) {
        return std::pow(p.x(), idx[static_cast<std::size_t>(i)].first) * std::pow(p.y(), idx[static_cast<std::size_t>(i)].second);
    };
    auto mono_grad = [&](int i, const Vec2& p) {
        const auto [a, b] = idx[static_cast<std::size_t>(i)];
        return Vec2(a ? a * std::pow(p.x(), a - 1) * std::pow(p.y(), b) : 0.0,
                    b ? b * std::pow(p.x(), a) * std::pow(p.y(), b - 1) : 0.0);
    };
    const oracle::Rule1D g1 = oracle::golub_welsch(6);
    auto square_int = [](const std::function<double(const Vec2&)>& f) { return oracle::integrate_rect(0, 1, 0, 1, 6, f); };

    // Elliptic projection: closure by the boundary average, gradient rows by
    // integration by parts. The cell moment of phi is zero, so the
    // Laplacian term drops out.
    Eigen::MatrixXd g(6, 6);
    Eigen::VectorXd b(6);
    for (int j = 0; j < 6; ++j) {
        double avg = 0.0;
        for (int e = 0; e < 4; ++e) {
            const Vec2 a = kSquare[static_cast<std::size_t>(e)];
            const Vec2 c = kSquare[static_cast<std::size_t>((e + 1) % 4)];
            for (std::size_t q = 0; q < g1.x.size(); ++q) avg += g1.w[q] * mono(j, a + g1.x[q] * (c - a));
        }
        g(0, j) = avg / 4.0;
    }
    b(0) = 1.0 / 4.0;  // int_dP phi = |E| * 1
    for (int i = 1; i < 6; ++i) {
        for (int j = 0; j < 6; ++j) g(i, j) = square_int([&](const Vec2& p) { return mono_grad(i, p).dot(mono_grad(j, p)); });
        double bnd = 0.0;
        for (std::size_t q = 0; q < g1.x.size(); ++q) {
            const double t = g1.x[q];
            bnd += g1.w[q] * 6.0 * t * (1.0 - t) * mono_grad(i, Vec2(t, 0.0)).dot(Vec2(0.0, -1.0));
        }
        b(i) = bnd;
    }
    const Eigen::VectorXd pn = g.fullPivLu().solve(b);

    // Moment system for the L2 projection: degree 0 from the cell DOF (zero),
    // degrees 1 and 2 from the elliptic projection.
    Eigen::MatrixXd m(6, 6);
    Eigen::VectorXd rhs(6);
    for (int i = 0; i < 6; ++i) {
        for (int j = 0; j < 6; ++j) m(i, j) = square_int([&](const Vec2& p) { return mono(i, p) * mono(j, p); });
    }
    rhs = m * pn;
    rhs(0) = 0.0;
    const Eigen::VectorXd p0 = m.fullPivLu().solve(rhs);

    const ElementGeometry geom = make_geometry(kSquare);
    const LocalVem vem(geom, 2);
    const Eigen::VectorXd lib = vem.l2_projector(SpaceVariant::Enhanced, 2).col(vem.layout().edge_dof(0, 0));
    const ScaledMonomialBasis sb = vem.basis(2);
    double d = 0.0;
    for (double x : {0.1, 0.45, 0.8}) {
        for (double y : {0.05, 0.5, 0.95}) {
            double ref = 0.0;
            for (int i = 0; i < 6; ++i) ref += p0(i) * mono(i, Vec2(x, y));
            d = std::max(d, std::abs(sb.eval_poly(lib, Point2(x, y)) - ref));
        }
    }
    return {"k=2 square enhanced L2 projection of an edge-moment basis function vs moment system", d, 1e-12};
}

OracleCheck k1_stiffness_check()
{
    const LocalVem vem(make_geometry(kSquare), 1);
    const Eigen::MatrixXd lib =
        vem.consistency_scalar() +
        vem.stabilization_scalar(SpaceVariant::Enhanced, StabilizationProjector::Elliptic, StabilizationScaling::Unit);
    return {"k=1 unit-square 4x4 stiffness vs dense projector oracle", max_abs(lib - k1_stiffness(kSquare)), 1e-13};
}

OracleCheck pentagon_hat_check()
{
    const std::vector<Point2> loop = pentagon();
    const ElementGeometry g = make_geometry(loop);
    const LocalVem vem(g, 1);
    double d = 0.0;
    for (int i = 0; i < 5; ++i) {
        const Vec2 flux = hat_flux(loop, i);
        d = std::max(d, std::abs(g.area * vem.gradient_x()(0, i) - flux.x()));
        d = std::max(d, std::abs(g.area * vem.gradient_y()(0, i) - flux.y()));
    }
    return {"pentagon k=1 gradient projection of hats vs boundary integral", d, 1e-14};
}

OracleCheck pentagon_divergence_check()
{
    // k = 2, pressure P_1: the edge-moment basis function of edge e has trace
    // 6t(1-t) on e, vanishes on the other edges and has zero cell moment, so
    // int q div(phi e_c) = int_e q phi n_c.
    const std::vector<Point2> loop = pentagon();
    const ElementGeometry g = make_geometry(loop);
    const LocalVem vem(g, 2);
    const Eigen::MatrixXd b = vem.divergence(1);
    const int n = vem.num_dofs();
    const oracle::Rule1D r = oracle::golub_welsch(4);
    double d = 0.0;
    for (int e = 0; e < 5; ++e) {
        const Vec2 a = loop[static_cast<std::size_t>(e)];
        const Vec2 c = loop[static_cast<std::size_t>((e + 1) % 5)];
        const Vec2 t = c - a;
        const Vec2 normal(t.y() / t.norm(), -t.x() / t.norm());
        for (int alpha = 0; alpha < 3; ++alpha) {
            const auto ab = oracle::graded(1)[static_cast<std::size_t>(alpha)];
            double s = 0.0;
            for (std::size_t q = 0; q < r.x.size(); ++q) {
                const double u = r.x[q];
                s += r.w[q] * t.norm() * 6.0 * u * (1.0 - u) * oracle::scaled_monomial(ab, g.centroid, g.diameter, a + u * t);
            }
            const int col = vem.layout().edge_dof(e, 0);
            d = std::max(d, std::abs(b(alpha, col) - s * normal.x()));
            d = std::max(d, std::abs(b(alpha, n + col) - s * normal.y()));
        }
    }
    return {"pentagon k=2 edge-moment divergence columns vs boundary quadrature", d, 1e-13};
}

OracleCheck load_check()
{
    const std::vector<Point2> loop = small_hexagon();
    const ElementGeometry g = make_geometry(loop);
    const int k = 2;
    const LocalVem vem(g, k);
    // Degree 4, so f times a degree-k monomial sits inside both rules.
    const auto f = [](const Point2& p) {
        const double x = p.x(), y = p.y();
        return Eigen::Vector2d(x * x * x * x - 2.0 * x * y * y * y + 1.0, x * x * y * y + y);
    };
    const Eigen::VectorXd lib = vem.load(f, SpaceVariant::Enhanced, k);

    // Moments of f by a fan from vertex 0, conical rule exact to 2k + 6.
    const int pts = k + 4;
    const auto idx = oracle::graded(k);
    Eigen::VectorXd fx(idx.size()), fy(idx.size());
    for (std::size_t i = 0; i < idx.size(); ++i) {
        fx(static_cast<Eigen::Index>(i)) = oracle::integrate_convex({loop.begin(), loop.end()}, pts, [&](const Vec2& p) {
            return f(p).x() * oracle::scaled_monomial(idx[i], g.centroid, g.diameter, p);
        });
        fy(static_cast<Eigen::Index>(i)) = oracle::integrate_convex({loop.begin(), loop.end()}, pts, [&](const Vec2& p) {
            return f(p).y() * oracle::scaled_monomial(idx[i], g.centroid, g.diameter, p);
        });
    }
    const Eigen::MatrixXd p0 = vem.l2_projector(SpaceVariant::Enhanced, k);
    Eigen::VectorXd ref(lib.size());
    ref << p0.transpose() * fx, p0.transpose() * fy;
    return {"hexagon k=2 enhanced load of a quartic field vs fan quadrature (relative)", max_abs(lib - ref) / max_abs(ref), 1e-12};
}

OracleCheck edge_moment_check()
{
    DiscretizationConfig cfg;
    cfg.k = 2;
    cfg.k_pressure = 1;
    cfg.flux_correction = false;
    const PolygonalMesh mesh = generate_family(Family::f, 3);
    const VemSpace space(mesh, cfg);
    const ExactSolution ex = manufactured();
    const BoundaryData bc = interpolate_boundary(space, ex.u);
    const oracle::Rule1D r = oracle::golub_welsch(64);
    double d = 0.0;
    for (int e = 0; e < static_cast<int>(mesh.num_edges()); ++e) {
        const Edge& edge = mesh.edges[static_cast<std::size_t>(e)];
        if (!edge.on_boundary) continue;
        const Vec2 a = mesh.vertices[static_cast<std::size_t>(edge.vertices[0])];
        const Vec2 b = mesh.vertices[static_cast<std::size_t>(edge.vertices[1])];
        Vec2 mean = Vec2::Zero();
        for (std::size_t q = 0; q < r.x.size(); ++q) mean += r.w[q] * ex.u(a + r.x[q] * (b - a));
        const int dof = space.dofs().edge_dof(e, 0);
        d = std::max(d, std::abs(bc.values(dof) - mean.x()));
        d = std::max(d, std::abs(bc.values(space.dofs().n_scalar + dof) - mean.y()));
    }
    return {"k=2 boundary edge moments of the manufactured velocity vs 64-point rule", d, 1e-9};
}

OracleCheck kkt_check()
{
    ReducedSystem r;
    Eigen::MatrixXd a(2, 2);
    a << 2, 1, 1, 3;
    Eigen::MatrixXd b(1, 2);
    b << 1, 1;
    r.A = a.sparseView();
    r.B = b.sparseView();
    r.f = Eigen::Vector2d(1, 2);
    r.g = Eigen::VectorXd::Zero(1);
    r.mean_row = Eigen::VectorXd::Ones(1);
    r.interior = {0, 1};
    r.dirichlet = Eigen::VectorXd::Zero(2);
    const StokesSolution s = solve_saddle(r);

    Eigen::Matrix4d k;
    k << 2, 1, 1, 0, 1, 3, 1, 0, 1, 1, 0, 1, 0, 0, 1, 0;
    const Eigen::Vector4d x = k.fullPivLu().solve(Eigen::Vector4d(1, 2, 0, 0));
    // By hand: p = 0, u = A^{-1} f = (0.2, 0.6), lambda = -(u1 + u2).
    const Eigen::Vector4d hand(0.2, 0.6, 0.0, -0.8);
    const Eigen::Vector4d lib(s.velocity(0), s.velocity(1), s.pressure(0), s.multiplier);
    return {"4x4 saddle system vs dense solve and hand solution",
            std::max(max_abs(lib - x), max_abs(x - hand)), 1e-14};
}

OracleCheck infsup_check()
{
    // (f,1), k = 1: one interior vertex shared by four squares. Each square
    // contributes the corner diagonal of the unit-square k = 1 stiffness
    // (scale invariant), and its orthonormal constant 1/sqrt(|P|) = 2 pairs
    // with the hat flux through the two edges at the center.
    const Eigen::MatrixXd a1 = k1_stiffness(kSquare);
    const double a = 4.0 * a1(2, 2);
    Eigen::MatrixXd b(4, 2);
    const double side = 0.5;
    int row = 0;
    for (double sx : {-1.0, 1.0}) {
        for (double sy : {-1.0, 1.0}) {
            // Square on side (sx, sy) of the center: its edges through the
            // center have outward normals (-sx, 0) and (0, -sy).
            b.row(row++) << 2.0 * 0.5 * side * -sx, 2.0 * 0.5 * side * -sy;
        }
    }
    const Eigen::MatrixXd s = b * b.transpose() / a;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(s);
    const double beta_ref = std::sqrt(es.eigenvalues()(2));

    const InfSupReport rep = infsup_constant(generate_family(Family::f, 1), 1, 0);
    const double d = std::max(std::abs(rep.beta - beta_ref), std::abs(beta_ref - 1.0 / std::sqrt(3.0)));
    return {"(f,1) k=1 inf-sup constant vs dense eigen oracle", rep.kernel_dim == 2 ? d : 1.0, 1e-12};
}

OracleCheck error_integrand_check()
{
    DiscretizationConfig cfg;
    cfg.k = 2;
    cfg.k_pressure = 1;
    const PolygonalMesh mesh = build_mesh(kSquare, {{0, 1, 2, 3}});
    const VemSpace space(mesh, cfg);
    const ExactSolution ex = manufactured();
    StokesSolution sol;
    sol.velocity = interpolate_velocity(space, ex.u);
    sol.pressure = project_pressure(space, ex.p);
    const int deg = 2 * cfg.k + 8;
    const ErrorReport rep = compute_errors(space, sol, ex, deg);

    // Same projected polynomials, integrated by a 20-point tensor rule.
    const LocalVem& lv = space.local(0);
    const Eigen::MatrixXd proj = lv.l2_projector(SpaceVariant::Enhanced, cfg.k);
    const int nd = lv.num_dofs();
    const Eigen::VectorXd cx = proj * sol.velocity.head(nd);
    const Eigen::VectorXd cy = proj * sol.velocity.tail(nd);
    const Eigen::VectorXd cp = space.pressure_monomials(0, sol.pressure);
    const ScaledMonomialBasis mk = lv.basis(cfg.k);
    const ScaledMonomialBasis mp = lv.basis(cfg.k_pressure);
    auto integral = [](const std::function<double(const Vec2&)>& f) { return oracle::integrate_rect(0, 1, 0, 1, 20, f); };
    const double e_h1 = integral([&](const Vec2& x) {
        Eigen::Matrix2d gh;
        gh.row(0) = mk.eval_poly_grad(cx, x).transpose();
        gh.row(1) = mk.eval_poly_grad(cy, x).transpose();
        return (ex.grad_u(x) - gh).squaredNorm();
    });
    const double n_h1 = integral([&](const Vec2& x) { return ex.grad_u(x).squaredNorm(); });
    const double e_l2 = integral([&](const Vec2& x) {
        return (ex.u(x) - Eigen::Vector2d(mk.eval_poly(cx, x), mk.eval_poly(cy, x))).squaredNorm();
    });
    const double n_l2 = integral([&](const Vec2& x) { return ex.u(x).squaredNorm(); });
    const double e_p = integral([&](const Vec2& x) { return std::pow(ex.p(x) - mp.eval_poly(cp, x), 2); });
    const double n_p = integral([&](const Vec2& x) { return ex.p(x) * ex.p(x); });
    const double r1 = std::sqrt(e_h1 / n_h1), r2 = std::sqrt(e_l2 / n_l2), r3 = std::sqrt(e_p / n_p);
    const double d = std::max({std::abs(rep.h1_velocity_rel - r1) / r1, std::abs(rep.l2_velocity_rel - r2) / r2,
                               std::abs(rep.l2_pressure_rel - r3) / r3});
    return {"single-element error norms at degree 2k+8 vs 20-point tensor rule (relative)", d, 1e-8};
}

}  // namespace

std::vector<OracleCheck> run_oracle_suite()
{
    std::vector<OracleCheck> out;
    out.push_back(centroid_check());
    out.push_back(kernel_check());
    out.push_back(area_moment_check());
    out.push_back(edge_power_check());
    out.push_back(gram_check());
    out.push_back(hat_projection_check());
    out.push_back(moment_system_check());
    out.push_back(k1_stiffness_check());
    out.push_back(pentagon_hat_check());
    out.push_back(pentagon_divergence_check());
    out.push_back(load_check());
    out.push_back(edge_moment_check());
    out.push_back(kkt_check());
    out.push_back(infsup_check());
    out.push_back(error_integrand_check());
    return out;
}
