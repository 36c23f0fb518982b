#include "vem/analysis.hpp"

#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <utility>

namespace vem {

ExactSolution manufactured()
{
    using std::cos;
    using std::sin;
    constexpr double tau = 2.0 * std::numbers::pi;
    const double shift = (std::numbers::e - 1.0) * (std::numbers::e - 1.0);
    ExactSolution s;
    s.u = [](const Point2& x) {
        return Eigen::Vector2d(cos(tau * x.x()) * sin(tau * x.y()), -sin(tau * x.x()) * cos(tau * x.y()));
    };
    s.grad_u = [](const Point2& x) {
        const double sx = sin(tau * x.x());
        const double cx = cos(tau * x.x());
        const double sy = sin(tau * x.y());
        const double cy = cos(tau * x.y());
        Eigen::Matrix2d g;
        g << -tau * sx * sy, tau * cx * cy, -tau * cx * cy, tau * sx * sy;
        return g;
    };
    s.p = [shift](const Point2& x) { return std::exp(x.x() + x.y()) - shift; };
    s.f = [](const Point2& x) {
        const double e = std::exp(x.x() + x.y());
        const double c = 2.0 * tau * tau;
        return Eigen::Vector2d(c * cos(tau * x.x()) * sin(tau * x.y()) + e,
                               -c * sin(tau * x.x()) * cos(tau * x.y()) + e);
    };
    return s;
}

namespace {

// Bivariate polynomial as a map (a, b) -> coefficient of x^a y^b.
struct Poly2 {
    std::map<std::pair<int, int>, double> c;

    double operator()(const Point2& p) const
    {
        double v = 0.0;
        for (const auto& [ab, coef] : c) v += coef * std::pow(p.x(), ab.first) * std::pow(p.y(), ab.second);
        return v;
    }
    Poly2 dx() const
    {
        Poly2 d;
        for (const auto& [ab, coef] : c) {
            if (ab.first > 0) d.c[{ab.first - 1, ab.second}] += coef * ab.first;
        }
        return d;
    }
    Poly2 dy() const
    {
        Poly2 d;
        for (const auto& [ab, coef] : c) {
            if (ab.second > 0) d.c[{ab.first, ab.second - 1}] += coef * ab.second;
        }
        return d;
    }
    Poly2 operator+(const Poly2& o) const
    {
        Poly2 r = *this;
        for (const auto& [ab, coef] : o.c) r.c[ab] += coef;
        return r;
    }
    Poly2 scaled(double s) const
    {
        Poly2 r = *this;
        for (auto& [ab, coef] : r.c) coef *= s;
        return r;
    }
};

}  // namespace

ExactSolution polynomial_solution(int k, int k_pressure)
{
    Poly2 psi;
    for (int d = 2; d <= k + 1; ++d) {
        for (int b = 0; b <= d; ++b) {
            psi.c[{d - b, b}] = (1.0 + d - b + 2.0 * b) / (3.0 + d) * (b % 2 == 0 ? 1.0 : -0.5);
        }
    }
    // A linear part keeps the velocity non-trivial for k = 1.
    psi.c[{1, 0}] = 0.4;
    psi.c[{0, 1}] = -0.7;
    const Poly2 ux = psi.dy();
    const Poly2 uy = psi.dx().scaled(-1.0);

    Poly2 p;
    double mean = 0.0;
    for (int d = 1; d <= k_pressure; ++d) {
        for (int b = 0; b <= d; ++b) {
            const double coef = (b % 2 == 0 ? 0.8 : -0.3) * (1.0 + b) / d;
            p.c[{d - b, b}] = coef;
            mean += coef / ((d - b + 1.0) * (b + 1.0));
        }
    }
    if (!p.c.empty()) p.c[{0, 0}] -= mean;

    const Poly2 fx = (ux.dx().dx() + ux.dy().dy()).scaled(-1.0) + p.dx();
    const Poly2 fy = (uy.dx().dx() + uy.dy().dy()).scaled(-1.0) + p.dy();
    const Poly2 uxx = ux.dx(), uxy = ux.dy(), uyx = uy.dx(), uyy = uy.dy();

    ExactSolution s;
    s.u = [ux, uy](const Point2& x) { return Eigen::Vector2d(ux(x), uy(x)); };
    s.grad_u = [uxx, uxy, uyx, uyy](const Point2& x) {
        Eigen::Matrix2d g;
        g << uxx(x), uxy(x), uyx(x), uyy(x);
        return g;
    };
    s.p = [p](const Point2& x) { return p(x); };
    s.f = [fx, fy](const Point2& x) { return Eigen::Vector2d(fx(x), fy(x)); };
    return s;
}

namespace {

int error_degree(const VemSpace& space, int quad_degree)
{
    return quad_degree > 0 ? quad_degree : 2 * space.config().k + 4;
}

}  // namespace

ErrorReport compute_errors(const VemSpace& space, const StokesSolution& solution, const ExactSolution& exact,
                           int quad_degree)
{
    const auto& cfg = space.config();
    const int k = cfg.k;
    const int deg = error_degree(space, quad_degree);
    ErrorReport rep;
    rep.elliptic_substitute = cfg.variant == SpaceVariant::Regular;

    double e_h1 = 0.0, n_h1 = 0.0, e_l2 = 0.0, n_l2 = 0.0, e_p = 0.0, n_p = 0.0;
    for (int e = 0; e < space.num_elements(); ++e) {
        const LocalVem& lv = space.local(e);
        const int nd = lv.num_dofs();
        const Eigen::VectorXd u = space.gather(e, solution.velocity);
        const Eigen::MatrixXd proj =
            rep.elliptic_substitute ? lv.elliptic_star() : lv.l2_projector(SpaceVariant::Enhanced, k);
        const Eigen::VectorXd cx = proj * u.head(nd);
        const Eigen::VectorXd cy = proj * u.tail(nd);
        const Eigen::VectorXd cp = space.pressure_monomials(e, solution.pressure);
        const ScaledMonomialBasis mk = lv.basis(k);
        const ScaledMonomialBasis mp = lv.basis(cfg.k_pressure);
        const QuadratureRule rule = polygon_quadrature(lv.geometry(), deg);
        for (std::size_t q = 0; q < rule.size(); ++q) {
            const Point2& x = rule.points[q];
            const double w = rule.weights[q];
            const Eigen::Vector2d ue = exact.u(x);
            const Eigen::Matrix2d ge = exact.grad_u(x);
            const Eigen::Vector2d uh(mk.eval_poly(cx, x), mk.eval_poly(cy, x));
            Eigen::Matrix2d gh;
            gh.row(0) = mk.eval_poly_grad(cx, x).transpose();
            gh.row(1) = mk.eval_poly_grad(cy, x).transpose();
            const double pe = exact.p(x);
            const double ph = mp.eval_poly(cp, x);
            e_h1 += w * (ge - gh).squaredNorm();
            n_h1 += w * ge.squaredNorm();
            e_l2 += w * (ue - uh).squaredNorm();
            n_l2 += w * ue.squaredNorm();
            e_p += w * (pe - ph) * (pe - ph);
            n_p += w * pe * pe;
        }
    }
    auto ratio = [](double err, double norm) { return norm > 0.0 ? std::sqrt(err / norm) : std::sqrt(err); };
    rep.h1_velocity_rel = ratio(e_h1, n_h1);
    rep.l2_velocity_rel = ratio(e_l2, n_l2);
    rep.pressure_absolute = !(n_p > 1e-28);
    rep.l2_pressure_rel = rep.pressure_absolute ? std::sqrt(e_p) : std::sqrt(e_p / n_p);
    rep.div_l2 = divergence_norm(space, solution.velocity);
    return rep;
}

double divergence_norm(const VemSpace& space, const Eigen::VectorXd& velocity)
{
    const int kp = space.config().k_pressure;
    double sum = 0.0;
    for (int e = 0; e < space.num_elements(); ++e) {
        const LocalVem& lv = space.local(e);
        const Eigen::VectorXd c = lv.divergence(kp, PressureBasis::Monomial) * space.gather(e, velocity);
        sum += c.dot(lv.mass(kp).ldlt().solve(c));
    }
    return std::sqrt(std::max(0.0, sum));
}

Eigen::VectorXd interpolate_velocity(const VemSpace& space, const VectorField& u, int quad_degree)
{
    const int deg = error_degree(space, quad_degree);
    const auto& dofs = space.dofs();
    Eigen::VectorXd out = Eigen::VectorXd::Zero(dofs.n_velocity());
    for (int e = 0; e < space.num_elements(); ++e) {
        const LocalVem& lv = space.local(e);
        const Eigen::VectorXd vx = lv.interpolate([&](const Point2& x) { return u(x).x(); }, deg);
        const Eigen::VectorXd vy = lv.interpolate([&](const Point2& x) { return u(x).y(); }, deg);
        const auto& ids = dofs.element_dofs[static_cast<std::size_t>(e)];
        for (std::size_t i = 0; i < ids.size(); ++i) {
            out(ids[i]) = vx(static_cast<Eigen::Index>(i));
            out(dofs.n_scalar + ids[i]) = vy(static_cast<Eigen::Index>(i));
        }
    }
    return out;
}

Eigen::VectorXd project_pressure(const VemSpace& space, const ScalarField& p, int quad_degree)
{
    const int deg = error_degree(space, quad_degree);
    const auto& cfg = space.config();
    const auto& dofs = space.dofs();
    Eigen::VectorXd out = Eigen::VectorXd::Zero(dofs.n_pressure());
    for (int e = 0; e < space.num_elements(); ++e) {
        const LocalVem& lv = space.local(e);
        const ScaledMonomialBasis mp = lv.basis(cfg.k_pressure);
        const QuadratureRule rule = polygon_quadrature(lv.geometry(), deg);
        Eigen::VectorXd b = Eigen::VectorXd::Zero(mp.dim());
        for (std::size_t q = 0; q < rule.size(); ++q) b += rule.weights[q] * p(rule.points[q]) * mp.eval(rule.points[q]);
        const Eigen::MatrixXd t = lv.pressure_transform(cfg.k_pressure, cfg.pressure_basis);
        const Eigen::MatrixXd m = t * lv.mass(cfg.k_pressure) * t.transpose();
        out.segment(dofs.pressure_dof(e, 0), mp.dim()) = m.ldlt().solve(t * b);
    }
    return out;
}

double pressure_l2_norm(const VemSpace& space, const Eigen::VectorXd& pressure)
{
    double sum = 0.0;
    for (int e = 0; e < space.num_elements(); ++e) {
        const Eigen::VectorXd c = space.pressure_monomials(e, pressure);
        sum += c.dot(space.local(e).mass(space.config().k_pressure) * c);
    }
    return std::sqrt(std::max(0.0, sum));
}

OrthogonalityReport orthogonality_check(const VemSpace& space, const SaddleSystem& system,
                                        const StokesSolution& solution, const ExactSolution& exact)
{
    const Eigen::VectorXd u_i = interpolate_velocity(space, exact.u);
    const Eigen::VectorXd p_i = project_pressure(space, exact.p);
    OrthogonalityReport rep;
    rep.absolute = std::abs((solution.pressure - p_i).dot(system.B * (solution.velocity - u_i)));
    const double energy = std::sqrt(std::max(0.0, solution.velocity.dot(system.A * solution.velocity)));
    const double scale = energy * pressure_l2_norm(space, solution.pressure);
    rep.relative = scale > 0.0 ? rep.absolute / scale : rep.absolute;
    return rep;
}

double convergence_rate(double e0, double e1, double h0, double h1)
{
    if (!(e0 > 0.0) || !(e1 > 0.0) || !(h0 > 0.0) || !(h1 > 0.0) || h0 == h1) {
        return std::numeric_limits<double>::quiet_NaN();
    }
    return std::log(e0 / e1) / std::log(h0 / h1);
}

std::vector<RateRow> rates(const std::vector<ConvergenceRow>& table)
{
    std::vector<RateRow> out;
    for (std::size_t i = 0; i + 1 < table.size(); ++i) {
        const auto& a = table[i];
        const auto& b = table[i + 1];
        out.push_back({convergence_rate(a.errors.h1_velocity_rel, b.errors.h1_velocity_rel, a.h, b.h),
                       convergence_rate(a.errors.l2_velocity_rel, b.errors.l2_velocity_rel, a.h, b.h),
                       convergence_rate(a.errors.l2_pressure_rel, b.errors.l2_pressure_rel, a.h, b.h)});
    }
    return out;
}

}  // namespace vem
