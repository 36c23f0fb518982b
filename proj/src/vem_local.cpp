#include "vem/vem_local.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace vem {

DofLayout dof_layout(int n_vertices, int k)
{
    if (k < 1) {
        throw std::invalid_argument("velocity order k must be >= 1");
    }
    if (n_vertices < 3) {
        throw std::invalid_argument("an element needs at least 3 vertices");
    }
    return {k, n_vertices, k - 1, poly_dim(k - 2)};
}

int boundary_points_per_edge(int k) { return k + 2; }

Eigen::MatrixXd edge_trace_operator(int k)
{
    const int n = k + 1;
    Eigen::MatrixXd d(n, n);
    for (int i = 0; i < n; ++i) {
        d(0, i) = std::pow(-0.5, i);
        d(1, i) = std::pow(0.5, i);
        for (int j = 0; j + 2 < n; ++j) {
            const int p = i + j;
            d(2 + j, i) = p % 2 == 0 ? std::pow(0.5, p) / (p + 1) : 0.0;
        }
    }
    return d.inverse();
}

namespace {

// Laplacian and first derivatives of scaled monomials stay scaled monomials.
struct Term {
    int index;
    double coeff;
};

std::vector<Term> laplacian_terms(MultiIndex a, double h)
{
    std::vector<Term> t;
    if (a.a1 >= 2) t.push_back({index_of({a.a1 - 2, a.a2}), a.a1 * (a.a1 - 1) / (h * h)});
    if (a.a2 >= 2) t.push_back({index_of({a.a1, a.a2 - 2}), a.a2 * (a.a2 - 1) / (h * h)});
    return t;
}

}  // namespace

LocalVem::LocalVem(ElementGeometry geometry, int k, int quad_degree)
    : geom_(std::move(geometry)),
      k_(k),
      layout_(dof_layout(static_cast<int>(geom_.vertices.size()), k)),
      rule_(polygon_quadrature(geom_, quad_degree > 0 ? quad_degree : 2 * k + 2))
{
    mass_ = mass_matrix(basis(k_), rule_);
    build_boundary();
    build_elliptic();
    build_gradient();
}

void LocalVem::build_boundary()
{
    const auto& v = geom_.vertices;
    const int n = static_cast<int>(v.size());
    const Eigen::MatrixXd trace_op = edge_trace_operator(k_);
    const GaussRule1D g = gauss_legendre(boundary_points_per_edge(k_));
    perimeter_ = 0.0;
    for (int i = 0; i < n; ++i) {
        const int next = (i + 1) % n;
        const Point2 d = v[next] - v[i];
        const double len = d.norm();
        perimeter_ += len;
        const Point2 normal = Point2(d.y(), -d.x()) / len;
        const bool forward = geom_.edge_signs[static_cast<std::size_t>(i)] > 0;
        const int start = forward ? i : next;
        const int end = forward ? next : i;
        std::vector<int> dofs = {layout_.vertex_dof(start), layout_.vertex_dof(end)};
        for (int j = 0; j < layout_.edge_moments; ++j) {
            dofs.push_back(layout_.edge_dof(i, j));
        }
        for (std::size_t q = 0; q < g.nodes.size(); ++q) {
            const double t = g.nodes[q];
            Eigen::VectorXd powers(k_ + 1);
            for (int p = 0; p <= k_; ++p) {
                powers(p) = std::pow(t - 0.5, p);
            }
            BoundaryPoint bp;
            bp.x = v[start] + t * (v[end] - v[start]);
            bp.weight = len * g.weights[q];
            bp.normal = normal;
            bp.edge = i;
            bp.trace = trace_op.transpose() * powers;
            bp.dofs = dofs;
            boundary_.push_back(std::move(bp));
        }
    }
}

void LocalVem::build_elliptic()
{
    const int nk = poly_dim(k_);
    const int ndof = num_dofs();
    const ScaledMonomialBasis mk = basis(k_);
    const auto indices = multi_indices(k_);

    Eigen::MatrixXd g = Eigen::MatrixXd::Zero(nk, nk);
    Eigen::MatrixXd b = Eigen::MatrixXd::Zero(nk, ndof);

    for (std::size_t q = 0; q < rule_.size(); ++q) {
        const Eigen::MatrixX2d grads = mk.eval_grads(rule_.points[q]);
        g.noalias() += rule_.weights[q] * grads * grads.transpose();
    }
    // Constant mode fixed by the boundary average.
    g.row(0).setZero();
    for (const auto& bp : boundary_) {
        const Eigen::VectorXd m = mk.eval(bp.x);
        const Eigen::MatrixX2d grads = mk.eval_grads(bp.x);
        g.row(0) += (bp.weight / perimeter_) * m.transpose();
        const Eigen::VectorXd dn = grads * bp.normal;
        for (std::size_t l = 0; l < bp.dofs.size(); ++l) {
            const double tr = bp.trace(static_cast<Eigen::Index>(l));
            b(0, bp.dofs[l]) += bp.weight / perimeter_ * tr;
            for (int a = 1; a < nk; ++a) {
                b(a, bp.dofs[l]) += bp.weight * dn(a) * tr;
            }
        }
    }
    // -int_P Delta(m_alpha) v, read from the cell moments.
    for (int a = 1; a < nk; ++a) {
        for (const Term& t : laplacian_terms(indices[static_cast<std::size_t>(a)], geom_.diameter)) {
            b(a, layout_.cell_dof(t.index)) -= geom_.area * t.coeff;
        }
    }

    Eigen::FullPivLU<Eigen::MatrixXd> lu(g);
    if (!lu.isInvertible()) {
        throw DegenerateElementError("elliptic projector Gram matrix is singular");
    }
    pn_star_ = lu.solve(b);
}

void LocalVem::build_gradient()
{
    const int n1 = poly_dim(k_ - 1);
    const int ndof = num_dofs();
    const ScaledMonomialBasis m1 = basis(k_ - 1);
    const auto indices = multi_indices(k_ - 1);
    Eigen::MatrixXd rx = Eigen::MatrixXd::Zero(n1, ndof);
    Eigen::MatrixXd ry = Eigen::MatrixXd::Zero(n1, ndof);
    for (const auto& bp : boundary_) {
        const Eigen::VectorXd m = m1.eval(bp.x);
        for (std::size_t l = 0; l < bp.dofs.size(); ++l) {
            const double tr = bp.trace(static_cast<Eigen::Index>(l)) * bp.weight;
            rx.col(bp.dofs[l]) += tr * bp.normal.x() * m;
            ry.col(bp.dofs[l]) += tr * bp.normal.y() * m;
        }
    }
    const double h = geom_.diameter;
    for (int a = 0; a < n1; ++a) {
        const MultiIndex mi = indices[static_cast<std::size_t>(a)];
        if (mi.a1 > 0) {
            rx(a, layout_.cell_dof(index_of({mi.a1 - 1, mi.a2}))) -= geom_.area * mi.a1 / h;
        }
        if (mi.a2 > 0) {
            ry(a, layout_.cell_dof(index_of({mi.a1, mi.a2 - 1}))) -= geom_.area * mi.a2 / h;
        }
    }
    const Eigen::LLT<Eigen::MatrixXd> llt(mass(k_ - 1));
    if (llt.info() != Eigen::Success) {
        throw DegenerateElementError("mass matrix is not positive definite");
    }
    grad_x_ = llt.solve(rx);
    grad_y_ = llt.solve(ry);
}

Eigen::MatrixXd LocalVem::mass(int degree) const
{
    if (degree > k_) {
        throw std::invalid_argument("mass matrix degree exceeds k");
    }
    const int n = poly_dim(degree);
    return mass_.topLeftCorner(n, n);
}

Eigen::VectorXd LocalVem::interpolate(const ScalarField& f, int quad_degree) const
{
    Eigen::VectorXd dofs = Eigen::VectorXd::Zero(num_dofs());
    const auto& v = geom_.vertices;
    const int n = layout_.n_vertices;
    for (int i = 0; i < n; ++i) {
        dofs(layout_.vertex_dof(i)) = f(v[static_cast<std::size_t>(i)]);
    }
    if (layout_.edge_moments > 0) {
        const GaussRule1D g = gauss_legendre(std::max(1, quad_degree / 2 + 1));
        for (int i = 0; i < n; ++i) {
            const int next = (i + 1) % n;
            const bool forward = geom_.edge_signs[static_cast<std::size_t>(i)] > 0;
            const Point2& a = v[static_cast<std::size_t>(forward ? i : next)];
            const Point2& b = v[static_cast<std::size_t>(forward ? next : i)];
            for (std::size_t q = 0; q < g.nodes.size(); ++q) {
                const double t = g.nodes[q];
                const double fv = f(a + t * (b - a)) * g.weights[q];
                for (int j = 0; j < layout_.edge_moments; ++j) {
                    dofs(layout_.edge_dof(i, j)) += fv * std::pow(t - 0.5, j);
                }
            }
        }
    }
    if (layout_.cell_moments > 0) {
        const QuadratureRule cell = polygon_quadrature(geom_, quad_degree);
        const ScaledMonomialBasis mb = basis(k_ - 2);
        Eigen::VectorXd moments = Eigen::VectorXd::Zero(layout_.cell_moments);
        for (std::size_t q = 0; q < cell.size(); ++q) {
            moments += cell.weights[q] * f(cell.points[q]) * mb.eval(cell.points[q]);
        }
        dofs.tail(layout_.cell_moments) = moments / geom_.area;
    }
    return dofs;
}

Eigen::MatrixXd LocalVem::dofs_of_monomials(int degree) const
{
    const ScaledMonomialBasis mb = basis(degree);
    Eigen::MatrixXd d(num_dofs(), mb.dim());
    for (int beta = 0; beta < mb.dim(); ++beta) {
        Eigen::VectorXd coeffs = Eigen::VectorXd::Unit(mb.dim(), beta);
        d.col(beta) = interpolate([&](const Point2& p) { return mb.eval_poly(coeffs, p); },
                                  degree + std::max(0, k_ - 2));
    }
    return d;
}

Eigen::MatrixXd LocalVem::elliptic_dof() const { return dofs_of_monomials(k_) * pn_star_; }

Eigen::MatrixXd LocalVem::l2_projector(SpaceVariant variant, int degree) const
{
    if (degree < 0) {
        throw std::invalid_argument("L2 projector degree must be >= 0");
    }
    const int limit = variant == SpaceVariant::Enhanced ? k_ : k_ - 2;
    if (degree > limit) {
        throw std::invalid_argument("L2 projection onto P_" + std::to_string(degree) +
                                    " is not computable in the " +
                                    (variant == SpaceVariant::Enhanced ? "enhanced" : "regular") +
                                    " space of order " + std::to_string(k_));
    }
    const int nl = poly_dim(degree);
    const int nm = poly_dim(k_ - 2);
    Eigen::MatrixXd c = Eigen::MatrixXd::Zero(nl, num_dofs());
    for (int a = 0; a < std::min(nl, nm); ++a) {
        c(a, layout_.cell_dof(a)) = geom_.area;
    }
    if (nl > nm) {
        // Enhancement: moments of degree k-1 and k come from the elliptic projection.
        const Eigen::MatrixXd hp = mass(k_).middleRows(nm, nl - nm) * pn_star_;
        c.middleRows(nm, nl - nm) = hp;
    }
    const Eigen::LLT<Eigen::MatrixXd> llt(mass(degree));
    if (llt.info() != Eigen::Success) {
        throw DegenerateElementError("mass matrix is not positive definite");
    }
    return llt.solve(c);
}

ProjectorPack LocalVem::projectors(SpaceVariant variant) const
{
    ProjectorPack pack;
    pack.Pn_star = pn_star_;
    pack.Pn_dof = elliptic_dof();
    pack.l2_degree = variant == SpaceVariant::Enhanced ? k_ : k_ - 2;
    if (pack.l2_degree >= 0) {
        pack.P0 = l2_projector(variant, pack.l2_degree);
    }
    pack.P0grad_x = grad_x_;
    pack.P0grad_y = grad_y_;
    return pack;
}

Eigen::MatrixXd LocalVem::consistency_scalar() const
{
    const Eigen::MatrixXd h = mass(k_ - 1);
    Eigen::MatrixXd a = grad_x_.transpose() * h * grad_x_ + grad_y_.transpose() * h * grad_y_;
    return 0.5 * (a + a.transpose());
}

Eigen::MatrixXd LocalVem::stabilization_scalar(SpaceVariant variant, StabilizationProjector projector,
                                               StabilizationScaling scaling) const
{
    Eigen::MatrixXd pi;
    if (projector == StabilizationProjector::Elliptic) {
        pi = elliptic_dof();
    } else {
        if (variant != SpaceVariant::Enhanced) {
            throw std::invalid_argument(
                "the orthogonal projector onto P_k is only available in the enhanced space");
        }
        pi = dofs_of_monomials(k_) * l2_projector(variant, k_);
    }
    const Eigen::MatrixXd r = Eigen::MatrixXd::Identity(num_dofs(), num_dofs()) - pi;
    Eigen::MatrixXd s = r.transpose() * r;
    s = 0.5 * (s + s.transpose());
    if (scaling == StabilizationScaling::ConsistencyTrace) {
        s *= consistency_scalar().trace() / num_dofs();
    }
    return s;
}

namespace {

Eigen::MatrixXd block_diagonal(const Eigen::MatrixXd& m)
{
    const Eigen::Index n = m.rows();
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(2 * n, 2 * n);
    out.topLeftCorner(n, n) = m;
    out.bottomRightCorner(n, n) = m;
    return out;
}

}  // namespace

std::pair<Eigen::MatrixXd, Eigen::MatrixXd> LocalVem::stiffness(SpaceVariant variant,
                                                                StabilizationProjector projector,
                                                                StabilizationScaling scaling) const
{
    return {block_diagonal(consistency_scalar()),
            block_diagonal(stabilization_scalar(variant, projector, scaling))};
}

Eigen::MatrixXd LocalVem::pressure_transform(int k_pressure, PressureBasis basis_kind) const
{
    const int np = poly_dim(k_pressure);
    if (basis_kind == PressureBasis::Monomial) {
        return Eigen::MatrixXd::Identity(np, np);
    }
    return gram_schmidt(mass(k_pressure));
}

Eigen::MatrixXd LocalVem::divergence(int k_pressure, PressureBasis basis_kind) const
{
    if (k_pressure < 0 || k_pressure > k_ - 1) {
        throw std::invalid_argument("pressure order must satisfy 0 <= k_pressure <= k - 1");
    }
    const int np = poly_dim(k_pressure);
    const int ndof = num_dofs();
    const ScaledMonomialBasis mp = basis(k_pressure);
    const auto indices = multi_indices(k_pressure);
    Eigen::MatrixXd b = Eigen::MatrixXd::Zero(np, 2 * ndof);
    // int_P q div(v) = -int_P grad(q) . v + int_dP q v . n
    for (const auto& bp : boundary_) {
        const Eigen::VectorXd m = mp.eval(bp.x);
        for (std::size_t l = 0; l < bp.dofs.size(); ++l) {
            const double tr = bp.trace(static_cast<Eigen::Index>(l)) * bp.weight;
            b.col(bp.dofs[l]) += tr * bp.normal.x() * m;
            b.col(ndof + bp.dofs[l]) += tr * bp.normal.y() * m;
        }
    }
    const double h = geom_.diameter;
    for (int a = 0; a < np; ++a) {
        const MultiIndex mi = indices[static_cast<std::size_t>(a)];
        if (mi.a1 > 0) {
            b(a, layout_.cell_dof(index_of({mi.a1 - 1, mi.a2}))) -= geom_.area * mi.a1 / h;
        }
        if (mi.a2 > 0) {
            b(a, ndof + layout_.cell_dof(index_of({mi.a1, mi.a2 - 1}))) -= geom_.area * mi.a2 / h;
        }
    }
    if (basis_kind == PressureBasis::Orthonormal) {
        return pressure_transform(k_pressure, basis_kind) * b;
    }
    return b;
}

Eigen::VectorXd LocalVem::load(const VectorField& f, SpaceVariant variant, int rhs_degree) const
{
    const int ndof = num_dofs();
    Eigen::VectorXd out = Eigen::VectorXd::Zero(2 * ndof);
    if (variant == SpaceVariant::Regular && k_ == 1) {
        Eigen::Vector2d integral = Eigen::Vector2d::Zero();
        for (std::size_t q = 0; q < rule_.size(); ++q) {
            integral += rule_.weights[q] * f(rule_.points[q]);
        }
        const double share = 1.0 / layout_.n_vertices;
        for (int v = 0; v < layout_.n_vertices; ++v) {
            out(layout_.vertex_dof(v)) = integral.x() * share;
            out(ndof + layout_.vertex_dof(v)) = integral.y() * share;
        }
        return out;
    }
    const Eigen::MatrixXd p0 = l2_projector(variant, rhs_degree);
    const ScaledMonomialBasis mb = basis(rhs_degree);
    Eigen::VectorXd fx = Eigen::VectorXd::Zero(mb.dim());
    Eigen::VectorXd fy = Eigen::VectorXd::Zero(mb.dim());
    for (std::size_t q = 0; q < rule_.size(); ++q) {
        const Eigen::Vector2d fv = f(rule_.points[q]);
        const Eigen::VectorXd m = mb.eval(rule_.points[q]);
        fx += rule_.weights[q] * fv.x() * m;
        fy += rule_.weights[q] * fv.y() * m;
    }
    out.head(ndof) = p0.transpose() * fx;
    out.tail(ndof) = p0.transpose() * fy;
    return out;
}

LocalStokesMatrices LocalVem::local_matrices(SpaceVariant variant, int k_pressure, int rhs_degree,
                                             const VectorField& f, StabilizationProjector projector,
                                             StabilizationScaling scaling, PressureBasis pressure) const
{
    LocalStokesMatrices m;
    std::tie(m.A_C, m.A_S) = stiffness(variant, projector, scaling);
    m.B_P = divergence(k_pressure, pressure);
    m.f_P = load(f, variant, rhs_degree);
    return m;
}

}  // namespace vem
