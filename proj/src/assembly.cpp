#include "vem/assembly.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <thread>

namespace vem {

std::vector<int> GlobalDofMap::element_velocity_dofs(int element) const
{
    const auto& s = element_dofs[static_cast<std::size_t>(element)];
    std::vector<int> out(s.begin(), s.end());
    for (int d : s) {
        out.push_back(d + n_scalar);
    }
    return out;
}

std::vector<int> GlobalDofMap::boundary_velocity_dofs() const
{
    std::vector<int> out;
    for (int c = 0; c < 2; ++c) {
        for (int d = 0; d < n_scalar; ++d) {
            if (boundary[static_cast<std::size_t>(d)]) out.push_back(c * n_scalar + d);
        }
    }
    return out;
}

std::vector<int> GlobalDofMap::interior_velocity_dofs() const
{
    std::vector<int> out;
    for (int c = 0; c < 2; ++c) {
        for (int d = 0; d < n_scalar; ++d) {
            if (!boundary[static_cast<std::size_t>(d)]) out.push_back(c * n_scalar + d);
        }
    }
    return out;
}

GlobalDofMap build_dof_map(const PolygonalMesh& mesh, int k, int k_pressure)
{
    if (k < 1) {
        throw std::invalid_argument("velocity order k must be >= 1");
    }
    if (k_pressure < 0 || k_pressure > k - 1) {
        throw std::invalid_argument("pressure order must satisfy 0 <= k_pressure <= k - 1");
    }
    GlobalDofMap m;
    m.k = k;
    m.k_pressure = k_pressure;
    m.n_vertices = static_cast<int>(mesh.num_vertices());
    m.n_edges = static_cast<int>(mesh.num_edges());
    m.n_elements = static_cast<int>(mesh.num_elements());
    m.n_scalar = m.n_vertices + (k - 1) * m.n_edges + poly_dim(k - 2) * m.n_elements;
    m.n_pressure_local = poly_dim(k_pressure);
    m.boundary.assign(static_cast<std::size_t>(m.n_scalar), 0);
    for (int e = 0; e < m.n_edges; ++e) {
        const Edge& edge = mesh.edges[static_cast<std::size_t>(e)];
        if (!edge.on_boundary) continue;
        m.boundary[static_cast<std::size_t>(edge.vertices[0])] = 1;
        m.boundary[static_cast<std::size_t>(edge.vertices[1])] = 1;
        for (int j = 0; j < k - 1; ++j) {
            m.boundary[static_cast<std::size_t>(m.edge_dof(e, j))] = 1;
        }
    }
    m.element_dofs.resize(static_cast<std::size_t>(m.n_elements));
    for (int p = 0; p < m.n_elements; ++p) {
        const Element& elem = mesh.elements[static_cast<std::size_t>(p)];
        auto& ids = m.element_dofs[static_cast<std::size_t>(p)];
        ids.assign(elem.vertices.begin(), elem.vertices.end());
        for (int e : elem.edges) {
            for (int j = 0; j < k - 1; ++j) ids.push_back(m.edge_dof(e, j));
        }
        for (int a = 0; a < poly_dim(k - 2); ++a) ids.push_back(m.cell_dof(p, a));
    }
    return m;
}

int worker_threads()
{
    if (const char* env = std::getenv("VEMSV_THREADS")) {
        const int n = std::atoi(env);
        if (n > 0) return n;
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

namespace {

// Runs body(e) for every element on a small thread pool; the first failure
// is rethrown as AssemblyError carrying the element id.
template <typename Body>
void for_each_element(int n, Body&& body)
{
    const int workers = std::min(worker_threads(), std::max(1, n));
    std::atomic<int> next{0};
    std::exception_ptr failure;
    int failed_element = -1;
    std::mutex guard;
    auto run = [&] {
        for (int e = next++; e < n; e = next++) {
            try {
                body(e);
            } catch (...) {
                std::lock_guard<std::mutex> lock(guard);
                if (!failure || e < failed_element) {
                    failure = std::current_exception();
                    failed_element = e;
                }
            }
        }
    };
    if (workers == 1) {
        run();
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < workers; ++t) pool.emplace_back(run);
        for (auto& t : pool) t.join();
    }
    if (failure) {
        try {
            std::rethrow_exception(failure);
        } catch (const AssemblyError&) {
            throw;
        } catch (const std::exception& err) {
            throw AssemblyError(failed_element, err.what());
        }
    }
}

}  // namespace

VemSpace::VemSpace(const PolygonalMesh& mesh, DiscretizationConfig config)
    : mesh_(std::make_shared<const PolygonalMesh>(mesh)),
      config_(config),
      dofs_(build_dof_map(mesh, config.k, config.k_pressure))
{
    const int n = static_cast<int>(mesh.num_elements());
    locals_.resize(static_cast<std::size_t>(n));
    for_each_element(n, [&](int e) {
        locals_[static_cast<std::size_t>(e)] =
            std::make_unique<LocalVem>(element_geometry(*mesh_, e), config_.k, config_.quad_degree);
    });
}

Eigen::VectorXd VemSpace::gather(int element, const Eigen::VectorXd& velocity) const
{
    const auto ids = dofs_.element_velocity_dofs(element);
    Eigen::VectorXd out(static_cast<Eigen::Index>(ids.size()));
    for (std::size_t i = 0; i < ids.size(); ++i) out(static_cast<Eigen::Index>(i)) = velocity(ids[i]);
    return out;
}

Eigen::VectorXd VemSpace::pressure_monomials(int element, const Eigen::VectorXd& pressure) const
{
    const int np = dofs_.n_pressure_local;
    const Eigen::VectorXd c = pressure.segment(dofs_.pressure_dof(element, 0), np);
    return local(element).pressure_transform(config_.k_pressure, config_.pressure_basis).transpose() * c;
}

SaddleSystem assemble(const VemSpace& space, const VectorField& f)
{
    const auto& cfg = space.config();
    const auto& dofs = space.dofs();
    const int n = space.num_elements();

    struct Local {
        LocalStokesMatrices m;
        Eigen::MatrixXd transform;
        Eigen::VectorXd means;
    };
    std::vector<Local> locals(static_cast<std::size_t>(n));
    for_each_element(n, [&](int e) {
        const LocalVem& lv = space.local(e);
        Local& out = locals[static_cast<std::size_t>(e)];
        out.m = lv.local_matrices(cfg.variant, cfg.k_pressure, cfg.effective_rhs_degree(), f,
                                  cfg.stab_projector, cfg.stab_scaling, cfg.pressure_basis);
        out.transform = lv.pressure_transform(cfg.k_pressure, cfg.pressure_basis);
        // int_P m_alpha is the first column of the mass matrix.
        out.means = out.transform * lv.mass(cfg.k_pressure).col(0);
    });

    SaddleSystem sys;
    const int nu = dofs.n_velocity();
    const int np = dofs.n_pressure();
    std::vector<Eigen::Triplet<double>> ta;
    std::vector<Eigen::Triplet<double>> tb;
    sys.f = Eigen::VectorXd::Zero(nu);
    sys.mean_row = Eigen::VectorXd::Zero(np);
    sys.pressure_transforms.resize(static_cast<std::size_t>(n));
    for (int e = 0; e < n; ++e) {
        const Local& l = locals[static_cast<std::size_t>(e)];
        const auto ids = dofs.element_velocity_dofs(e);
        const Eigen::MatrixXd a = l.m.A_C + l.m.A_S;
        for (std::size_t i = 0; i < ids.size(); ++i) {
            const auto ii = static_cast<Eigen::Index>(i);
            sys.f(ids[i]) += l.m.f_P(ii);
            for (std::size_t j = 0; j < ids.size(); ++j) {
                const double v = a(ii, static_cast<Eigen::Index>(j));
                if (v != 0.0) ta.emplace_back(ids[i], ids[j], v);
            }
        }
        for (int alpha = 0; alpha < dofs.n_pressure_local; ++alpha) {
            const int row = dofs.pressure_dof(e, alpha);
            sys.mean_row(row) = l.means(alpha);
            for (std::size_t j = 0; j < ids.size(); ++j) {
                const double v = l.m.B_P(alpha, static_cast<Eigen::Index>(j));
                if (v != 0.0) tb.emplace_back(row, ids[j], -v);
            }
        }
        sys.pressure_transforms[static_cast<std::size_t>(e)] = l.transform;
    }
    sys.A.resize(nu, nu);
    sys.A.setFromTriplets(ta.begin(), ta.end());
    sys.B.resize(np, nu);
    sys.B.setFromTriplets(tb.begin(), tb.end());
    sys.dirichlet_values = Eigen::VectorXd::Zero(nu);
    return sys;
}

double boundary_flux(const VemSpace& space, const Eigen::VectorXd& velocity)
{
    // The constant row of the local divergence is a pure boundary integral;
    // contributions of interior edges cancel in the sum.
    double flux = 0.0;
    for (int e = 0; e < space.num_elements(); ++e) {
        const LocalVem& lv = space.local(e);
        const Eigen::VectorXd u = space.gather(e, velocity);
        const int nd = lv.num_dofs();
        for (const auto& bp : lv.boundary_points()) {
            double ux = 0.0;
            double uy = 0.0;
            for (std::size_t l = 0; l < bp.dofs.size(); ++l) {
                const double t = bp.trace(static_cast<Eigen::Index>(l));
                ux += t * u(bp.dofs[l]);
                uy += t * u(nd + bp.dofs[l]);
            }
            flux += bp.weight * (ux * bp.normal.x() + uy * bp.normal.y());
        }
    }
    return flux;
}

namespace {

Eigen::VectorXd boundary_interpolant(const VemSpace& space, const VectorField& g)
{
    const auto& mesh = space.mesh();
    const auto& dofs = space.dofs();
    const int k = dofs.k;
    Eigen::VectorXd values = Eigen::VectorXd::Zero(dofs.n_velocity());
    const GaussRule1D rule = gauss_legendre(k + 2);  // exact to degree 2k + 2
    for (int e = 0; e < dofs.n_edges; ++e) {
        const Edge& edge = mesh.edges[static_cast<std::size_t>(e)];
        if (!edge.on_boundary) continue;
        const Point2& a = mesh.vertices[static_cast<std::size_t>(edge.vertices[0])];
        const Point2& b = mesh.vertices[static_cast<std::size_t>(edge.vertices[1])];
        for (int end = 0; end < 2; ++end) {
            const int v = edge.vertices[static_cast<std::size_t>(end)];
            const Eigen::Vector2d gv = g(mesh.vertices[static_cast<std::size_t>(v)]);
            values(dofs.vertex_dof(v)) = gv.x();
            values(dofs.n_scalar + dofs.vertex_dof(v)) = gv.y();
        }
        for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
            const double t = rule.nodes[q];
            const Eigen::Vector2d gv = g(a + t * (b - a)) * rule.weights[q];
            for (int j = 0; j < k - 1; ++j) {
                const double w = std::pow(t - 0.5, j);
                values(dofs.edge_dof(e, j)) += w * gv.x();
                values(dofs.n_scalar + dofs.edge_dof(e, j)) += w * gv.y();
            }
        }
    }
    return values;
}

}  // namespace

BoundaryData interpolate_boundary(const VemSpace& space, const VectorField& g)
{
    BoundaryData bc;
    bc.g = g;
    bc.values = boundary_interpolant(space, g);
    bc.flux_before = boundary_flux(space, bc.values);
    if (space.config().flux_correction && bc.flux_before != 0.0) {
        // (x, y) has divergence 2 and a linear trace, so its discrete flux is exact.
        const Eigen::VectorXd w = boundary_interpolant(space, [](const Point2& p) { return Eigen::Vector2d(p); });
        const double fw = boundary_flux(space, w);
        bc.values -= (bc.flux_before / fw) * w;
    }
    return bc;
}

ReducedSystem apply_dirichlet(const SaddleSystem& system, const GlobalDofMap& dofs, const BoundaryData& bc)
{
    ReducedSystem r;
    r.interior = dofs.interior_velocity_dofs();
    const int nu = dofs.n_velocity();
    std::vector<int> position(static_cast<std::size_t>(nu), -1);
    for (std::size_t i = 0; i < r.interior.size(); ++i) position[static_cast<std::size_t>(r.interior[i])] = static_cast<int>(i);

    r.dirichlet = Eigen::VectorXd::Zero(nu);
    for (int d : dofs.boundary_velocity_dofs()) r.dirichlet(d) = bc.values(d);

    const Eigen::VectorXd a_g = system.A * r.dirichlet;
    const Eigen::VectorXd b_g = system.B * r.dirichlet;
    const auto ni = static_cast<Eigen::Index>(r.interior.size());
    r.f.resize(ni);
    for (Eigen::Index i = 0; i < ni; ++i) {
        const int d = r.interior[static_cast<std::size_t>(i)];
        r.f(i) = system.f(d) - a_g(d);
    }
    r.g = -b_g;
    r.mean_row = system.mean_row;

    std::vector<Eigen::Triplet<double>> ta;
    for (int col = 0; col < system.A.outerSize(); ++col) {
        for (SparseMatrix::InnerIterator it(system.A, col); it; ++it) {
            const int i = position[static_cast<std::size_t>(it.row())];
            const int j = position[static_cast<std::size_t>(it.col())];
            if (i >= 0 && j >= 0) ta.emplace_back(i, j, it.value());
        }
    }
    r.A.resize(ni, ni);
    r.A.setFromTriplets(ta.begin(), ta.end());

    std::vector<Eigen::Triplet<double>> tb;
    for (int col = 0; col < system.B.outerSize(); ++col) {
        for (SparseMatrix::InnerIterator it(system.B, col); it; ++it) {
            const int j = position[static_cast<std::size_t>(it.col())];
            if (j >= 0) tb.emplace_back(static_cast<int>(it.row()), j, it.value());
        }
    }
    r.B.resize(system.B.rows(), ni);
    r.B.setFromTriplets(tb.begin(), tb.end());
    return r;
}

KktSystem zero_mean_constraint(const ReducedSystem& reduced)
{
    KktSystem kkt;
    kkt.n_u = static_cast<int>(reduced.A.rows());
    kkt.n_p = static_cast<int>(reduced.B.rows());
    const int n = kkt.n_u + kkt.n_p + 1;
    std::vector<Eigen::Triplet<double>> t;
    t.reserve(static_cast<std::size_t>(reduced.A.nonZeros() + 2 * reduced.B.nonZeros() + 2 * kkt.n_p));
    for (int col = 0; col < reduced.A.outerSize(); ++col) {
        for (SparseMatrix::InnerIterator it(reduced.A, col); it; ++it) {
            t.emplace_back(static_cast<int>(it.row()), static_cast<int>(it.col()), it.value());
        }
    }
    for (int col = 0; col < reduced.B.outerSize(); ++col) {
        for (SparseMatrix::InnerIterator it(reduced.B, col); it; ++it) {
            const int p = kkt.n_u + static_cast<int>(it.row());
            t.emplace_back(p, static_cast<int>(it.col()), it.value());
            t.emplace_back(static_cast<int>(it.col()), p, it.value());
        }
    }
    const int lambda = n - 1;
    for (int p = 0; p < kkt.n_p; ++p) {
        t.emplace_back(kkt.n_u + p, lambda, reduced.mean_row(p));
        t.emplace_back(lambda, kkt.n_u + p, reduced.mean_row(p));
    }
    kkt.K.resize(n, n);
    kkt.K.setFromTriplets(t.begin(), t.end());
    kkt.rhs = Eigen::VectorXd::Zero(n);
    kkt.rhs.head(kkt.n_u) = reduced.f;
    kkt.rhs.segment(kkt.n_u, kkt.n_p) = reduced.g;
    return kkt;
}

namespace {

void write_market(const std::string& path, const SparseMatrix& m)
{
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
    out << "%%MatrixMarket matrix coordinate real general\n";
    out << m.rows() << ' ' << m.cols() << ' ' << m.nonZeros() << '\n';
    char buf[64];
    for (int col = 0; col < m.outerSize(); ++col) {
        for (SparseMatrix::InnerIterator it(m, col); it; ++it) {
            std::snprintf(buf, sizeof buf, "%ld %ld %.17g\n", static_cast<long>(it.row() + 1),
                          static_cast<long>(it.col() + 1), it.value());
            out << buf;
        }
    }
}

void write_market(const std::string& path, const Eigen::VectorXd& v)
{
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
    out << "%%MatrixMarket matrix array real general\n";
    out << v.size() << " 1\n";
    char buf[40];
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.17g\n", v(i));
        out << buf;
    }
}

}  // namespace

void dump_system(const SaddleSystem& system, const std::string& dir)
{
    std::filesystem::create_directories(dir);
    write_market(dir + "/A.mtx", system.A);
    write_market(dir + "/B.mtx", system.B);
    write_market(dir + "/f.mtx", system.f);
}

}  // namespace vem
