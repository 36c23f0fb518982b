#include "vem/solve.hpp"

#include <Eigen/OrderingMethods>
#include <Eigen/SparseCholesky>
#include <Eigen/SparseLU>

#include <algorithm>
#include <cmath>

namespace vem {

namespace {

std::string with_context(const std::string& context, const std::string& what)
{
    return context.empty() ? what : context + ": " + what;
}

// Beyond this many unknowns the dense least-squares fallback is refused.
constexpr int kDenseLimit = 6000;
constexpr double kPivotTolerance = 1e-12;
constexpr int kRefinementSteps = 3;

}  // namespace

int pressure_kernel_dimension(const ReducedSystem& reduced)
{
    // B B^T is singular along every kernel direction of B^T. Pinning the
    // first pressure DOF removes the constant mode (which has a non-zero
    // component there), so any remaining near-zero pivot is a spurious mode.
    SparseMatrix n = reduced.B * SparseMatrix(reduced.B.transpose());
    if (n.rows() == 0) return 0;
    const double scale = n.diagonal().cwiseAbs().maxCoeff();
    n.coeffRef(0, 0) += scale;
    Eigen::SimplicialLDLT<SparseMatrix> ldlt(n);
    const Eigen::VectorXd d = ldlt.vectorD();
    if (ldlt.info() != Eigen::Success || !d.allFinite()) {
        return 2;
    }
    const double dmax = d.cwiseAbs().maxCoeff();
    int small = 0;
    for (Eigen::Index i = 0; i < d.size(); ++i) {
        if (d(i) < kPivotTolerance * dmax) ++small;
    }
    return 1 + small;
}

StokesSolution solve_saddle(const ReducedSystem& reduced, const SolveOptions& options)
{
    const KktSystem kkt = zero_mean_constraint(reduced);
    const int n = static_cast<int>(kkt.K.rows());
    StokesSolution sol;
    Eigen::VectorXd x;

    const int kernel = pressure_kernel_dimension(reduced);
    const bool singular = kernel > 1;
    if (!singular) {
        Eigen::SparseLU<SparseMatrix, Eigen::COLAMDOrdering<int>> lu;
        lu.compute(kkt.K);
        if (lu.info() == Eigen::Success) {
            x = lu.solve(kkt.rhs);
            // Iterative refinement pushes the constraint residual, and with it
            // the discrete divergence, down to round-off.
            for (int step = 0; step < kRefinementSteps && x.allFinite(); ++step) {
                x += lu.solve(kkt.rhs - kkt.K * x);
            }
        }
    }
    if (x.size() != n || !x.allFinite()) {
        if (!options.allow_minimum_norm || n > kDenseLimit) {
            throw SingularSystemError(with_context(
                options.context, "saddle-point system is singular (" + std::to_string(kernel) +
                                     " pressure kernel modes, expected 1)"));
        }
        const Eigen::MatrixXd dense(kkt.K);
        Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(dense);
        x = cod.solve(kkt.rhs);
        sol.minimum_norm = true;
    }

    const double scale = std::max(kkt.rhs.norm(), 1e-300);
    sol.residual = (kkt.K * x - kkt.rhs).norm() / scale;
    if (kkt.rhs.norm() == 0.0) {
        sol.residual = x.norm() == 0.0 ? 0.0 : (kkt.K * x).norm() / std::max(x.norm(), 1e-300);
    }
    if (!(sol.residual <= kResidualTolerance)) {
        throw SingularSystemError(with_context(
            options.context, "relative residual " + std::to_string(sol.residual) + " exceeds tolerance"));
    }

    sol.velocity = reduced.dirichlet;
    for (int i = 0; i < kkt.n_u; ++i) sol.velocity(reduced.interior[static_cast<std::size_t>(i)]) = x(i);
    sol.pressure = x.segment(kkt.n_u, kkt.n_p);
    sol.multiplier = x(n - 1);
    return sol;
}

StokesSolution solve_stokes(const VemSpace& space, const VectorField& f, const VectorField& g,
                            const SolveOptions& options)
{
    const SaddleSystem sys = assemble(space, f);
    const BoundaryData bc = interpolate_boundary(space, g);
    return solve_saddle(apply_dirichlet(sys, space.dofs(), bc), options);
}

void classify_spectrum(const std::vector<double>& eigenvalues, double tau, int& kernel_dim, double& beta,
                       bool& ambiguous)
{
    kernel_dim = 0;
    beta = 0.0;
    ambiguous = false;
    if (eigenvalues.empty()) return;
    const double lmax = std::max(0.0, eigenvalues.back());
    auto count = [&](double t) {
        return static_cast<int>(std::count_if(eigenvalues.begin(), eigenvalues.end(),
                                              [&](double l) { return l < t * lmax; }));
    };
    kernel_dim = count(tau);
    ambiguous = count(tau * 10.0) != kernel_dim || count(tau / 10.0) != kernel_dim;
    if (kernel_dim < static_cast<int>(eigenvalues.size())) {
        beta = std::sqrt(std::max(0.0, eigenvalues[static_cast<std::size_t>(kernel_dim)]));
    }
}

InfSupReport infsup_constant(const PolygonalMesh& mesh, int k, int k_pressure, SpaceVariant variant)
{
    DiscretizationConfig cfg;
    cfg.k = k;
    cfg.k_pressure = k_pressure;
    cfg.variant = variant;
    cfg.pressure_basis = PressureBasis::Orthonormal;
    const VemSpace space(mesh, cfg);
    const VectorField zero = [](const Point2&) { return Eigen::Vector2d::Zero().eval(); };
    const SaddleSystem sys = assemble(space, zero);
    BoundaryData bc;
    bc.values = Eigen::VectorXd::Zero(space.dofs().n_velocity());
    const ReducedSystem r = apply_dirichlet(sys, space.dofs(), bc);

    Eigen::SimplicialLDLT<SparseMatrix> ldlt(r.A);
    if (ldlt.info() != Eigen::Success) {
        throw SingularSystemError("interior stiffness matrix is singular");
    }
    const Eigen::MatrixXd bt = Eigen::MatrixXd(r.B.transpose());
    const Eigen::MatrixXd ainv_bt = ldlt.solve(bt);
    Eigen::MatrixXd s = r.B * ainv_bt;
    s = 0.5 * (s + s.transpose()).eval();

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(s, Eigen::EigenvaluesOnly);
    if (eig.info() != Eigen::Success) {
        throw std::runtime_error("eigensolver did not converge");
    }
    InfSupReport rep;
    rep.mesh_h = mesh.h;
    rep.eigenvalues.assign(eig.eigenvalues().data(), eig.eigenvalues().data() + eig.eigenvalues().size());
    classify_spectrum(rep.eigenvalues, kKernelThreshold, rep.kernel_dim, rep.beta, rep.ambiguous);

    // Same spectrum from a separate monomial-basis assembly:
    // S_m x = lambda M x with the block-diagonal pressure mass matrix M.
    cfg.pressure_basis = PressureBasis::Monomial;
    const VemSpace mono(mesh, cfg);
    const ReducedSystem rm = apply_dirichlet(assemble(mono, zero), mono.dofs(), bc);
    Eigen::MatrixXd sm = rm.B * ldlt.solve(Eigen::MatrixXd(rm.B.transpose()));
    sm = 0.5 * (sm + sm.transpose()).eval();
    const int np = mono.dofs().n_pressure_local;
    Eigen::MatrixXd mass = Eigen::MatrixXd::Zero(sm.rows(), sm.cols());
    for (int e = 0; e < mono.num_elements(); ++e) {
        mass.block(e * np, e * np, np, np) = mono.local(e).mass(k_pressure);
    }
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> geig(sm, mass, Eigen::EigenvaluesOnly);
    if (geig.info() == Eigen::Success) {
        std::vector<double> ev(geig.eigenvalues().data(), geig.eigenvalues().data() + geig.eigenvalues().size());
        int kd = 0;
        bool amb = false;
        classify_spectrum(ev, kKernelThreshold, kd, rep.beta_monomial, amb);
    }
    return rep;
}

}  // namespace vem
