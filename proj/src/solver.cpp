#include "ebem/solver.hpp"

#include <cmath>
#include <limits>

#include "ebem/specfun.hpp"

namespace ebem {

namespace {

// u = -grad phi with phi = H0(kp r): u = kp H1(kp r) rhat.
// Traction uses Hess phi = phi'' rhat rhat^T + (phi'/r)(I - rhat rhat^T) and
// div u = -Lap phi = kp^2 phi.
struct PointSourceKernels {
    Complex phi, dphi, ddphi;
    Vec2 rhat;
    double r;
};

PointSourceKernels point_source_kernels(const ElasticMedium& medium, const Vec2& z, const Vec2& x)
{
    const double kp = medium.kp();
    const Vec2 rv = x - z;
    const double r = rv.norm();
    if (!(r > 0.0)) throw std::invalid_argument("point source: evaluation at the source");
    Complex h0, h1;
    hankel01(kp * r, h0, h1);
    PointSourceKernels k;
    k.r = r;
    k.rhat = rv / r;
    k.phi = h0;
    k.dphi = -kp * h1;
    k.ddphi = -kp * kp * (h0 - h1 / (kp * r));  // H1'(x) = H0 - H1/x
    return k;
}

}  // namespace

CVec2 point_source_displacement(const ElasticMedium& medium, const Vec2& z, const Vec2& x)
{
    const PointSourceKernels k = point_source_kernels(medium, z, x);
    return (-k.dphi) * k.rhat.cast<Complex>();
}

CVec2 point_source_traction(const ElasticMedium& medium, const Vec2& z, const Vec2& x,
                            const Vec2& n)
{
    const PointSourceKernels k = point_source_kernels(medium, z, x);
    const double kp = medium.kp();
    CMat22 hess = (k.dphi / k.r) * CMat22::Identity();
    hess += (k.ddphi - k.dphi / k.r) * (k.rhat * k.rhat.transpose());
    // T u = -2 mu (Hess phi) n + lambda kp^2 phi n  (curl-free field)
    return -2.0 * medium.mu * (hess * n.cast<Complex>()) +
           medium.lambda * kp * kp * k.phi * n.cast<Complex>();
}

CVec2 incident_displacement(const ElasticMedium& medium, const IncidentField& inc, const Vec2& x)
{
    if (const auto* pw = std::get_if<PlanePWave>(&inc)) {
        const double kp = medium.kp();
        const Complex phase = std::exp(iu * kp * pw->direction.dot(x));
        return phase * pw->direction.cast<Complex>();
    }
    if (const auto* ps = std::get_if<PointSourceP>(&inc))
        return point_source_displacement(medium, ps->source, x);
    const auto& mf = std::get<Manufactured>(inc);
    return -point_source_displacement(medium, mf.source, x);
}

CVec2 incident_traction(const ElasticMedium& medium, const IncidentField& inc, const Vec2& x,
                        const Vec2& n)
{
    if (const auto* pw = std::get_if<PlanePWave>(&inc)) {
        const double kp = medium.kp();
        const Vec2& d = pw->direction;
        const Complex phase = std::exp(iu * kp * d.dot(x));
        const Vec2 v = 2.0 * medium.mu * d.dot(n) * d + medium.lambda * n;
        return iu * kp * phase * v.cast<Complex>();
    }
    if (const auto* ps = std::get_if<PointSourceP>(&inc))
        return point_source_traction(medium, ps->source, x, n);
    const auto& mf = std::get<Manufactured>(inc);
    return -point_source_traction(medium, mf.source, x, n);
}

SystemMatrices assemble_system(const ElasticMedium& medium, const BoundaryMesh& mesh,
                               const SolverConfig& cfg)
{
    KernelContext ctx(medium, cfg.M, cfg.gauss_order, cfg.grading_depth);
    SystemMatrices sys{assemble_operators(ctx, mesh, cfg.threads), assemble_mass_hat(mesh),
                       assemble_mass_mixed(mesh)};
    if (!sys.ops.V.all_finite() || !sys.ops.K.all_finite() || !sys.ops.Kp.all_finite() ||
        !sys.ops.W.all_finite())
        throw std::runtime_error("assemble_system: non-finite operator entries");
    return sys;
}

Eigen::MatrixXcd combined_matrix(const SystemMatrices& sys, double eta)
{
    if (eta == 0.0) throw std::invalid_argument("combined_matrix: eta must be nonzero");
    return sys.ops.W.matrix() + iu * eta * (0.5 * sys.I1 - sys.ops.K.matrix());
}

Eigen::VectorXcd combined_rhs(const SystemMatrices& sys, double eta, const Eigen::VectorXcd& g)
{
    return (0.5 * sys.I2 + sys.ops.Kp.matrix() + iu * eta * sys.ops.V.matrix()) * g;
}

Eigen::VectorXcd incident_data(const ElasticMedium& medium, const BoundaryMesh& mesh,
                               const IncidentField& inc)
{
    const int n = mesh.n_nodes();
    Eigen::VectorXcd g(2 * n);
    for (int j = 0; j < n; ++j)
        g.segment<2>(2 * j) = incident_traction(medium, inc, mesh.seg_mid[j], mesh.seg_normal[j]);
    return g;
}

Eigen::VectorXcd lu_solve(const Eigen::MatrixXcd& A, const Eigen::VectorXcd& b)
{
    if (!A.allFinite() || !b.allFinite()) throw std::invalid_argument("lu_solve: non-finite input");
    Eigen::PartialPivLU<Eigen::MatrixXcd> lu(A);
    const double scale = A.cwiseAbs().maxCoeff();
    const double min_pivot = lu.matrixLU().diagonal().cwiseAbs().minCoeff();
    if (min_pivot < 1e-13 * scale)
        throw std::runtime_error("lu_solve: near-singular matrix (pivot below floor)");
    Eigen::VectorXcd x = lu.solve(b);
    const double bn = b.norm();
    if (bn > 0.0) {
        const double res = (A * x - b).norm() / bn;
        if (!(res <= 1e-10))
            throw std::runtime_error("lu_solve: residual above 1e-10: " + std::to_string(res));
    }
    return x;
}

double condition_estimate(const Eigen::MatrixXcd& A)
{
    Eigen::PartialPivLU<Eigen::MatrixXcd> lu(A);
    // Power iteration on inv(A)^H inv(A) for ||inv(A)||_2, times ||A||_2 ~ Frobenius bound.
    Eigen::VectorXcd v = Eigen::VectorXcd::Ones(A.rows()).normalized();
    double sigma = 0.0;
    for (int it = 0; it < 8; ++it) {
        Eigen::VectorXcd w = lu.solve(v);
        w = lu.adjoint().solve(w);
        sigma = std::sqrt(w.norm());
        v = w.normalized();
    }
    return sigma * A.operatorNorm();
}

BoundarySolution solve_scattering(const ElasticMedium& medium, const BoundaryMesh& mesh,
                                  const IncidentField& inc, const SolverConfig& cfg)
{
    SystemMatrices sys = assemble_system(medium, mesh, cfg);
    const Eigen::MatrixXcd A = combined_matrix(sys, cfg.eta);
    BoundarySolution sol;
    sol.g = incident_data(medium, mesh, inc);
    const Eigen::VectorXcd b = combined_rhs(sys, cfg.eta, sol.g);
    sol.u = lu_solve(A, b);
    sol.residual = b.norm() > 0.0 ? (A * sol.u - b).norm() / b.norm() : 0.0;
    return sol;
}

std::vector<CVec2> represent_field(const ElasticMedium& medium, const BoundaryMesh& mesh,
                                   const BoundarySolution& sol, const std::vector<Vec2>& points,
                                   const SolverConfig& cfg)
{
    KernelContext ctx(medium, cfg.M, cfg.gauss_order, cfg.grading_depth);
    const GaussRule& gr = gauss_legendre(cfg.gauss_order);
    const int n = mesh.n_nodes();
    double hmax = 0.0;
    for (double h : mesh.seg_len) hmax = std::max(hmax, h);

    std::vector<CVec2> out;
    out.reserve(points.size());
    for (const Vec2& x : points) {
        if (point_in_obstacle(mesh, x))
            throw std::invalid_argument("represent_field: point inside the obstacle");
        double dist = std::numeric_limits<double>::max();
        for (int j = 0; j < n; ++j) dist = std::min(dist, (x - mesh.seg_mid[j]).norm());
        if (dist < hmax)
            throw std::invalid_argument("represent_field: point too close to the boundary");
        CVec2 u = CVec2::Zero();
        for (int j = 0; j < n; ++j) {
            const CVec2 ua = sol.u.segment<2>(2 * j);
            const CVec2 ub = sol.u.segment<2>(2 * mesh.next[j]);
            const CVec2 t = -sol.g.segment<2>(2 * j);  // boundary traction of the solution
            const double h = mesh.seg_len[j];
            for (int q = 0; q < gr.n; ++q) {
                const double xi = gr.nodes[q];
                const Vec2 y = reference_map(mesh, j, xi);
                const double w = 0.5 * h * gr.weights[q];
                const CVec2 uh = 0.5 * (1.0 - xi) * ua + 0.5 * (1.0 + xi) * ub;
                const CMat22 TyE =
                    traction_y_E(ctx, x, y, mesh.seg_normal[j], mesh.seg_tangent[j]);
                u += w * (TyE.transpose() * uh - fundamental_tensor(ctx, x, y) * t);
            }
        }
        out.push_back(u);
    }
    return out;
}

ErrorNorms boundary_errors(const BoundaryMesh& mesh, const Eigen::VectorXcd& u,
                           const std::function<CVec2(const Vec2&)>& exact)
{
    const GaussRule& gr = gauss_legendre(8);
    const int n = mesh.n_nodes();
    ErrorNorms e;
    double l2sq = 0.0;
    for (int i = 0; i < n; ++i) {
        const CVec2 ua = u.segment<2>(2 * i);
        const CVec2 ub = u.segment<2>(2 * mesh.next[i]);
        for (int q = 0; q < gr.n; ++q) {
            const double xi = gr.nodes[q];
            const Vec2 x = reference_map(mesh, i, xi);
            const CVec2 uh = 0.5 * (1.0 - xi) * ua + 0.5 * (1.0 + xi) * ub;
            l2sq += 0.5 * mesh.seg_len[i] * gr.weights[q] * (uh - exact(x)).squaredNorm();
        }
        e.linf = std::max(e.linf, (ua - exact(mesh.nodes[i])).norm());
    }
    e.l2 = std::sqrt(l2sq);
    return e;
}

std::vector<ConvergenceRow> convergence_study(const ElasticMedium& medium, const CurveSpec& spec,
                                              const std::vector<int>& Ns, const SolverConfig& cfg,
                                              const Vec2& source)
{
    std::vector<ConvergenceRow> rows;
    const IncidentField inc = Manufactured{source};
    auto exact = [&](const Vec2& x) { return point_source_displacement(medium, source, x); };
    for (size_t k = 0; k < Ns.size(); ++k) {
        const BoundaryMesh mesh = sample_curve(spec, Ns[k]);
        const BoundarySolution sol = solve_scattering(medium, mesh, inc, cfg);
        const ErrorNorms e = boundary_errors(mesh, sol.u, exact);
        ConvergenceRow row{Ns[k], e.l2, e.linf, 0.0, 0.0};
        if (k > 0 && rows[k - 1].l2 > 0.0 && e.l2 > 0.0) {
            const double ratio = std::log(double(Ns[k]) / Ns[k - 1]);
            row.order_l2 = std::log(rows[k - 1].l2 / e.l2) / ratio;
            row.order_linf = std::log(rows[k - 1].linf / e.linf) / ratio;
        }
        rows.push_back(row);
    }
    return rows;
}

}  // namespace ebem
