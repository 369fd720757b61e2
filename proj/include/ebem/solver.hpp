#ifndef EBEM_SOLVER_HPP
#define EBEM_SOLVER_HPP

#include <functional>
#include <variant>
#include <vector>

#include "ebem/assembly.hpp"
#include "ebem/core.hpp"
#include "ebem/geometry.hpp"

namespace ebem {

// Incident fields. All are curl-free (pure P), so the traction reduces to
// 2 mu (n.grad)u + lambda (div u) n.
struct PlanePWave {
    Vec2 direction{1.0, 0.0};  // unit
};
struct PointSourceP {
    Vec2 source{0.0, 0.0};  // must lie inside an obstacle loop
};
// Synthetic data: the exact scattered field is the point-source field
// u = -grad H0(kp |x - z|), and the incident traction is chosen as -T u so the
// traction-free condition reproduces it.
struct Manufactured {
    Vec2 source{0.0, 0.0};
};
using IncidentField = std::variant<PlanePWave, PointSourceP, Manufactured>;

// Point-source building blocks (z strictly away from x).
CVec2 point_source_displacement(const ElasticMedium& medium, const Vec2& z, const Vec2& x);
CVec2 point_source_traction(const ElasticMedium& medium, const Vec2& z, const Vec2& x,
                            const Vec2& n);

CVec2 incident_displacement(const ElasticMedium& medium, const IncidentField& inc, const Vec2& x);
// T u^i at a boundary point with outward normal n.
CVec2 incident_traction(const ElasticMedium& medium, const IncidentField& inc, const Vec2& x,
                        const Vec2& n);

struct SolverConfig {
    double eta = 1.0;  // Burton-Miller coupling, must be nonzero
    int M = 20;
    int gauss_order = 8;
    int grading_depth = 3;
    int threads = 0;  // 0 = hardware concurrency
};

// Everything assembled once per (medium, mesh).
struct SystemMatrices {
    Operators ops;
    Eigen::MatrixXcd I1, I2;
};
SystemMatrices assemble_system(const ElasticMedium& medium, const BoundaryMesh& mesh,
                               const SolverConfig& cfg);

// A = W + i eta (I1/2 - K);  rhs = (I2/2 + K' + i eta V) g.
Eigen::MatrixXcd combined_matrix(const SystemMatrices& sys, double eta);
Eigen::VectorXcd combined_rhs(const SystemMatrices& sys, double eta, const Eigen::VectorXcd& g);

// g stacks T u^i at segment midpoints.
Eigen::VectorXcd incident_data(const ElasticMedium& medium, const BoundaryMesh& mesh,
                               const IncidentField& inc);

// Dense LU with partial pivoting. Throws on near-singularity
// (pivot < 1e-13 ||A||) or relative residual above 1e-10.
Eigen::VectorXcd lu_solve(const Eigen::MatrixXcd& A, const Eigen::VectorXcd& b);

// One-norm condition estimate (a few solves with the factored matrix).
double condition_estimate(const Eigen::MatrixXcd& A);

struct BoundarySolution {
    Eigen::VectorXcd u;  // nodal displacements (2N)
    Eigen::VectorXcd g;  // incident traction at segment midpoints (2N)
    double residual = 0.0;
};
BoundarySolution solve_scattering(const ElasticMedium& medium, const BoundaryMesh& mesh,
                                  const IncidentField& inc, const SolverConfig& cfg);

// Green's representation of the scattered field at exterior points, using the
// piecewise-linear u and the piecewise-constant boundary traction t = -g.
// Points must be outside every loop and at least one segment length from it.
std::vector<CVec2> represent_field(const ElasticMedium& medium, const BoundaryMesh& mesh,
                                   const BoundarySolution& sol, const std::vector<Vec2>& points,
                                   const SolverConfig& cfg);

struct ErrorNorms {
    double l2 = 0.0;
    double linf = 0.0;
};
// L2(Gamma) by per-segment Gauss quadrature of the linear interpolant error;
// Linf over nodes.
ErrorNorms boundary_errors(const BoundaryMesh& mesh, const Eigen::VectorXcd& u,
                           const std::function<CVec2(const Vec2&)>& exact);

struct ConvergenceRow {
    int N = 0;
    double l2 = 0.0;
    double linf = 0.0;
    double order_l2 = 0.0;   // generalized log ratio vs previous row; 0 on first
    double order_linf = 0.0;
};
// Manufactured-solution refinement study on one curve.
std::vector<ConvergenceRow> convergence_study(const ElasticMedium& medium, const CurveSpec& spec,
                                              const std::vector<int>& Ns,
                                              const SolverConfig& cfg,
                                              const Vec2& source = Vec2{0.0, 0.0});

}  // namespace ebem

#endif
