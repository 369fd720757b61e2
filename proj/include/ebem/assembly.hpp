#ifndef EBEM_ASSEMBLY_HPP
#define EBEM_ASSEMBLY_HPP

#include "ebem/core.hpp"
#include "ebem/geometry.hpp"
#include "ebem/quadrature.hpp"
#include "ebem/specfun.hpp"

namespace ebem {

// Shared state for kernel evaluation and operator assembly.
struct KernelContext {
    ElasticMedium medium;
    SeriesCoefficients coeffs;  // truncation M of the small-r expansions
    int gauss_order = 8;        // tensor rule for well-separated pairs
    int grading_depth = 3;      // dyadic levels toward a shared vertex

    KernelContext(const ElasticMedium& med, int M = 20, int gauss = 8, int depth = 3)
        : medium(med), coeffs(series_coefficients(med, M)), gauss_order(gauss),
          grading_depth(depth)
    {
        if (M < 1 || gauss < 2 || depth < 0)
            throw std::invalid_argument("KernelContext: bad discretization parameters");
    }

    double ks() const { return medium.ks(); }
    double kp() const { return medium.kp(); }
};

// Scalar kernel combinations at distance r, with a series fallback for small
// k_s r where the direct Hankel differences cancel catastrophically.
struct KernelValues {
    Complex h0s;      // H0(ks r)
    Complex h0p;      // H0(kp r)
    Complex h1s;      // H1(ks r)
    Complex f1_r;     // [ks H1(ks r) - kp H1(kp r)] / r
    Complex f2_r2;    // [ks^2 H2(ks r) - kp^2 H2(kp r)] / r^2
};
KernelValues eval_kernels(const KernelContext& ctx, double r);

// Fundamental displacement tensor E(x, y).
CMat22 fundamental_tensor(const KernelContext& ctx, const Vec2& x, const Vec2& y);

// Traction of E with respect to y, normal n_y, tangent t_y (pointwise; used by
// the representation formula away from the boundary).
CMat22 traction_y_E(const KernelContext& ctx, const Vec2& x, const Vec2& y, const Vec2& n_y,
                    const Vec2& t_y);

// Galerkin element-pair blocks of the four boundary integral operators for
// (test element a with hat-slope sign k1, trial element b with sign k2).
// Dispatches between the same-element series path, a vertex-graded rule for
// adjacent elements, and a plain tensor Gauss rule otherwise.
struct PairBlocks {
    CMat22 V, K, Kp, W;
};
PairBlocks pair_blocks(const KernelContext& ctx, const BoundaryMesh& mesh, int a, int b, int k1,
                       int k2);

// Full operator matrices (2N x 2N). One pass shares the Hankel evaluations of
// all four operators per element pair.
struct Operators {
    BlockMatrix V, K, Kp, W;
};
Operators assemble_operators(const KernelContext& ctx, const BoundaryMesh& mesh,
                             int threads = 0);

// Piecewise-linear/piecewise-constant mass matrices. I1 is the cyclic
// tridiagonal hat-hat Gram matrix; I2(i,j) couples hat i with the indicator of
// segment j.
Eigen::MatrixXcd assemble_mass_hat(const BoundaryMesh& mesh);
Eigen::MatrixXcd assemble_mass_mixed(const BoundaryMesh& mesh);

}  // namespace ebem

#endif
