#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "ebem/assembly.hpp"
#include "ebem/solver.hpp"

using namespace ebem;

namespace {

const ElasticMedium ref_medium(2.0, 1.0, 1.0, 3.0);

// Reference-element brute force for the single-layer Galerkin block on one
// element: (h^2/8) int int E(x(xi1), y(xi2)) (1 + k1 xi1) dxi1 dxi2, with the
// inner integral graded toward the singular point xi1 = xi2.
CMat22 brute_single_layer_self(const KernelContext& ctx, const BoundaryMesh& mesh, int a,
                               int k1)
{
    const double h = mesh.seg_len[a];
    // outer rule graded toward both endpoints: the inner integral behaves like
    // (1 -+ xi2) log(1 -+ xi2) there
    GaussRule outer;
    for (int ep : {-1, +1}) {
        const GaussRule half = graded_rule(16, 20, ep);
        const double lo = ep == -1 ? -1.0 : 0.0;
        for (int k = 0; k < half.n; ++k) {
            outer.nodes.push_back(lo + 0.5 * (half.nodes[k] + 1.0));
            outer.weights.push_back(0.5 * half.weights[k]);
        }
    }
    outer.n = static_cast<int>(outer.nodes.size());
    const GaussRule inner = graded_rule(16, 30, +1);  // singularity mapped to +1
    CMat22 sum = CMat22::Zero();
    for (int i = 0; i < outer.n; ++i) {
        const double xi2 = outer.nodes[i];
        const Vec2 y = reference_map(mesh, a, xi2);
        // split [-1, xi2] and [xi2, 1], each graded toward xi2
        for (int side = 0; side < 2; ++side) {
            const double lo = side == 0 ? -1.0 : xi2;
            const double hi = side == 0 ? xi2 : 1.0;
            if (hi - lo < 1e-14) continue;
            for (int j = 0; j < inner.n; ++j) {
                // flip so the graded endpoint lands on xi2
                const double s = side == 0 ? inner.nodes[j] : -inner.nodes[j];
                const double xi1 = 0.5 * (lo + hi) + 0.5 * (hi - lo) * s;
                if (std::abs(xi1 - xi2) < 1e-13) continue;  // guard rounding to r = 0
                const double w = 0.5 * (hi - lo) * inner.weights[j];
                const Vec2 x = reference_map(mesh, a, xi1);
                sum += w * outer.weights[i] * (1.0 + k1 * xi1) *
                       fundamental_tensor(ctx, x, y);
            }
        }
    }
    return (h * h / 8.0) * sum;
}

}  // namespace

TEST_CASE("kernel values are continuous across the series switch")
{
    const KernelContext ctx(ref_medium);
    const double r0 = 0.8 / ctx.ks();
    for (double f : {0.999999, 1.000001}) {
        const KernelValues kv = eval_kernels(ctx, r0 * f);
        const double r = r0 * f;
        CHECK(std::abs(kv.f1_r - f1_direct(ctx.ks(), ctx.kp(), r) / r) <=
              1e-11 * std::abs(kv.f1_r));
        CHECK(std::abs(kv.f2_r2 - f2_direct(ctx.ks(), ctx.kp(), r) / (r * r)) <=
              1e-11 * std::abs(kv.f2_r2));
        CHECK(std::abs(kv.h0s - hankel1(0, ctx.ks() * r)) <= 1e-12);
    }
}

TEST_CASE("fundamental tensor symmetry on random pairs")
{
    const KernelContext ctx(ref_medium);
    unsigned state = 12345;
    auto rnd = [&] {
        state = state * 1664525u + 1013904223u;
        return double(state) / 4294967296.0 * 4.0 - 2.0;
    };
    for (int k = 0; k < 100; ++k) {
        const Vec2 x(rnd(), rnd()), y(rnd(), rnd());
        if ((x - y).norm() < 1e-3) continue;
        const CMat22 E = fundamental_tensor(ctx, x, y);
        CHECK((E - E.transpose()).cwiseAbs().maxCoeff() <= 1e-14);
        CHECK((E - fundamental_tensor(ctx, y, x)).cwiseAbs().maxCoeff() <= 1e-14);
        CHECK(E.allFinite());
    }
}

TEST_CASE("columns of E satisfy the Navier equation (finite differences)")
{
    const KernelContext ctx(ref_medium);
    const Vec2 y(0.0, 0.0);
    const double mu = ref_medium.mu, lam = ref_medium.lambda;
    const double rw2 = ref_medium.rho * ref_medium.omega * ref_medium.omega;
    for (double r : {0.5, 1.0, 2.0}) {
        const Vec2 x = r * Vec2(0.6, 0.8);
        const double h = 1e-4 * r;
        auto Eat = [&](double dx, double dy) {
            return fundamental_tensor(ctx, Vec2(x.x() + dx, x.y() + dy), y);
        };
        const CMat22 E0 = Eat(0, 0);
        const CMat22 dxx = (Eat(h, 0) - 2.0 * E0 + Eat(-h, 0)) / (h * h);
        const CMat22 dyy = (Eat(0, h) - 2.0 * E0 + Eat(0, -h)) / (h * h);
        const CMat22 dxy =
            (Eat(h, h) - Eat(h, -h) - Eat(-h, h) + Eat(-h, -h)) / (4.0 * h * h);
        CMat22 nav;
        nav.row(0) =
            mu * (dxx.row(0) + dyy.row(0)) + (lam + mu) * (dxx.row(0) + dxy.row(1));
        nav.row(1) =
            mu * (dxx.row(1) + dyy.row(1)) + (lam + mu) * (dxy.row(0) + dyy.row(1));
        nav += rw2 * E0;
        CHECK(nav.cwiseAbs().maxCoeff() <= 1e-4 * E0.cwiseAbs().maxCoeff() / (r * r));
    }
}

TEST_CASE("traction of E matches a finite-difference oracle")
{
    const KernelContext ctx(ref_medium);
    const Vec2 x(1.7, 0.3), y(0.2, -0.4);
    const Vec2 t_y = Vec2(3.0, 4.0).normalized();
    const Vec2 n_y = -rot90() * t_y;
    const double mu = ref_medium.mu, lam = ref_medium.lambda;
    const double h = 1e-5;
    auto Eat = [&](double dx, double dy) {
        return fundamental_tensor(ctx, x, Vec2(y.x() + dx, y.y() + dy));
    };
    const CMat22 dEx = (Eat(h, 0) - Eat(-h, 0)) / (2.0 * h);
    const CMat22 dEy = (Eat(0, h) - Eat(0, -h)) / (2.0 * h);
    // column j of E is the displacement due to a unit force e_j at x; its
    // traction at y: lam (div u) n + mu (grad u + grad u^T) n
    CMat22 expected;
    for (int j = 0; j < 2; ++j) {
        CMat22 grad;  // grad(i,k) = d u_i / d y_k
        grad.col(0) = dEx.col(j);
        grad.col(1) = dEy.col(j);
        const Complex div = grad(0, 0) + grad(1, 1);
        const CVec2 tr = lam * div * n_y.cast<Complex>() +
                         mu * ((grad + grad.transpose()) * n_y.cast<Complex>());
        expected.col(j) = tr;
    }
    const CMat22 got = traction_y_E(ctx, x, y, n_y, t_y);
    CHECK((got - expected).cwiseAbs().maxCoeff() <=
          1e-7 * expected.cwiseAbs().maxCoeff());
}

TEST_CASE("same-element single-layer block matches graded brute force")
{
    const KernelContext ctx(ref_medium);
    const BoundaryMesh mesh = sample_curve(curve_by_name("kite"), 48);
    for (int a : {0, 11, 30}) {
        for (int k1 : {1, -1}) {
            CAPTURE(a);
            CAPTURE(k1);
            const PairBlocks pb = pair_blocks(ctx, mesh, a, a, k1, 1);
            const CMat22 oracle = brute_single_layer_self(ctx, mesh, a, k1);
            CHECK((pb.V - oracle).cwiseAbs().maxCoeff() <=
                  1e-8 * oracle.cwiseAbs().maxCoeff());
        }
    }
}

TEST_CASE("well-separated single-layer block matches plain quadrature")
{
    const KernelContext ctx(ref_medium);
    const BoundaryMesh mesh = sample_curve(curve_by_name("kite"), 48);
    const int a = 3, b = 25;  // far apart
    const GaussRule& g = gauss_legendre(24);
    for (int k1 : {1, -1}) {
        CMat22 oracle = CMat22::Zero();
        for (int i = 0; i < g.n; ++i)
            for (int j = 0; j < g.n; ++j) {
                const Vec2 x = reference_map(mesh, a, g.nodes[i]);
                const Vec2 y = reference_map(mesh, b, g.nodes[j]);
                oracle += g.weights[i] * g.weights[j] * (1.0 + k1 * g.nodes[i]) *
                          fundamental_tensor(ctx, x, y);
            }
        oracle *= mesh.seg_len[a] * mesh.seg_len[b] / 8.0;
        const PairBlocks pb = pair_blocks(ctx, mesh, a, b, k1, 1);
        CHECK((pb.V - oracle).cwiseAbs().maxCoeff() <=
              1e-11 * oracle.cwiseAbs().maxCoeff());
    }
}

TEST_CASE("mass matrices")
{
    const BoundaryMesh mesh = sample_curve(curve_by_name("rounded_triangle"), 40);
    const Eigen::MatrixXcd I1 = assemble_mass_hat(mesh);
    const Eigen::MatrixXcd I2 = assemble_mass_mixed(mesh);
    const int n = mesh.n_nodes();
    CHECK((I1 - I1.transpose()).cwiseAbs().maxCoeff() <= 1e-15);
    for (int i = 0; i < n; ++i) {
        const double hp = mesh.seg_len[mesh.prev[i]], hc = mesh.seg_len[i];
        CHECK(std::abs(I1(2 * i, 2 * i).real() - (hp + hc) / 3.0) <= 1e-14);
        CHECK(std::abs(I1(2 * i, 2 * mesh.next[i]).real() - hc / 6.0) <= 1e-14);
        CHECK(std::abs(I1(2 * i, 2 * i + 1)) <= 1e-15);  // components decouple
        CHECK(std::abs(I2(2 * i, 2 * i).real() - hc / 2.0) <= 1e-14);
        CHECK(std::abs(I2(2 * i, 2 * mesh.prev[i]).real() - hp / 2.0) <= 1e-14);
        // hats partition unity: both row sums equal int of hat_i
        CHECK(std::abs(I1.row(2 * i).sum().real() - (hp + hc) / 2.0) <= 1e-13);
        CHECK(std::abs(I2.row(2 * i).sum().real() - (hp + hc) / 2.0) <= 1e-13);
    }
    // two identical scalar components
    CHECK(std::abs(I1.sum().real() - 2.0 * mesh.perimeter()) <= 1e-12);
}

TEST_CASE("operator assembly is independent of the thread count")
{
    const KernelContext ctx(ref_medium);
    const BoundaryMesh mesh = sample_curve(curve_by_name("kite"), 32);
    const Operators a = assemble_operators(ctx, mesh, 1);
    const Operators b = assemble_operators(ctx, mesh, 3);
    // partition-boundary rows may accumulate in a different order
    CHECK((a.V.matrix() - b.V.matrix()).cwiseAbs().maxCoeff() <= 1e-15);
    CHECK((a.K.matrix() - b.K.matrix()).cwiseAbs().maxCoeff() <= 1e-15);
    CHECK((a.Kp.matrix() - b.Kp.matrix()).cwiseAbs().maxCoeff() <= 1e-15);
    CHECK((a.W.matrix() - b.W.matrix()).cwiseAbs().maxCoeff() <= 1e-15);
}

TEST_CASE("boundary integral identities for an exterior field")
{
    // For the exact radiating field u with traction g on the circle boundary:
    //   (I1/2 - K) U + V G -> 0   and   (I2/2 + K') G + W U -> 0
    // under refinement; this exercises every operator including the
    // same-element series and the adjacent graded path.
    const Vec2 z(0.0, 0.0);
    double prev1 = 1e30, prev2 = 1e30;
    for (int N : {48, 96}) {
        const BoundaryMesh mesh = sample_curve(curve_by_name("circle"), N);
        SolverConfig cfg;
        cfg.threads = 1;
        const SystemMatrices sys = assemble_system(ref_medium, mesh, cfg);
        Eigen::VectorXcd U(2 * N), G(2 * N);
        for (int i = 0; i < N; ++i) {
            U.segment<2>(2 * i) = point_source_displacement(ref_medium, z, mesh.nodes[i]);
            G.segment<2>(2 * i) =
                point_source_traction(ref_medium, z, mesh.seg_mid[i], mesh.seg_normal[i]);
        }
        const double r1 =
            ((0.5 * sys.I1 - sys.ops.K.matrix()) * U + sys.ops.V.matrix() * G).norm() /
            (sys.ops.V.matrix() * G).norm();
        const double r2 =
            ((0.5 * sys.I2 + sys.ops.Kp.matrix()) * G + sys.ops.W.matrix() * U).norm() /
            (sys.ops.W.matrix() * U).norm();
        CHECK(r1 < 0.4 * prev1);
        CHECK(r2 < 0.4 * prev2);
        prev1 = r1;
        prev2 = r2;
    }
    CHECK(prev1 <= 2e-3);
    CHECK(prev2 <= 2e-3);
}

TEST_CASE("two-segment loops are rejected")
{
    const KernelContext ctx(ref_medium);
    CHECK_THROWS(KernelContext(ref_medium, 0));
}
