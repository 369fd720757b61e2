#include "ebem/assembly.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <thread>
#include <vector>

namespace ebem {

namespace {

// Below this value of ks*r the Hankel differences F1, F2 lose most digits to
// cancellation of their 1/r and 1/r^2 singular parts, so the truncated series
// (which subtracts those parts analytically) takes over.
constexpr double series_switch = 0.8;

struct Frame {
    Vec2 n, t;
    double h;
};

Frame frame_of(const BoundaryMesh& mesh, int seg)
{
    return {mesh.seg_normal[seg], mesh.seg_tangent[seg], mesh.seg_len[seg]};
}

// ---------------------------------------------------------------------------
// Element-pair quadrature moments.
//
// Every integrand of the four operators is a product of one of five scalar
// kernels, a constant frame matrix, an optional factor r or r r^T, and a
// weight in span{1, xi1, xi2, xi1 xi2}. Accumulating the quantities below
// against the four weights once per pair lets all operators and both
// hat-slope signs (k1, k2) share the Hankel evaluations.
struct PairMoments {
    Complex A0s[4]{}, A0p[4]{}, AF1[4]{};
    CVec2 V1s[4], VF1[4];   // H1(ks r) rhat  and  (F1/r) r
    CMat22 MF2[4];          // (F2/r^2) r r^T

    PairMoments()
    {
        for (int w = 0; w < 4; ++w) {
            V1s[w].setZero();
            VF1[w].setZero();
            MF2[w].setZero();
        }
    }
};

PairMoments integrate_pair(const KernelContext& ctx, const BoundaryMesh& mesh, int a, int b)
{
    // Rule selection: elements sharing a vertex get dyadic grading toward it.
    const GaussRule* r1;
    const GaussRule* r2;
    GaussRule g1, g2;
    if (mesh.next[a] == b && mesh.next[b] == a)
        throw std::logic_error("integrate_pair: two-segment loop");
    if (mesh.next[a] == b) {
        g1 = graded_rule(ctx.gauss_order, ctx.grading_depth, +1);
        g2 = graded_rule(ctx.gauss_order, ctx.grading_depth, -1);
        r1 = &g1;
        r2 = &g2;
    } else if (mesh.next[b] == a) {
        g1 = graded_rule(ctx.gauss_order, ctx.grading_depth, -1);
        g2 = graded_rule(ctx.gauss_order, ctx.grading_depth, +1);
        r1 = &g1;
        r2 = &g2;
    } else {
        r1 = r2 = &gauss_legendre(ctx.gauss_order);
    }

    PairMoments pm;
    const Vec2 xa = mesh.nodes[a];
    const Vec2 da = mesh.nodes[mesh.next[a]] - xa;
    const Vec2 xb = mesh.nodes[b];
    const Vec2 db = mesh.nodes[mesh.next[b]] - xb;
    for (int p = 0; p < r1->n; ++p) {
        const double xi1 = r1->nodes[p];
        const Vec2 x = xa + 0.5 * (1.0 + xi1) * da;
        for (int q = 0; q < r2->n; ++q) {
            const double xi2 = r2->nodes[q];
            const Vec2 y = xb + 0.5 * (1.0 + xi2) * db;
            const Vec2 rv = x - y;
            const double r = rv.norm();
            const KernelValues kv = eval_kernels(ctx, r);
            const double wq = r1->weights[p] * r2->weights[q];
            const double w[4] = {wq, wq * xi1, wq * xi2, wq * xi1 * xi2};
            const Vec2 rhat = rv / r;
            const CMat22 rrT = (kv.f2_r2 * (rv * rv.transpose())).eval();
            for (int k = 0; k < 4; ++k) {
                pm.A0s[k] += w[k] * kv.h0s;
                pm.A0p[k] += w[k] * kv.h0p;
                pm.AF1[k] += w[k] * kv.f1_r;
                pm.V1s[k] += (w[k] * kv.h1s) * rhat;
                pm.VF1[k] += (w[k] * kv.f1_r) * rv;
                pm.MF2[k] += w[k] * rrT;
            }
        }
    }
    return pm;
}

// Weighted sums over the four stored moments.
template <typename T>
T w_one(const T (&x)[4]) { return x[0]; }
template <typename T>
T w_k1(const T (&x)[4], int k1) { return x[0] + double(k1) * x[1]; }
template <typename T>
T w_k2(const T (&x)[4], int k2) { return x[0] + double(k2) * x[2]; }
template <typename T>
T w_k12(const T (&x)[4], int k1, int k2)
{
    return x[0] + double(k1) * x[1] + double(k2) * x[2] + double(k1 * k2) * x[3];
}

struct PairGeometry {
    Frame a, b;
    Eigen::Matrix2d N = rot90();
};

// Unconjugated contraction of a complex vector with a real direction.
Complex contract(const CVec2& v, const Vec2& d)
{
    return v(0) * d(0) + v(1) * d(1);
}

CMat22 combine_V(const KernelContext& ctx, const PairMoments& pm, const PairGeometry& g, int k1)
{
    const double mu = ctx.medium.mu;
    const double rw2 = ctx.medium.rho * ctx.medium.omega * ctx.medium.omega;
    const double hh = g.a.h * g.b.h;
    CMat22 out = (iu * hh / (32.0 * mu) * w_k1(pm.A0s, k1)) * CMat22::Identity();
    out -= (iu * hh / (32.0 * rw2) * w_k1(pm.AF1, k1)) * CMat22::Identity();
    out += (iu * hh / (32.0 * rw2)) * w_k1(pm.MF2, k1);
    return out;
}

CMat22 combine_K(const KernelContext& ctx, const PairMoments& pm, const PairGeometry& g, int k1,
                 int k2)
{
    const double mu = ctx.medium.mu;
    const double rw2 = ctx.medium.rho * ctx.medium.omega * ctx.medium.omega;
    const double ha = g.a.h, hb = g.b.h;
    CMat22 out = (iu * ctx.ks() * ha * hb / 64.0 * contract(w_k12(pm.V1s, k1, k2), g.b.n)) *
                 CMat22::Identity();
    out += (iu * double(k2) * ha / 32.0 * w_k1(pm.A0s, k1)) * g.N;
    out -= (iu * ha * hb / 64.0) * (w_k12(pm.VF1, k1, k2) * g.b.n.transpose().cast<Complex>());
    out -= (iu * mu * double(k2) * ha / (16.0 * rw2) * w_k1(pm.AF1, k1)) * g.N;
    out += (iu * mu * double(k2) * ha / (16.0 * rw2)) * (w_k1(pm.MF2, k1) * g.N);
    return out;
}

CMat22 combine_Kp(const KernelContext& ctx, const PairMoments& pm, const PairGeometry& g, int k1)
{
    const double mu = ctx.medium.mu;
    const double rw2 = ctx.medium.rho * ctx.medium.omega * ctx.medium.omega;
    const double ha = g.a.h, hb = g.b.h;
    CMat22 out = (-iu * ctx.ks() * ha * hb / 32.0 * contract(w_k1(pm.V1s, k1), g.a.n)) *
                 CMat22::Identity();
    out -= (iu * double(k1) * hb / 16.0 * w_one(pm.A0s)) * g.N;
    out += (iu * ha * hb / 32.0) * (g.a.n.cast<Complex>() * w_k1(pm.VF1, k1).transpose());
    out += (iu * mu * double(k1) * hb / (8.0 * rw2) * w_one(pm.AF1)) * g.N;
    out -= (iu * mu * double(k1) * hb / (8.0 * rw2)) * (g.N * w_one(pm.MF2));
    return out;
}

CMat22 combine_W(const KernelContext& ctx, const PairMoments& pm, const PairGeometry& g, int k1,
                 int k2)
{
    const double mu = ctx.medium.mu;
    const double lam = ctx.medium.lambda;
    const double rw2 = ctx.medium.rho * ctx.medium.omega * ctx.medium.omega;
    const double ks2 = ctx.ks() * ctx.ks();
    const double ha = g.a.h, hb = g.b.h;
    const Vec2 na = g.a.n, nb = g.b.n, tb = g.b.t;
    const Eigen::Matrix2d frame1 =
        (na * nb.transpose() - na.dot(nb) * Eigen::Matrix2d::Identity() + na.dot(tb) * g.N)
            .eval();
    CMat22 out = (iu * mu * ks2 * ha * hb / 64.0 * w_k12(pm.A0s, k1, k2)) * frame1;
    out -= (iu * mu * ks2 * ha * hb / 64.0 * w_k12(pm.A0p, k1, k2)) * (na * nb.transpose());
    out += (iu * mu * double(k1 * k2) / 4.0 * w_one(pm.A0s)) * CMat22::Identity();
    out -= (iu * mu * mu * double(k1 * k2) / (4.0 * (lam + 2.0 * mu)) * w_one(pm.A0p)) *
           CMat22::Identity();
    out -= (iu * mu * mu * double(k1 * k2) / (4.0 * rw2) * w_one(pm.AF1)) * CMat22::Identity();
    out -= (iu * mu * double(k2) * ha / 16.0) *
           (na.cast<Complex>() * (g.N.transpose() * w_k1(pm.VF1, k1)).transpose());
    out -= (iu * mu * double(k1) * hb / 16.0) *
           ((g.N * w_k2(pm.VF1, k2)) * nb.transpose().cast<Complex>());
    out += (iu * mu * mu * double(k1 * k2) / (4.0 * rw2)) * w_one(pm.MF2);
    return out;
}

// ---------------------------------------------------------------------------
// Same-element path: exact series evaluation through the moment tables.

// g(r) = sum_m (c[m] + clog[m] ln r) r^{2m+off} + constant
struct Family {
    std::vector<Complex> c, clog;
    Complex constant{0.0, 0.0};
    int off = 0;
};

Family family_H0(const SeriesCoefficients& sc, double k)
{
    Family f;
    const double lk = std::log(k / 2.0);
    double kpow = 1.0;
    for (int m = 0; m <= sc.M; ++m) {
        f.c.push_back((sc.C5[m] + sc.C6[m] * lk) * kpow);
        f.clog.push_back(sc.C6[m] * kpow);
        kpow *= k * k;
    }
    return f;
}

Family family_F1r(const SeriesCoefficients& sc)
{
    return Family{sc.C1, sc.C2, Complex{0.0, 0.0}, 0};
}

Family family_F2(const SeriesCoefficients& sc)
{
    const double d = sc.ks * sc.ks - sc.kp * sc.kp;
    return Family{sc.C3, sc.C4, Complex{0.0, -d / std::numbers::pi}, 2};
}

// Moments of (xi1-xi2)^q * {1, xi1, xi2, xi1 xi2} over the square, without and
// with the ln|xi1-xi2| factor; parity kills half of the entries.
double momP(const SingularTable& tab, int q, int w)
{
    if (q % 2 == 0) {
        const int m = q / 2;
        if (w == 0) return tab.I3[m];
        if (w == 3) return tab.I5[m];
        return 0.0;
    }
    const int m = (q - 1) / 2;
    if (w == 1) return tab.I1[m];
    if (w == 2) return -tab.I1[m];
    return 0.0;
}

double momL(const SingularTable& tab, int q, int w)
{
    if (q % 2 == 0) {
        const int m = q / 2;
        if (w == 0) return tab.I4[m];
        if (w == 3) return tab.I6[m];
        return 0.0;
    }
    const int m = (q - 1) / 2;
    if (w == 1) return tab.I2[m];
    if (w == 2) return -tab.I2[m];
    return 0.0;
}

// integral over [-1,1]^2 of g((h/2)|xi1-xi2|) (xi1-xi2)^p w(xi1,xi2), where
// the weight is wv[0] + wv[1] xi1 + wv[2] xi2 + wv[3] xi1 xi2.
Complex same_element_integral(const Family& fam, int p, const double wv[4], double h,
                              const SingularTable& tab)
{
    const double lh = std::log(h / 2.0);
    Complex sum{0.0, 0.0};
    double hpow = std::pow(h / 2.0, fam.off);
    for (size_t m = 0; m < fam.c.size(); ++m) {
        const int q = 2 * static_cast<int>(m) + fam.off + p;
        Complex acc{0.0, 0.0};
        for (int w = 0; w < 4; ++w) {
            if (wv[w] == 0.0) continue;
            acc += wv[w] * ((fam.c[m] + fam.clog[m] * lh) * momP(tab, q, w) +
                            fam.clog[m] * momL(tab, q, w));
        }
        sum += hpow * acc;
        hpow *= (h / 2.0) * (h / 2.0);
    }
    if (fam.constant != Complex{0.0, 0.0}) {
        Complex acc{0.0, 0.0};
        for (int w = 0; w < 4; ++w)
            if (wv[w] != 0.0) acc += wv[w] * momP(tab, p, w);
        sum += fam.constant * acc;
    }
    return sum;
}

struct SameElementTables {
    Family h0s, h0p, f1r, f2;
    const SingularTable& tab;

    explicit SameElementTables(const KernelContext& ctx)
        : h0s(family_H0(ctx.coeffs, ctx.ks())), h0p(family_H0(ctx.coeffs, ctx.kp())),
          f1r(family_F1r(ctx.coeffs)), f2(family_F2(ctx.coeffs)), tab(singular_table(ctx.coeffs.M))
    {
    }
};

PairBlocks same_element_blocks(const KernelContext& ctx, const SameElementTables& se,
                               const Frame& fr, int k1, int k2)
{
    const double mu = ctx.medium.mu;
    const double lam = ctx.medium.lambda;
    const double rw2 = ctx.medium.rho * ctx.medium.omega * ctx.medium.omega;
    const double ks2 = ctx.ks() * ctx.ks();
    const double h = fr.h;
    const Vec2 n = fr.n, t = fr.t;
    const Eigen::Matrix2d N = rot90();
    const Eigen::Matrix2d ttT = t * t.transpose();
    const Eigen::Matrix2d nnT = n * n.transpose();
    const double w0[4] = {1.0, 0.0, 0.0, 0.0};
    const double w1[4] = {1.0, double(k1), 0.0, 0.0};
    const double w2[4] = {1.0, 0.0, double(k2), 0.0};
    const double w12[4] = {1.0, double(k1), double(k2), double(k1 * k2)};

    PairBlocks out;

    // Single layer: the H1(ks r)(r.n) term is absent here because r is
    // parallel to the element.
    out.V = (iu * h * h / (32.0 * mu) * same_element_integral(se.h0s, 0, w1, h, se.tab)) *
            CMat22::Identity();
    out.V -= (iu * h * h / (32.0 * rw2) * same_element_integral(se.f1r, 0, w1, h, se.tab)) *
             CMat22::Identity();
    out.V += (iu * h * h / (32.0 * rw2) * same_element_integral(se.f2, 0, w1, h, se.tab)) * ttT;

    // Double layer (r.n terms vanish; r = (h/2)(xi1-xi2) t).
    out.K = (iu * double(k2) * h / 32.0 * same_element_integral(se.h0s, 0, w1, h, se.tab)) * N;
    out.K -= (iu * h * h / 64.0 * (h / 2.0) * same_element_integral(se.f1r, 1, w12, h, se.tab)) *
             (t * n.transpose());
    out.K -= (iu * mu * double(k2) * h / (16.0 * rw2) *
              same_element_integral(se.f1r, 0, w1, h, se.tab)) *
             N;
    out.K += (iu * mu * double(k2) * h / (16.0 * rw2) *
              same_element_integral(se.f2, 0, w1, h, se.tab)) *
             (ttT * N);

    // Adjoint double layer.
    out.Kp = (-iu * double(k1) * h / 16.0 * same_element_integral(se.h0s, 0, w0, h, se.tab)) * N;
    out.Kp += (iu * h * h / 32.0 * (h / 2.0) * same_element_integral(se.f1r, 1, w1, h, se.tab)) *
              (n * t.transpose());
    out.Kp += (iu * mu * double(k1) * h / (8.0 * rw2) *
               same_element_integral(se.f1r, 0, w0, h, se.tab)) *
              N;
    out.Kp -= (iu * mu * double(k1) * h / (8.0 * rw2) *
               same_element_integral(se.f2, 0, w0, h, se.tab)) *
              (N * ttT);

    // Hypersingular (regularized); the frame collapses to nn^T - I.
    out.W = (iu * mu * ks2 * h * h / 64.0 * same_element_integral(se.h0s, 0, w12, h, se.tab)) *
            (nnT - Eigen::Matrix2d::Identity());
    out.W -= (iu * mu * ks2 * h * h / 64.0 * same_element_integral(se.h0p, 0, w12, h, se.tab)) *
             nnT;
    out.W += (iu * mu * double(k1 * k2) / 4.0 * same_element_integral(se.h0s, 0, w0, h, se.tab)) *
             CMat22::Identity();
    out.W -= (iu * mu * mu * double(k1 * k2) / (4.0 * (lam + 2.0 * mu)) *
              same_element_integral(se.h0p, 0, w0, h, se.tab)) *
             CMat22::Identity();
    out.W -= (iu * mu * mu * double(k1 * k2) / (4.0 * rw2) *
              same_element_integral(se.f1r, 0, w0, h, se.tab)) *
             CMat22::Identity();
    out.W -= (iu * mu * double(k2) * h / 16.0 * (h / 2.0) *
              same_element_integral(se.f1r, 1, w1, h, se.tab)) *
             (n * (N.transpose() * t).transpose());
    out.W -= (iu * mu * double(k1) * h / 16.0 * (h / 2.0) *
              same_element_integral(se.f1r, 1, w2, h, se.tab)) *
             ((N * t) * n.transpose());
    out.W += (iu * mu * mu * double(k1 * k2) / (4.0 * rw2) *
              same_element_integral(se.f2, 0, w0, h, se.tab)) *
             ttT;
    return out;
}

}  // namespace

KernelValues eval_kernels(const KernelContext& ctx, double r)
{
    if (!(r > 0.0)) throw std::invalid_argument("eval_kernels: r must be positive");
    const double ks = ctx.ks(), kp = ctx.kp();
    KernelValues kv;
    if (ks * r < series_switch) {
        kv.h0s = f3_series(ks, ctx.coeffs.M, r);
        kv.h0p = f3_series(kp, ctx.coeffs.M, r);
        kv.h1s = hankel1(1, ks * r);
        kv.f1_r = f1_series(ctx.coeffs, r) / r;
        kv.f2_r2 = f2_series(ctx.coeffs, r) / (r * r);
        return kv;
    }
    Complex h1p;
    hankel01(ks * r, kv.h0s, kv.h1s);
    hankel01(kp * r, kv.h0p, h1p);
    const Complex h2s = 2.0 * kv.h1s / (ks * r) - kv.h0s;
    const Complex h2p = 2.0 * h1p / (kp * r) - kv.h0p;
    kv.f1_r = (ks * kv.h1s - kp * h1p) / r;
    kv.f2_r2 = (ks * ks * h2s - kp * kp * h2p) / (r * r);
    return kv;
}

CMat22 fundamental_tensor(const KernelContext& ctx, const Vec2& x, const Vec2& y)
{
    const Vec2 rv = x - y;
    const double r = rv.norm();
    const KernelValues kv = eval_kernels(ctx, r);
    const double rw2 = ctx.medium.rho * ctx.medium.omega * ctx.medium.omega;
    CMat22 E = (iu / (4.0 * ctx.medium.mu) * kv.h0s) * CMat22::Identity();
    E -= (iu / (4.0 * rw2) * kv.f1_r) * CMat22::Identity();
    E += (iu / (4.0 * rw2) * kv.f2_r2) * (rv * rv.transpose());
    return E;
}

CMat22 traction_y_E(const KernelContext& ctx, const Vec2& x, const Vec2& y, const Vec2& n_y,
                    const Vec2& t_y)
{
    const double mu = ctx.medium.mu;
    const double rw2 = ctx.medium.rho * ctx.medium.omega * ctx.medium.omega;
    const double ks = ctx.ks(), kp = ctx.kp();
    const Vec2 rv = x - y;
    const double r = rv.norm();
    const Vec2 rhat = rv / r;

    Complex h0s, h1s, h0p, h1p;
    hankel01(ks * r, h0s, h1s);
    hankel01(kp * r, h0p, h1p);
    const Complex h2s = 2.0 * h1s / (ks * r) - h0s;
    const Complex h2p = 2.0 * h1p / (kp * r) - h0p;
    const Complex f1 = ks * h1s - kp * h1p;
    const Complex f2 = ks * ks * h2s - kp * kp * h2p;

    // E = a(r) I + b(r) rr^T
    const Complex a = iu / (4.0 * mu) * h0s - iu / (4.0 * rw2) * f1 / r;
    const Complex b = iu / (4.0 * rw2) * f2 / (r * r);
    // d/dx H_n(kr) chains: H0' = -H1, H1' = H0 - H1/x, H2' = H1 - 2 H2/x.
    const Complex df1 = ks * ks * (h0s - h1s / (ks * r)) - kp * kp * (h0p - h1p / (kp * r));
    const Complex df2 =
        ks * ks * ks * (h1s - 2.0 * h2s / (ks * r)) - kp * kp * kp * (h1p - 2.0 * h2p / (kp * r));
    const Complex da = iu / (4.0 * mu) * (-ks * h1s) - iu / (4.0 * rw2) * (df1 / r - f1 / (r * r));
    const Complex db = iu / (4.0 * rw2) * (df2 / (r * r) - 2.0 * f2 / (r * r * r));

    const Eigen::Matrix2d N = rot90();
    // -n_y grad_y^T R, with grad_y R = (i/4)(F1/r) r
    CMat22 out = (-iu / 4.0 * f1 / r) * (n_y.cast<Complex>() * rv.transpose().cast<Complex>());
    // (d gamma_ks / d n_y) I
    out += (iu * ks / 4.0 * h1s * n_y.dot(rhat)) * CMat22::Identity();
    // N (t_y . grad_y)[2 mu E - gamma_ks I]; the y-gradient flips the sign of
    // the radial derivative.
    const Complex atil_p = 2.0 * mu * da + iu * ks / 4.0 * h1s;  // d/dr of 2 mu a - gamma_ks
    const double tdr = t_y.dot(rhat);
    CMat22 dE = (atil_p * tdr) * CMat22::Identity();
    dE += (2.0 * mu * db * tdr) * (rv * rv.transpose());
    dE += (2.0 * mu * b) * (t_y.cast<Complex>() * rv.transpose().cast<Complex>() +
                            rv.cast<Complex>() * t_y.transpose().cast<Complex>());
    out -= N * dE;
    return out;
}

PairBlocks pair_blocks(const KernelContext& ctx, const BoundaryMesh& mesh, int a, int b, int k1,
                       int k2)
{
    if (a == b) {
        SameElementTables se(ctx);
        return same_element_blocks(ctx, se, frame_of(mesh, a), k1, k2);
    }
    const PairMoments pm = integrate_pair(ctx, mesh, a, b);
    PairGeometry g{frame_of(mesh, a), frame_of(mesh, b)};
    return {combine_V(ctx, pm, g, k1), combine_K(ctx, pm, g, k1, k2), combine_Kp(ctx, pm, g, k1),
            combine_W(ctx, pm, g, k1, k2)};
}

Operators assemble_operators(const KernelContext& ctx, const BoundaryMesh& mesh, int threads)
{
    const int n = mesh.n_nodes();
    Operators ops{BlockMatrix(n), BlockMatrix(n), BlockMatrix(n), BlockMatrix(n)};
    SameElementTables se(ctx);

    // Each worker owns a contiguous range of test rows (= nodes) and computes
    // every element pair its rows need; pairs shared across ranges are
    // recomputed by each owner, so workers never write the same row.
    auto run_rows = [&](int row_lo, int row_hi) {
        std::vector<char> owned(n, 0);
        for (int i = row_lo; i < row_hi; ++i) owned[i] = 1;
        std::vector<char> seg_done(n, 0);
        for (int i = row_lo; i < row_hi; ++i) {
            for (int a : {mesh.prev[i], i}) {
                if (seg_done[a]) continue;
                seg_done[a] = 1;
                const int row_minus = a;             // k1 = -1 test row
                const int row_plus = mesh.next[a];   // k1 = +1 test row
                for (int b = 0; b < n; ++b) {
                    if (a == b) {
                        // K and W also need k2 = -1 blocks (column b itself).
                        for (int idx = 0; idx < 2; ++idx) {
                            const int k1 = idx == 0 ? 1 : -1;
                            const int row = idx == 0 ? row_plus : row_minus;
                            if (!owned[row]) continue;
                            PairBlocks p1 = same_element_blocks(ctx, se, frame_of(mesh, a), k1, 1);
                            PairBlocks p2 =
                                same_element_blocks(ctx, se, frame_of(mesh, a), k1, -1);
                            ops.V.add_block(row, b, p1.V);
                            ops.Kp.add_block(row, b, p1.Kp);
                            ops.K.add_block(row, mesh.next[b], p1.K);
                            ops.W.add_block(row, mesh.next[b], p1.W);
                            ops.K.add_block(row, b, p2.K);
                            ops.W.add_block(row, b, p2.W);
                        }
                        continue;
                    }
                    const PairMoments pm = integrate_pair(ctx, mesh, a, b);
                    PairGeometry g{frame_of(mesh, a), frame_of(mesh, b)};
                    for (int idx = 0; idx < 2; ++idx) {
                        const int k1 = idx == 0 ? 1 : -1;
                        const int row = idx == 0 ? row_plus : row_minus;
                        if (!owned[row]) continue;
                        const CMat22 Vb = combine_V(ctx, pm, g, k1);
                        const CMat22 Kpb = combine_Kp(ctx, pm, g, k1);
                        ops.V.add_block(row, b, Vb);
                        ops.Kp.add_block(row, b, Kpb);
                        ops.K.add_block(row, mesh.next[b], combine_K(ctx, pm, g, k1, 1));
                        ops.W.add_block(row, mesh.next[b], combine_W(ctx, pm, g, k1, 1));
                        ops.K.add_block(row, b, combine_K(ctx, pm, g, k1, -1));
                        ops.W.add_block(row, b, combine_W(ctx, pm, g, k1, -1));
                    }
                }
            }
        }
    };

    int nthreads = threads > 0 ? threads : static_cast<int>(std::thread::hardware_concurrency());
    if (nthreads < 1) nthreads = 1;
    nthreads = std::min(nthreads, n);
    if (nthreads == 1) {
        run_rows(0, n);
    } else {
        std::vector<std::thread> pool;
        const int chunk = (n + nthreads - 1) / nthreads;
        for (int t = 0; t < nthreads; ++t) {
            const int lo = t * chunk;
            const int hi = std::min(n, lo + chunk);
            if (lo < hi) pool.emplace_back(run_rows, lo, hi);
        }
        for (auto& th : pool) th.join();
    }
    return ops;
}

Eigen::MatrixXcd assemble_mass_hat(const BoundaryMesh& mesh)
{
    const int n = mesh.n_nodes();
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(2 * n, 2 * n);
    for (int i = 0; i < n; ++i) {
        const double hp = mesh.seg_len[mesh.prev[i]];
        const double hc = mesh.seg_len[i];
        m.block<2, 2>(2 * i, 2 * i) = (hp + hc) / 3.0 * CMat22::Identity();
        m.block<2, 2>(2 * i, 2 * mesh.prev[i]) += hp / 6.0 * CMat22::Identity();
        m.block<2, 2>(2 * i, 2 * mesh.next[i]) += hc / 6.0 * CMat22::Identity();
    }
    return m;
}

Eigen::MatrixXcd assemble_mass_mixed(const BoundaryMesh& mesh)
{
    const int n = mesh.n_nodes();
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(2 * n, 2 * n);
    for (int i = 0; i < n; ++i)
        for (int j : {i, mesh.prev[i]})
            m.block<2, 2>(2 * i, 2 * j) += mesh.seg_len[j] / 2.0 * CMat22::Identity();
    return m;
}

}  // namespace ebem
