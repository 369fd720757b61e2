#include "ebem/quadrature.hpp"

#include <cmath>
#include <cstdio>
#include <map>
#include <mutex>
#include <stdexcept>

#include <quadmath.h>

namespace ebem {

namespace {

// Legendre P_n and P_n' at x, quad precision.
void legendre_q(int n, __float128 x, __float128& p, __float128& dp)
{
    __float128 p0 = 1.0Q, p1 = x;
    if (n == 0) { p = p0; dp = 0.0Q; return; }
    for (int k = 2; k <= n; ++k) {
        __float128 pk = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
        p0 = p1;
        p1 = pk;
    }
    p = p1;
    dp = n * (x * p1 - p0) / (x * x - 1.0Q);
}

struct GaussRuleQ {
    int n;
    std::vector<__float128> nodes, weights;
};

GaussRuleQ gauss_legendre_q(int n)
{
    GaussRuleQ r;
    r.n = n;
    r.nodes.assign(n, 0.0Q);
    r.weights.assign(n, 0.0Q);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        __float128 x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        __float128 p, dp;
        for (int it = 0; it < 30; ++it) {
            legendre_q(n, x, p, dp);
            __float128 dx = p / dp;
            x -= dx;
            if (fabsq(dx) < 1e-33Q) break;
        }
        legendre_q(n, x, p, dp);
        __float128 w = 2.0Q / ((1.0Q - x * x) * dp * dp);
        r.nodes[i] = -x;  // ascending order
        r.weights[i] = w;
        r.nodes[n - 1 - i] = x;
        r.weights[n - 1 - i] = w;
    }
    if (n % 2 == 1) r.nodes[n / 2] = 0.0Q;
    return r;
}

// int_0^2 u^k du  and  int_0^2 u^k ln u du
__float128 poly_int(int k) { return powq(2.0Q, k + 1) / (k + 1); }

__float128 polylog_int(int k)
{
    const __float128 ln2 = 0.693147180559945309417232121458176568Q;
    __float128 kk = k + 1;
    return powq(2.0Q, k + 1) * (ln2 / kk - 1.0Q / (kk * kk));
}

}  // namespace

const GaussRule& gauss_legendre(int n)
{
    if (n < 1 || n > 64) throw std::invalid_argument("gauss_legendre: order must be in [1,64]");
    static std::map<int, GaussRule> cache;
    static std::mutex mtx;
    std::lock_guard<std::mutex> lock(mtx);
    auto it = cache.find(n);
    if (it != cache.end()) return it->second;
    GaussRuleQ q = gauss_legendre_q(n);
    GaussRule r;
    r.n = n;
    for (int i = 0; i < n; ++i) {
        r.nodes.push_back((double)q.nodes[i]);
        r.weights.push_back((double)q.weights[i]);
    }
    return cache.emplace(n, std::move(r)).first->second;
}

namespace detail {

__float128 moment_closed_q(int m, int kind)
{
    if (m < 0) throw std::invalid_argument("moment_closed_q: m >= 0");
    switch (kind) {
        // Each family reduces to 1D integrals in u = x1 - x2 over [0,2]
        // against the overlap weight; the xi factors reduce by symmetry.
        case 1: return 2.0Q * poly_int(2 * m + 2) - poly_int(2 * m + 3);
        case 2: return 2.0Q * polylog_int(2 * m + 2) - polylog_int(2 * m + 3);
        case 3: return 2.0Q * (2.0Q * poly_int(2 * m) - poly_int(2 * m + 1));
        case 4: return 2.0Q * (2.0Q * polylog_int(2 * m) - polylog_int(2 * m + 1));
        case 5:
            return (8.0Q * poly_int(2 * m) - 12.0Q * poly_int(2 * m + 1)
                    + 2.0Q * poly_int(2 * m + 3)) / 6.0Q;
        case 6:
            return (8.0Q * polylog_int(2 * m) - 12.0Q * polylog_int(2 * m + 1)
                    + 2.0Q * polylog_int(2 * m + 3)) / 6.0Q;
        default: throw std::invalid_argument("moment_closed_q: kind must be 1..6");
    }
}

__float128 moment_oracle_q(int m, int kind)
{
    if (m < 0 || m > 24) throw std::invalid_argument("moment_oracle_q: m out of range");
    if (kind < 1 || kind > 6) throw std::invalid_argument("moment_oracle_q: kind must be 1..6");
    static const GaussRuleQ outer = gauss_legendre_q(24);
    static const GaussRuleQ inner = gauss_legendre_q(4);

    const bool with_log = (kind % 2 == 0);
    const int base = (kind <= 2) ? 1 : 0;  // extra power of (x1-x2)
    const int p = 2 * m + base;

    __float128 total = 0.0Q;
    const int levels = 110;
    // sign = +1: upper triangle x1 = x2 + u; sign = -1: lower, x1 = x2 - u.
    for (int sign = -1; sign <= 1; sign += 2) {
        __float128 hi = 2.0Q;
        for (int lev = 0; lev <= levels; ++lev) {
            __float128 lo = (lev == levels) ? 0.0Q : hi / 2.0Q;
            __float128 mid = (hi + lo) / 2.0Q, rad = (hi - lo) / 2.0Q;
            for (int a = 0; a < outer.n; ++a) {
                const __float128 u = mid + rad * outer.nodes[a];
                const __float128 du = (__float128)sign * u;  // x1 - x2
                __float128 powu = 1.0Q;
                for (int k = 0; k < p; ++k) powu *= du;
                if (with_log) powu *= logq(u);
                // x2 range so both points stay in [-1,1]
                const __float128 x2lo = (sign > 0) ? -1.0Q : u - 1.0Q;
                const __float128 x2hi = (sign > 0) ? 1.0Q - u : 1.0Q;
                const __float128 imid = (x2lo + x2hi) / 2.0Q, irad = (x2hi - x2lo) / 2.0Q;
                __float128 innersum = 0.0Q;
                for (int b = 0; b < inner.n; ++b) {
                    const __float128 x2 = imid + irad * inner.nodes[b];
                    const __float128 x1 = x2 + (__float128)sign * u;
                    __float128 f = 1.0Q;
                    if (kind <= 2) f = x1;
                    else if (kind >= 5) f = x1 * x2;
                    innersum += inner.weights[b] * f;
                }
                total += outer.weights[a] * rad * powu * irad * innersum;
            }
            hi = lo;
            if (hi == 0.0Q) break;
        }
    }
    return total;
}

}  // namespace detail

const SingularTable& singular_table(int M)
{
    if (M < 0) throw std::invalid_argument("singular_table: require M >= 0");
    static std::map<int, SingularTable> cache;
    static std::mutex mtx;
    std::lock_guard<std::mutex> lock(mtx);
    auto it = cache.find(M);
    if (it != cache.end()) return it->second;

    SingularTable t;
    t.M = M;
    std::vector<double>* cols[6] = {&t.I1, &t.I2, &t.I3, &t.I4, &t.I5, &t.I6};
    for (int m = 0; m <= M + 1; ++m) {
        for (int kind = 1; kind <= 6; ++kind) {
            __float128 closed = detail::moment_closed_q(m, kind);
            double value = (double)closed;
            if (m <= 24) {
                __float128 brute = detail::moment_oracle_q(m, kind);
                if (fabsq(closed - brute) > 1e-10Q) {
                    std::fprintf(stderr,
                                 "singular_table: closed form I%d[%d] disagrees with "
                                 "quadrature (%.17g vs %.17g); using quadrature value\n",
                                 kind, m, value, (double)brute);
                    value = (double)brute;
                }
            }
            cols[kind - 1]->push_back(value);
        }
    }
    cache.emplace(M, std::move(t));
    return cache.at(M);
}

double oracle_moment(int m, int kind)
{
    return (double)detail::moment_oracle_q(m, kind);
}

GaussRule graded_rule(int order, int depth, int toward_endpoint)
{
    if (depth < 0 || depth > 60) throw std::invalid_argument("graded_rule: bad depth");
    if (toward_endpoint != 1 && toward_endpoint != -1)
        throw std::invalid_argument("graded_rule: endpoint must be +1 or -1");
    const GaussRule& base = gauss_legendre(order);
    GaussRule r;
    r.n = 0;
    // Cells [−1,0], [0,1/2], ..., shrinking dyadically toward +1 (mirrored for −1).
    double lo = -1.0;
    double len = 1.0;
    for (int lev = 0; lev <= depth; ++lev) {
        double hi = (lev == depth) ? 1.0 : lo + len;
        double mid = (lo + hi) / 2.0, rad = (hi - lo) / 2.0;
        for (int k = 0; k < base.n; ++k) {
            double x = mid + rad * base.nodes[k];
            double w = rad * base.weights[k];
            r.nodes.push_back(toward_endpoint > 0 ? x : -x);
            r.weights.push_back(w);
            ++r.n;
        }
        lo = hi;
        len /= 2.0;
    }
    return r;
}

}  // namespace ebem
