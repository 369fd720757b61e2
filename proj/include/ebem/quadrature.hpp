#ifndef EBEM_QUADRATURE_HPP
#define EBEM_QUADRATURE_HPP

#include <vector>

namespace ebem {

// Gauss-Legendre rule on [-1,1].
struct GaussRule {
    int n = 0;
    std::vector<double> nodes;
    std::vector<double> weights;
};

// Cached standard rule, 1 <= n <= 64. Nodes from Newton iteration on P_n.
const GaussRule& gauss_legendre(int n);

// Moment integrals over [-1,1]^2, m >= 0:
//   I1[m] = int (x1-x2)^{2m+1} x1            I2[m] = same with ln|x1-x2|
//   I3[m] = int (x1-x2)^{2m}                 I4[m] = same with ln|x1-x2|
//   I5[m] = int (x1-x2)^{2m} x1 x2           I6[m] = same with ln|x1-x2|
// Arrays run to index M+1 (the same-element formulas need I3, I4 at m+1).
struct SingularTable {
    int M = 0;
    std::vector<double> I1, I2, I3, I4, I5, I6;
};

const SingularTable& singular_table(int M);

// Brute-force evaluation of the defining double integral: the square is split
// along the diagonal x1 = x2 and integrated with composite Gauss graded
// dyadically toward the singular line. Independent of the closed forms.
double oracle_moment(int m, int kind);

namespace detail {

// Quad-precision internals, used by validation suites.
__float128 moment_closed_q(int m, int kind);
__float128 moment_oracle_q(int m, int kind);

}  // namespace detail

// 1D composite rule on [-1,1] graded dyadically toward endpoint +1 or -1
// (`depth` bisections, `order`-point Gauss per cell). Used for element pairs
// sharing a vertex, where the kernel is log-singular at one corner.
GaussRule graded_rule(int order, int depth, int toward_endpoint);

}  // namespace ebem

#endif
