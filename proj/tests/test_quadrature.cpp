#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "ebem/quadrature.hpp"

using namespace ebem;

TEST_CASE("gauss rules integrate polynomials exactly")
{
    for (int n : {2, 4, 8, 16, 32, 64}) {
        const GaussRule& r = gauss_legendre(n);
        REQUIRE(r.n == n);
        double wsum = 0.0;
        for (int k = 0; k < n; ++k) wsum += r.weights[k];
        CHECK(wsum == doctest::Approx(2.0).epsilon(1e-15));
        // highest exactly integrated monomial: degree 2n-1 (odd -> 0), check 2n-2
        const int d = 2 * n - 2;
        double s = 0.0;
        for (int k = 0; k < n; ++k) s += r.weights[k] * std::pow(r.nodes[k], d);
        CHECK(s == doctest::Approx(2.0 / (d + 1)).epsilon(1e-13));
    }
    CHECK_THROWS(gauss_legendre(0));
    CHECK_THROWS(gauss_legendre(65));
}

TEST_CASE("moment table anchors")
{
    const SingularTable& t = singular_table(20);
    CHECK(std::abs(t.I3[0] - 4.0) <= 1e-13);
    CHECK(std::abs(t.I4[0] - (4.0 * std::log(2.0) - 6.0)) <= 1e-13);
    CHECK(std::abs(t.I5[0]) <= 1e-13);
}

TEST_CASE("moment table matches the graded-quadrature oracle")
{
    const SingularTable& t = singular_table(20);
    const std::vector<double>* cols[6] = {&t.I1, &t.I2, &t.I3, &t.I4, &t.I5, &t.I6};
    for (int kind = 1; kind <= 6; ++kind)
        for (int m = 0; m <= 20; ++m) {
            CAPTURE(kind);
            CAPTURE(m);
            CHECK(std::abs((*cols[kind - 1])[m] - oracle_moment(m, kind)) <= 1e-10);
        }
}

TEST_CASE("graded rule reproduces a log-singular integral")
{
    // int_{-1}^{1} ln|1 - x| dx = 2 ln 2 - 2
    const double exact = 2.0 * std::log(2.0) - 2.0;
    double prev_err = 1e30;
    for (int depth : {4, 12, 24}) {
        const GaussRule r = graded_rule(12, depth, +1);
        double s = 0.0;
        for (int k = 0; k < r.n; ++k) s += r.weights[k] * std::log(std::abs(1.0 - r.nodes[k]));
        const double err = std::abs(s - exact);
        CHECK(err < prev_err);
        prev_err = err;
    }
    CHECK(prev_err <= 1e-9);
}

TEST_CASE("graded rule mirrors for the left endpoint")
{
    const GaussRule a = graded_rule(8, 6, +1);
    const GaussRule b = graded_rule(8, 6, -1);
    REQUIRE(a.n == b.n);
    double sa = 0.0, sb = 0.0;
    for (int k = 0; k < a.n; ++k) {
        sa += a.weights[k] * a.nodes[k] * a.nodes[k];
        sb += b.weights[k] * b.nodes[k] * b.nodes[k];
    }
    CHECK(sa == doctest::Approx(sb).epsilon(1e-13));
    CHECK(sa == doctest::Approx(2.0 / 3.0).epsilon(1e-13));
    CHECK_THROWS(graded_rule(8, 6, 0));
    CHECK_THROWS(graded_rule(8, -1, 1));
}

TEST_CASE("table request validation")
{
    CHECK_THROWS(singular_table(-1));
}
