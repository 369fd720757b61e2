#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "ebem/core.hpp"

using namespace ebem;

TEST_CASE("wavenumbers for the reference medium")
{
    ElasticMedium m(2.0, 1.0, 1.0, 1.0);
    auto [kp, ks] = medium_wavenumbers(m);
    CHECK(kp == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(ks == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("wavenumbers scale linearly in omega")
{
    const double w = 10.0 * M_PI;
    ElasticMedium m(2.0, 1.0, 1.0, w);
    auto [kp, ks] = medium_wavenumbers(m);
    CHECK(kp == doctest::Approx(5.0 * M_PI).epsilon(1e-15));
    CHECK(ks == doctest::Approx(10.0 * M_PI).epsilon(1e-15));
}

TEST_CASE("nearly incompressible medium")
{
    ElasticMedium m(100.0, 1.0, 1.0, 3.0);
    auto [kp, ks] = medium_wavenumbers(m);
    CHECK(kp == doctest::Approx(3.0 / std::sqrt(102.0)).epsilon(1e-15));
    CHECK(ks == doctest::Approx(3.0).epsilon(1e-15));
}

TEST_CASE("kp < ks for every valid medium")
{
    for (double lam : {-0.5, 0.0, 2.0, 100.0})
        for (double mu : {0.1, 1.0, 10.0})
            for (double om : {0.5, 3.0, 40.0}) {
                if (!(lam + mu > 0.0)) continue;
                ElasticMedium m(lam, mu, 1.0, om);
                CHECK(m.kp() < m.ks());
                CHECK(m.kp() > 0.0);
            }
}

TEST_CASE("invalid media are rejected")
{
    CHECK_THROWS_AS(ElasticMedium(2.0, 0.0, 1.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(ElasticMedium(-2.0, 1.0, 1.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(ElasticMedium(2.0, 1.0, -1.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(ElasticMedium(2.0, 1.0, 1.0, 0.0), std::invalid_argument);
}

TEST_CASE("block matrix round trip")
{
    BlockMatrix A(5);
    CMat22 b;
    b << Complex(1.0, 2.0), Complex(-3.0, 0.5), Complex(0.0, -1.0), Complex(4.0, 4.0);
    A.set_block(3, 1, b);
    CHECK((A.block(3, 1) - b).cwiseAbs().maxCoeff() == 0.0);
    // block (i,j) occupies rows 2i..2i+1, columns 2j..2j+1
    CHECK(A.matrix()(6, 2) == Complex(1.0, 2.0));
    CHECK(A.matrix()(7, 3) == Complex(4.0, 4.0));
    A.add_block(3, 1, b);
    CHECK((A.block(3, 1) - 2.0 * b).cwiseAbs().maxCoeff() == 0.0);
    CHECK(A.block(0, 0).cwiseAbs().maxCoeff() == 0.0);
    CHECK(A.all_finite());
}

TEST_CASE("normal convention n = -N t")
{
    // CCW tangent (1,0) on the bottom of a CCW loop has outward normal (0,-1)
    Vec2 t(1.0, 0.0);
    Vec2 n = -rot90() * t;
    CHECK(n.x() == doctest::Approx(0.0));
    CHECK(n.y() == doctest::Approx(-1.0));
}
