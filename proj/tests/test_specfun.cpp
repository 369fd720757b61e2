#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "ebem/specfun.hpp"

using namespace ebem;

namespace {
const ElasticMedium ref_medium(2.0, 1.0, 1.0, 1.0);  // ks = 1, kp = 0.5
}

TEST_CASE("bessel values at x = 1")
{
    auto [j0, y0] = bessel_jy(0, 1.0);
    CHECK(j0 == doctest::Approx(0.765197687).epsilon(1e-9));
    CHECK(y0 == doctest::Approx(0.088256964).epsilon(1e-8));
    auto [j1, y1] = bessel_jy(1, 1.0);
    CHECK(j1 == doctest::Approx(0.440050586).epsilon(1e-9));
    CHECK(y1 == doctest::Approx(-0.781212821).epsilon(1e-9));
}

TEST_CASE("wronskian across the argument range")
{
    for (double x : {0.1, 1.0, 10.0, 50.0}) {
        auto [j0, y0] = bessel_jy(0, x);
        auto [j1, y1] = bessel_jy(1, x);
        // J0' = -J1, Y0' = -Y1: W = J0 Y0' - J0' Y0 = J1 Y0 - J0 Y1 = -2/(pi x)
        const double w = j0 * y1 - j1 * y0;
        CHECK(std::abs(w + 2.0 / (M_PI * x)) <= 1e-12 * 2.0 / (M_PI * x));
    }
}

TEST_CASE("hankel recurrence H2 = (2/x) H1 - H0")
{
    for (double x = 0.1; x <= 100.0; x *= 1.7) {
        const Complex lhs = hankel1(2, x);
        const Complex rhs = (2.0 / x) * hankel1(1, x) - hankel1(0, x);
        CHECK(std::abs(lhs - rhs) <= 1e-12 * std::abs(lhs));
    }
}

TEST_CASE("hankel domain errors")
{
    CHECK_THROWS(hankel1(0, 0.0));
    CHECK_THROWS(hankel1(0, -1.0));
    CHECK_THROWS(bessel_jy(3, 1.0));
}

TEST_CASE("coefficient closed-form anchors")
{
    const SeriesCoefficients c = series_coefficients(ref_medium, 20);
    // C6[0] = 2i/pi for any medium
    CHECK(std::abs(c.C6[0] - iu * (2.0 / M_PI)) <= 1e-15);
    // C2[0] = i (ks^2 - kp^2)/pi
    CHECK(std::abs(c.C2[0] - iu * ((1.0 - 0.25) / M_PI)) <= 1e-12);
    // C2, C4, C6 purely imaginary
    for (int m = 0; m <= 20; ++m) {
        CHECK(c.C2[m].real() == 0.0);
        CHECK(c.C4[m].real() == 0.0);
        CHECK(c.C6[m].real() == 0.0);
    }
    CHECK_THROWS(series_coefficients(ref_medium, -1));
}

TEST_CASE("series reconstruct the Hankel combinations at r = pi")
{
    const double ks = ref_medium.ks(), kp = ref_medium.kp();
    const double r = M_PI / ks;
    const SeriesCoefficients c = series_coefficients(ref_medium, 20);

    const Complex f1 = f1_series(c, r);
    const Complex f1d = f1_direct(ks, kp, r);
    CHECK(std::abs(f1 - f1d) <= 1e-10 * std::abs(f1d));

    const Complex f2 = f2_series(c, r);
    const Complex f2d = f2_direct(ks, kp, r);
    CHECK(std::abs(f2 - f2d) <= 1e-10 * std::abs(f2d));

    const Complex f3 = f3_series(ks, 20, r);
    const Complex f3d = f3_direct(ks, r);
    CHECK(std::abs(f3 - f3d) <= 1e-10 * std::abs(f3d));
}

TEST_CASE("series error decreases in M and is already small at M = 15")
{
    const double ks = ref_medium.ks(), kp = ref_medium.kp();
    const double r = M_PI / ks;
    const Complex f1d = f1_direct(ks, kp, r);
    const Complex f2d = f2_direct(ks, kp, r);
    const Complex f3d = f3_direct(ks, r);

    double prev = 1e30;
    for (int M = 5; M <= 20; M += 5) {
        const SeriesCoefficients c = series_coefficients(ref_medium, M);
        const double e = std::abs(f1_series(c, r) - f1d) / std::abs(f1d) +
                         std::abs(f2_series(c, r) - f2d) / std::abs(f2d) +
                         std::abs(f3_series(ks, M, r) - f3d) / std::abs(f3d);
        CHECK(e <= prev + 1e-14);  // monotone within floating-point noise
        if (M == 15) CHECK(e <= 3e-8);
        prev = e;
    }
}

TEST_CASE("f1 series vanishes as r -> 0")
{
    const SeriesCoefficients c = series_coefficients(ref_medium, 20);
    CHECK(std::abs(f1_series(c, 1e-12)) < 1e-10);
}

TEST_CASE("f2 direct cancels for equal wavenumbers")
{
    CHECK(std::abs(f2_direct(1.0, 1.0, 2.0)) == 0.0);
}

TEST_CASE("f1 envelope decays like 1/sqrt(r) at large distance")
{
    // compare oscillation envelopes over a full wavelength, not point values
    auto envelope = [](double r0) {
        double m = 0.0;
        for (double r = r0; r <= r0 + 4.0 * M_PI; r += 0.05)
            m = std::max(m, std::abs(f1_direct(1.0, 0.5, r)));
        return m;
    };
    const double a = envelope(100.0), b = envelope(400.0);
    CHECK(b / a > 0.3);   // slower than 1/r
    CHECK(b / a < 0.7);   // faster than constant; 1/sqrt(4) = 0.5
}

TEST_CASE("f_direct dispatch")
{
    CHECK(std::abs(f_direct(FKind::F3, 1.0, 0.5, 1.0) - hankel1(0, 1.0)) == 0.0);
    CHECK(std::abs(f_direct(FKind::F1, 1.0, 0.5, 2.0) - f1_direct(1.0, 0.5, 2.0)) == 0.0);
    CHECK_THROWS(f_direct(FKind::F1, 1.0, 0.5, 0.0));
}
