#ifndef EBEM_SPECFUN_HPP
#define EBEM_SPECFUN_HPP

#include <utility>
#include <vector>

#include "ebem/core.hpp"

namespace ebem {

// Euler-Mascheroni constant.
inline constexpr double euler_gamma = 0.57721566490153286;

// Bessel functions of the first and second kind, orders 0..2, x > 0.
// Ascending series below the crossover, Hankel's P/Q asymptotics above;
// both summed in extended precision.
std::pair<double, double> bessel_jy(int n, double x);

// First-kind Hankel function H_n^{(1)}(x) = J_n(x) + i Y_n(x).
Complex hankel1(int n, double x);

// H_0^{(1)} and H_1^{(1)} at the same argument, sharing the series work.
void hankel01(double x, Complex& h0, Complex& h1);

// Coefficients of the small-r expansions
//   F1(r) = ks H1(ks r) - kp H1(kp r)      = sum_m (C1_m + C2_m ln r) r^{2m+1}
//   F2(r) = ks^2 H2(ks r) - kp^2 H2(kp r)  = sum_m (C3_m + C4_m ln r) r^{2m+2} - i(ks^2-kp^2)/pi
//   H0(k r)                                = sum_m [(C5_m + C6_m ln(k/2)) k^{2m}
//                                                   + C6_m k^{2m} ln r] r^{2m}
// derived from the ascending series of J_n and Y_n.
struct SeriesCoefficients {
    int M = 0;
    double kp = 0.0;
    double ks = 0.0;
    std::vector<Complex> C1, C2, C3, C4, C5, C6;
};

SeriesCoefficients series_coefficients(const ElasticMedium& medium, int M);

// Truncated series evaluations, valid for r within roughly one shear wavelength.
Complex f1_series(const SeriesCoefficients& c, double r);
Complex f2_series(const SeriesCoefficients& c, double r);
Complex f3_series(double k, int M, double r);

// Direct Hankel-combination evaluations (the reference path).
Complex f1_direct(double ks, double kp, double r);
Complex f2_direct(double ks, double kp, double r);
Complex f3_direct(double k, double r);

enum class FKind { F1, F2, F3 };

// kind F3 uses ks as the wavenumber.
Complex f_direct(FKind kind, double ks, double kp, double r);

}  // namespace ebem

#endif
