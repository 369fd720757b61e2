#include "ebem/specfun.hpp"

#include <cmath>

namespace ebem {

namespace {

constexpr long double pi_l = 3.14159265358979323846264338328L;
constexpr long double euler_l = 0.577215664901532860606512090082L;

// x above this uses the asymptotic expansion; below, the ascending series.
constexpr double series_cut = 15.0;

// Ascending series for J_n and Y_n, n in {0,1,2}, summed in long double.
void jy_series(int n, double xd, long double& J, long double& Y)
{
    const long double x = xd;
    const long double half = x / 2.0L;
    const long double t = half * half;
    const long double lnh = std::log(half);

    // J_n and the psi-weighted companion sum.
    long double term = 1.0L;  // (x/2)^n / (0! n!) without the (x/2)^n prefactor pulled out below
    for (int k = 1; k <= n; ++k) term /= (long double)k;
    long double psi1 = -euler_l;        // psi(1)
    long double psi2 = -euler_l;        // psi(n+1)
    for (int k = 1; k <= n; ++k) psi2 += 1.0L / (long double)k;

    long double sumJ = 0.0L, sumP = 0.0L;
    long double c = term;
    long double p1 = psi1, p2 = psi2;
    for (int m = 0; m < 400; ++m) {
        sumJ += c;
        sumP += c * (p1 + p2);
        long double next = -c * t / ((long double)(m + 1) * (long double)(m + 1 + n));
        p1 += 1.0L / (long double)(m + 1);
        p2 += 1.0L / (long double)(m + 1 + n);
        if (std::abs(next) < 1e-24L * (std::abs(sumJ) + 1e-30L) && m > 2) { c = next; break; }
        c = next;
    }
    long double pref = 1.0L;
    for (int k = 0; k < n; ++k) pref *= half;
    J = pref * sumJ;

    // Finite part of Y_n.
    long double fin = 0.0L;
    if (n >= 1) {
        long double fact = 1.0L;  // (n-1-m)!/m! running value
        for (int k = 1; k <= n - 1; ++k) fact *= (long double)k;
        long double pw = 1.0L;
        for (int k = 0; k < n; ++k) pw /= half;  // (x/2)^{-n}
        for (int m = 0; m <= n - 1; ++m) {
            fin += fact * pw;
            if (m < n - 1) {
                fact /= (long double)(n - 1 - m) * (long double)(m + 1);
                pw *= t;
            }
        }
    }
    Y = (2.0L / pi_l) * lnh * J - fin / pi_l - pref * sumP / pi_l;
}

// Hankel's asymptotic P/Q expansion, adaptively truncated.
void jy_asymptotic(int n, double xd, long double& J, long double& Y)
{
    const long double x = xd;
    const long double mu = 4.0L * n * n;
    long double P = 1.0L, Q = 0.0L;
    long double ak = 1.0L;  // a_k(n) / x^k
    long double prev = 1e30L;
    for (int k = 1; k < 60; ++k) {
        long double num = mu - (long double)(2 * k - 1) * (2 * k - 1);
        ak *= num / (8.0L * (long double)k * x);
        long double mag = std::abs(ak);
        if (mag > prev) break;  // optimal truncation
        prev = mag;
        switch (k % 4) {
            case 1: Q += ak; break;
            case 2: P -= ak; break;
            case 3: Q -= ak; break;
            case 0: P += ak; break;
        }
        if (mag < 1e-25L) break;
    }
    const long double chi = x - (0.5L * n + 0.25L) * pi_l;
    const long double amp = std::sqrt(2.0L / (pi_l * x));
    const long double cc = std::cos(chi), ss = std::sin(chi);
    J = amp * (P * cc - Q * ss);
    Y = amp * (P * ss + Q * cc);
}

void jy_impl(int n, double x, long double& J, long double& Y)
{
    if (x <= series_cut)
        jy_series(n, x, J, Y);
    else
        jy_asymptotic(n, x, J, Y);
}

}  // namespace

std::pair<double, double> bessel_jy(int n, double x)
{
    if (!(x > 0.0)) throw std::invalid_argument("bessel_jy: require x > 0");
    if (n < 0 || n > 2) throw std::invalid_argument("bessel_jy: order must be 0, 1 or 2");
    long double J, Y;
    jy_impl(n, x, J, Y);
    return {(double)J, (double)Y};
}

Complex hankel1(int n, double x)
{
    auto [J, Y] = bessel_jy(n, x);
    return {J, Y};
}

void hankel01(double x, Complex& h0, Complex& h1)
{
    if (!(x > 0.0)) throw std::invalid_argument("hankel01: require x > 0");
    long double J0, Y0, J1, Y1;
    if (x <= series_cut) {
        // Shared-power evaluation of the two ascending series.
        const long double half = (long double)x / 2.0L;
        const long double t = half * half;
        const long double lnh = std::log(half);
        long double c0 = 1.0L, c1 = 1.0L;
        long double p = -euler_l;                 // psi(m+1)
        long double p2 = -euler_l + 1.0L;         // psi(m+2)
        long double sJ0 = 0.0L, sP0 = 0.0L, sJ1 = 0.0L, sP1 = 0.0L;
        for (int m = 0; m < 400; ++m) {
            sJ0 += c0;
            sP0 += c0 * p;
            sJ1 += c1;
            sP1 += c1 * (p + p2);
            long double m1 = (long double)(m + 1);
            long double n0 = -c0 * t / (m1 * m1);
            long double n1 = -c1 * t / (m1 * (m1 + 1.0L));
            p += 1.0L / m1;
            p2 += 1.0L / (m1 + 1.0L);
            if (std::abs(n0) < 1e-24L * (std::abs(sJ0) + 1e-30L) && m > 2) break;
            c0 = n0;
            c1 = n1;
        }
        J0 = sJ0;
        Y0 = (2.0L / pi_l) * (lnh * sJ0 - sP0);
        J1 = half * sJ1;
        Y1 = (2.0L / pi_l) * lnh * J1 - 1.0L / (pi_l * half) - half * sP1 / pi_l;
    } else {
        jy_asymptotic(0, x, J0, Y0);
        jy_asymptotic(1, x, J1, Y1);
    }
    h0 = Complex((double)J0, (double)Y0);
    h1 = Complex((double)J1, (double)Y1);
}

SeriesCoefficients series_coefficients(const ElasticMedium& medium, int M)
{
    if (M < 0) throw std::invalid_argument("series_coefficients: require M >= 0");
    SeriesCoefficients out;
    out.M = M;
    auto [kp, ks] = medium_wavenumbers(medium);
    out.kp = kp;
    out.ks = ks;
    out.C1.resize(M + 1);
    out.C2.resize(M + 1);
    out.C3.resize(M + 1);
    out.C4.resize(M + 1);
    out.C5.resize(M + 1);
    out.C6.resize(M + 1);

    const long double lks = std::log((long double)ks / 2.0L);
    const long double lkp = std::log((long double)kp / 2.0L);

    // Running factors: with q = k^2/4,
    //   a_m(k) = (-1)^m k^{2m+2} / (2^{2m+1} m! (m+1)!) = (k^2/2) (-q)^m / (m!(m+1)!)
    //   b_m(k) = (-1)^m k^{2m+4} / (2^{2m+2} m! (m+2)!) = (k^4/4) (-q)^m / (m!(m+2)!)
    //   c_m    = (-1)^m / (2^{2m} m! m!)
    const long double qs = (long double)ks * ks / 4.0L;
    const long double qp = (long double)kp * kp / 4.0L;
    long double as = (long double)ks * ks / 2.0L;           // a_m(ks)
    long double ap = (long double)kp * kp / 2.0L;
    long double bs = (long double)ks * ks * ks * ks / 8.0L; // b_m(ks), m = 0
    long double bp = (long double)kp * kp * kp * kp / 8.0L;
    long double cm = 1.0L;
    long double harm = 0.0L;  // sum_{l=1}^m 1/l

    for (int m = 0; m <= M; ++m) {
        const long double psi_m1 = -euler_l + harm;                                  // psi(m+1)
        const long double psi_m2 = psi_m1 + 1.0L / (long double)(m + 1);             // psi(m+2)
        const long double psi_m3 = psi_m2 + 1.0L / (long double)(m + 2);             // psi(m+3)

        const long double da = as - ap;
        const long double db = bs - bp;

        out.C2[m] = Complex(0.0, (double)((2.0L / pi_l) * da));
        out.C1[m] = Complex((double)da, (double)(-(da * (psi_m1 + psi_m2)
                                                   - 2.0L * (as * lks - ap * lkp)) / pi_l));
        out.C4[m] = Complex(0.0, (double)((2.0L / pi_l) * db));
        out.C3[m] = Complex((double)db, (double)(-(db * (psi_m1 + psi_m3)
                                                   - 2.0L * (bs * lks - bp * lkp)) / pi_l));
        out.C6[m] = Complex(0.0, (double)((2.0L / pi_l) * cm));
        out.C5[m] = Complex((double)cm, (double)(-(2.0L / pi_l) * cm * psi_m1));

        const long double m1 = (long double)(m + 1);
        as *= -qs / (m1 * (m1 + 1.0L));
        ap *= -qp / (m1 * (m1 + 1.0L));
        bs *= -qs / (m1 * (m1 + 2.0L));
        bp *= -qp / (m1 * (m1 + 2.0L));
        cm *= -1.0L / (4.0L * m1 * m1);
        harm += 1.0L / m1;
    }
    return out;
}

Complex f1_series(const SeriesCoefficients& c, double r)
{
    if (!(r > 0.0)) throw std::invalid_argument("f1_series: require r > 0");
    const double lr = std::log(r);
    const double r2 = r * r;
    Complex sum = 0.0;
    double rp = r;
    for (int m = 0; m <= c.M; ++m) {
        sum += (c.C1[m] + c.C2[m] * lr) * rp;
        rp *= r2;
    }
    return sum;
}

Complex f2_series(const SeriesCoefficients& c, double r)
{
    if (!(r > 0.0)) throw std::invalid_argument("f2_series: require r > 0");
    const double lr = std::log(r);
    const double r2 = r * r;
    Complex sum = -iu * (c.ks * c.ks - c.kp * c.kp) / M_PI;
    double rp = r2;
    for (int m = 0; m <= c.M; ++m) {
        sum += (c.C3[m] + c.C4[m] * lr) * rp;
        rp *= r2;
    }
    return sum;
}

Complex f3_series(double k, int M, double r)
{
    if (!(r > 0.0)) throw std::invalid_argument("f3_series: require r > 0");
    if (M < 0) throw std::invalid_argument("f3_series: require M >= 0");
    const long double lr = std::log((long double)r);
    const long double lk = std::log((long double)k / 2.0L);
    const long double q = (long double)k * k * r * r / 4.0L;
    long double harm = 0.0L;
    long double re = 0.0L, im = 0.0L;
    long double pw = 1.0L;   // (-1)^m (k r / 2)^{2m} / (m! m!)
    for (int m = 0; m <= M; ++m) {
        const long double psi = -euler_l + harm;
        // (C5 + C6 ln(k/2) + C6 ln r) k^{2m} r^{2m}
        re += pw;
        im += pw * (2.0L / pi_l) * (-psi + lk + lr);
        const long double m1 = (long double)(m + 1);
        pw *= -q / (m1 * m1);
        harm += 1.0L / m1;
    }
    return {(double)re, (double)im};
}

Complex f1_direct(double ks, double kp, double r)
{
    if (!(r > 0.0)) throw std::invalid_argument("f1_direct: require r > 0");
    return ks * hankel1(1, ks * r) - kp * hankel1(1, kp * r);
}

Complex f2_direct(double ks, double kp, double r)
{
    if (!(r > 0.0)) throw std::invalid_argument("f2_direct: require r > 0");
    return ks * ks * hankel1(2, ks * r) - kp * kp * hankel1(2, kp * r);
}

Complex f3_direct(double k, double r)
{
    if (!(r > 0.0)) throw std::invalid_argument("f3_direct: require r > 0");
    return hankel1(0, k * r);
}

Complex f_direct(FKind kind, double ks, double kp, double r)
{
    switch (kind) {
        case FKind::F1: return f1_direct(ks, kp, r);
        case FKind::F2: return f2_direct(ks, kp, r);
        case FKind::F3: return f3_direct(ks, r);
    }
    throw std::invalid_argument("f_direct: bad kind");
}

}  // namespace ebem
