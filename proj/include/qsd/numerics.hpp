#pragma once

#include <cmath>
#include <complex>
#include <utility>
#include <vector>

#include "qsd/errors.hpp"

namespace qsd {

using Complex = std::complex<double>;

// z^k for integer k >= 0 with the convention z^0 = 1 even at z = 0.
inline Complex ipow(Complex z, int k) {
    Complex out{1.0, 0.0};
    for (int i = 0; i < k; ++i) out *= z;
    return out;
}

inline double ipow(double x, int k) {
    double out = 1.0;
    for (int i = 0; i < k; ++i) out *= x;
    return out;
}

// Binomial coefficient as a double; exact for the small arguments used here.
inline double binomial(int n, int k) {
    if (k < 0 || k > n) return 0.0;
    if (k > n - k) k = n - k;
    double out = 1.0;
    for (int i = 1; i <= k; ++i) out = out * double(n - k + i) / double(i);
    return out;
}

// sqrt(a! / b!) computed as an incremental product, avoiding large
// intermediate factorials.
inline double sqrt_factorial_ratio(int a, int b) {
    double ratio = 1.0;
    if (a >= b) {
        for (int i = b + 1; i <= a; ++i) ratio *= double(i);
        return std::sqrt(ratio);
    }
    for (int i = a + 1; i <= b; ++i) ratio *= double(i);
    return 1.0 / std::sqrt(ratio);
}

// Associated Laguerre polynomial L_n^a(x) by the three-term upward
// recurrence in the degree n.
inline double laguerre_assoc(int n, int a, double x) {
    if (n < 0) throw UsageError("laguerre_assoc: negative degree");
    double lm2 = 1.0; // L_0
    if (n == 0) return lm2;
    double lm1 = 1.0 + double(a) - x; // L_1
    if (n == 1) return lm1;
    for (int k = 2; k <= n; ++k) {
        double lk = ((double(2 * k - 1 + a) - x) * lm1 - double(k - 1 + a) * lm2) / double(k);
        lm2 = lm1;
        lm1 = lk;
    }
    return lm1;
}

// Gauss-Legendre nodes and weights on [a, b], by Newton iteration on the
// Legendre recurrence.
inline std::pair<std::vector<double>, std::vector<double>>
gauss_legendre(int n, double a, double b) {
    if (n < 1) throw UsageError("gauss_legendre: need at least one node");
    if (!(b > a)) throw UsageError("gauss_legendre: require b > a");
    std::vector<double> x(n), w(n);
    const double mid = 0.5 * (b + a);
    const double half = 0.5 * (b - a);
    const int m = (n + 1) / 2;
    const double eps = 3.0e-14;
    for (int i = 0; i < m; ++i) {
        // Chebyshev-based initial guess for the i-th root.
        double z = std::cos(M_PI * (double(i) + 0.75) / (double(n) + 0.5));
        double pp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0, p1 = 0.0;
            for (int j = 0; j < n; ++j) {
                double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j + 1.0) * z * p1 - double(j) * p2) / double(j + 1);
            }
            pp = double(n) * (z * p0 - p1) / (z * z - 1.0);
            double z1 = z;
            z = z1 - p0 / pp;
            if (std::abs(z - z1) <= eps) break;
        }
        x[i] = mid - half * z;
        x[n - 1 - i] = mid + half * z;
        w[i] = 2.0 * half / ((1.0 - z * z) * pp * pp);
        w[n - 1 - i] = w[i];
    }
    return {std::move(x), std::move(w)};
}

} // namespace qsd
