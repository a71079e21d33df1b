#pragma once

#include <stdexcept>

namespace nbt {

/// Associated Laguerre polynomial L_n^eta(x) by the three-term recurrence
/// (k+1) L_{k+1} = (2k+1+eta-x) L_k - (k+eta) L_{k-1}.
inline double laguerre(int n, double eta, double x) {
    if (n < 0) throw std::invalid_argument("laguerre: degree must be non-negative");
    double prev = 1.0;
    if (n == 0) return prev;
    double cur = 1.0 + eta - x;
    for (int k = 1; k < n; ++k) {
        const double next = ((2.0 * k + 1.0 + eta - x) * cur - (k + eta) * prev) / (k + 1.0);
        prev = cur;
        cur = next;
    }
    return cur;
}

/// Jacobi polynomial P_n^(a,b)(x) by the standard three-term recurrence.
inline double jacobi(int n, double a, double b, double x) {
    if (n < 0) throw std::invalid_argument("jacobi: degree must be non-negative");
    double prev = 1.0;
    if (n == 0) return prev;
    double cur = 0.5 * (a - b) + 0.5 * (a + b + 2.0) * x;
    const double ab = a + b;
    for (int k = 2; k <= n; ++k) {
        const double c = 2.0 * k + ab;
        const double denom = 2.0 * k * (k + ab) * (c - 2.0);
        if (denom == 0.0) throw std::domain_error("jacobi: recurrence denominator vanishes for these indices");
        const double next = ((c - 1.0) * (c * (c - 2.0) * x + a * a - b * b) * cur -
                             2.0 * (k + a - 1.0) * (k + b - 1.0) * c * prev) /
                            denom;
        prev = cur;
        cur = next;
    }
    return cur;
}

}  // namespace nbt
