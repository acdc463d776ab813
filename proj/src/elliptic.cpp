#include "extcal/elliptic.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace extcal {

double elliptic_K(double k) {
    if (k < 0.0 || k >= 1.0) throw std::domain_error("elliptic_K: modulus must satisfy 0 <= k < 1");
    double a = 1.0;
    double b = std::sqrt(1.0 - k * k);
    for (int i = 0; i < 40 && std::abs(a - b) > 4e-16 * a; ++i) {
        double am = 0.5 * (a + b);
        double gm = std::sqrt(a * b);
        a = am;
        b = gm;
    }
    return std::numbers::pi / (2.0 * a);
}

JacobiValues jacobi_elliptic(double u, double k) {
    if (k < 0.0 || k >= 1.0) throw std::domain_error("jacobi_elliptic: modulus must satisfy 0 <= k < 1");
    JacobiValues out;
    if (k == 0.0) {
        out.sn = std::sin(u);
        out.cn = std::cos(u);
        out.dn = 1.0;
        return out;
    }
    // Descending AGM scale; c_i tracks the shrinking modulus.
    constexpr int kMaxIter = 32;
    double a[kMaxIter], c[kMaxIter];
    a[0] = 1.0;
    double b = std::sqrt(1.0 - k * k);
    c[0] = k;
    int n = 0;
    while (std::abs(c[n]) > 1e-17 * a[n] && n + 1 < kMaxIter) {
        ++n;
        a[n] = 0.5 * (a[n - 1] + b);
        c[n] = 0.5 * (a[n - 1] - b);
        b = std::sqrt(a[n - 1] * b);
    }
    double phi = std::ldexp(a[n] * u, n);
    for (int i = n; i > 0; --i) phi = 0.5 * (phi + std::asin(c[i] / a[i] * std::sin(phi)));
    out.sn = std::sin(phi);
    out.cn = std::cos(phi);
    out.dn = std::sqrt(1.0 - k * k * out.sn * out.sn);
    return out;
}

double jacobi_cn(double u, double k) { return jacobi_elliptic(u, k).cn; }

} // namespace extcal
