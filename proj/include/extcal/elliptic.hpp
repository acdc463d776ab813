#pragma once

namespace extcal {

// Complete elliptic integral of the first kind K(k), modulus convention
// K(k) = int_0^{pi/2} dtheta / sqrt(1 - k^2 sin^2 theta), computed by the
// arithmetic-geometric mean. Requires 0 <= k < 1.
double elliptic_K(double k);

struct JacobiValues {
    double sn = 0.0;
    double cn = 1.0;
    double dn = 1.0;
};

// Jacobi elliptic functions at modulus k via the descending Landen/AGM
// recursion. Requires 0 <= k < 1.
JacobiValues jacobi_elliptic(double u, double k);

double jacobi_cn(double u, double k);

} // namespace extcal
