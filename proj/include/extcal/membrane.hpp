#pragma once

#include <array>
#include <vector>

#include "extcal/elliptic.hpp"
#include "extcal/errors.hpp"
#include "extcal/exterior.hpp"
#include "extcal/worldline.hpp" // Vec4, MetricField

namespace extcal {

// Tangent triple of a membrane worldvolume element: t_tau timelike-or-null,
// t_sigma and t_rho spacelike-or-null, with positive 3x3 Gram determinant.
struct MembraneElement {
    Vec4 t_tau{};
    Vec4 t_sigma{};
    Vec4 t_rho{};
};

struct MembranePi {
    KForm<double> pi;   // grade-3 on R^4, unit-normalized: Pi(sharp Pi) = 1
    double delta = 0.0; // sqrt of the 3x3 Gram determinant
    // Components against the coordinate 3-form basis, in the order
    // dx0^dx1^dx2, dx0^dx1^dx3, dx0^dx2^dx3, dx1^dx2^dx3.
    double pi_A = 0.0, pi_B = 0.0, pi_C = 0.0, pi_D = 0.0;
    MembranePi() : pi(4, 3) {}
};

MembranePi membrane_pi(const MembraneElement& el, const Metric<double>& g);

// Full contraction Pi(sharp Pi); equals one for a valid element.
double membrane_pi_normalization(const MembranePi& p, const Metric<double>& g);

struct MembraneConstraintReport {
    // Momentum 1-forms obtained by contracting Pi with the two complementary
    // tangents (raised with the metric).
    Vec4 p_tau{}, p_sigma{}, p_rho{};
    // Residuals of the nine primary-constraint identities, in the order
    // (norm, .first, .second) for p_tau, p_sigma, p_rho.
    std::array<double, 9> residuals{};
    double max_residual = 0.0;
};

MembraneConstraintReport constraint_suite(const MembraneElement& el, const Metric<double>& g);

// Gauge-fixed single field equation residual
//   d pi_A/dx3 - d pi_D/dx0 + d pi_C/dx1 - d pi_B/dx2
// with the pi components computed from 3x3 minors of the metric at x.
// Derivatives are exact for polynomial metric components, otherwise central
// differences with the given step.
double gauge_fixed_residual(const MetricField& g, std::span<const double> x, double fd_step = 1e-5);

// Sampled worldvolume lambda(tau, sigma, rho) on a box patch; row-major
// [tau][sigma][rho].
struct WorldvolumeGrid {
    int n_tau = 0, n_sigma = 0, n_rho = 0;
    double dtau = 0.0, dsigma = 0.0, drho = 0.0;
    std::vector<Vec4> lambda;

    const Vec4& at(int j, int i, int k) const {
        return lambda[(static_cast<std::size_t>(j) * n_sigma + i) * n_rho + k];
    }
    Vec4& at(int j, int i, int k) {
        return lambda[(static_cast<std::size_t>(j) * n_sigma + i) * n_rho + k];
    }
    Vec4 d_tau(int j, int i, int k) const;
    Vec4 d_sigma(int j, int i, int k) const;
    Vec4 d_rho(int j, int i, int k) const;
};

struct MembraneCovariantReport {
    double max_interior = 0.0;
    int skipped_degenerate = 0;
};

// Pointwise residual of the four covariant equations, evaluated as the
// divergence d_tau P_tau + d_sigma P_sigma + d_rho P_rho of the contracted
// momentum currents on interior stencils. This is a residual evaluator only;
// nothing here solves the full equations.
MembraneCovariantReport membrane_covariant_residual(const WorldvolumeGrid& grid,
                                                    const Metric<double>& g,
                                                    double rel_floor = 1e-2);

// Radial acceleration of the spherically symmetric membrane,
// R_dd = -2 (1 - R_dot^2) / R, which carries the first integral
// R^2 / sqrt(1 - R_dot^2) = const.
double spherical_rhs(double r, double rdot);

struct SphericalSample {
    double tau = 0.0;
    double r = 0.0;
    double rdot = 0.0;
    double first_integral = 0.0;
};

struct SphericalRun {
    std::vector<SphericalSample> samples;
    bool stopped_near_collapse = false;
    double max_first_integral_rel_drift = 0.0;
};

// Fourth-order one-step integration; stops cleanly when R_dot^2 > 1 - 1e-6
// and aborts if the first integral drifts relatively by more than 1e-4.
SphericalRun integrate_spherical(double r0, double rdot0, double tau_end, double step);

// R(tau) = r_max cn(K(1/sqrt2) - (sqrt2 / r_max) tau | 1/sqrt2): pulsation
// launched from the collapse point, peaking at r_max.
double spherical_closed_form(double r_max, double tau);

// Time from R = r_max down to R = 0 along the closed-form solution.
double spherical_collapse_time(double r_max);

// The same collapse time from the quadrature of dR / sqrt(1 - (R/r_max)^4),
// used as the independent oracle.
double spherical_collapse_time_quadrature(double r_max, int points = 512);

// Amplitude metadata in the constants-of-motion labels: 4E/b = r_max^4 and
// 4Eb = alpha^4 with alpha = sqrt2 / r_max.
struct SphericalConstants {
    double r_max = 0.0;
    double alpha = 0.0;
    double e_label = 0.0;
    double b_label = 0.0;
};

SphericalConstants spherical_constants(double r_max);

} // namespace extcal
