#pragma once

#include <array>
#include <functional>
#include <optional>
#include <vector>

#include "extcal/errors.hpp"
#include "extcal/exterior.hpp"
#include "extcal/forms.hpp"
#include "extcal/worldline.hpp" // Vec4

namespace extcal {

// --- Pointwise sheet-element algebra -------------------------------------
//
// A worldsheet element is the tangent pair (lambda_dot, lambda_prime) with
// lambda_dot timelike and lambda_prime spacelike; Delta^2 =
// (lambda_dot.lambda_prime)^2 - lambda_dot^2 lambda_prime^2 must be positive.

struct StringMomentumForm {
    KForm<double> pi; // grade-2, antisymmetric components on the strict basis
    double delta = 0.0;
    StringMomentumForm() : pi(4, 2) {}
};

// Unit-normalized momentum 2-form: Pi(Y_x) = 1 with Y_x the worldsheet
// 2-vector lambda_prime ^ lambda_dot.
StringMomentumForm pi_components(const Vec4& t_tau, const Vec4& t_sigma, const Metric<double>& g);

struct MomentumCurrents {
    Vec4 p_tau{};
    Vec4 p_sigma{};
    double delta = 0.0;
};

// The 2x2 determinant expansions
//   p_tau^mu   = [t_tau^mu t_sigma^2 - t_sigma^mu (t_tau.t_sigma)] / Delta
//   p_sigma^mu = [t_sigma^mu t_tau^2 - t_tau^mu (t_tau.t_sigma)] / Delta
MomentumCurrents momentum_currents(const Vec4& t_tau, const Vec4& t_sigma, const Metric<double>& g);

struct StringIdentityReport {
    double ptau_norm = 0.0;      // |p_tau^2 + t_sigma^2|
    double psigma_norm = 0.0;    // |p_sigma^2 + t_tau^2|
    double ptau_orth = 0.0;      // |p_tau . t_sigma|
    double psigma_orth = 0.0;    // |p_sigma . t_tau|
    double normalization = 0.0;  // |Pi(Y_x) - 1|
    double max_residual = 0.0;
};

StringIdentityReport identity_suite(const Vec4& t_tau, const Vec4& t_sigma, const Metric<double>& g);

// --- Light-cone gauge solver ----------------------------------------------

enum class StringTopology { Open, Closed };

struct LightConeInput {
    StringTopology topology = StringTopology::Open;
    int n_sigma = 65;          // grid points including both ends (open) or period samples (closed)
    double cfl = 0.5;          // dt = cfl * dsigma
    double tau_end = 2.0;
    std::function<double(double)> f0;     // f(sigma, 0)
    std::function<double(double)> f0_dot; // df/dtau(sigma, 0)
    std::function<double(double)> g0;
    std::function<double(double)> g0_dot;
    double action_scale = 1.0; // hbar/alpha'; bookkeeping only, never in the EOM
};

struct LightConeState {
    StringTopology topology = StringTopology::Open;
    int n_sigma = 0;
    int n_tau = 0; // stored time levels
    double dsigma = 0.0;
    double dtau = 0.0;
    double action_scale = 1.0;
    // grids indexed [time][sigma]
    std::vector<std::vector<double>> f, g;
    std::vector<std::vector<double>> y; // filled by reconstruct_y

    double tau_at(int j) const { return j * dtau; }
    double sigma_at(int i) const { return i * dsigma; }

    // Second-order grid derivatives (periodic wrap for closed topology,
    // one-sided at open edges).
    double dtau_of(const std::vector<std::vector<double>>& grid, int j, int i) const;
    double dsigma_of(const std::vector<std::vector<double>>& grid, int j, int i) const;
};

LightConeState solve_light_cone(const LightConeInput& in);

// Max residual of the wave operator applied to the stored grids, measured
// with wide fourth-order stencils so discretization error is visible.
double wave_residual(const LightConeState& st);

struct YReport {
    double max_compat_residual = 0.0; // |d_tau(y') - d_sigma(y_dot)|
    double zero_mode_winding = 0.0;   // closed topology: integral of y' over one period
    bool flagged_incompatible = false;
};

// Fills st.y from y_dot = (f_dot^2 + g_dot^2 + f'^2 + g'^2)/2 and
// y' = f_dot f' + g_dot g', anchored by y(0,0) = 0.
YReport reconstruct_y(LightConeState& st, double incompat_tolerance = 1e-2);

struct EndpointNullReport {
    bool has_boundary = false;
    std::array<double, 2> residual{0.0, 0.0}; // max over tau of |2 y_dot - f_dot^2 - g_dot^2|
};

EndpointNullReport endpoint_null_check(const LightConeState& st);

// --- Spacetime lift and covariant checks ----------------------------------

// Coordinates (y+, y-, y2, y3) with ds^2 = 2 dy+ dy- - (dy2)^2 - (dy3)^2.
Metric<double> light_cone_metric();

struct SheetGrid {
    int n_sigma = 0;
    int n_tau = 0;
    double dsigma = 0.0;
    double dtau = 0.0;
    std::vector<Vec4> lambda; // row-major [tau][sigma]
    bool periodic_sigma = false;
    // Closed strings may wind in a coordinate per sigma period (the
    // integration constant of the constraint reconstruction); wrapped
    // stencils add this jump at the seam.
    Vec4 seam_jump{};

    const Vec4& at(int j, int i) const { return lambda[j * n_sigma + i]; }
    Vec4& at(int j, int i) { return lambda[j * n_sigma + i]; }
    Vec4 d_tau(int j, int i) const;
    Vec4 d_sigma(int j, int i) const;
};

// Requires reconstruct_y to have run.
SheetGrid lift_to_spacetime(const LightConeState& st);

struct CovariantResidualReport {
    double max_interior = 0.0;  // max norm over interior points
    double edge_max = 0.0;      // one-sided estimate on the skipped edge ring
    int skipped_degenerate = 0; // sheet elements under the Delta^2 floor
};

// Central-difference divergence d_sigma p_sigma + d_tau p_tau on the sheet.
// Elements with Delta^2 under rel_floor times the sheet maximum are skipped
// and counted: wherever the transverse gradient momentarily vanishes the
// currents have finite limits but the determinant quotient is numerically
// 0/0, and dividing by a vanishing Delta would amplify discretization noise
// without bound.
CovariantResidualReport covariant_eom_residual(const SheetGrid& sheet, const Metric<double>& g,
                                               double rel_floor = 1e-2);

struct MomentumSeries {
    std::vector<Vec4> values;   // one integral per stored time
    int limit_substitutions = 0;
};

// Integral over sigma of p_tau at each stored time; constancy is the
// conserved total momentum statement. Where the element degenerates the
// constraint algebra of the light-cone lift forces p_tau = -lambda_dot
// exactly, and that value is substituted (and counted).
MomentumSeries total_momentum_series(const SheetGrid& sheet, const Metric<double>& g,
                                     double rel_floor = 1e-2);

struct EmBoundaryReport {
    bool has_boundary = false;
    std::array<double, 2> residual{0.0, 0.0}; // max over tau per endpoint
};

// Residual of p_sigma^mu - (-1)^k q F^mu_nu lambda_dot^nu at sigma ends.
EmBoundaryReport em_boundary_residual(const SheetGrid& sheet, const Metric<double>& g,
                                      const FieldForm& field_strength, double charge);

// Singular values of the 4x4 sensitivity of the pointwise divergence residual
// to local transverse sheet perturbations; reparameterisation freedom should
// leave at most two significant directions. Reported, never asserted.
std::array<double, 4> eom_rank_singular_values(const SheetGrid& sheet, const Metric<double>& g,
                                               int j, int i, double eps = 1e-5);

} // namespace extcal
