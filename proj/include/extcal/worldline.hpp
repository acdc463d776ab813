#pragma once

#include <array>
#include <optional>
#include <vector>

#include "extcal/errors.hpp"
#include "extcal/exterior.hpp"
#include "extcal/forms.hpp"

namespace extcal {

using Vec4 = std::array<double, 4>;

// Spacetime metric supplied either as constant components or as coordinate
// fields g_{mu nu}(x); derivatives come out exact for polynomial components
// and by central differences otherwise.
class MetricField {
public:
    static MetricField constant(Metric<double> g);
    static MetricField from_components(int dim, std::vector<std::vector<ScalarField>> comps);

    int dim() const { return dim_; }
    bool is_constant() const { return constant_.has_value(); }

    Metric<double> at(std::span<const double> x) const;
    // d g_{ij} / d x^k
    double partial(int i, int j, int k, std::span<const double> x) const;

private:
    MetricField() = default;
    int dim_ = 0;
    std::optional<Metric<double>> constant_;
    std::vector<std::vector<ScalarField>> comps_; // symmetric storage, full matrix
};

// Gamma^b_{a c} = 1/2 g^{br} (g_{ra,c} + g_{rc,a} - g_{ac,r})
std::vector<std::vector<std::vector<double>>> christoffel(const MetricField& g,
                                                          std::span<const double> x);

// p^mu = m u^mu / sqrt(u.u); homogeneous of degree zero in u. Demands a
// timelike tangent under the (+,-,-,-) signature.
Vec4 momentum(const Vec4& u, double mass, const Metric<double>& g);

// F = dA for a 1-form potential, with closure d(F) = 0 by construction.
FieldForm em_field_strength(const FieldForm& potential);

struct ParticleScenario {
    double mass = 1.0;
    double charge = 0.0;
    MetricField metric = MetricField::constant(Metric<double>::minkowski(4));
    std::optional<FieldForm> potential; // grade-1 on R^4
    Vec4 x0{0, 0, 0, 0};
    Vec4 u0{1, 0, 0, 0};
    double tau_end = 1.0;
    double step = 1e-3;
    // Proper-time gauge renormalizes the tangent onto the unit shell each
    // step; the general gauge evolves the covariant equation with u.u held
    // constant at its initial value instead.
    bool proper_time_gauge = true;
};

// udd^b = (q/m) sqrt(u.u) F^b_mu u^mu - Gamma^b_{a c} u^a u^c.
// Reduces to the proper-time form when u.u = 1.
Vec4 eom_rhs(const Vec4& x, const Vec4& u, const ParticleScenario& sc, const FieldForm* field_strength);

struct WorldlineSample {
    double tau = 0.0;
    Vec4 x{};
    Vec4 u{};
    Vec4 p{};
};

struct WorldlineTrajectory {
    std::vector<WorldlineSample> samples;
    double max_shell_residual = 0.0;  // max |p.p - m^2|
    double max_gauge_drift = 0.0;     // max |u.u - 1| seen before renormalization
};

// Classic fourth-order one-step integration; aborts with a diagnostic if the
// pre-renormalization gauge drift passes 1e-3.
WorldlineTrajectory integrate_worldline(const ParticleScenario& sc);

} // namespace extcal
