#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "extcal/errors.hpp"
#include "extcal/forms.hpp"

namespace extcal {

// Singular r-cube: a smooth map [0,1]^r -> R^n.
struct SingularCube {
    int r = 0;
    SmoothMap map;

    SingularCube(int r_, SmoothMap m) : r(r_), map(std::move(m)) {
        if (map.domain_dim() != r) throw std::invalid_argument("SingularCube: map domain != r");
    }

    static SingularCube unit(int r) { return SingularCube(r, SmoothMap::identity(r)); }
};

// Integer-weighted formal sum of r-cubes sharing a target dimension.
struct Chain {
    int r = 0;
    int target_dim = 0;
    std::vector<std::pair<int, SingularCube>> terms;

    Chain(int r_, int target_dim_) : r(r_), target_dim(target_dim_) {}

    void add(int weight, SingularCube cube) {
        if (cube.r != r) throw std::invalid_argument("Chain::add: cube dimension mismatch");
        if (cube.map.codomain_dim() != target_dim)
            throw std::invalid_argument("Chain::add: target dimension mismatch");
        if (weight != 0) terms.emplace_back(weight, std::move(cube));
    }

    static Chain single(SingularCube cube, int weight = 1) {
        Chain c(cube.r, cube.map.codomain_dim());
        c.add(weight, std::move(cube));
        return c;
    }

    // Collapses exactly-equal polynomial cubes; used by the boundary-of-boundary
    // cancellation check.
    Chain simplified() const;
};

// Face signs follow (-1)^(a+eps+1) for 0-based axis a and end eps in {0,1},
// i.e. the 1-based (-1)^(i+eps) convention; locked by the boundary-squared and
// signed Stokes tests. ignore_axis_parity exists only for fault-injection
// runs: it drops the axis term from the sign, which breaks both invariants.
struct BoundaryConvention {
    bool ignore_axis_parity = false;
};

Chain boundary(const Chain& c, const BoundaryConvention& conv = {});

// Tensor-product Gauss-Legendre rule on [0,1]; weights sum to one per axis.
struct QuadratureRule {
    int points_per_axis = 8;
    std::vector<double> nodes;
    std::vector<double> weights;

    static QuadratureRule gauss_legendre(int points_per_axis = 8);
};

double integrate(const FieldForm& omega, const Chain& c, const QuadratureRule& q);

// | int_C d(omega) - int_{boundary C} omega |
double stokes_residual(const FieldForm& omega, const Chain& c, const QuadratureRule& q,
                       const BoundaryConvention& conv = {});

struct ReparamCheck {
    double value_original = 0.0;
    double value_reparam = 0.0;
    double delta = 0.0;
};

// Integrates omega over the cube and over cube o reparam; the reparam map must
// have positive Jacobian at the tensor quadrature nodes.
ReparamCheck reparam_invariance_check(const FieldForm& omega, const SingularCube& cube,
                                      const SmoothMap& reparam, const QuadratureRule& q);

// The parameterisation-dependent functional int_0^1 F(velocity(t)) dt used to
// demonstrate what form integrals fix: F homogeneous of degree one in the
// velocity is invariant, anything else is not.
double velocity_functional(const ScalarField& f_of_velocity, const SmoothMap& curve,
                           const QuadratureRule& q);

} // namespace extcal
