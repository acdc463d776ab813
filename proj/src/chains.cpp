#include "extcal/chains.hpp"

#include <cmath>
#include <numbers>

namespace extcal {

namespace {

// Affine inclusion [0,1]^(r-1) -> [0,1]^r holding coordinate `axis` at `end`.
SmoothMap face_inclusion(int r, int axis, int end) {
    std::vector<ScalarField> comps;
    comps.reserve(r);
    for (int i = 0; i < r; ++i) {
        if (i == axis)
            comps.emplace_back(PolyField::constant(r - 1, Rational(end)));
        else {
            int src = i < axis ? i : i - 1;
            comps.emplace_back(PolyField::variable(r - 1, src));
        }
    }
    return SmoothMap(r - 1, std::move(comps));
}

} // namespace

Chain Chain::simplified() const {
    Chain out(r, target_dim);
    std::vector<std::pair<int, SingularCube>> pool = terms;
    std::vector<bool> used(pool.size(), false);
    for (std::size_t i = 0; i < pool.size(); ++i) {
        if (used[i]) continue;
        int weight = pool[i].first;
        for (std::size_t j = i + 1; j < pool.size(); ++j) {
            if (used[j]) continue;
            if (pool[i].second.map.equals_exact(pool[j].second.map)) {
                weight += pool[j].first;
                used[j] = true;
            }
        }
        if (weight != 0) out.add(weight, pool[i].second);
    }
    return out;
}

Chain boundary(const Chain& c, const BoundaryConvention& conv) {
    if (c.r < 1) throw PreconditionError("boundary: 0-chains have no boundary");
    Chain out(c.r - 1, c.target_dim);
    for (const auto& [w, cube] : c.terms) {
        for (int axis = 0; axis < c.r; ++axis) {
            for (int end = 0; end <= 1; ++end) {
                int sign = ((axis + end + 1) % 2 == 0) ? 1 : -1;
                if (conv.ignore_axis_parity) sign = (end % 2 == 1) ? 1 : -1;
                SmoothMap face = cube.map.compose_after(face_inclusion(c.r, axis, end));
                out.add(w * sign, SingularCube(c.r - 1, std::move(face)));
            }
        }
    }
    return out;
}

QuadratureRule QuadratureRule::gauss_legendre(int points_per_axis) {
    if (points_per_axis < 1) throw std::invalid_argument("gauss_legendre: need at least one point");
    QuadratureRule q;
    q.points_per_axis = points_per_axis;
    q.nodes.resize(points_per_axis);
    q.weights.resize(points_per_axis);
    const int n = points_per_axis;
    const int m = (n + 1) / 2;
    for (int i = 0; i < m; ++i) {
        // Newton iteration on the Legendre polynomial over [-1,1].
        double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p1 = 1.0, p2 = 0.0;
            for (int j = 0; j < n; ++j) {
                double p3 = p2;
                p2 = p1;
                p1 = ((2.0 * j + 1.0) * z * p2 - j * p3) / (j + 1.0);
            }
            pp = n * (z * p1 - p2) / (z * z - 1.0);
            double z1 = z;
            z = z1 - p1 / pp;
            if (std::abs(z - z1) < 1e-15) break;
        }
        // Map to [0,1].
        q.nodes[i] = 0.5 * (1.0 - z);
        q.nodes[n - 1 - i] = 0.5 * (1.0 + z);
        double w = 1.0 / ((1.0 - z * z) * pp * pp);
        q.weights[i] = w;
        q.weights[n - 1 - i] = w;
    }
    return q;
}

namespace {

// Integral of a single r-cube term: pull the form back to [0,1]^r and sum the
// lone top-degree coefficient over the tensor grid.
double integrate_cube(const FieldForm& omega, const SingularCube& cube, const QuadratureRule& q) {
    const int r = cube.r;
    if (r == 0) {
        // Weighted point evaluation of a 0-form.
        std::vector<double> origin; // empty point in [0,1]^0
        std::vector<double> target = cube.map.eval(origin);
        double acc = 0.0;
        for (const auto& [mi, c] : omega.terms()) acc += c.eval(target);
        return acc;
    }
    FieldForm pulled = pullback(cube.map, omega);
    // A top-degree form on r variables has the single component (0,...,r-1).
    std::vector<int> top(r);
    for (int i = 0; i < r; ++i) top[i] = i;
    const ScalarField* coeff = nullptr;
    auto [mi, sign] = canonicalize(top);
    auto it = pulled.terms().find(mi);
    if (it == pulled.terms().end()) return 0.0;
    coeff = &it->second;

    std::vector<int> counter(r, 0);
    std::vector<double> x(r);
    double acc = 0.0;
    while (true) {
        double w = 1.0;
        for (int i = 0; i < r; ++i) {
            x[i] = q.nodes[counter[i]];
            w *= q.weights[counter[i]];
        }
        acc += w * coeff->eval(x);
        int i = 0;
        while (i < r && ++counter[i] == q.points_per_axis) counter[i++] = 0;
        if (i == r) break;
    }
    return acc;
}

} // namespace

double integrate(const FieldForm& omega, const Chain& c, const QuadratureRule& q) {
    if (omega.grade() != c.r) throw std::invalid_argument("integrate: form grade != chain dimension");
    if (omega.dim() != c.target_dim)
        throw std::invalid_argument("integrate: form dimension != chain target dimension");
    double acc = 0.0;
    for (const auto& [w, cube] : c.terms) acc += w * integrate_cube(omega, cube, q);
    return acc;
}

double stokes_residual(const FieldForm& omega, const Chain& c, const QuadratureRule& q,
                       const BoundaryConvention& conv) {
    double lhs = integrate(d(omega), c, q);
    double rhs = integrate(omega, boundary(c, conv), q);
    return std::abs(lhs - rhs);
}

ReparamCheck reparam_invariance_check(const FieldForm& omega, const SingularCube& cube,
                                      const SmoothMap& reparam, const QuadratureRule& q) {
    const int r = cube.r;
    if (reparam.domain_dim() != r || reparam.codomain_dim() != r)
        throw std::invalid_argument("reparam_invariance_check: reparam must map [0,1]^r to itself");

    // Orientation check: sample the Jacobian determinant at the tensor nodes.
    std::vector<int> counter(r, 0);
    std::vector<double> x(r);
    while (true) {
        for (int i = 0; i < r; ++i) x[i] = q.nodes[counter[i]];
        std::vector<std::vector<double>> jac(r, std::vector<double>(r));
        for (int i = 0; i < r; ++i)
            for (int j = 0; j < r; ++j) jac[i][j] = reparam.component(i).partial(j).eval(x);
        // Plain Gaussian elimination determinant.
        double det = 1.0;
        for (int col = 0; col < r; ++col) {
            int piv = col;
            for (int k = col + 1; k < r; ++k)
                if (std::abs(jac[k][col]) > std::abs(jac[piv][col])) piv = k;
            if (piv != col) { std::swap(jac[piv], jac[col]); det = -det; }
            if (jac[col][col] == 0.0) { det = 0.0; break; }
            det *= jac[col][col];
            for (int k = col + 1; k < r; ++k) {
                double f = jac[k][col] / jac[col][col];
                for (int j = col; j < r; ++j) jac[k][j] -= f * jac[col][j];
            }
        }
        if (det <= 0.0)
            throw PreconditionError("reparam_invariance_check: non-positive Jacobian at a sample node");
        int i = 0;
        while (i < r && ++counter[i] == q.points_per_axis) counter[i++] = 0;
        if (i == r) break;
    }

    ReparamCheck out;
    Chain original = Chain::single(cube);
    Chain reparameterised = Chain::single(SingularCube(r, cube.map.compose_after(reparam)));
    out.value_original = integrate(omega, original, q);
    out.value_reparam = integrate(omega, reparameterised, q);
    out.delta = std::abs(out.value_original - out.value_reparam);
    return out;
}

double velocity_functional(const ScalarField& f_of_velocity, const SmoothMap& curve,
                           const QuadratureRule& q) {
    if (curve.domain_dim() != 1) throw std::invalid_argument("velocity_functional: curve domain must be 1-d");
    if (f_of_velocity.nvars() != curve.codomain_dim())
        throw std::invalid_argument("velocity_functional: integrand arity != curve codomain");
    double acc = 0.0;
    const int n = curve.codomain_dim();
    std::vector<double> vel(n);
    for (int k = 0; k < q.points_per_axis; ++k) {
        double t[1] = {q.nodes[k]};
        for (int i = 0; i < n; ++i) vel[i] = curve.component(i).partial(0).eval(t);
        acc += q.weights[k] * f_of_velocity.eval(vel);
    }
    return acc;
}

} // namespace extcal
