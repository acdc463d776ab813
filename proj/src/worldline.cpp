#include "extcal/worldline.hpp"

#include <cmath>

namespace extcal {

namespace {

double dot(const Metric<double>& g, const Vec4& a, const Vec4& b) {
    double acc = 0.0;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) acc += g(i, j) * a[i] * b[j];
    return acc;
}

} // namespace

MetricField MetricField::constant(Metric<double> g) {
    MetricField m;
    m.dim_ = g.dim();
    m.constant_ = std::move(g);
    return m;
}

MetricField MetricField::from_components(int dim, std::vector<std::vector<ScalarField>> comps) {
    if (static_cast<int>(comps.size()) != dim)
        throw std::invalid_argument("MetricField: component row count != dim");
    for (auto& row : comps) {
        if (static_cast<int>(row.size()) != dim)
            throw std::invalid_argument("MetricField: component column count != dim");
        for (auto& c : row)
            if (c.nvars() != dim) throw std::invalid_argument("MetricField: component arity != dim");
    }
    MetricField m;
    m.dim_ = dim;
    m.comps_ = std::move(comps);
    return m;
}

Metric<double> MetricField::at(std::span<const double> x) const {
    if (constant_) return *constant_;
    std::vector<std::vector<double>> g(dim_, std::vector<double>(dim_, 0.0));
    for (int i = 0; i < dim_; ++i)
        for (int j = 0; j < dim_; ++j) g[i][j] = comps_[i][j].eval(x);
    // Symmetrize away evaluation noise before the inverse check.
    for (int i = 0; i < dim_; ++i)
        for (int j = 0; j < i; ++j) g[i][j] = g[j][i] = 0.5 * (g[i][j] + g[j][i]);
    return Metric<double>(std::move(g));
}

double MetricField::partial(int i, int j, int k, std::span<const double> x) const {
    if (constant_) return 0.0;
    return comps_[i][j].partial(k).eval(x);
}

std::vector<std::vector<std::vector<double>>> christoffel(const MetricField& gf,
                                                          std::span<const double> x) {
    const int n = gf.dim();
    Metric<double> g = gf.at(x);
    std::vector<std::vector<std::vector<double>>> gamma(
        n, std::vector<std::vector<double>>(n, std::vector<double>(n, 0.0)));
    if (gf.is_constant()) return gamma;
    // dg[i][j][k] = g_{ij,k}
    std::vector<std::vector<std::vector<double>>> dg(
        n, std::vector<std::vector<double>>(n, std::vector<double>(n, 0.0)));
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j)
            for (int k = 0; k < n; ++k) {
                double v = gf.partial(i, j, k, x);
                dg[i][j][k] = v;
                dg[j][i][k] = v;
            }
    for (int b = 0; b < n; ++b)
        for (int a = 0; a < n; ++a)
            for (int c = a; c < n; ++c) {
                double acc = 0.0;
                for (int r = 0; r < n; ++r)
                    acc += g.inv(b, r) * (dg[r][a][c] + dg[r][c][a] - dg[a][c][r]);
                gamma[b][a][c] = 0.5 * acc;
                gamma[b][c][a] = gamma[b][a][c];
            }
    return gamma;
}

Vec4 momentum(const Vec4& u, double mass, const Metric<double>& g) {
    double u2 = dot(g, u, u);
    if (u2 <= 0.0) throw PreconditionError("momentum: tangent is not timelike");
    double s = mass / std::sqrt(u2);
    return {s * u[0], s * u[1], s * u[2], s * u[3]};
}

FieldForm em_field_strength(const FieldForm& potential) {
    if (potential.grade() != 1)
        throw std::invalid_argument("em_field_strength: potential must be a 1-form");
    return d(potential);
}

Vec4 eom_rhs(const Vec4& x, const Vec4& u, const ParticleScenario& sc,
             const FieldForm* field_strength) {
    Metric<double> g = sc.metric.at(x);
    Vec4 acc{0, 0, 0, 0};

    if (field_strength && sc.charge != 0.0) {
        double u2 = dot(g, u, u);
        if (u2 <= 0.0) throw PreconditionError("eom_rhs: tangent is not timelike");
        KForm<double> f = field_strength->at(x);
        // F^b_mu u^mu = g^{br} F_{r mu} u^mu
        double scale = sc.charge / sc.mass * std::sqrt(u2);
        for (int b = 0; b < 4; ++b) {
            double t = 0.0;
            for (int r = 0; r < 4; ++r)
                for (int mu = 0; mu < 4; ++mu) t += g.inv(b, r) * f.get({r, mu}) * u[mu];
            acc[b] += scale * t;
        }
    }

    if (!sc.metric.is_constant()) {
        auto gamma = christoffel(sc.metric, x);
        for (int b = 0; b < 4; ++b) {
            double t = 0.0;
            for (int a = 0; a < 4; ++a)
                for (int c = 0; c < 4; ++c) t += gamma[b][a][c] * u[a] * u[c];
            acc[b] -= t;
        }
    }
    return acc;
}

WorldlineTrajectory integrate_worldline(const ParticleScenario& sc) {
    if (sc.mass <= 0.0) throw PreconditionError("integrate_worldline: mass must be positive");
    if (sc.step <= 0.0) throw PreconditionError("integrate_worldline: step must be positive");
    {
        Metric<double> g0 = sc.metric.at(sc.x0);
        if (dot(g0, sc.u0, sc.u0) <= 0.0)
            throw PreconditionError("integrate_worldline: initial tangent is not timelike");
    }

    std::optional<FieldForm> field;
    if (sc.potential) field = em_field_strength(*sc.potential);
    const FieldForm* fptr = field ? &*field : nullptr;

    WorldlineTrajectory traj;
    Vec4 x = sc.x0;
    Vec4 u = sc.u0;
    if (sc.proper_time_gauge) {
        Metric<double> g0 = sc.metric.at(x);
        double s = 1.0 / std::sqrt(dot(g0, u, u));
        for (auto& ui : u) ui *= s;
    }

    auto record = [&](double tau) {
        Metric<double> g = sc.metric.at(x);
        WorldlineSample s;
        s.tau = tau;
        s.x = x;
        s.u = u;
        s.p = momentum(u, sc.mass, g);
        double p2 = dot(g, s.p, s.p);
        traj.max_shell_residual =
            std::max(traj.max_shell_residual, std::abs(p2 - sc.mass * sc.mass));
        traj.samples.push_back(s);
    };

    record(0.0);
    const long nsteps = std::lround(std::floor(sc.tau_end / sc.step + 0.5));
    const double h = sc.step;

    for (long n = 0; n < nsteps; ++n) {
        auto deriv = [&](const Vec4& xx, const Vec4& uu) {
            try {
                return std::pair<Vec4, Vec4>(uu, eom_rhs(xx, uu, sc, fptr));
            } catch (const PreconditionError& e) {
                // A substep left the validity domain: the run blew up.
                throw NumericalAbort(std::string("integrate_worldline: ") + e.what() +
                                     " during stepping; reduce the step");
            }
        };
        auto [k1x, k1u] = deriv(x, u);
        Vec4 x2, u2;
        for (int i = 0; i < 4; ++i) { x2[i] = x[i] + 0.5 * h * k1x[i]; u2[i] = u[i] + 0.5 * h * k1u[i]; }
        auto [k2x, k2u] = deriv(x2, u2);
        Vec4 x3, u3;
        for (int i = 0; i < 4; ++i) { x3[i] = x[i] + 0.5 * h * k2x[i]; u3[i] = u[i] + 0.5 * h * k2u[i]; }
        auto [k3x, k3u] = deriv(x3, u3);
        Vec4 x4, u4;
        for (int i = 0; i < 4; ++i) { x4[i] = x[i] + h * k3x[i]; u4[i] = u[i] + h * k3u[i]; }
        auto [k4x, k4u] = deriv(x4, u4);
        for (int i = 0; i < 4; ++i) {
            x[i] += h / 6.0 * (k1x[i] + 2 * k2x[i] + 2 * k3x[i] + k4x[i]);
            u[i] += h / 6.0 * (k1u[i] + 2 * k2u[i] + 2 * k3u[i] + k4u[i]);
        }

        if (sc.proper_time_gauge) {
            Metric<double> g = sc.metric.at(x);
            double u2n = dot(g, u, u);
            if (u2n <= 0.0)
                throw NumericalAbort("integrate_worldline: tangent left the timelike cone");
            double drift = std::abs(u2n - 1.0);
            traj.max_gauge_drift = std::max(traj.max_gauge_drift, drift);
            if (drift > 1e-3)
                throw NumericalAbort(
                    "integrate_worldline: unit-tangent constraint drift " + std::to_string(drift) +
                    " exceeded 1e-3 at tau=" + std::to_string((n + 1) * h) + "; reduce the step");
            double s = 1.0 / std::sqrt(u2n);
            for (auto& ui : u) ui *= s;
        }
        record((n + 1) * h);
    }
    return traj;
}

} // namespace extcal
