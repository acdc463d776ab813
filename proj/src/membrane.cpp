#include "extcal/membrane.hpp"

#include <cmath>
#include <numbers>
#include <optional>

namespace extcal {

namespace {

double dot(const Metric<double>& g, const Vec4& a, const Vec4& b) {
    double acc = 0.0;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) acc += g(i, j) * a[i] * b[j];
    return acc;
}

Vec4 lower(const Metric<double>& g, const Vec4& a) {
    Vec4 out{};
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) out[i] += g(i, j) * a[j];
    return out;
}

double det3(const double m[3][3]) {
    return m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
           m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
           m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
}

double gram_delta(const Metric<double>& g, const MembraneElement& el) {
    const Vec4* t[3] = {&el.t_tau, &el.t_sigma, &el.t_rho};
    double m[3][3];
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) m[i][j] = dot(g, *t[i], *t[j]);
    double d2 = det3(m);
    if (d2 <= 0.0)
        throw PreconditionError("membrane element: Gram determinant <= 0 (degenerate triad)");
    return std::sqrt(d2);
}

} // namespace

MembranePi membrane_pi(const MembraneElement& el, const Metric<double>& g) {
    MembranePi out;
    out.delta = gram_delta(g, el);
    Vec4 a = lower(g, el.t_tau);
    Vec4 b = lower(g, el.t_sigma);
    Vec4 c = lower(g, el.t_rho);
    // pi_{abc} = det of the lowered tangents on the index triple, / Delta.
    auto comp = [&](int i, int j, int k) {
        double m[3][3] = {{a[i], a[j], a[k]}, {b[i], b[j], b[k]}, {c[i], c[j], c[k]}};
        return det3(m) / out.delta;
    };
    out.pi_A = comp(0, 1, 2);
    out.pi_B = comp(0, 1, 3);
    out.pi_C = comp(0, 2, 3);
    out.pi_D = comp(1, 2, 3);
    if (out.pi_A != 0.0) out.pi.add({0, 1, 2}, out.pi_A);
    if (out.pi_B != 0.0) out.pi.add({0, 1, 3}, out.pi_B);
    if (out.pi_C != 0.0) out.pi.add({0, 2, 3}, out.pi_C);
    if (out.pi_D != 0.0) out.pi.add({1, 2, 3}, out.pi_D);
    return out;
}

double membrane_pi_normalization(const MembranePi& p, const Metric<double>& g) {
    // sharp on each index, then pair: sum over strict triples of
    // pi_{ijk} pi^{ijk}.
    double acc = 0.0;
    for (const auto& [mi, v] : p.pi.components()) {
        // raise the triple
        double raised = 0.0;
        for (const auto& [mj, w] : p.pi.components()) {
            double m[3][3];
            for (int r = 0; r < 3; ++r)
                for (int c = 0; c < 3; ++c) m[r][c] = g.inv(mi.idx[r], mj.idx[c]);
            raised += det3(m) * w;
        }
        acc += v * raised;
    }
    return acc;
}

MembraneConstraintReport constraint_suite(const MembraneElement& el, const Metric<double>& g) {
    MembraneConstraintReport rep;
    MembranePi mp = membrane_pi(el, g);

    auto as_kvec = [](const Vec4& v) {
        KVector<double> k(4, 1);
        for (int i = 0; i < 4; ++i)
            if (v[i] != 0.0) k.add({i}, v[i]);
        return k;
    };
    auto contract_pair = [&](const Vec4& first, const Vec4& second) {
        KVector<double> two = wedge(as_kvec(first), as_kvec(second));
        KForm<double> one = contract(mp.pi, two);
        Vec4 lowered{};
        for (int i = 0; i < 4; ++i) lowered[i] = one.get({i});
        // raise to a vector for the dot-product identities
        Vec4 raised{};
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j) raised[i] += g.inv(i, j) * lowered[j];
        return raised;
    };

    rep.p_tau = contract_pair(el.t_sigma, el.t_rho);
    rep.p_sigma = contract_pair(el.t_rho, el.t_tau);
    rep.p_rho = contract_pair(el.t_tau, el.t_sigma);

    auto g2 = [&](const Vec4& u, const Vec4& v) {
        return dot(g, u, u) * dot(g, v, v) - dot(g, u, v) * dot(g, u, v);
    };

    rep.residuals[0] = std::abs(dot(g, rep.p_tau, rep.p_tau) - g2(el.t_sigma, el.t_rho));
    rep.residuals[1] = std::abs(dot(g, rep.p_tau, el.t_sigma));
    rep.residuals[2] = std::abs(dot(g, rep.p_tau, el.t_rho));
    rep.residuals[3] = std::abs(dot(g, rep.p_sigma, rep.p_sigma) - g2(el.t_tau, el.t_rho));
    rep.residuals[4] = std::abs(dot(g, rep.p_sigma, el.t_tau));
    rep.residuals[5] = std::abs(dot(g, rep.p_sigma, el.t_rho));
    rep.residuals[6] = std::abs(dot(g, rep.p_rho, rep.p_rho) - g2(el.t_tau, el.t_sigma));
    rep.residuals[7] = std::abs(dot(g, rep.p_rho, el.t_tau));
    rep.residuals[8] = std::abs(dot(g, rep.p_rho, el.t_sigma));
    rep.max_residual = 0.0;
    for (double r : rep.residuals) rep.max_residual = std::max(rep.max_residual, r);
    return rep;
}

double gauge_fixed_residual(const MetricField& gf, std::span<const double> x, double fd_step) {
    if (gf.dim() != 4) throw std::invalid_argument("gauge_fixed_residual: 4-d metric required");

    // pi components from 3x3 minors of the metric: rows are always the first
    // three coordinates (the worldvolume tangents), columns the index triple.
    auto pi_comp = [&](std::span<const double> p, int c0, int c1, int c2, double delta) {
        Metric<double> g = gf.at(p);
        double m[3][3];
        int cols[3] = {c0, c1, c2};
        for (int r = 0; r < 3; ++r)
            for (int c = 0; c < 3; ++c) m[r][c] = g(r, cols[c]);
        return det3(m) / delta;
    };
    auto delta_at = [&](std::span<const double> p) {
        Metric<double> g = gf.at(p);
        double m[3][3];
        for (int r = 0; r < 3; ++r)
            for (int c = 0; c < 3; ++c) m[r][c] = g(r, c);
        double d2 = det3(m);
        if (d2 <= 0.0)
            throw PreconditionError("gauge_fixed_residual: worldvolume Gram determinant <= 0");
        return std::sqrt(d2);
    };

    // residual = d3 pi_A - d0 pi_D + d1 pi_C - d2 pi_B, each by central
    // difference in the corresponding coordinate.
    auto diff = [&](int which, int coord) {
        std::vector<double> hi(x.begin(), x.end()), lo(x.begin(), x.end());
        hi[coord] += fd_step;
        lo[coord] -= fd_step;
        auto value = [&](std::span<const double> p) {
            double delta = delta_at(p);
            switch (which) {
                case 0: return pi_comp(p, 0, 1, 2, delta);
                case 1: return pi_comp(p, 0, 1, 3, delta);
                case 2: return pi_comp(p, 0, 2, 3, delta);
                default: return pi_comp(p, 1, 2, 3, delta);
            }
        };
        return (value(hi) - value(lo)) / (2 * fd_step);
    };

    double dA_d3 = diff(0, 3);
    double dD_d0 = diff(3, 0);
    double dC_d1 = diff(2, 1);
    double dB_d2 = diff(1, 2);
    return dA_d3 - dD_d0 + dC_d1 - dB_d2;
}

Vec4 WorldvolumeGrid::d_tau(int j, int i, int k) const {
    Vec4 out{};
    for (int mu = 0; mu < 4; ++mu) {
        if (j > 0 && j + 1 < n_tau)
            out[mu] = (at(j + 1, i, k)[mu] - at(j - 1, i, k)[mu]) / (2 * dtau);
        else if (j == 0)
            out[mu] = (-3 * at(0, i, k)[mu] + 4 * at(1, i, k)[mu] - at(2, i, k)[mu]) / (2 * dtau);
        else
            out[mu] =
                (3 * at(j, i, k)[mu] - 4 * at(j - 1, i, k)[mu] + at(j - 2, i, k)[mu]) / (2 * dtau);
    }
    return out;
}

Vec4 WorldvolumeGrid::d_sigma(int j, int i, int k) const {
    Vec4 out{};
    for (int mu = 0; mu < 4; ++mu) {
        if (i > 0 && i + 1 < n_sigma)
            out[mu] = (at(j, i + 1, k)[mu] - at(j, i - 1, k)[mu]) / (2 * dsigma);
        else if (i == 0)
            out[mu] =
                (-3 * at(j, 0, k)[mu] + 4 * at(j, 1, k)[mu] - at(j, 2, k)[mu]) / (2 * dsigma);
        else
            out[mu] = (3 * at(j, i, k)[mu] - 4 * at(j, i - 1, k)[mu] + at(j, i - 2, k)[mu]) /
                      (2 * dsigma);
    }
    return out;
}

Vec4 WorldvolumeGrid::d_rho(int j, int i, int k) const {
    Vec4 out{};
    for (int mu = 0; mu < 4; ++mu) {
        if (k > 0 && k + 1 < n_rho)
            out[mu] = (at(j, i, k + 1)[mu] - at(j, i, k - 1)[mu]) / (2 * drho);
        else if (k == 0)
            out[mu] = (-3 * at(j, i, 0)[mu] + 4 * at(j, i, 1)[mu] - at(j, i, 2)[mu]) / (2 * drho);
        else
            out[mu] =
                (3 * at(j, i, k)[mu] - 4 * at(j, i, k - 1)[mu] + at(j, i, k - 2)[mu]) / (2 * drho);
    }
    return out;
}

namespace {

// Raised momentum currents of a worldvolume element, or nothing when the
// Gram determinant sits under the floor.
struct MembraneCurrents {
    Vec4 p_tau{}, p_sigma{}, p_rho{};
};

std::optional<MembraneCurrents> membrane_currents_checked(const Metric<double>& g,
                                                          const MembraneElement& el,
                                                          double floor_abs) {
    const Vec4* t[3] = {&el.t_tau, &el.t_sigma, &el.t_rho};
    double m[3][3];
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) m[i][j] = dot(g, *t[i], *t[j]);
    double d2 = det3(m);
    if (d2 < floor_abs || d2 <= 0.0) return std::nullopt;
    double delta = std::sqrt(d2);
    double a = m[0][0], b = m[1][1], f = m[2][2];
    double c = m[0][1], dd = m[0][2], e = m[1][2];
    MembraneCurrents out;
    // Cofactor expansions of det[(t_i . t_j), (t_i . W)] against each pair;
    // identical to contracting the unit momentum 3-form with the two
    // complementary tangents.
    for (int mu = 0; mu < 4; ++mu) {
        out.p_tau[mu] = ((b * f - e * e) * el.t_tau[mu] - (c * f - dd * e) * el.t_sigma[mu] +
                         (c * e - b * dd) * el.t_rho[mu]) /
                        delta;
        out.p_sigma[mu] = ((e * dd - c * f) * el.t_tau[mu] - (dd * dd - a * f) * el.t_sigma[mu] +
                           (dd * c - a * e) * el.t_rho[mu]) /
                          delta;
        out.p_rho[mu] = ((c * e - dd * b) * el.t_tau[mu] - (a * e - c * dd) * el.t_sigma[mu] +
                         (a * b - c * c) * el.t_rho[mu]) /
                        delta;
    }
    return out;
}

} // namespace

MembraneCovariantReport membrane_covariant_residual(const WorldvolumeGrid& grid,
                                                    const Metric<double>& g, double rel_floor) {
    const int nj = grid.n_tau, ni = grid.n_sigma, nk = grid.n_rho;
    if (nj < 5 || ni < 5 || nk < 5)
        throw PreconditionError("membrane_covariant_residual: grid too small for stencils");

    auto idx = [&](int j, int i, int k) {
        return (static_cast<std::size_t>(j) * ni + i) * nk + k;
    };
    std::vector<MembraneCurrents> cur(static_cast<std::size_t>(nj) * ni * nk);
    std::vector<char> valid(cur.size(), 0);

    // Gram scale first, then the currents.
    double d2max = 0.0;
    std::vector<double> d2(cur.size(), 0.0);
    for (int j = 0; j < nj; ++j)
        for (int i = 0; i < ni; ++i)
            for (int k = 0; k < nk; ++k) {
                MembraneElement el{grid.d_tau(j, i, k), grid.d_sigma(j, i, k),
                                   grid.d_rho(j, i, k)};
                const Vec4* t[3] = {&el.t_tau, &el.t_sigma, &el.t_rho};
                double m[3][3];
                for (int r = 0; r < 3; ++r)
                    for (int s = 0; s < 3; ++s) m[r][s] = dot(g, *t[r], *t[s]);
                d2[idx(j, i, k)] = det3(m);
                d2max = std::max(d2max, d2[idx(j, i, k)]);
            }
    const double floor_abs = rel_floor * d2max;

    MembraneCovariantReport rep;
    for (int j = 0; j < nj; ++j)
        for (int i = 0; i < ni; ++i)
            for (int k = 0; k < nk; ++k) {
                MembraneElement el{grid.d_tau(j, i, k), grid.d_sigma(j, i, k),
                                   grid.d_rho(j, i, k)};
                auto mc = membrane_currents_checked(g, el, floor_abs);
                if (!mc) {
                    ++rep.skipped_degenerate;
                    continue;
                }
                cur[idx(j, i, k)] = *mc;
                valid[idx(j, i, k)] = 1;
            }

    for (int j = 2; j + 2 < nj; ++j)
        for (int i = 2; i + 2 < ni; ++i)
            for (int k = 2; k + 2 < nk; ++k) {
                if (!valid[idx(j + 1, i, k)] || !valid[idx(j - 1, i, k)] ||
                    !valid[idx(j, i + 1, k)] || !valid[idx(j, i - 1, k)] ||
                    !valid[idx(j, i, k + 1)] || !valid[idx(j, i, k - 1)])
                    continue;
                double norm = 0.0;
                for (int mu = 0; mu < 4; ++mu) {
                    double div =
                        (cur[idx(j + 1, i, k)].p_tau[mu] - cur[idx(j - 1, i, k)].p_tau[mu]) /
                            (2 * grid.dtau) +
                        (cur[idx(j, i + 1, k)].p_sigma[mu] - cur[idx(j, i - 1, k)].p_sigma[mu]) /
                            (2 * grid.dsigma) +
                        (cur[idx(j, i, k + 1)].p_rho[mu] - cur[idx(j, i, k - 1)].p_rho[mu]) /
                            (2 * grid.drho);
                    norm = std::max(norm, std::abs(div));
                }
                rep.max_interior = std::max(rep.max_interior, norm);
            }
    return rep;
}

double spherical_rhs(double r, double rdot) {
    if (r <= 0.0) throw PreconditionError("spherical_rhs: radius must be positive");
    if (std::abs(rdot) >= 1.0)
        throw PreconditionError("spherical_rhs: |R_dot| >= 1 (collapse regime)");
    return -2.0 * (1.0 - rdot * rdot) / r;
}

SphericalRun integrate_spherical(double r0, double rdot0, double tau_end, double step) {
    if (r0 <= 0.0) throw PreconditionError("integrate_spherical: R(0) must be positive");
    if (std::abs(rdot0) >= 1.0) throw PreconditionError("integrate_spherical: |R_dot(0)| >= 1");
    if (step <= 0.0) throw PreconditionError("integrate_spherical: step must be positive");

    SphericalRun run;
    double r = r0, v = rdot0;
    const double c0 = r0 * r0 / std::sqrt(1.0 - rdot0 * rdot0);

    auto record = [&](double tau) {
        double c = r * r / std::sqrt(std::max(1e-300, 1.0 - v * v));
        run.max_first_integral_rel_drift =
            std::max(run.max_first_integral_rel_drift, std::abs(c - c0) / c0);
        run.samples.push_back({tau, r, v, c});
    };

    record(0.0);
    const long nsteps = std::lround(tau_end / step);
    for (long n = 0; n < nsteps; ++n) {
        if (v * v > 1.0 - 1e-6) {
            run.stopped_near_collapse = true;
            break;
        }
        auto f = [](double rr, double vv) { return -2.0 * (1.0 - vv * vv) / rr; };
        double k1r = v, k1v = f(r, v);
        double k2r = v + 0.5 * step * k1v, k2v = f(r + 0.5 * step * k1r, v + 0.5 * step * k1v);
        double k3r = v + 0.5 * step * k2v, k3v = f(r + 0.5 * step * k2r, v + 0.5 * step * k2v);
        double k4r = v + step * k3v, k4v = f(r + step * k3r, v + step * k3v);
        r += step / 6.0 * (k1r + 2 * k2r + 2 * k3r + k4r);
        v += step / 6.0 * (k1v + 2 * k2v + 2 * k3v + k4v);
        if (r <= 0.0 || v * v >= 1.0) {
            run.stopped_near_collapse = true;
            break;
        }
        record((n + 1) * step);
        if (run.max_first_integral_rel_drift > 1e-4)
            throw NumericalAbort("integrate_spherical: first-integral drift exceeded 1e-4; "
                                 "reduce the step");
    }
    return run;
}

double spherical_closed_form(double r_max, double tau) {
    if (r_max <= 0.0) throw PreconditionError("spherical_closed_form: amplitude must be positive");
    const double k = 1.0 / std::numbers::sqrt2;
    const double gamma = elliptic_K(k);
    const double alpha = std::numbers::sqrt2 / r_max;
    return r_max * jacobi_cn(gamma - alpha * tau, k);
}

double spherical_collapse_time(double r_max) {
    const double k = 1.0 / std::numbers::sqrt2;
    return elliptic_K(k) * r_max / std::numbers::sqrt2;
}

double spherical_collapse_time_quadrature(double r_max, int points) {
    // int_0^{r_max} dR / sqrt(1 - (R/r_max)^4), regularized by R = r_max sin(phi)
    // into r_max int_0^{pi/2} dphi / sqrt(1 + sin^2 phi); composite Simpson,
    // independent of the Gauss-Legendre machinery in the chains module.
    int panels = points % 2 == 0 ? points : points + 1;
    double h = (std::numbers::pi / 2) / panels;
    auto f = [](double phi) { return 1.0 / std::sqrt(1.0 + std::sin(phi) * std::sin(phi)); };
    double acc = f(0.0) + f(std::numbers::pi / 2);
    for (int i = 1; i < panels; ++i) acc += f(i * h) * (i % 2 == 1 ? 4.0 : 2.0);
    acc *= h / 3.0;
    return r_max * acc;
}

SphericalConstants spherical_constants(double r_max) {
    SphericalConstants c;
    c.r_max = r_max;
    c.alpha = std::numbers::sqrt2 / r_max;
    // Labels under the convention 4E/b = r_max^4, 4Eb = alpha^4.
    double fourE2 = r_max * r_max * r_max * r_max * c.alpha * c.alpha * c.alpha * c.alpha;
    double fourE = std::sqrt(fourE2);
    c.e_label = fourE / 4.0;
    c.b_label = fourE / (r_max * r_max * r_max * r_max);
    return c;
}

} // namespace extcal
