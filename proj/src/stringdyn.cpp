#include "extcal/stringdyn.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

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

double sheet_delta(const Metric<double>& g, const Vec4& t_tau, const Vec4& t_sigma) {
    double a = dot(g, t_tau, t_tau);
    double b = dot(g, t_sigma, t_sigma);
    double c = dot(g, t_tau, t_sigma);
    double d2 = c * c - a * b;
    if (d2 <= 0.0)
        throw PreconditionError("string sheet element: Delta^2 <= 0 (tangents not Lorentzian)");
    return std::sqrt(d2);
}

} // namespace

StringMomentumForm pi_components(const Vec4& t_tau, const Vec4& t_sigma, const Metric<double>& g) {
    double delta = sheet_delta(g, t_tau, t_sigma);
    Vec4 ud = lower(g, t_tau);
    Vec4 vd = lower(g, t_sigma);
    StringMomentumForm out;
    out.delta = delta;
    // Scaled so that Pi evaluated on the worldsheet element
    // Y_x = t_sigma ^ t_tau is exactly one.
    double scale = 1.0 / (delta * delta);
    for (int mu = 0; mu < 4; ++mu)
        for (int nu = mu + 1; nu < 4; ++nu) {
            double v = (ud[mu] * vd[nu] - ud[nu] * vd[mu]) * scale;
            if (v != 0.0) out.pi.add({mu, nu}, v);
        }
    return out;
}

MomentumCurrents momentum_currents(const Vec4& t_tau, const Vec4& t_sigma, const Metric<double>& g) {
    double delta = sheet_delta(g, t_tau, t_sigma);
    double a = dot(g, t_tau, t_tau);
    double b = dot(g, t_sigma, t_sigma);
    double c = dot(g, t_tau, t_sigma);
    MomentumCurrents out;
    out.delta = delta;
    for (int mu = 0; mu < 4; ++mu) {
        out.p_tau[mu] = (t_tau[mu] * b - t_sigma[mu] * c) / delta;
        out.p_sigma[mu] = (t_sigma[mu] * a - t_tau[mu] * c) / delta;
    }
    return out;
}

StringIdentityReport identity_suite(const Vec4& t_tau, const Vec4& t_sigma, const Metric<double>& g) {
    MomentumCurrents mc = momentum_currents(t_tau, t_sigma, g);
    double a = dot(g, t_tau, t_tau);
    double b = dot(g, t_sigma, t_sigma);
    StringIdentityReport r;
    r.ptau_norm = std::abs(dot(g, mc.p_tau, mc.p_tau) + b);
    r.psigma_norm = std::abs(dot(g, mc.p_sigma, mc.p_sigma) + a);
    r.ptau_orth = std::abs(dot(g, mc.p_tau, t_sigma));
    r.psigma_orth = std::abs(dot(g, mc.p_sigma, t_tau));

    StringMomentumForm pf = pi_components(t_tau, t_sigma, g);
    KVector<double> vs(4, 1), vt(4, 1);
    for (int i = 0; i < 4; ++i) {
        if (t_sigma[i] != 0.0) vs.add({i}, t_sigma[i]);
        if (t_tau[i] != 0.0) vt.add({i}, t_tau[i]);
    }
    r.normalization = std::abs(pairing(pf.pi, wedge(vs, vt)) - 1.0);

    r.max_residual = std::max({r.ptau_norm, r.psigma_norm, r.ptau_orth, r.psigma_orth,
                               r.normalization});
    return r;
}

// --- light-cone solver -----------------------------------------------------

double LightConeState::dtau_of(const std::vector<std::vector<double>>& grid, int j, int i) const {
    if (j > 0 && j + 1 < n_tau) return (grid[j + 1][i] - grid[j - 1][i]) / (2 * dtau);
    if (j == 0) return (-3 * grid[0][i] + 4 * grid[1][i] - grid[2][i]) / (2 * dtau);
    return (3 * grid[j][i] - 4 * grid[j - 1][i] + grid[j - 2][i]) / (2 * dtau);
}

double LightConeState::dsigma_of(const std::vector<std::vector<double>>& grid, int j, int i) const {
    if (topology == StringTopology::Closed) {
        int ip = (i + 1) % n_sigma;
        int im = (i + n_sigma - 1) % n_sigma;
        return (grid[j][ip] - grid[j][im]) / (2 * dsigma);
    }
    if (i > 0 && i + 1 < n_sigma) return (grid[j][i + 1] - grid[j][i - 1]) / (2 * dsigma);
    // Open ends carry mirror ghosts, so the Neumann derivative is exactly zero.
    return 0.0;
}

LightConeState solve_light_cone(const LightConeInput& in) {
    if (in.n_sigma < 5) throw PreconditionError("solve_light_cone: grid too small");
    if (in.cfl <= 0.0 || in.cfl > 1.0)
        throw PreconditionError("solve_light_cone: CFL number dt/dsigma must lie in (0, 1]");
    if (!in.f0 || !in.g0) throw PreconditionError("solve_light_cone: missing initial profiles");

    LightConeState st;
    st.topology = in.topology;
    st.n_sigma = in.n_sigma;
    st.action_scale = in.action_scale;
    const bool closed = in.topology == StringTopology::Closed;
    // Open strings span [0,1] inclusive; closed ones sample the period [0,1).
    st.dsigma = closed ? 1.0 / in.n_sigma : 1.0 / (in.n_sigma - 1);
    st.dtau = in.cfl * st.dsigma;
    int steps = static_cast<int>(std::lround(in.tau_end / st.dtau));
    if (steps < 2) steps = 2;
    st.n_tau = steps + 1;

    auto fdot = in.f0_dot ? in.f0_dot : [](double) { return 0.0; };
    auto gdot = in.g0_dot ? in.g0_dot : [](double) { return 0.0; };

    st.f.assign(st.n_tau, std::vector<double>(st.n_sigma, 0.0));
    st.g.assign(st.n_tau, std::vector<double>(st.n_sigma, 0.0));

    for (int i = 0; i < st.n_sigma; ++i) {
        double s = st.sigma_at(i);
        st.f[0][i] = in.f0(s);
        st.g[0][i] = in.g0(s);
    }
    const double c2 = (st.dtau / st.dsigma) * (st.dtau / st.dsigma);

    auto lap = [&](const std::vector<double>& row, int i) {
        if (closed) {
            int ip = (i + 1) % st.n_sigma;
            int im = (i + st.n_sigma - 1) % st.n_sigma;
            return row[ip] - 2 * row[i] + row[im];
        }
        if (i == 0) return 2.0 * (row[1] - row[0]);              // mirror ghost row[-1] = row[1]
        if (i == st.n_sigma - 1) return 2.0 * (row[i - 1] - row[i]);
        return row[i + 1] - 2 * row[i] + row[i - 1];
    };

    // Taylor start: u^1 = u^0 + dt v + dt^2/2 u_sigma_sigma.
    for (int i = 0; i < st.n_sigma; ++i) {
        double s = st.sigma_at(i);
        st.f[1][i] = st.f[0][i] + st.dtau * fdot(s) + 0.5 * c2 * lap(st.f[0], i);
        st.g[1][i] = st.g[0][i] + st.dtau * gdot(s) + 0.5 * c2 * lap(st.g[0], i);
    }

    for (int j = 1; j + 1 < st.n_tau; ++j) {
        for (int i = 0; i < st.n_sigma; ++i) {
            st.f[j + 1][i] = 2 * st.f[j][i] - st.f[j - 1][i] + c2 * lap(st.f[j], i);
            st.g[j + 1][i] = 2 * st.g[j][i] - st.g[j - 1][i] + c2 * lap(st.g[j], i);
        }
    }
    return st;
}

double wave_residual(const LightConeState& st) {
    const bool closed = st.topology == StringTopology::Closed;
    double worst = 0.0;
    auto second4 = [](double m2, double m1, double c, double p1, double p2, double h) {
        return (-m2 + 16 * m1 - 30 * c + 16 * p1 - p2) / (12 * h * h);
    };
    for (const auto* grid : {&st.f, &st.g}) {
        const auto& u = *grid;
        for (int j = 2; j + 2 < st.n_tau; ++j) {
            for (int i = 0; i < st.n_sigma; ++i) {
                if (!closed && (i < 2 || i + 2 >= st.n_sigma)) continue;
                int im1 = closed ? (i + st.n_sigma - 1) % st.n_sigma : i - 1;
                int im2 = closed ? (i + st.n_sigma - 2) % st.n_sigma : i - 2;
                int ip1 = closed ? (i + 1) % st.n_sigma : i + 1;
                int ip2 = closed ? (i + 2) % st.n_sigma : i + 2;
                double utt = second4(u[j - 2][i], u[j - 1][i], u[j][i], u[j + 1][i], u[j + 2][i],
                                     st.dtau);
                double uss = second4(u[j][im2], u[j][im1], u[j][i], u[j][ip1], u[j][ip2],
                                     st.dsigma);
                worst = std::max(worst, std::abs(utt - uss));
            }
        }
    }
    return worst;
}

YReport reconstruct_y(LightConeState& st, double incompat_tolerance) {
    YReport rep;
    st.y.assign(st.n_tau, std::vector<double>(st.n_sigma, 0.0));
    const bool closed = st.topology == StringTopology::Closed;

    auto ydot = [&](int j, int i) {
        double fd = st.dtau_of(st.f, j, i);
        double gd = st.dtau_of(st.g, j, i);
        double fp = st.dsigma_of(st.f, j, i);
        double gp = st.dsigma_of(st.g, j, i);
        return 0.5 * (fd * fd + gd * gd + fp * fp + gp * gp);
    };
    auto yprime = [&](int j, int i) {
        double fd = st.dtau_of(st.f, j, i);
        double gd = st.dtau_of(st.g, j, i);
        double fp = st.dsigma_of(st.f, j, i);
        double gp = st.dsigma_of(st.g, j, i);
        return fd * fp + gd * gp;
    };

    // y(0,0) = 0; integrate y' along sigma at tau = 0 by trapezoid, then
    // y_dot upward in tau per column.
    st.y[0][0] = 0.0;
    for (int i = 1; i < st.n_sigma; ++i)
        st.y[0][i] = st.y[0][i - 1] + 0.5 * st.dsigma * (yprime(0, i - 1) + yprime(0, i));
    for (int i = 0; i < st.n_sigma; ++i)
        for (int j = 1; j < st.n_tau; ++j)
            st.y[j][i] = st.y[j - 1][i] + 0.5 * st.dtau * (ydot(j - 1, i) + ydot(j, i));

    if (closed) {
        double winding = 0.0;
        for (int i = 0; i < st.n_sigma; ++i) {
            int ip = (i + 1) % st.n_sigma;
            winding += 0.5 * st.dsigma * (yprime(0, i) + yprime(0, ip));
        }
        rep.zero_mode_winding = winding;
    }

    // Compatibility of the two constraint fields.
    for (int j = 1; j + 1 < st.n_tau; ++j) {
        for (int i = 0; i < st.n_sigma; ++i) {
            if (!closed && (i == 0 || i == st.n_sigma - 1)) continue;
            int ip = closed ? (i + 1) % st.n_sigma : i + 1;
            int im = closed ? (i + st.n_sigma - 1) % st.n_sigma : i - 1;
            double dt_yprime = (yprime(j + 1, i) - yprime(j - 1, i)) / (2 * st.dtau);
            double ds_ydot = (ydot(j, ip) - ydot(j, im)) / (2 * st.dsigma);
            rep.max_compat_residual = std::max(rep.max_compat_residual,
                                               std::abs(dt_yprime - ds_ydot));
        }
    }
    rep.flagged_incompatible = rep.max_compat_residual > incompat_tolerance;
    return rep;
}

EndpointNullReport endpoint_null_check(const LightConeState& st) {
    EndpointNullReport rep;
    if (st.topology == StringTopology::Closed) return rep; // no boundary
    rep.has_boundary = true;
    if (st.y.empty()) throw PreconditionError("endpoint_null_check: reconstruct_y has not run");
    for (int k = 0; k < 2; ++k) {
        int i = k == 0 ? 0 : st.n_sigma - 1;
        double worst = 0.0;
        for (int j = 1; j + 1 < st.n_tau; ++j) {
            double yd = (st.y[j + 1][i] - st.y[j - 1][i]) / (2 * st.dtau);
            double fd = st.dtau_of(st.f, j, i);
            double gd = st.dtau_of(st.g, j, i);
            worst = std::max(worst, std::abs(2 * yd - fd * fd - gd * gd));
        }
        rep.residual[k] = worst;
    }
    return rep;
}

// --- spacetime lift ----------------------------------------------------------

Metric<double> light_cone_metric() {
    std::vector<std::vector<double>> g(4, std::vector<double>(4, 0.0));
    g[0][1] = g[1][0] = 1.0;
    g[2][2] = -1.0;
    g[3][3] = -1.0;
    return Metric<double>(std::move(g));
}

Vec4 SheetGrid::d_tau(int j, int i) const {
    Vec4 out{};
    for (int mu = 0; mu < 4; ++mu) {
        if (j > 0 && j + 1 < n_tau)
            out[mu] = (at(j + 1, i)[mu] - at(j - 1, i)[mu]) / (2 * dtau);
        else if (j == 0)
            out[mu] = (-3 * at(0, i)[mu] + 4 * at(1, i)[mu] - at(2, i)[mu]) / (2 * dtau);
        else
            out[mu] = (3 * at(j, i)[mu] - 4 * at(j - 1, i)[mu] + at(j - 2, i)[mu]) / (2 * dtau);
    }
    return out;
}

Vec4 SheetGrid::d_sigma(int j, int i) const {
    Vec4 out{};
    for (int mu = 0; mu < 4; ++mu) {
        if (periodic_sigma) {
            int ip = (i + 1) % n_sigma;
            int im = (i + n_sigma - 1) % n_sigma;
            double hi = at(j, ip)[mu] + (ip < i ? seam_jump[mu] : 0.0);
            double lo = at(j, im)[mu] - (im > i ? seam_jump[mu] : 0.0);
            out[mu] = (hi - lo) / (2 * dsigma);
        } else if (i > 0 && i + 1 < n_sigma)
            out[mu] = (at(j, i + 1)[mu] - at(j, i - 1)[mu]) / (2 * dsigma);
        else if (i == 0)
            out[mu] = (-3 * at(j, 0)[mu] + 4 * at(j, 1)[mu] - at(j, 2)[mu]) / (2 * dsigma);
        else
            out[mu] = (3 * at(j, i)[mu] - 4 * at(j, i - 1)[mu] + at(j, i - 2)[mu]) / (2 * dsigma);
    }
    return out;
}

SheetGrid lift_to_spacetime(const LightConeState& st) {
    if (st.y.empty()) throw PreconditionError("lift_to_spacetime: reconstruct_y has not run");
    SheetGrid sheet;
    sheet.n_sigma = st.n_sigma;
    sheet.n_tau = st.n_tau;
    sheet.dsigma = st.dsigma;
    sheet.dtau = st.dtau;
    sheet.periodic_sigma = st.topology == StringTopology::Closed;
    sheet.lambda.resize(static_cast<std::size_t>(st.n_tau) * st.n_sigma);
    for (int j = 0; j < st.n_tau; ++j)
        for (int i = 0; i < st.n_sigma; ++i)
            sheet.at(j, i) = Vec4{st.tau_at(j), st.y[j][i], st.f[j][i], st.g[j][i]};
    if (sheet.periodic_sigma) {
        // y winds by the sigma integral of y' per period; f and g are periodic.
        double winding = 0.0;
        for (int i = 0; i < st.n_sigma; ++i) {
            int ip = (i + 1) % st.n_sigma;
            auto yprime = [&](int col) {
                double fd = st.dtau_of(st.f, 0, col);
                double gd = st.dtau_of(st.g, 0, col);
                double fp = st.dsigma_of(st.f, 0, col);
                double gp = st.dsigma_of(st.g, 0, col);
                return fd * fp + gd * gp;
            };
            winding += 0.5 * st.dsigma * (yprime(i) + yprime(ip));
        }
        sheet.seam_jump = Vec4{0.0, winding, 0.0, 0.0};
    }
    return sheet;
}

namespace {

// Currents with a degeneracy guard; nullopt marks Delta^2 under the floor.
std::optional<MomentumCurrents> currents_checked(const Metric<double>& g, const Vec4& t_tau,
                                                 const Vec4& t_sigma, double delta2_floor) {
    double a = 0.0, b = 0.0, c = 0.0;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) {
            a += g(i, j) * t_tau[i] * t_tau[j];
            b += g(i, j) * t_sigma[i] * t_sigma[j];
            c += g(i, j) * t_tau[i] * t_sigma[j];
        }
    double d2 = c * c - a * b;
    if (d2 < delta2_floor) return std::nullopt;
    MomentumCurrents out;
    out.delta = std::sqrt(d2);
    for (int mu = 0; mu < 4; ++mu) {
        out.p_tau[mu] = (t_tau[mu] * b - t_sigma[mu] * c) / out.delta;
        out.p_sigma[mu] = (t_sigma[mu] * a - t_tau[mu] * c) / out.delta;
    }
    return out;
}

} // namespace

CovariantResidualReport covariant_eom_residual(const SheetGrid& sheet, const Metric<double>& g,
                                               double rel_floor) {
    const int nj = sheet.n_tau;
    const int ni = sheet.n_sigma;
    // Tangents and Delta^2 everywhere first; the skip floor scales with the
    // largest element on the sheet.
    std::vector<Vec4> td(static_cast<std::size_t>(nj) * ni), ts(static_cast<std::size_t>(nj) * ni);
    std::vector<double> d2(static_cast<std::size_t>(nj) * ni, 0.0);
    double d2max = 0.0;
    for (int j = 0; j < nj; ++j)
        for (int i = 0; i < ni; ++i) {
            td[j * ni + i] = sheet.d_tau(j, i);
            ts[j * ni + i] = sheet.d_sigma(j, i);
            double a = 0, b = 0, cc = 0;
            for (int r = 0; r < 4; ++r)
                for (int s = 0; s < 4; ++s) {
                    a += g(r, s) * td[j * ni + i][r] * td[j * ni + i][s];
                    b += g(r, s) * ts[j * ni + i][r] * ts[j * ni + i][s];
                    cc += g(r, s) * td[j * ni + i][r] * ts[j * ni + i][s];
                }
            d2[j * ni + i] = cc * cc - a * b;
            d2max = std::max(d2max, d2[j * ni + i]);
        }
    const double floor_abs = rel_floor * d2max;

    std::vector<Vec4> ptau(static_cast<std::size_t>(nj) * ni);
    std::vector<Vec4> psig(static_cast<std::size_t>(nj) * ni);
    std::vector<char> valid(static_cast<std::size_t>(nj) * ni, 0);
    CovariantResidualReport rep;
    for (int j = 0; j < nj; ++j)
        for (int i = 0; i < ni; ++i) {
            if (d2[j * ni + i] < floor_abs || d2[j * ni + i] <= 0.0) {
                ++rep.skipped_degenerate;
                continue;
            }
            auto mc = currents_checked(g, td[j * ni + i], ts[j * ni + i], floor_abs);
            ptau[j * ni + i] = mc->p_tau;
            psig[j * ni + i] = mc->p_sigma;
            valid[j * ni + i] = 1;
        }
    for (int j = 1; j + 1 < nj; ++j) {
        for (int i = 0; i < ni; ++i) {
            bool interior_sigma = sheet.periodic_sigma || (i > 0 && i + 1 < ni);
            if (!interior_sigma) continue;
            int ip = sheet.periodic_sigma ? (i + 1) % ni : i + 1;
            int im = sheet.periodic_sigma ? (i + ni - 1) % ni : i - 1;
            if (!valid[j * ni + ip] || !valid[j * ni + im] || !valid[(j + 1) * ni + i] ||
                !valid[(j - 1) * ni + i])
                continue;
            double norm = 0.0;
            for (int mu = 0; mu < 4; ++mu) {
                double div = (psig[j * ni + ip][mu] - psig[j * ni + im][mu]) / (2 * sheet.dsigma) +
                             (ptau[(j + 1) * ni + i][mu] - ptau[(j - 1) * ni + i][mu]) /
                                 (2 * sheet.dtau);
                norm = std::max(norm, std::abs(div));
            }
            // First and last interior ring still lean on one-sided edge
            // derivatives of the currents; keep them out of the headline
            // number, reported separately.
            bool edge_adjacent = (j <= 1 || j + 2 >= nj) ||
                                 (!sheet.periodic_sigma && (i <= 1 || i + 2 >= ni));
            if (edge_adjacent)
                rep.edge_max = std::max(rep.edge_max, norm);
            else
                rep.max_interior = std::max(rep.max_interior, norm);
        }
    }
    return rep;
}

MomentumSeries total_momentum_series(const SheetGrid& sheet, const Metric<double>& g,
                                     double rel_floor) {
    MomentumSeries out;
    out.values.assign(sheet.n_tau, Vec4{});
    // Delta^2 scale of the sheet.
    double d2max = 0.0;
    for (int j = 0; j < sheet.n_tau; ++j)
        for (int i = 0; i < sheet.n_sigma; ++i) {
            Vec4 td = sheet.d_tau(j, i), ts = sheet.d_sigma(j, i);
            double a = 0, b = 0, cc = 0;
            for (int r = 0; r < 4; ++r)
                for (int s = 0; s < 4; ++s) {
                    a += g(r, s) * td[r] * td[s];
                    b += g(r, s) * ts[r] * ts[s];
                    cc += g(r, s) * td[r] * ts[s];
                }
            d2max = std::max(d2max, cc * cc - a * b);
        }
    const double floor_abs = std::max(rel_floor * d2max, 1e-300);

    for (int j = 0; j < sheet.n_tau; ++j) {
        Vec4 acc{};
        for (int i = 0; i < sheet.n_sigma; ++i) {
            Vec4 td = sheet.d_tau(j, i);
            auto mc = currents_checked(g, td, sheet.d_sigma(j, i), floor_abs);
            Vec4 p{};
            if (mc) {
                p = mc->p_tau;
            } else {
                // On a constraint-satisfying sheet the currents extend
                // continuously: p_tau = -lambda_dot where Delta vanishes.
                for (int mu = 0; mu < 4; ++mu) p[mu] = -td[mu];
                ++out.limit_substitutions;
            }
            double w = (!sheet.periodic_sigma && (i == 0 || i == sheet.n_sigma - 1)) ? 0.5 : 1.0;
            for (int mu = 0; mu < 4; ++mu) acc[mu] += w * p[mu] * sheet.dsigma;
        }
        out.values[j] = acc;
    }
    return out;
}

EmBoundaryReport em_boundary_residual(const SheetGrid& sheet, const Metric<double>& g,
                                      const FieldForm& field_strength, double charge) {
    EmBoundaryReport rep;
    if (sheet.periodic_sigma) return rep; // closed string: no boundary, electrically inert
    rep.has_boundary = true;
    if (field_strength.grade() != 2 || field_strength.dim() != 4)
        throw std::invalid_argument("em_boundary_residual: field strength must be a 2-form on R^4");
    for (int k = 0; k < 2; ++k) {
        int i = k == 0 ? 0 : sheet.n_sigma - 1;
        double worst = 0.0;
        for (int j = 1; j + 1 < sheet.n_tau; ++j) {
            Vec4 td = sheet.d_tau(j, i);
            Vec4 ts = sheet.d_sigma(j, i);
            auto mc = currents_checked(g, td, ts, 1e-6);
            // Degenerate null end: the constraint-forced limit is p_sigma = lambda'.
            Vec4 psig = mc ? mc->p_sigma : ts;
            KForm<double> f = field_strength.at(std::span<const double>(sheet.at(j, i).data(), 4));
            double sign = k == 0 ? 1.0 : -1.0; // (-1)^k
            for (int mu = 0; mu < 4; ++mu) {
                double fmu = 0.0;
                for (int r = 0; r < 4; ++r)
                    for (int nu = 0; nu < 4; ++nu) fmu += g.inv(mu, r) * f.get({r, nu}) * td[nu];
                worst = std::max(worst, std::abs(psig[mu] - sign * charge * fmu));
            }
        }
        rep.residual[k] = worst;
    }
    return rep;
}

std::array<double, 4> eom_rank_singular_values(const SheetGrid& sheet, const Metric<double>& g,
                                               int j, int i, double eps) {
    if (j < 2 || j + 2 >= sheet.n_tau || i < 2 || i + 2 >= sheet.n_sigma)
        throw PreconditionError("eom_rank_singular_values: need a deep-interior point");

    auto divergence_at = [&](const SheetGrid& s) {
        Vec4 out{};
        for (int mu = 0; mu < 4; ++mu) {
            MomentumCurrents pp = momentum_currents(s.d_tau(j, i + 1), s.d_sigma(j, i + 1), g);
            MomentumCurrents pm = momentum_currents(s.d_tau(j, i - 1), s.d_sigma(j, i - 1), g);
            MomentumCurrents tp = momentum_currents(s.d_tau(j + 1, i), s.d_sigma(j + 1, i), g);
            MomentumCurrents tm = momentum_currents(s.d_tau(j - 1, i), s.d_sigma(j - 1, i), g);
            out[mu] = (pp.p_sigma[mu] - pm.p_sigma[mu]) / (2 * s.dsigma) +
                      (tp.p_tau[mu] - tm.p_tau[mu]) / (2 * s.dtau);
        }
        return out;
    };

    Vec4 base = divergence_at(sheet);
    double jac[4][4];
    for (int dir = 0; dir < 4; ++dir) {
        SheetGrid pert = sheet;
        pert.at(j, i)[dir] += eps;
        Vec4 d = divergence_at(pert);
        for (int mu = 0; mu < 4; ++mu) jac[mu][dir] = (d[mu] - base[mu]) / eps;
    }

    // Singular values via Jacobi eigen-iteration on J^T J.
    double a[4][4];
    for (int r = 0; r < 4; ++r)
        for (int c = 0; c < 4; ++c) {
            a[r][c] = 0.0;
            for (int k = 0; k < 4; ++k) a[r][c] += jac[k][r] * jac[k][c];
        }
    for (int sweep = 0; sweep < 50; ++sweep) {
        double off = 0.0;
        for (int p = 0; p < 4; ++p)
            for (int q = p + 1; q < 4; ++q) off += a[p][q] * a[p][q];
        if (off < 1e-30) break;
        for (int p = 0; p < 4; ++p)
            for (int q = p + 1; q < 4; ++q) {
                if (std::abs(a[p][q]) < 1e-300) continue;
                double theta = 0.5 * std::atan2(2 * a[p][q], a[q][q] - a[p][p]);
                double c = std::cos(theta), s = std::sin(theta);
                for (int k = 0; k < 4; ++k) {
                    double akp = a[k][p], akq = a[k][q];
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for (int k = 0; k < 4; ++k) {
                    double apk = a[p][k], aqk = a[q][k];
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
            }
    }
    std::array<double, 4> sv{};
    for (int k = 0; k < 4; ++k) sv[k] = std::sqrt(std::max(0.0, a[k][k]));
    std::sort(sv.begin(), sv.end(), std::greater<double>());
    return sv;
}

} // namespace extcal
