#include "extcal/scenario.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "extcal/chains.hpp"
#include "extcal/membrane.hpp"
#include "extcal/stringdyn.hpp"
#include "extcal/worldline.hpp"

namespace extcal {

namespace {

std::string artifact_path(const RunOptions& opts, const std::string& name, const std::string& suffix) {
    return opts.out_dir + "/" + name + suffix;
}

double field(const json& j, const char* key, double fallback) {
    if (!j.contains(key)) return fallback;
    if (!j.at(key).is_number()) throw SchemaError(std::string(key) + ": expected a number");
    return j.at(key).get<double>();
}

json require(const json& j, const char* key) {
    if (!j.contains(key)) throw SchemaError(std::string("missing field: ") + key);
    return j.at(key);
}

Vec4 vec4_from(const json& j, const char* key) {
    json v = require(j, key);
    if (!v.is_array() || v.size() != 4) throw SchemaError(std::string(key) + ": expected 4 numbers");
    Vec4 out{};
    for (int i = 0; i < 4; ++i) out[i] = v[i].get<double>();
    return out;
}

// ---------------------------------------------------------------- forms-check

VerificationReport run_forms_check(const json& payload, const RunOptions& opts,
                                   const std::string& name, std::uint64_t seed) {
    VerificationReport rep;
    rep.title = name;
    rep.seed = seed;

    FieldForm omega = form_from_json(require(payload, "form"));
    SmoothMap f = map_from_json(require(payload, "map"));
    if (f.codomain_dim() != omega.dim())
        throw PreconditionError("forms-check: map codomain does not match the form dimension");

    FieldForm dw = d(omega);
    FieldForm pull_dw = pullback(f, dw);
    FieldForm d_pull = d(pullback(f, omega));
    rep.add_flag("pullback-commutes-d", "f*(d omega) = d(f* omega), exact",
                 pull_dw.equals_exact(d_pull));
    rep.add_flag("poincare", "d(d omega) = 0, exact", d(dw).is_exact_zero());

    if (payload.contains("expected_pullback_of_d")) {
        FieldForm expected = form_from_json(payload.at("expected_pullback_of_d"));
        rep.add_flag("pullback-golden", "f*(d omega) matches the stated polynomial, exact",
                     pull_dw.equals_exact(expected));
    }

    if (payload.contains("stokes_chain")) {
        const json& spec = payload.at("stokes_chain");
        Chain chain(0, 0);
        if (spec.is_string()) {
            std::string which = spec.get<std::string>();
            if (which == "unit-square") chain = Chain::single(SingularCube::unit(2));
            else if (which == "unit-cube") chain = Chain::single(SingularCube::unit(3));
            else throw SchemaError("stokes_chain: expected unit-square, unit-cube, or a chain object");
        } else {
            chain = chain_from_json(spec);
        }
        if (omega.dim() != chain.target_dim || omega.grade() != chain.r - 1)
            throw PreconditionError("forms-check: the stokes chain needs an (r-1)-form on its "
                                    "target space");
        int pts = static_cast<int>(field(payload, "points_per_axis", 8));
        if (pts < 1 || pts > 64) throw SchemaError("points_per_axis out of range");
        auto q = QuadratureRule::gauss_legendre(pts);
        double resid = stokes_residual(omega, chain, q);
        rep.add("stokes", "int_C d(omega) = int_dC omega", resid, 1e-8 * opts.tol_scale);
    }
    return rep;
}

// ------------------------------------------------------------------- particle

MetricField metric_from_json(const json& j) {
    std::string type = require(j, "type").get<std::string>();
    if (type == "minkowski") return MetricField::constant(Metric<double>::minkowski(4));
    if (type == "constant") {
        json g = require(j, "g");
        if (!g.is_array() || g.size() != 4) throw SchemaError("metric: g must be 4x4");
        std::vector<std::vector<double>> m(4, std::vector<double>(4, 0.0));
        for (int i = 0; i < 4; ++i) {
            if (!g[i].is_array() || g[i].size() != 4) throw SchemaError("metric: g must be 4x4");
            for (int k = 0; k < 4; ++k) m[i][k] = g[i][k].get<double>();
        }
        try {
            return MetricField::constant(Metric<double>(std::move(m)));
        } catch (const std::invalid_argument& e) {
            throw PreconditionError(std::string("metric: ") + e.what());
        }
    }
    if (type == "polynomial") {
        json g = require(j, "g");
        if (!g.is_array() || g.size() != 4) throw SchemaError("metric: g must be 4x4");
        std::vector<std::vector<ScalarField>> comps;
        for (int i = 0; i < 4; ++i) {
            if (!g[i].is_array() || g[i].size() != 4) throw SchemaError("metric: g must be 4x4");
            std::vector<ScalarField> row;
            for (int k = 0; k < 4; ++k) row.emplace_back(poly_from_json(g[i][k]));
            comps.push_back(std::move(row));
        }
        return MetricField::from_components(4, std::move(comps));
    }
    throw SchemaError("metric: unknown type " + type);
}

VerificationReport run_particle(const json& payload, const RunOptions& opts,
                                const std::string& name, std::uint64_t seed,
                                std::vector<std::string>& artifacts) {
    VerificationReport rep;
    rep.title = name;
    rep.seed = seed;

    ParticleScenario sc;
    sc.mass = field(payload, "mass", 1.0);
    sc.charge = field(payload, "charge", 0.0);
    if (sc.mass <= 0.0) throw PreconditionError("particle: mass must be positive");
    sc.metric = metric_from_json(require(payload, "metric"));
    if (payload.contains("potential")) {
        FieldForm a = form_from_json(payload.at("potential"));
        if (a.grade() != 1 || a.dim() != 4)
            throw SchemaError("particle: potential must be a 1-form on R^4");
        sc.potential = std::move(a);
    }
    sc.x0 = vec4_from(payload, "x0");
    sc.u0 = vec4_from(payload, "u0");
    sc.tau_end = field(payload, "tau_end", 1.0);
    sc.step = field(payload, "step", 1e-3);

    WorldlineTrajectory traj = integrate_worldline(sc);

    std::ostringstream csv;
    csv << "tau,x0,x1,x2,x3,p0,p1,p2,p3\n";
    for (const auto& s : traj.samples) {
        csv << format_double(s.tau);
        for (double v : s.x) csv << ',' << format_double(v);
        for (double v : s.p) csv << ',' << format_double(v);
        csv << '\n';
    }
    std::string csv_path = artifact_path(opts, name, "_trajectory.csv");
    atomic_write(csv_path, csv.str());
    artifacts.push_back(csv_path);

    rep.add("mass-shell", "p.p = m^2 along the worldline", traj.max_shell_residual,
            1e-8 * opts.tol_scale);
    rep.add("gauge-drift", "|u.u - 1| before per-step renormalization", traj.max_gauge_drift,
            1e-3 * opts.tol_scale);
    if (sc.charge == 0.0 && sc.metric.is_constant()) {
        double drift = 0.0;
        for (const auto& s : traj.samples)
            for (int i = 0; i < 4; ++i)
                drift = std::max(drift, std::abs(s.p[i] - traj.samples.front().p[i]));
        rep.add("momentum-conservation", "free particle: p(tau) = p(0)", drift,
                1e-10 * opts.tol_scale);
    }
    return rep;
}

// --------------------------------------------------------------------- string

std::function<double(double)> profile_value(const json& j) {
    std::string type = require(j, "type").get<std::string>();
    if (type == "zero") return [](double) { return 0.0; };
    if (type == "cosine-series") {
        std::vector<double> coeffs = require(j, "coeffs").get<std::vector<double>>();
        return [coeffs](double s) {
            double acc = 0.0;
            for (std::size_t m = 0; m < coeffs.size(); ++m)
                acc += coeffs[m] * std::cos((m + 1) * std::numbers::pi * s);
            return acc;
        };
    }
    double a = field(j, "amplitude", 0.1);
    int m = static_cast<int>(field(j, "mode", 1));
    if (type == "cosine")
        return [a, m](double s) { return a * std::cos(m * std::numbers::pi * s); };
    if (type == "traveling")
        return [a, m](double s) { return a * std::sin(2 * std::numbers::pi * m * s); };
    throw SchemaError("profile: unknown type " + type);
}

std::function<double(double)> profile_velocity(const json& j) {
    std::string type = require(j, "type").get<std::string>();
    if (type == "zero" || type == "cosine" || type == "cosine-series")
        return [](double) { return 0.0; };
    double a = field(j, "amplitude", 0.1);
    int m = static_cast<int>(field(j, "mode", 1));
    if (type == "traveling") {
        // B(sigma - tau): d/dtau at tau=0 is -B'(sigma).
        return [a, m](double s) {
            return -a * 2 * std::numbers::pi * m * std::cos(2 * std::numbers::pi * m * s);
        };
    }
    throw SchemaError("profile: unknown type " + type);
}

VerificationReport run_string(const json& payload, const RunOptions& opts, const std::string& name,
                              std::uint64_t seed, std::vector<std::string>& artifacts) {
    VerificationReport rep;
    rep.title = name;
    rep.seed = seed;

    LightConeInput in;
    std::string topo = require(payload, "topology").get<std::string>();
    if (topo == "open") in.topology = StringTopology::Open;
    else if (topo == "closed") in.topology = StringTopology::Closed;
    else throw SchemaError("string: topology must be open or closed");
    in.n_sigma = static_cast<int>(field(payload, "n_sigma", 65));
    in.cfl = field(payload, "cfl", 0.5);
    in.tau_end = field(payload, "tau_end", 2.0);
    in.action_scale = field(payload, "action_scale", 1.0);
    in.f0 = profile_value(require(payload, "f0"));
    in.f0_dot = profile_velocity(require(payload, "f0"));
    in.g0 = profile_value(require(payload, "g0"));
    in.g0_dot = profile_velocity(require(payload, "g0"));
    if (in.topology == StringTopology::Open) {
        // Neumann compatibility: cosine or zero profiles only.
        for (const char* key : {"f0", "g0"}) {
            std::string t = require(payload.at(key), "type").get<std::string>();
            if (t != "zero" && t != "cosine" && t != "cosine-series")
                throw PreconditionError("string: open topology requires Neumann-compatible "
                                        "(zero/cosine) profiles");
        }
    }

    LightConeState st = solve_light_cone(in);
    YReport yrep = reconstruct_y(st);
    SheetGrid sheet = lift_to_spacetime(st);
    Metric<double> eta = light_cone_metric();

    const double h = st.dsigma;
    const double tol_h2 = field(payload, "grid_tolerance_scale", 100.0) * h * h * opts.tol_scale;

    rep.add("wave-residual", "f_tt = f_ss and g_tt = g_ss on the grid", wave_residual(st), tol_h2);
    rep.add("constraint-compatibility", "d_tau(y') = d_sigma(y_dot)", yrep.max_compat_residual,
            tol_h2);
    double cov_floor = field(payload, "covariant_floor", 0.05);
    CovariantResidualReport cov = covariant_eom_residual(sheet, eta, cov_floor);
    rep.add("covariant-eom", "d_sigma p_sigma + d_tau p_tau = 0 on the lift", cov.max_interior,
            tol_h2);

    auto momenta = total_momentum_series(sheet, eta);
    double pdrift = 0.0;
    for (std::size_t j = 1; j + 1 < momenta.values.size(); ++j)
        for (int mu = 0; mu < 4; ++mu)
            pdrift = std::max(pdrift, std::abs(momenta.values[j][mu] - momenta.values[1][mu]));
    rep.add("momentum-conservation", "int p_tau dsigma constant in tau", pdrift, tol_h2);

    {
        // The action prefactor never enters the equations of motion; it scales
        // the reported total momentum only.
        std::ostringstream p;
        p << "total momentum x action scale = (";
        for (int mu = 0; mu < 4; ++mu)
            p << (mu ? ", " : "") << format_double(in.action_scale * momenta.values[1][mu]);
        p << ")";
        rep.add_flag("total-momentum", p.str(), true);
    }

    if (in.topology == StringTopology::Open) {
        EndpointNullReport ep = endpoint_null_check(st);
        rep.add("endpoint-null", "2 y_dot = f_dot^2 + g_dot^2 at the ends",
                std::max(ep.residual[0], ep.residual[1]), tol_h2);
    } else {
        rep.add_flag("zero-mode-winding",
                     "closed string: y gains int y' dsigma per period (reported)", true);
    }

    double charge = field(payload, "charge", 0.0);
    if (payload.contains("potential") && charge != 0.0) {
        FieldForm a = form_from_json(payload.at("potential"));
        if (a.grade() != 1 || a.dim() != 4)
            throw SchemaError("string: potential must be a 1-form on R^4");
        FieldForm fstr = d(a);
        rep.add_flag("maxwell-closure", "d(dA) = 0, exact", d(fstr).is_exact_zero());
        EmBoundaryReport em = em_boundary_residual(sheet, eta, fstr, charge);
        if (em.has_boundary) {
            // Reported: the free solution does not satisfy the charged
            // boundary condition, so this is diagnostic output, not a gate.
            rep.add_flag("em-boundary-reported",
                         "p_sigma = (-1)^k q F(lambda_dot) residual recorded", true);
        }
    }

    std::ostringstream csv;
    csv << "sigma,tau,f,g,y\n";
    for (int j = 0; j < st.n_tau; ++j)
        for (int i = 0; i < st.n_sigma; ++i)
            csv << format_double(st.sigma_at(i)) << ',' << format_double(st.tau_at(j)) << ','
                << format_double(st.f[j][i]) << ',' << format_double(st.g[j][i]) << ','
                << format_double(st.y[j][i]) << '\n';
    std::string csv_path = artifact_path(opts, name, "_grid.csv");
    atomic_write(csv_path, csv.str());
    artifacts.push_back(csv_path);
    return rep;
}

// ------------------------------------------------------------------- membrane

VerificationReport run_membrane(const json& payload, const RunOptions& opts,
                                const std::string& name, std::uint64_t seed,
                                std::vector<std::string>& artifacts) {
    VerificationReport rep;
    rep.title = name;
    rep.seed = seed;

    double r0 = field(payload, "r0", 1.0);
    double rdot0 = field(payload, "rdot0", 0.0);
    double tau_end = field(payload, "tau_end", 1.4);
    double step = field(payload, "step", 1e-4);

    SphericalRun run = integrate_spherical(r0, rdot0, tau_end, step);

    std::ostringstream csv;
    csv << "tau,R,Rdot,c\n";
    for (const auto& s : run.samples)
        csv << format_double(s.tau) << ',' << format_double(s.r) << ',' << format_double(s.rdot)
            << ',' << format_double(s.first_integral) << '\n';
    std::string csv_path = artifact_path(opts, name, "_radius.csv");
    atomic_write(csv_path, csv.str());
    artifacts.push_back(csv_path);

    rep.add("first-integral", "R^2 / sqrt(1 - R_dot^2) constant (relative drift)",
            run.max_first_integral_rel_drift, 1e-8 * opts.tol_scale);

    if (rdot0 == 0.0) {
        // Started at the turning point: R(tau) = r0 cn(sqrt2 tau / r0 | 1/sqrt2).
        double worst = 0.0;
        const double k = 1.0 / std::numbers::sqrt2;
        for (const auto& s : run.samples) {
            double want = r0 * jacobi_cn(std::numbers::sqrt2 / r0 * s.tau, k);
            worst = std::max(worst, std::abs(s.r - want));
        }
        rep.add("closed-form-match", "R(tau) = R_max cn(sqrt2 tau / R_max | 1/sqrt2)", worst,
                1e-6 * opts.tol_scale);
    }
    rep.add_flag("near-collapse-stop", "clean stop once R_dot^2 > 1 - 1e-6",
                 run.stopped_near_collapse || run.samples.back().tau >= tau_end - step);
    return rep;
}

// ---------------------------------------------------------------------- runner

VerificationReport dispatch(const json& scenario, const RunOptions& opts,
                            std::vector<std::string>& artifacts) {
    if (!scenario.is_object()) throw SchemaError("scenario: expected an object");
    std::string kind = require(scenario, "kind").get<std::string>();
    std::uint64_t seed = opts.seed_override
                             ? *opts.seed_override
                             : (scenario.contains("seed") ? scenario.at("seed").get<std::uint64_t>()
                                                          : 12345ull);
    std::string name = scenario.contains("name") ? scenario.at("name").get<std::string>() : kind;
    json payload = require(scenario, "payload");

    VerificationReport rep;
    if (kind == "forms-check") rep = run_forms_check(payload, opts, name, seed);
    else if (kind == "particle") rep = run_particle(payload, opts, name, seed, artifacts);
    else if (kind == "string") rep = run_string(payload, opts, name, seed, artifacts);
    else if (kind == "membrane") rep = run_membrane(payload, opts, name, seed, artifacts);
    else throw SchemaError("scenario: unknown kind " + kind);

    std::string rep_path = artifact_path(opts, name, "_report.json");
    atomic_write(rep_path, report_to_json(rep).dump(2) + "\n");
    artifacts.push_back(rep_path);
    return rep;
}

} // namespace

RunOutcome run_scenarios(const json& doc, const RunOptions& opts) {
    RunOutcome out;
    if (doc.is_array()) {
        for (const auto& sc : doc) out.reports.push_back(dispatch(sc, opts, out.artifacts));
        return out;
    }
    out.reports.push_back(dispatch(doc, opts, out.artifacts));
    return out;
}

RunOutcome run_scenario_file(const std::string& path, const RunOptions& opts) {
    std::ifstream in(path);
    if (!in) throw SchemaError("cannot open scenario file: " + path);
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw SchemaError(std::string("scenario JSON parse error: ") + e.what());
    }
    return run_scenarios(doc, opts);
}

} // namespace extcal
