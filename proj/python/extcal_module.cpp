#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "extcal/chains.hpp"
#include "extcal/elliptic.hpp"
#include "extcal/membrane.hpp"
#include "extcal/scenario.hpp"
#include "extcal/stringdyn.hpp"
#include "extcal/suite.hpp"
#include "extcal/worldline.hpp"

namespace py = pybind11;
using namespace extcal;

namespace {

py::dict spherical_run_to_dict(const SphericalRun& run) {
    py::list tau, r, rdot, c;
    for (const auto& s : run.samples) {
        tau.append(s.tau);
        r.append(s.r);
        rdot.append(s.rdot);
        c.append(s.first_integral);
    }
    py::dict out;
    out["tau"] = tau;
    out["r"] = r;
    out["rdot"] = rdot;
    out["first_integral"] = c;
    out["stopped_near_collapse"] = run.stopped_near_collapse;
    out["max_first_integral_rel_drift"] = run.max_first_integral_rel_drift;
    return out;
}

py::dict solve_string_py(const std::string& topology, int n_sigma, double cfl, double tau_end,
                         double amplitude, int mode) {
    LightConeInput in;
    if (topology == "open") in.topology = StringTopology::Open;
    else if (topology == "closed") in.topology = StringTopology::Closed;
    else throw PreconditionError("topology must be open or closed");
    in.n_sigma = n_sigma;
    in.cfl = cfl;
    in.tau_end = tau_end;
    const double pi = 3.14159265358979323846;
    if (in.topology == StringTopology::Open) {
        in.f0 = [amplitude, mode, pi](double s) { return amplitude * std::cos(mode * pi * s); };
    } else {
        in.f0 = [amplitude, mode, pi](double s) {
            return amplitude * std::sin(2 * pi * mode * s);
        };
        in.f0_dot = [amplitude, mode, pi](double s) {
            return -amplitude * 2 * pi * mode * std::cos(2 * pi * mode * s);
        };
    }
    in.g0 = [](double) { return 0.0; };
    LightConeState st = solve_light_cone(in);
    YReport yr = reconstruct_y(st);
    SheetGrid sheet = lift_to_spacetime(st);
    auto cov = covariant_eom_residual(sheet, light_cone_metric(), 0.05);
    auto ep = endpoint_null_check(st);

    py::dict out;
    out["n_sigma"] = st.n_sigma;
    out["n_tau"] = st.n_tau;
    out["dsigma"] = st.dsigma;
    out["wave_residual"] = wave_residual(st);
    out["compat_residual"] = yr.max_compat_residual;
    out["covariant_residual"] = cov.max_interior;
    out["has_boundary"] = ep.has_boundary;
    if (ep.has_boundary)
        out["endpoint_residual"] = std::max(ep.residual[0], ep.residual[1]);
    return out;
}

std::string run_scenarios_py(const std::string& doc, const std::string& out_dir,
                             double tol_scale) {
    RunOptions opts;
    opts.out_dir = out_dir;
    opts.tol_scale = tol_scale;
    json parsed = json::parse(doc);
    RunOutcome outcome = run_scenarios(parsed, opts);
    ordered_json reports = ordered_json::array();
    for (const auto& r : outcome.reports) reports.push_back(report_to_json(r));
    ordered_json out;
    out["overall_pass"] = outcome.overall_pass();
    out["reports"] = std::move(reports);
    out["artifacts"] = outcome.artifacts;
    return out.dump(2);
}

std::string run_suite_py(std::uint64_t seed) { return report_to_json(run_suite(seed)).dump(2); }

double stokes_residual_py(const std::string& form_json, const std::string& chain, int points) {
    FieldForm om = form_from_json(json::parse(form_json));
    int r = chain == "unit-cube" ? 3 : 2;
    auto q = QuadratureRule::gauss_legendre(points);
    return stokes_residual(om, Chain::single(SingularCube::unit(r)), q);
}

bool pullback_commutes_py(const std::string& form_json, const std::string& map_json) {
    FieldForm om = form_from_json(json::parse(form_json));
    SmoothMap f = map_from_json(json::parse(map_json));
    return d(pullback(f, om)).equals_exact(pullback(f, d(om)));
}

py::dict integrate_particle_py(double mass, double charge, double b_field,
                               std::vector<double> u0, double tau_end, double step) {
    ParticleScenario sc;
    sc.mass = mass;
    sc.charge = charge;
    if (u0.size() != 4) throw PreconditionError("u0 must have four components");
    for (int i = 0; i < 4; ++i) sc.u0[i] = u0[i];
    sc.step = step;
    sc.tau_end = tau_end;
    if (b_field != 0.0) {
        FieldForm a(4, 1);
        // A = -B x1 dx2: uniform magnetic field in the 1-2 plane
        PolyField x1 = PolyField::variable(4, 1);
        a.add_term({2}, ScalarField(Rational(-1) * x1));
        // scale by B through a numeric wrapper to keep arbitrary B exact enough
        FieldForm scaled(4, 1);
        scaled.add_term({2}, ScalarField(NumericField(4, [b_field](std::span<const double> x) {
                            return -b_field * x[1];
                        })));
        sc.potential = scaled;
    }
    auto traj = integrate_worldline(sc);
    py::list tau, x, p;
    for (const auto& s : traj.samples) {
        tau.append(s.tau);
        x.append(py::make_tuple(s.x[0], s.x[1], s.x[2], s.x[3]));
        p.append(py::make_tuple(s.p[0], s.p[1], s.p[2], s.p[3]));
    }
    py::dict out;
    out["tau"] = tau;
    out["x"] = x;
    out["p"] = p;
    out["max_shell_residual"] = traj.max_shell_residual;
    return out;
}

} // namespace

PYBIND11_MODULE(_extcal, m) {
    m.doc() = "Exterior-calculus verification engines: forms, chains, and the "
              "relativistic particle/string/membrane reductions";

    py::register_exception<SchemaError>(m, "SchemaError");
    py::register_exception<PreconditionError>(m, "PreconditionError");
    py::register_exception<NumericalAbort>(m, "NumericalAbort");

    m.def("elliptic_K", &elliptic_K, py::arg("k"),
          "Complete elliptic integral of the first kind via the AGM");
    m.def("jacobi_cn", &jacobi_cn, py::arg("u"), py::arg("k"));
    m.def(
        "jacobi_elliptic",
        [](double u, double k) {
            auto jv = jacobi_elliptic(u, k);
            return py::make_tuple(jv.sn, jv.cn, jv.dn);
        },
        py::arg("u"), py::arg("k"), "Jacobi (sn, cn, dn) by the descending Landen recursion");

    m.def("spherical_closed_form", &spherical_closed_form, py::arg("r_max"), py::arg("tau"));
    m.def("spherical_collapse_time", &spherical_collapse_time, py::arg("r_max"));
    m.def("spherical_collapse_time_quadrature", &spherical_collapse_time_quadrature,
          py::arg("r_max"), py::arg("points") = 512);
    m.def(
        "integrate_spherical",
        [](double r0, double rdot0, double tau_end, double step) {
            return spherical_run_to_dict(integrate_spherical(r0, rdot0, tau_end, step));
        },
        py::arg("r0"), py::arg("rdot0"), py::arg("tau_end"), py::arg("step") = 1e-4);

    m.def("solve_string", &solve_string_py, py::arg("topology"), py::arg("n_sigma") = 65,
          py::arg("cfl") = 0.5, py::arg("tau_end") = 2.0, py::arg("amplitude") = 0.1,
          py::arg("mode") = 1,
          "Light-cone evolution with constraint reconstruction; returns residual maxima");

    m.def("integrate_particle", &integrate_particle_py, py::arg("mass") = 1.0,
          py::arg("charge") = 0.0, py::arg("b_field") = 0.0,
          py::arg("u0") = std::vector<double>{1, 0, 0, 0}, py::arg("tau_end") = 1.0,
          py::arg("step") = 1e-3);

    m.def("run_scenarios", &run_scenarios_py, py::arg("doc"), py::arg("out_dir") = ".",
          py::arg("tol_scale") = 1.0,
          "Run a scenario JSON document (object or array); returns a JSON summary");
    m.def("run_suite", &run_suite_py, py::arg("seed") = 12345,
          "Run the built-in verification suite; returns the report as JSON");
    m.def("stokes_residual", &stokes_residual_py, py::arg("form_json"),
          py::arg("chain") = "unit-square", py::arg("points") = 8);
    m.def("pullback_commutes_d", &pullback_commutes_py, py::arg("form_json"),
          py::arg("map_json"));
}
