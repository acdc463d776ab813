// Acceptance gate: every criterion below runs at its stated tolerance and
// prints one PASS/FAIL line. Exit status is the number of failing criteria.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <unistd.h>
#include <vector>

#include "extcal/serialize.hpp"

#include "extcal/chains.hpp"
#include "extcal/elliptic.hpp"
#include "extcal/membrane.hpp"
#include "extcal/report.hpp"
#include "extcal/stringdyn.hpp"
#include "extcal/worldline.hpp"

using namespace extcal;

namespace {

constexpr double kPi = std::numbers::pi;

struct Criterion {
    std::string name;
    std::function<bool(std::string&)> run;
};

Rational rand_rational(Rng& rng) { return Rational(rng.range(-6, 6), rng.range(1, 3)); }

PolyField rand_poly(Rng& rng, int nvars, int max_deg, int nterms) {
    PolyField p(nvars);
    for (int t = 0; t < nterms; ++t) {
        std::vector<int> e(nvars, 0);
        int budget = max_deg;
        for (int i = 0; i < nvars && budget > 0; ++i) {
            int d = static_cast<int>(rng.range(0, std::min(budget, 2)));
            e[i] = d;
            budget -= d;
        }
        p.add_term(e, rand_rational(rng));
    }
    return p;
}

FieldForm rand_form(Rng& rng, int dim, int grade, int max_deg = 3) {
    FieldForm f(dim, grade);
    for (const auto& mi : canonical_basis(dim, grade))
        if (rng.uniform() < 0.8) f.add_term(mi.idx, ScalarField(rand_poly(rng, dim, max_deg, 3)));
    return f;
}

SmoothMap rand_poly_map(Rng& rng, int domain, int codomain, int max_deg = 2) {
    std::vector<ScalarField> comps;
    for (int i = 0; i < codomain; ++i) comps.emplace_back(rand_poly(rng, domain, max_deg, 3));
    return SmoothMap(domain, std::move(comps));
}

KVector<Rational> rand_kvector(Rng& rng, int dim, int grade) {
    KVector<Rational> v(dim, grade);
    for (const auto& mi : canonical_basis(dim, grade))
        if (rng.uniform() < 0.8) v.add(mi.idx, rand_rational(rng));
    return v;
}

double mdot(const Metric<double>& g, const Vec4& a, const Vec4& b) {
    double acc = 0.0;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) acc += g(i, j) * a[i] * b[j];
    return acc;
}

// --- criterion bodies --------------------------------------------------------

bool criterion1_pullback_golden(std::string& detail) {
    auto start = std::chrono::steady_clock::now();

    PolyField x = PolyField::variable(3, 0);
    PolyField y = PolyField::variable(3, 1);
    FieldForm om(3, 2);
    om.add_term({1, 2}, ScalarField(x));
    om.add_term({2, 0}, ScalarField(x * y * y));
    om.add_term({0, 1}, ScalarField(PolyField::constant(3, Rational(3))));
    PolyField u = PolyField::variable(3, 0);
    PolyField v = PolyField::variable(3, 1);
    PolyField w = PolyField::variable(3, 2);
    SmoothMap f(3, {ScalarField(u * u + v), ScalarField(v * v + w), ScalarField(w + v)});

    FieldForm pull_dw = pullback(f, d(om));
    PolyField expected = (Rational(2) * u) *
                         (Rational(2) * v - PolyField::constant(3, Rational(1))) *
                         (PolyField::constant(3, Rational(1)) +
                          Rational(2) * ((u * u + v) * (v * v + w)));
    FieldForm want(3, 3);
    want.add_term({0, 1, 2}, ScalarField(expected));

    bool equal = pull_dw.equals_exact(want) && d(pullback(f, om)).equals_exact(pull_dw);
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    detail = "exact=" + std::string(equal ? "yes" : "no") + " runtime=" + std::to_string(secs) + "s";
    return equal && secs < 1.0;
}

bool criterion2_reparam_values(std::string& detail) {
    auto q = QuadratureRule::gauss_legendre(8);
    PolyField t = PolyField::variable(1, 0);
    SmoothMap line(1, {ScalarField(Rational(1) * t), ScalarField(Rational(2) * t)});
    SmoothMap line2(1, {ScalarField(t * t), ScalarField(Rational(2) * (t * t))});
    PolyField su = PolyField::variable(2, 0), sv = PolyField::variable(2, 1);
    ScalarField f_sq(su * su + sv * sv);
    ScalarField f_len(
        NumericField(2, [](std::span<const double> x) { return std::hypot(x[0], x[1]); }));
    double i_tau = velocity_functional(f_sq, line, q);
    double i_sigma = velocity_functional(f_sq, line2, q);
    double l_tau = velocity_functional(f_len, line, q);
    double l_sigma = velocity_functional(f_len, line2, q);
    double e1 = std::abs(i_tau - 5.0);
    double e2 = std::abs(i_sigma - 20.0 / 3.0);
    double e3 = std::abs(l_tau - l_sigma);
    detail = "I_tau err=" + format_double(e1) + " I_sigma err=" + format_double(e2) +
             " invariant err=" + format_double(e3);
    return e1 < 1e-8 && e2 < 1e-8 && e3 < 1e-8;
}

bool criterion3_structural_identities(std::string& detail) {
    auto start = std::chrono::steady_clock::now();
    Rng rng(4242);
    bool ok = true;

    // d o d = 0
    for (int t = 0; t < 200 && ok; ++t) {
        int n = static_cast<int>(rng.range(2, 4));
        int r = static_cast<int>(rng.range(0, std::min(3, n - 1)));
        if (!d(d(rand_form(rng, n, r))).is_exact_zero()) ok = false;
    }
    // boundary o boundary = 0
    for (int t = 0; t < 200 && ok; ++t) {
        int r = static_cast<int>(rng.range(2, 3));
        std::vector<ScalarField> comps;
        for (int i = 0; i < 4; ++i) {
            PolyField c = PolyField::constant(r, rand_rational(rng));
            for (int j = 0; j < r; ++j)
                c = c + rand_rational(rng) * PolyField::variable(r, j);
            comps.emplace_back(std::move(c));
        }
        Chain one = Chain::single(SingularCube(r, SmoothMap(r, std::move(comps))));
        if (!boundary(boundary(one)).simplified().terms.empty()) ok = false;
    }
    // pullback-d commutation
    for (int t = 0; t < 200 && ok; ++t) {
        SmoothMap fm = rand_poly_map(rng, 3, 3);
        FieldForm omr = rand_form(rng, 3, static_cast<int>(rng.range(0, 2)), 2);
        if (!d(pullback(fm, omr)).equals_exact(pullback(fm, d(omr)))) ok = false;
    }
    // wedge graded commutativity
    for (int t = 0; t < 200 && ok; ++t) {
        int p = static_cast<int>(rng.range(0, 3));
        int q = static_cast<int>(rng.range(0, 3));
        auto w = rand_kvector(rng, 4, p);
        auto y = rand_kvector(rng, 4, q);
        auto lhs = wedge(w, y);
        auto rhs = wedge(y, w);
        if ((p * q) % 2 == 1) rhs = -rhs;
        if (!(lhs == rhs)) ok = false;
    }

    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    detail = "4 x 200 exact instances, runtime=" + std::to_string(secs) + "s";
    return ok && secs < 10.0;
}

bool criterion4_stokes(std::string& detail) {
    Rng rng(777);
    auto q = QuadratureRule::gauss_legendre(8);
    Chain square = Chain::single(SingularCube::unit(2));
    Chain cube = Chain::single(SingularCube::unit(3));
    double worst = 0.0;
    for (int t = 0; t < 40; ++t) {
        worst = std::max(worst, stokes_residual(rand_form(rng, 2, 1, 3), square, q));
        worst = std::max(worst, stokes_residual(rand_form(rng, 3, 2, 3), cube, q));
    }
    detail = "max residual=" + format_double(worst);
    return worst < 1e-8;
}

bool criterion5_particle(std::string& detail) {
    // momentum conservation over 1000 steps
    ParticleScenario sc;
    sc.mass = 1.0;
    sc.u0 = {std::sqrt(2.0), 1.0, 0, 0};
    sc.step = 1e-3;
    sc.tau_end = 1.0;
    auto traj = integrate_worldline(sc);
    double pdrift = 0.0;
    for (const auto& s : traj.samples)
        for (int i = 0; i < 4; ++i)
            pdrift = std::max(pdrift, std::abs(s.p[i] - traj.samples[0].p[i]));

    // gyration frequency
    const double B = 0.5, q = 1.0, m = 1.0;
    FieldForm a(4, 1);
    a.add_term({2}, ScalarField(Rational(-1, 2) * PolyField::variable(4, 1)));
    ParticleScenario em;
    em.mass = m;
    em.charge = q;
    em.potential = a;
    double v = 0.3;
    em.u0 = {std::sqrt(1 + v * v), v, 0, 0};
    double period = 2 * kPi / (q * B / m);
    em.step = period / 4096;
    em.tau_end = period;
    auto etraj = integrate_worldline(em);
    double phase = 0.0;
    for (std::size_t k = 1; k < etraj.samples.size(); ++k) {
        const auto& u0 = etraj.samples[k - 1].u;
        const auto& u1 = etraj.samples[k].u;
        phase += std::atan2(u0[1] * u1[2] - u0[2] * u1[1], u0[1] * u1[1] + u0[2] * u1[2]);
    }
    double freq_err = std::abs(std::abs(phase) / em.tau_end - q * B / m) / (q * B / m);

    // gauge shift
    FieldForm phi0(4, 0);
    PolyField x1 = PolyField::variable(4, 1), x2 = PolyField::variable(4, 2);
    phi0.add_term({}, ScalarField(x1 * x2 + Rational(1, 3) * (x2 * x2)));
    ParticleScenario em2 = em;
    em2.potential = a + d(phi0);
    auto etraj2 = integrate_worldline(em2);
    double gdiff = 0.0;
    for (std::size_t k = 0; k < etraj.samples.size(); ++k)
        for (int i = 0; i < 4; ++i)
            gdiff = std::max(gdiff, std::abs(etraj.samples[k].x[i] - etraj2.samples[k].x[i]));

    detail = "p drift=" + format_double(pdrift) + " freq rel err=" + format_double(freq_err) +
             " gauge diff=" + format_double(gdiff);
    return pdrift < 1e-10 && freq_err < 1e-6 && gdiff < 1e-10;
}

bool criterion6_string_algebra(std::string& detail) {
    Metric<double> mink = Metric<double>::minkowski(4);
    Rng rng(31337);
    double worst = 0.0, worst_norm = 0.0;
    for (int t = 0; t < 1000; ++t) {
        Vec4 u{}, v{};
        double s2 = 0.0;
        for (int i = 1; i < 4; ++i) {
            u[i] = rng.uniform(-1, 1);
            s2 += u[i] * u[i];
        }
        u[0] = std::sqrt(1 + s2) * rng.uniform(1.0, 2.0);
        double w2 = 0.0;
        for (int i = 1; i < 4; ++i) {
            v[i] = rng.uniform(-1, 1) + (i == 1 ? 1.5 : 0.0);
            w2 += v[i] * v[i];
        }
        v[0] = rng.uniform(-0.6, 0.6) * std::sqrt(w2);
        auto rep = identity_suite(u, v, mink);
        worst = std::max({worst, rep.ptau_norm, rep.psigma_norm, rep.ptau_orth, rep.psigma_orth});
        worst_norm = std::max(worst_norm, rep.normalization);
    }
    detail = "identity max=" + format_double(worst) + " norm max=" + format_double(worst_norm);
    return worst < 1e-10 && worst_norm < 1e-10;
}

bool criterion7_string_dynamics(std::string& detail) {
    const double A = 0.1;
    auto run = [&](int nsig) {
        LightConeInput in;
        in.n_sigma = nsig;
        in.cfl = 0.5;
        in.tau_end = 2.0;
        in.f0 = [A](double s) { return A * std::cos(kPi * s); };
        in.g0 = [](double) { return 0.0; };
        LightConeState st = solve_light_cone(in);
        YReport yr = reconstruct_y(st);
        SheetGrid sheet = lift_to_spacetime(st);
        auto cov = covariant_eom_residual(sheet, light_cone_metric(), 0.05);
        auto momenta = total_momentum_series(sheet, light_cone_metric());
        double pdrift = 0.0;
        for (std::size_t j = 2; j + 2 < momenta.values.size(); ++j)
            for (int mu = 0; mu < 4; ++mu)
                pdrift = std::max(pdrift,
                                  std::abs(momenta.values[j][mu] - momenta.values[2][mu]));
        return std::array<double, 4>{wave_residual(st), yr.max_compat_residual, cov.max_interior,
                                     pdrift};
    };
    auto r1 = run(33), r2 = run(65), r3 = run(129);
    double min_order = 1e9;
    std::ostringstream orders;
    for (int k = 0; k < 4; ++k) {
        double o1 = std::log2(r1[k] / r2[k]);
        double o2 = std::log2(r2[k] / r3[k]);
        min_order = std::min({min_order, o1, o2});
        orders << " [" << o1 << "," << o2 << "]";
    }

    // endpoint null residual for analytic data
    double endpoint = 0.0;
    for (double tau : {0.1, 0.4, 0.9, 1.7})
        for (double sigma : {0.0, 1.0}) {
            double fd = -A * kPi * std::cos(kPi * sigma) * std::sin(kPi * tau);
            double fp = -A * kPi * std::sin(kPi * sigma) * std::cos(kPi * tau);
            double yd = 0.5 * (fd * fd + fp * fp);
            endpoint = std::max(endpoint, std::abs(2 * yd - fd * fd));
        }

    detail = "orders" + orders.str() + " endpoint=" + format_double(endpoint);
    return min_order >= 1.8 && endpoint < 1e-8;
}

bool criterion8_membrane(std::string& detail) {
    Metric<double> mink = Metric<double>::minkowski(4);
    Rng rng(5150);
    double worst_id = 0.0;
    for (int t = 0; t < 1000; ++t) {
        MembraneElement el;
        for (;;) {
            double s2 = 0.0;
            for (int i = 1; i < 4; ++i) {
                el.t_tau[i] = rng.uniform(-1, 1);
                s2 += el.t_tau[i] * el.t_tau[i];
            }
            el.t_tau[0] = std::sqrt(1 + s2) * rng.uniform(1.0, 1.8);
            for (Vec4* sp : {&el.t_sigma, &el.t_rho}) {
                double w2 = 0.0;
                for (int i = 1; i < 4; ++i) {
                    (*sp)[i] = rng.uniform(-1, 1) + (sp == &el.t_sigma ? 1.0 : -1.0);
                    w2 += (*sp)[i] * (*sp)[i];
                }
                (*sp)[0] = rng.uniform(-0.5, 0.5) * std::sqrt(w2);
            }
            double a = mdot(mink, el.t_tau, el.t_tau), b = mdot(mink, el.t_sigma, el.t_sigma),
                   f = mdot(mink, el.t_rho, el.t_rho), c = mdot(mink, el.t_tau, el.t_sigma),
                   dd = mdot(mink, el.t_tau, el.t_rho), e = mdot(mink, el.t_sigma, el.t_rho);
            if (a * (b * f - e * e) - c * (c * f - e * dd) + dd * (c * e - b * dd) > 1e-3) break;
        }
        worst_id = std::max(worst_id, constraint_suite(el, mink).max_residual);
    }

    SphericalRun run = integrate_spherical(1.0, 0.0, 2.0, 1e-4);
    double fdrift = run.max_first_integral_rel_drift;
    double t0 = spherical_collapse_time(1.0);
    double match = 0.0;
    for (const auto& s : run.samples)
        match = std::max(match, std::abs(s.r - spherical_closed_form(1.0, s.tau + t0)));
    double collapse_err = std::abs(t0 - spherical_collapse_time_quadrature(1.0));

    double k = 1.0 / std::numbers::sqrt2;
    double K = elliptic_K(k);
    int panels = 4096;
    double h = kPi / 2 / panels;
    auto fK = [&](double th) {
        double s = std::sin(th);
        return 1.0 / std::sqrt(1.0 - k * k * s * s);
    };
    double K_quad = fK(0.0) + fK(kPi / 2);
    for (int i = 1; i < panels; ++i) K_quad += fK(i * h) * (i % 2 == 1 ? 4.0 : 2.0);
    K_quad *= h / 3.0;
    double K_err = std::abs(K - K_quad);

    detail = "identities=" + format_double(worst_id) + " first-integral=" + format_double(fdrift) +
             " cn match=" + format_double(match) + " collapse err=" + format_double(collapse_err) +
             " K err=" + format_double(K_err);
    return worst_id < 1e-9 && fdrift < 1e-8 && match < 1e-6 && collapse_err < 1e-6 &&
           K_err < 1e-9;
}

bool criterion9_suite(std::string& detail) {
    const char* cli = std::getenv("EXTCAL_CLI");
    if (!cli) {
        detail = "EXTCAL_CLI not set";
        return false;
    }
    namespace fs = std::filesystem;
    fs::path dir = fs::temp_directory_path() / ("extcal_acceptance_" + std::to_string(::getpid()));
    fs::create_directories(dir);
    auto run_once = [&](const fs::path& out) {
        std::string cmd = std::string(cli) + " --seed 20240901 --out " + out.string() +
                          " suite > " + (out.string() + ".log") + " 2>&1";
        auto start = std::chrono::steady_clock::now();
        int status = std::system(cmd.c_str());
        double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        return std::pair<int, double>(WEXITSTATUS(status), secs);
    };
    auto [rc1, t1] = run_once(dir / "a");
    auto [rc2, t2] = run_once(dir / "b");
    std::ifstream fa(dir / "a" / "suite_report.json", std::ios::binary);
    std::ifstream fb(dir / "b" / "suite_report.json", std::ios::binary);
    std::ostringstream sa, sb;
    sa << fa.rdbuf();
    sb << fb.rdbuf();
    bool identical = !sa.str().empty() && sa.str() == sb.str();
    fs::remove_all(dir);
    detail = "exit=" + std::to_string(rc1) + " runtime=" + std::to_string(t1) + "s/" +
             std::to_string(t2) + "s byte-identical=" + (identical ? std::string("yes") : "no");
    return rc1 == 0 && rc2 == 0 && identical && t1 < 60.0 && t2 < 60.0;
}

} // namespace

int main() {
    std::vector<Criterion> criteria = {
        {"1 pullback-golden-exact", criterion1_pullback_golden},
        {"2 reparameterisation-values", criterion2_reparam_values},
        {"3 structural-identities", criterion3_structural_identities},
        {"4 stokes-residual", criterion4_stokes},
        {"5 point-particle", criterion5_particle},
        {"6 string-algebra", criterion6_string_algebra},
        {"7 string-dynamics", criterion7_string_dynamics},
        {"8 membrane", criterion8_membrane},
        {"9 full-suite-via-cli", criterion9_suite},
    };

    int failures = 0;
    for (auto& c : criteria) {
        std::string detail;
        bool ok = false;
        try {
            ok = c.run(detail);
        } catch (const std::exception& e) {
            detail = std::string("exception: ") + e.what();
        }
        if (!ok) ++failures;
        std::printf("[%s] criterion %-32s %s\n", ok ? "PASS" : "FAIL", c.name.c_str(),
                    detail.c_str());
    }
    std::printf("%zu criteria, %d failed\n", criteria.size(), failures);
    return failures;
}
