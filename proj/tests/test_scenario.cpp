#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>
#include <unistd.h>

#include "extcal/scenario.hpp"
#include "extcal/suite.hpp"

using namespace extcal;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir(const std::string& tag) {
    fs::path dir = fs::temp_directory_path() / ("extcal_test_" + tag + "_" +
                                                std::to_string(::getpid()));
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

json pullback_scenario() {
    json sc;
    sc["kind"] = "forms-check";
    sc["name"] = "pullback-worked";
    sc["seed"] = 7;
    json form = {{"dim", 3},
                 {"grade", 2},
                 {"terms",
                  {{{"indices", {1, 2}},
                    {"coeff", {{"nvars", 3}, {"terms", {{{"exps", {1, 0, 0}}, {"num", 1}}}}}}},
                   {{"indices", {2, 0}},
                    {"coeff", {{"nvars", 3}, {"terms", {{{"exps", {1, 2, 0}}, {"num", 1}}}}}}},
                   {{"indices", {0, 1}},
                    {"coeff", {{"nvars", 3}, {"terms", {{{"exps", {0, 0, 0}}, {"num", 3}}}}}}}}}};
    json map = {{"domain_dim", 3},
                {"components",
                 {{{"nvars", 3},
                   {"terms", {{{"exps", {2, 0, 0}}, {"num", 1}}, {{"exps", {0, 1, 0}}, {"num", 1}}}}},
                  {{"nvars", 3},
                   {"terms", {{{"exps", {0, 2, 0}}, {"num", 1}}, {{"exps", {0, 0, 1}}, {"num", 1}}}}},
                  {{"nvars", 3},
                   {"terms", {{{"exps", {0, 0, 1}}, {"num", 1}}, {{"exps", {0, 1, 0}}, {"num", 1}}}}}}}};
    sc["payload"] = {{"form", form}, {"map", map}};
    return sc;
}

} // namespace

TEST_CASE("forms-check scenario passes the worked pullback") {
    fs::path dir = temp_dir("forms");
    RunOptions opts;
    opts.out_dir = dir.string();
    auto outcome = run_scenarios(pullback_scenario(), opts);
    CHECK(outcome.overall_pass());
    CHECK(fs::exists(dir / "pullback-worked_report.json"));
    fs::remove_all(dir);
}

TEST_CASE("scenario arrays: empty list runs nothing") {
    RunOptions opts;
    opts.out_dir = temp_dir("empty").string();
    auto outcome = run_scenarios(json::array(), opts);
    CHECK(outcome.reports.empty());
    CHECK(outcome.artifacts.empty());
    fs::remove_all(opts.out_dir);
}

TEST_CASE("schema violations throw SchemaError") {
    RunOptions opts;
    opts.out_dir = temp_dir("schema").string();
    json bad = {{"kind", "unknown-kind"}, {"payload", json::object()}};
    CHECK_THROWS_AS(run_scenarios(bad, opts), SchemaError);
    json nokind = {{"payload", json::object()}};
    CHECK_THROWS_AS(run_scenarios(nokind, opts), SchemaError);
    fs::remove_all(opts.out_dir);
}

TEST_CASE("string scenario: CFL violation is a precondition failure") {
    RunOptions opts;
    opts.out_dir = temp_dir("cfl").string();
    json sc = {{"kind", "string"},
               {"payload",
                {{"topology", "open"},
                 {"n_sigma", 33},
                 {"cfl", 1.5},
                 {"tau_end", 0.5},
                 {"f0", {{"type", "cosine"}, {"amplitude", 0.1}, {"mode", 1}}},
                 {"g0", {{"type", "zero"}}}}}};
    CHECK_THROWS_AS(run_scenarios(sc, opts), PreconditionError);
    fs::remove_all(opts.out_dir);
}

TEST_CASE("membrane and particle scenarios produce passing reports and artifacts") {
    fs::path dir = temp_dir("engines");
    RunOptions opts;
    opts.out_dir = dir.string();
    json arr = json::array();
    arr.push_back({{"kind", "membrane"},
                   {"name", "sphere"},
                   {"payload", {{"r0", 1.0}, {"rdot0", 0.0}, {"tau_end", 1.4}, {"step", 1e-4}}}});
    arr.push_back(
        {{"kind", "particle"},
         {"name", "free"},
         {"payload",
          {{"mass", 1.0},
           {"metric", {{"type", "minkowski"}}},
           {"x0", {0, 0, 0, 0}},
           {"u0", {1.4142135623730951, 1, 0, 0}},
           {"tau_end", 1.0},
           {"step", 0.001}}}});
    auto outcome = run_scenarios(arr, opts);
    CHECK(outcome.overall_pass());
    CHECK(fs::exists(dir / "sphere_radius.csv"));
    CHECK(fs::exists(dir / "free_trajectory.csv"));
    std::string csv = slurp(dir / "free_trajectory.csv");
    CHECK(csv.rfind("tau,x0,x1,x2,x3,p0,p1,p2,p3\n", 0) == 0);
    fs::remove_all(dir);
}

TEST_CASE("particle scenario accepts polynomial metric components") {
    fs::path dir = temp_dir("polymetric");
    RunOptions opts;
    opts.out_dir = dir.string();
    auto poly_const = [](long long v) {
        return json{{"nvars", 4}, {"terms", {{{"exps", {0, 0, 0, 0}}, {"num", v}}}}};
    };
    json zero = {{"nvars", 4}, {"terms", json::array()}};
    json r2neg = {{"nvars", 4}, {"terms", {{{"exps", {0, 2, 0, 0}}, {"num", -1}}}}};
    json g = json::array();
    for (int i = 0; i < 4; ++i) {
        json row = json::array();
        for (int k = 0; k < 4; ++k) row.push_back(zero);
        g.push_back(row);
    }
    g[0][0] = poly_const(1);
    g[1][1] = poly_const(-1);
    g[2][2] = r2neg; // polar block: g_theta_theta = -r^2
    g[3][3] = poly_const(-1);
    double w = 0.2;
    json sc = {{"kind", "particle"},
               {"name", "polar-z"},
               {"payload",
                {{"mass", 1.0},
                 {"metric", {{"type", "polynomial"}, {"g", g}}},
                 {"x0", {0.0, 2.0, 0.0, 0.0}},
                 {"u0", {std::sqrt(1 + w * w), 0.0, 0.0, w}},
                 {"tau_end", 0.5},
                 {"step", 1e-3}}}};
    auto outcome = run_scenarios(sc, opts);
    CHECK(outcome.overall_pass());
    fs::remove_all(dir);
}

TEST_CASE("tolerance scaling loosens scenario gates") {
    fs::path dir = temp_dir("tolscale");
    json sc = {{"kind", "string"},
               {"name", "tight"},
               {"payload",
                {{"topology", "open"},
                 {"n_sigma", 33},
                 {"cfl", 0.5},
                 {"tau_end", 1.0},
                 {"grid_tolerance_scale", 1e-6}, // absurdly tight: must fail
                 {"f0", {{"type", "cosine"}, {"amplitude", 0.1}, {"mode", 1}}},
                 {"g0", {{"type", "zero"}}}}}};
    RunOptions tight;
    tight.out_dir = dir.string();
    CHECK(!run_scenarios(sc, tight).overall_pass());
    RunOptions loose = tight;
    loose.tol_scale = 1e12;
    CHECK(run_scenarios(sc, loose).overall_pass());
    fs::remove_all(dir);
}

TEST_CASE("charged string scenario reports the boundary coupling") {
    fs::path dir = temp_dir("charged");
    RunOptions opts;
    opts.out_dir = dir.string();
    json sc = {{"kind", "string"},
               {"name", "charged"},
               {"payload",
                {{"topology", "open"},
                 {"n_sigma", 33},
                 {"cfl", 0.5},
                 {"tau_end", 0.5},
                 {"charge", 0.5},
                 {"potential",
                  {{"dim", 4},
                   {"grade", 1},
                   {"terms",
                    {{{"indices", {3}},
                      {"coeff",
                       {{"nvars", 4}, {"terms", {{{"exps", {0, 0, 1, 0}}, {"num", 1}, {"den", 2}}}}}}}}}}},
                 {"f0", {{"type", "cosine"}, {"amplitude", 0.05}, {"mode", 1}}},
                 {"g0", {{"type", "zero"}}}}}};
    auto outcome = run_scenarios(sc, opts);
    bool saw_maxwell = false, saw_em = false;
    for (const auto& c : outcome.reports.at(0).checks) {
        if (c.name == "maxwell-closure") saw_maxwell = c.pass;
        if (c.name == "em-boundary-reported") saw_em = true;
    }
    CHECK(saw_maxwell);
    CHECK(saw_em);
    fs::remove_all(dir);
}

TEST_CASE("suite is deterministic under a fixed seed and catches the sign mutation") {
    auto a = run_suite(2024);
    auto b = run_suite(2024);
    CHECK(report_to_json(a).dump() == report_to_json(b).dump());
    CHECK(a.overall_pass());

    auto mutated = run_suite(2024, SuiteMutation::BoundarySign);
    bool boundary_failed = false, stokes_failed = false;
    for (const auto& c : mutated.checks) {
        if (c.name == "boundary-squared" && !c.pass) boundary_failed = true;
        if (c.name == "stokes" && !c.pass) stokes_failed = true;
    }
    CHECK(boundary_failed);
    CHECK(stokes_failed);
    CHECK(!mutated.overall_pass());
}

TEST_CASE("cli exit codes follow the documented mapping") {
    const char* cli = std::getenv("EXTCAL_CLI");
    REQUIRE(cli != nullptr);
    fs::path dir = temp_dir("cli");

    auto run_cli = [&](const std::string& args) {
        std::string cmd = std::string(cli) + " " + args + " >/dev/null 2>&1";
        int status = std::system(cmd.c_str());
        return WEXITSTATUS(status);
    };

    // malformed JSON -> 2
    fs::path bad = dir / "bad.json";
    std::ofstream(bad) << "{ not json";
    CHECK(run_cli("run " + bad.string()) == 2);

    // CFL violation -> 3
    fs::path cfl = dir / "cfl.json";
    std::ofstream(cfl) << R"({"kind":"string","payload":{"topology":"open","n_sigma":33,
        "cfl":2.0,"tau_end":0.5,"f0":{"type":"cosine","amplitude":0.1,"mode":1},
        "g0":{"type":"zero"}}})";
    CHECK(run_cli("run " + cfl.string()) == 3);

    // numerical abort -> 4
    fs::path abort_sc = dir / "abort.json";
    std::ofstream(abort_sc) << R"({"kind":"membrane","payload":
        {"r0":1.0,"rdot0":0.0,"tau_end":1.4,"step":0.2}})";
    CHECK(run_cli("run " + abort_sc.string()) == 4);

    // empty scenario list -> 0 and no artifacts
    fs::path empty = dir / "empty.json";
    std::ofstream(empty) << "[]";
    fs::path out = dir / "out_empty";
    CHECK(run_cli("--out " + out.string() + " run " + empty.string()) == 0);
    CHECK(!fs::exists(out));

    // a good scenario -> 0 with artifacts
    fs::path good = dir / "good.json";
    std::ofstream(good) << R"({"kind":"membrane","name":"m","payload":
        {"r0":1.0,"rdot0":0.0,"tau_end":1.0,"step":0.0001}})";
    fs::path out2 = dir / "out_good";
    CHECK(run_cli("--out " + out2.string() + " run " + good.string()) == 0);
    CHECK(fs::exists(out2 / "m_radius.csv"));
    CHECK(fs::exists(out2 / "m_report.json"));

    // byte-identical reruns
    std::string first = slurp(out2 / "m_radius.csv");
    CHECK(run_cli("--out " + out2.string() + " run " + good.string()) == 0);
    CHECK(slurp(out2 / "m_radius.csv") == first);

    // report aggregation over the artifact directory
    CHECK(run_cli("report " + out2.string()) == 0);

    // a failing check in any report makes the aggregate exit nonzero
    std::ofstream(out2 / "injected_report.json")
        << R"({"checks":[{"name":"forced","identity":"x","residual":1,"tolerance":0,"pass":false}]})";
    CHECK(run_cli("report " + out2.string()) == 1);

    fs::remove_all(dir);
}
