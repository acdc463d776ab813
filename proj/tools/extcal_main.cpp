#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "extcal/scenario.hpp"
#include "extcal/suite.hpp"

namespace {

constexpr int kExitSchema = 2;
constexpr int kExitPrecondition = 3;
constexpr int kExitNumerical = 4;

void print_report(const extcal::VerificationReport& rep) {
    std::printf("%s (seed %llu)\n", rep.title.c_str(),
                static_cast<unsigned long long>(rep.seed));
    for (const auto& c : rep.checks)
        std::printf("  [%s] %-36s residual %-12.4g tol %-10.4g %s\n", c.pass ? "PASS" : "FAIL",
                    c.name.c_str(), c.residual, c.tolerance, c.identity.c_str());
    std::printf("  => %s (%zu checks)\n", rep.overall_pass() ? "ALL PASS" : "FAILURES PRESENT",
                rep.checks.size());
}

int guarded(const std::function<int()>& body) {
    try {
        return body();
    } catch (const extcal::SchemaError& e) {
        std::fprintf(stderr, "schema error: %s\n", e.what());
        return kExitSchema;
    } catch (const extcal::PreconditionError& e) {
        std::fprintf(stderr, "precondition failed: %s\n", e.what());
        return kExitPrecondition;
    } catch (const extcal::NumericalAbort& e) {
        std::fprintf(stderr, "numerical abort: %s\n", e.what());
        return kExitNumerical;
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"extcal: exterior-calculus verification engines for relativistic "
                 "particles, strings and membranes"};
    app.require_subcommand(1);

    std::string out_dir = ".";
    double tol_scale = 1.0;
    std::uint64_t seed = 12345;
    bool seed_given = false;
    app.add_option("--out", out_dir, "Directory for CSV/JSON artifacts");
    app.add_option("--tol-scale", tol_scale, "Multiplier applied to scenario tolerances");
    app.add_option("--seed", seed, "Seed for randomized checks")->each([&](const std::string&) {
        seed_given = true;
    });

    auto* run_cmd = app.add_subcommand("run", "Run a scenario file (object or array)");
    std::string scenario_path;
    run_cmd->add_option("scenario", scenario_path, "Scenario JSON path")->required();

    auto* suite_cmd = app.add_subcommand("suite", "Run the built-in verification suite");
    std::string mutate;
    suite_cmd->add_option("--mutate", mutate,
                          "Fault injection for self-checks (boundary-sign)");

    auto* report_cmd = app.add_subcommand("report", "Aggregate report JSONs in a directory");
    std::string report_dir;
    report_cmd->add_option("dir", report_dir, "Directory of *_report.json files")->required();

    CLI11_PARSE(app, argc, argv);

    if (run_cmd->parsed()) {
        return guarded([&] {
            extcal::RunOptions opts;
            opts.out_dir = out_dir;
            opts.tol_scale = tol_scale;
            if (seed_given) opts.seed_override = seed;
            auto outcome = extcal::run_scenario_file(scenario_path, opts);
            for (const auto& rep : outcome.reports) print_report(rep);
            for (const auto& a : outcome.artifacts) std::printf("wrote %s\n", a.c_str());
            return outcome.overall_pass() ? 0 : 1;
        });
    }

    if (suite_cmd->parsed()) {
        return guarded([&] {
            extcal::SuiteMutation m = extcal::SuiteMutation::None;
            if (mutate == "boundary-sign") m = extcal::SuiteMutation::BoundarySign;
            else if (!mutate.empty()) throw extcal::SchemaError("unknown mutation: " + mutate);
            auto rep = extcal::run_suite(seed, m);
            print_report(rep);
            if (out_dir != ".") {
                std::string path = out_dir + "/suite_report.json";
                extcal::atomic_write(path, extcal::report_to_json(rep).dump(2) + "\n");
                std::printf("wrote %s\n", path.c_str());
            }
            return rep.overall_pass() ? 0 : 1;
        });
    }

    // report <dir>
    return guarded([&] {
        namespace fs = std::filesystem;
        if (!fs::is_directory(report_dir)) throw extcal::SchemaError("not a directory: " + report_dir);
        int total = 0, passed = 0;
        std::vector<fs::path> files;
        for (const auto& entry : fs::directory_iterator(report_dir))
            if (entry.path().extension() == ".json") files.push_back(entry.path());
        std::sort(files.begin(), files.end());
        for (const auto& path : files) {
            std::ifstream in(path);
            extcal::json doc;
            try {
                doc = extcal::json::parse(in);
            } catch (const extcal::json::parse_error&) {
                continue; // not a report
            }
            if (!doc.contains("checks")) continue;
            for (const auto& c : doc.at("checks")) {
                ++total;
                bool ok = c.value("pass", false);
                if (ok) ++passed;
                std::printf("[%s] %s :: %s\n", ok ? "PASS" : "FAIL",
                            path.filename().string().c_str(),
                            c.value("name", std::string("?")).c_str());
            }
        }
        std::printf("%d/%d checks passed\n", passed, total);
        return (total > 0 && passed == total) || total == 0 ? 0 : 1;
    });
}
