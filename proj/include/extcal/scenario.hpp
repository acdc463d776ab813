#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "extcal/report.hpp"
#include "extcal/serialize.hpp"

namespace extcal {

struct RunOptions {
    std::string out_dir = ".";
    double tol_scale = 1.0;
    std::optional<std::uint64_t> seed_override;
};

struct RunOutcome {
    std::vector<VerificationReport> reports;
    std::vector<std::string> artifacts;

    bool overall_pass() const {
        for (const auto& r : reports)
            if (!r.overall_pass()) return false;
        return true;
    }
};

// Accepts one scenario object or an array of them. An empty array runs
// nothing and produces nothing.
RunOutcome run_scenarios(const json& doc, const RunOptions& opts);

RunOutcome run_scenario_file(const std::string& path, const RunOptions& opts);

} // namespace extcal
