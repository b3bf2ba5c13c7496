// The acceptance criteria, shared by the acceptance test binary and the
// `verify` subcommand.
#pragma once

#include <functional>
#include <string>
#include <vector>

namespace ratebound::acceptance {

struct CriterionResult {
    int id = 0;
    std::string name;
    bool passed = false;
    std::string detail;
    double seconds = 0.0;
    double budget_seconds = 0.0;
};

struct Options {
    // Path of the CLI executable, needed by the determinism criterion.
    std::string cli_path;
    bool skip_heavy = false;
};

CriterionResult figure1_reproduction();
CriterionResult conjugate_identities();
CriterionResult autarky_exactness();
CriterionResult schedule_correctness();
CriterionResult coordination_dominance();
CriterionResult small_instance_bruteforce();
CriterionResult bounded_rate_consistency();
CriterionResult determinism(const std::string& cli_path);

// Runs every criterion, reporting each result through `report` as it
// completes. Returns true if all passed.
bool run_all(const Options& options, const std::function<void(const CriterionResult&)>& report);

std::string format_line(const CriterionResult& r);

}  // namespace ratebound::acceptance
