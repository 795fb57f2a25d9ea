#pragma once

#include "phamp/pipeline.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace phamp {

struct CriterionResult {
    int id = 0;
    std::string name;
    bool pass = false;
    std::vector<std::string> details;
    double seconds = 0.0;
};

struct AcceptanceOptions {
    std::vector<int> only;   // empty: all criteria
    unsigned long seed = 20240611;
    std::ostream* log = nullptr; // detail lines as they are produced
};

/// Runs the acceptance criteria in order; solved models are shared between
/// criteria.
std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& opt = {});

/// "PASS|FAIL criterion <id> <name> (<seconds> s)"
std::string summary_line(const CriterionResult& r);

} // namespace phamp
