#pragma once

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

namespace fle {

/// One named quantitative check: value compared against a pinned tolerance.
struct Check {
    std::string name;
    double value = 0.0;
    double tolerance = 0.0;
    std::string relation; // "<", "<=", ">=", ">" or "true"
    bool passed = false;
    std::string note;
};

struct CriterionReport {
    int id = 0;
    std::string title;
    std::vector<Check> checks;
    double seconds = 0.0;
    double budget_seconds = 0.0;
    /// Set when the criterion aborted with an exception.
    std::string error;

    bool passed() const;
};

struct AcceptanceOptions {
    /// Reduced grids and sample counts; tolerances unchanged.
    bool quick = false;
    unsigned threads = 0;
    /// Criteria to run (1..8); empty runs all.
    std::vector<int> criteria;
};

std::vector<CriterionReport> run_acceptance(const AcceptanceOptions& options,
                                            const std::function<void(const CriterionReport&)>& on_done = {});

/// "PASS  criterion 3: extension suite (2.10 s)"
std::string summary_line(const CriterionReport& report);

/// Summary line followed by one indented line per check.
void print_report(std::ostream& out, const CriterionReport& report);

} // namespace fle
