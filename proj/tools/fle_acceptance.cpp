// Runs acceptance criteria 1-8 and prints one PASS/FAIL line per criterion,
// followed by the individual checks.  Exit status 1 if anything failed.
#include "fle/acceptance.hpp"

#include <cstring>
#include <iostream>

int main(int argc, char** argv) {
    fle::AcceptanceOptions options;
    for (int i = 1; i < argc; ++i) {
        if (std::strcmp(argv[i], "--quick") == 0) {
            options.quick = true;
        } else if (std::strcmp(argv[i], "--criterion") == 0 && i + 1 < argc) {
            options.criteria.push_back(std::atoi(argv[++i]));
        } else {
            std::cerr << "usage: fle_acceptance [--quick] [--criterion K]...\n";
            return 2;
        }
    }
    bool ok = true;
    const auto reports = fle::run_acceptance(options, [&](const fle::CriterionReport& r) {
        fle::print_report(std::cout, r);
        std::cout.flush();
        ok = ok && r.passed();
    });
    std::cout << "\nsummary\n";
    for (const auto& r : reports) std::cout << fle::summary_line(r) << '\n';
    return ok ? 0 : 1;
}
