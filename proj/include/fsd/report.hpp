#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace fsd {

// Outcome of a single named invariant check. `residual` is the magnitude of
// the worst violation (0 when clean); `detail` optionally pins the offending
// point or counts.
struct CheckResult {
    std::string name;
    bool pass = false;
    double residual = 0.0;
    std::string detail;
};

struct ValidationReport {
    std::vector<CheckResult> checks;

    bool all_pass() const;
    const CheckResult* find(const std::string& name) const;
    void add(std::string name, bool pass, double residual, std::string detail = "");
    void merge(const ValidationReport& other);
};

// One line per check: "check=<name> pass=<true|false> residual=<value>"
// followed by the detail string when present.
void print_report(const ValidationReport& report, std::ostream& os);

}  // namespace fsd
