#include "fsd/report.hpp"

#include <algorithm>
#include <ostream>

namespace fsd {

bool ValidationReport::all_pass() const {
    return std::all_of(checks.begin(), checks.end(),
                       [](const CheckResult& c) { return c.pass; });
}

const CheckResult* ValidationReport::find(const std::string& name) const {
    for (const auto& c : checks)
        if (c.name == name) return &c;
    return nullptr;
}

void ValidationReport::add(std::string name, bool pass, double residual, std::string detail) {
    checks.push_back({std::move(name), pass, residual, std::move(detail)});
}

void ValidationReport::merge(const ValidationReport& other) {
    checks.insert(checks.end(), other.checks.begin(), other.checks.end());
}

void print_report(const ValidationReport& report, std::ostream& os) {
    os.precision(6);
    for (const auto& c : report.checks) {
        os << "check=" << c.name << " pass=" << (c.pass ? "true" : "false")
           << " residual=" << c.residual;
        if (!c.detail.empty()) os << " (" << c.detail << ")";
        os << '\n';
    }
}

}  // namespace fsd
