#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include "wavefront/core.hpp"

namespace wavefront {

inline constexpr std::size_t kGlobalCheck = static_cast<std::size_t>(-1);

// lhs <= rhs, judged with a relative tolerance on rhs.
struct CheckResult {
    std::string name;
    std::size_t event = kGlobalCheck;
    double lhs = 0.0;
    double rhs = 0.0;
    double slack = 0.0;
    bool pass = true;

    bool global() const { return event == kGlobalCheck; }
};

inline CheckResult make_check(std::string name, std::size_t event, double lhs, double rhs) {
    CheckResult r;
    r.name = std::move(name);
    r.event = event;
    r.lhs = lhs;
    r.rhs = rhs;
    r.slack = rhs - lhs;
    r.pass = r.slack >= -kCheckTolerance * std::max(1.0, std::abs(rhs));
    return r;
}

struct CheckSummary {
    std::size_t count = 0;
    std::size_t failures = 0;
    double min_slack = std::numeric_limits<double>::infinity();
};

struct Report {
    std::vector<CheckResult> checks;

    void add(CheckResult r) { checks.push_back(std::move(r)); }
    void add(const std::vector<CheckResult>& rs) { checks.insert(checks.end(), rs.begin(), rs.end()); }

    bool passed() const {
        return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.pass; });
    }

    std::vector<CheckResult> failures() const {
        std::vector<CheckResult> out;
        for (const auto& c : checks)
            if (!c.pass) out.push_back(c);
        return out;
    }

    std::map<std::string, CheckSummary> summary() const {
        std::map<std::string, CheckSummary> out;
        for (const auto& c : checks) {
            CheckSummary& s = out[c.name];
            ++s.count;
            if (!c.pass) ++s.failures;
            s.min_slack = std::min(s.min_slack, c.slack);
        }
        return out;
    }

    std::size_t count(const std::string& name) const {
        return static_cast<std::size_t>(
            std::count_if(checks.begin(), checks.end(), [&](const CheckResult& c) { return c.name == name; }));
    }
};

}  // namespace wavefront
