#pragma once

#include <string>
#include <vector>

#include <json.hpp>

namespace mechlab {

struct Check {
    std::string name;
    double lhs = 0;
    double rhs = 0;
    double slack = 0;  // rhs - lhs
    bool pass = true;
    std::string note;
};

// One-sided checks of the form lhs <= rhs.
struct VerificationReport {
    std::vector<Check> checks;

    Check& add_le(const std::string& name, double lhs, double rhs, const std::string& note = "",
                  double abs_tol = 1e-7, double rel_tol = 1e-9);
    void append(const VerificationReport& other, const std::string& prefix = "");
    bool all_pass() const;
    std::size_t failures() const;
    const Check* find(const std::string& name) const;

    nlohmann::json to_json() const;
    std::string table() const;
};

}  // namespace mechlab
