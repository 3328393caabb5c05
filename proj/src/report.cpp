#include "mechlab/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace mechlab {

Check& VerificationReport::add_le(const std::string& name, double lhs, double rhs,
                                  const std::string& note, double abs_tol, double rel_tol) {
    Check c;
    c.name = name;
    c.lhs = lhs;
    c.rhs = rhs;
    c.slack = rhs - lhs;
    c.pass = std::isfinite(lhs) && !std::isnan(rhs) &&
             lhs <= rhs + abs_tol + rel_tol * std::abs(rhs);
    c.note = note;
    checks.push_back(c);
    return checks.back();
}

void VerificationReport::append(const VerificationReport& other, const std::string& prefix) {
    for (auto c : other.checks) {
        c.name = prefix + c.name;
        checks.push_back(std::move(c));
    }
}

bool VerificationReport::all_pass() const { return failures() == 0; }

std::size_t VerificationReport::failures() const {
    return std::count_if(checks.begin(), checks.end(), [](const Check& c) { return !c.pass; });
}

const Check* VerificationReport::find(const std::string& name) const {
    for (const auto& c : checks)
        if (c.name == name) return &c;
    return nullptr;
}

static nlohmann::json num(double x) {
    if (std::isfinite(x)) return x;
    if (std::isnan(x)) return "nan";
    return x > 0 ? "inf" : "-inf";
}

nlohmann::json VerificationReport::to_json() const {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& c : checks) {
        nlohmann::json row = {{"name", c.name},
                              {"lhs", num(c.lhs)},
                              {"rhs", num(c.rhs)},
                              {"slack", num(c.slack)},
                              {"pass", c.pass}};
        if (!c.note.empty()) row["note"] = c.note;
        arr.push_back(row);
    }
    return arr;
}

std::string VerificationReport::table() const {
    std::size_t w = 4;
    for (const auto& c : checks) w = std::max(w, c.name.size());
    std::string out;
    char buf[512];
    std::snprintf(buf, sizeof buf, "%-*s  %14s  %14s  %14s  %s\n", int(w), "name", "lhs", "rhs",
                  "slack", "pass");
    out += buf;
    for (const auto& c : checks) {
        std::snprintf(buf, sizeof buf, "%-*s  %14.8g  %14.8g  %14.6g  %s", int(w), c.name.c_str(),
                      c.lhs, c.rhs, c.slack, c.pass ? "ok" : "FAIL");
        out += buf;
        if (!c.note.empty()) out += "  (" + c.note + ")";
        out += "\n";
    }
    return out;
}

}  // namespace mechlab
