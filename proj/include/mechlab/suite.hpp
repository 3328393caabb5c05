#pragma once

#include <cstdint>
#include <vector>

#include <json.hpp>

#include "mechlab/benchmark.hpp"
#include "mechlab/mrf.hpp"

namespace mechlab {

struct SuiteOptions {
    std::uint64_t seed = 7;
    int count = 200;
    int n_max = 3;
    int alphabet_max = 3;
    double psi_max = 1.0;
    int workers = 0;  // 0 = hardware concurrency
};

// Per-instance seed; independent of sharding.
std::uint64_t instance_seed(std::uint64_t master, int index);

// Valuation kinds cycle additive, unit-demand, constrained-additive, XOS by index.
MrfInstance random_instance(std::uint64_t seed, int index, const SuiteOptions& opts);

struct SuiteEntry {
    int id = 0;
    std::uint64_t seed = 0;
    MrfInstance inst;
    Analysis analysis;
    std::string error;  // exception message when the analysis could not run
};

std::vector<SuiteEntry> run_suite(const SuiteOptions& opts);
nlohmann::json suite_to_json(const SuiteOptions& opts, const std::vector<SuiteEntry>& entries);
int suite_failures(const std::vector<SuiteEntry>& entries);

}  // namespace mechlab
