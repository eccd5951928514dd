#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dprob/json_io.hpp"

namespace dprob {

struct SelftestOptions {
    std::uint64_t seed = 42;
    unsigned threads = 0;
    std::uint64_t walk_replicates = 1'000'000;
    std::uint64_t stopped_replicates = 1'000'000;
};

struct CriterionResult {
    int id = 0;
    std::string name;
    bool pass = false;
    Json details;
};

// Each check evaluates one acceptance criterion against independent oracles
// (closed forms, brute-force enumeration) and records the worst deviations.
CriterionResult check_factorial_moment_routes(const SelftestOptions& opt);
CriterionResult check_tail_bound_validity(const SelftestOptions& opt);
CriterionResult check_leq_identity_suite(const SelftestOptions& opt);
CriterionResult check_abel_identity_suite(const SelftestOptions& opt);
CriterionResult check_two_sequence_suite(const SelftestOptions& opt);
CriterionResult check_walk_equidistribution(const SelftestOptions& opt);
CriterionResult check_stopped_sums(const SelftestOptions& opt);

std::vector<CriterionResult> run_selftest(const SelftestOptions& opt);

// Deterministic given the options: no timings, no host details.
Json selftest_json(const SelftestOptions& opt,
                   const std::vector<CriterionResult>& results);

// The fixed distribution set used by the moment and bound checks: six named
// families followed by `random_tables` random finite tables.
std::vector<Distribution> reference_distributions(std::uint64_t seed,
                                                  int random_tables = 20);

// Random finite table on {0, ..., size-1}, size in [1, max_size].
Distribution random_table(CounterRng& rng, int max_size = 12);

}  // namespace dprob
