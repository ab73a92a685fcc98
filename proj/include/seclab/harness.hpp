#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "seclab/core.hpp"
#include "seclab/policies.hpp"

namespace seclab::harness {

/// Synthetic family: the item with original index i (1-based) has true value
/// i and observed value i + N(0, sigma2).
struct SyntheticSpec {
    std::size_t n = 100;
    double sigma2 = 0.0;
    std::uint64_t seed = 0;
};

/// Items in original index order (arrival i holds true value i).
[[nodiscard]] Stream synth_stream(SyntheticSpec const &spec, SeededRng &rng);

struct RatioReport {
    double value_ratio = 0.0;          // mean over trials of sum v(S_A) / sum v(S*)
    double intersection_ratio = 0.0;   // mean over trials of |S_A ∩ S*| / k
    double knapsack_ratio = 0.0;       // same quantity as value_ratio
    std::optional<double> fool_rate;   // mean over trials of fooled(S_A) / k
    std::int64_t trials = 0;
    double std_error = 0.0;            // of value_ratio
    double intersection_std_error = 0.0;
    std::optional<double> fool_rate_std_error;
    double value_ratio_of_means = 0.0;  // sum over trials of v(S_A) / sum of v(S*)
};

/// Scores of one run against the offline optimum on true values.
struct TrialScore {
    double online_value = 0.0;
    double offline_value = 0.0;
    double value_ratio = 0.0;
    double intersection_ratio = 0.0;
};

/// Value and intersection ratios of `selected` against run_offline_opt(stream, k).
/// A zero offline value scores a value ratio of 1 when the online value is also zero.
[[nodiscard]] TrialScore score_selection(Stream const &stream, std::span<std::int64_t const> selected, int k);

struct EstimateOptions {
    int jobs = 1;
};

/// Monte Carlo estimate over `trials` independent (noise, permutation) draws;
/// trial i uses SeededRng(seed, i), so results do not depend on `jobs`.
[[nodiscard]] RatioReport estimate_ratios(PolicyKind policy, std::size_t n, PolicyConfig const &config, double sigma2,
                                          std::int64_t trials, std::uint64_t seed, EstimateOptions options = {});

/// One pass of the online attack over `stream` (already in arrival order).
/// Policies see observed values (surrogate losses); fool rate counts fooled
/// selections over k. Value ratios are filled when true values (target
/// losses) are present on every item.
[[nodiscard]] RatioReport run_attack(Stream const &stream, PolicyKind policy, PolicyConfig const &config,
                                     SeededRng &rng);

/// Aggregate of run_attack over seeded shuffles of the stream.
struct AttackSummary {
    PolicyKind policy = PolicyKind::virtual_plus;
    PolicyConfig config;  // resolved
    std::int64_t permutations = 0;
    double fool_rate_mean = 0.0;
    double fool_rate_std = 0.0;  // sample standard deviation across permutations
    double fool_rate_std_error = 0.0;
    std::optional<double> value_ratio_mean;
    std::optional<double> intersection_ratio_mean;
    std::vector<double> fool_rates;  // per permutation
};

/// Permutation p uses SeededRng(seed, p) for the shuffle and for naive's draw.
[[nodiscard]] AttackSummary run_attack_permutations(Stream const &stream, PolicyKind policy,
                                                    PolicyConfig const &config, std::uint64_t seed,
                                                    std::int64_t permutations);

struct SweepOptions {
    std::optional<int> t;
    std::optional<int> r;  // applied to single-ref only
    bool exhaust_budget = false;
    int jobs = 1;
};

struct SweepRow {
    PolicyKind policy = PolicyKind::virtual_plus;
    PolicyConfig config;  // resolved
    RatioReport report;
};

/// One estimate per (policy, k), policies outer, k inner. Every cell uses
/// the same seed, so policies are compared on identical noise and orderings.
[[nodiscard]] std::vector<SweepRow> sweep(std::span<PolicyKind const> policies, std::span<int const> ks, std::size_t n,
                                          double sigma2, std::int64_t trials, std::uint64_t seed,
                                          SweepOptions const &options = {});

}  // namespace seclab::harness
