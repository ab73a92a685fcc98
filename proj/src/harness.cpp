#include "seclab/harness.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <thread>

namespace seclab::harness {

namespace {

struct MeanAndError {
    double mean = 0.0;
    double std_dev = 0.0;
    double std_error = 0.0;
};

MeanAndError summarize(std::span<double const> samples) {
    MeanAndError out;
    if (samples.empty()) {
        return out;
    }
    CompensatedSum sum;
    for (double x : samples) {
        sum.add(x);
    }
    auto const count = static_cast<double>(samples.size());
    out.mean = sum.value() / count;
    if (samples.size() > 1) {
        CompensatedSum squares;
        for (double x : samples) {
            squares.add((x - out.mean) * (x - out.mean));
        }
        out.std_dev = std::sqrt(squares.value() / (count - 1.0));
        out.std_error = out.std_dev / std::sqrt(count);
    }
    return out;
}

// Runs body(i) for i in [0, count) on up to `jobs` threads. Each index is
// handled exactly once and writes only its own slot.
template <typename Body>
void parallel_for(std::int64_t count, int jobs, Body &&body) {
    auto const workers = static_cast<std::int64_t>(std::max(1, jobs));
    if (workers == 1 || count < 2) {
        for (std::int64_t i = 0; i < count; ++i) {
            body(i);
        }
        return;
    }
    std::vector<std::thread> threads;
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(workers));
    for (std::int64_t w = 0; w < workers; ++w) {
        threads.emplace_back([&, w] {
            try {
                for (std::int64_t i = w; i < count; i += workers) {
                    body(i);
                }
            } catch (...) {
                errors[static_cast<std::size_t>(w)] = std::current_exception();
            }
        });
    }
    for (auto &thread : threads) {
        thread.join();
    }
    for (auto const &error : errors) {
        if (error) {
            std::rethrow_exception(error);
        }
    }
}

}  // namespace

Stream synth_stream(SyntheticSpec const &spec, SeededRng &rng) {
    if (spec.n < 1) {
        throw invalid_config("synthetic stream needs n >= 1");
    }
    if (!(spec.sigma2 >= 0.0) || !std::isfinite(spec.sigma2)) {
        throw invalid_config("noise variance must be finite and >= 0");
    }
    const double sigma = std::sqrt(spec.sigma2);
    std::vector<StreamItem> items;
    items.reserve(spec.n);
    for (std::size_t i = 1; i <= spec.n; ++i) {
        StreamItem item;
        item.id = std::to_string(i);
        item.arrival = static_cast<std::int64_t>(i);
        item.true_value = static_cast<double>(i);
        item.observed_value = static_cast<double>(i) + (sigma > 0.0 ? rng.normal(0.0, sigma) : 0.0);
        items.push_back(std::move(item));
    }
    return Stream(std::move(items));
}

TrialScore score_selection(Stream const &stream, std::span<std::int64_t const> selected, int k) {
    auto best = run_offline_opt(stream, k);
    TrialScore score;
    CompensatedSum online;
    CompensatedSum offline;
    for (auto arrival : selected) {
        online.add(*stream[static_cast<std::size_t>(arrival - 1)].true_value);
    }
    for (auto arrival : best.selected) {
        offline.add(*stream[static_cast<std::size_t>(arrival - 1)].true_value);
    }
    score.online_value = online.value();
    score.offline_value = offline.value();
    if (score.offline_value != 0.0) {
        score.value_ratio = score.online_value / score.offline_value;
    } else {
        score.value_ratio = score.online_value == 0.0 ? 1.0 : 0.0;
    }
    // both lists are sorted by arrival
    std::size_t hits = 0;
    auto it = best.selected.begin();
    for (auto arrival : selected) {
        while (it != best.selected.end() && *it < arrival) {
            ++it;
        }
        if (it != best.selected.end() && *it == arrival) {
            ++hits;
        }
    }
    score.intersection_ratio = static_cast<double>(hits) / k;
    return score;
}

RatioReport estimate_ratios(PolicyKind policy, std::size_t n, PolicyConfig const &config, double sigma2,
                            std::int64_t trials, std::uint64_t seed, EstimateOptions options) {
    if (trials < 1) {
        throw invalid_config("trials must be at least 1");
    }
    auto const resolved = resolve_config(policy, n, config);
    auto const count = static_cast<std::size_t>(trials);
    std::vector<double> value_ratios(count);
    std::vector<double> intersections(count);
    std::vector<double> online_values(count);
    std::vector<double> offline_values(count);

    SyntheticSpec spec{n, sigma2, seed};
    parallel_for(trials, options.jobs, [&](std::int64_t trial) {
        SeededRng rng(seed, static_cast<std::uint64_t>(trial));
        auto stream = permute(synth_stream(spec, rng), rng);
        auto trace = run_policy(policy, stream, resolved, rng);
        auto score = score_selection(stream, trace.selected, resolved.k);
        auto slot = static_cast<std::size_t>(trial);
        value_ratios[slot] = score.value_ratio;
        intersections[slot] = score.intersection_ratio;
        online_values[slot] = score.online_value;
        offline_values[slot] = score.offline_value;
    });

    auto values = summarize(value_ratios);
    auto overlap = summarize(intersections);
    CompensatedSum online_total;
    CompensatedSum offline_total;
    for (std::size_t i = 0; i < count; ++i) {
        online_total.add(online_values[i]);
        offline_total.add(offline_values[i]);
    }

    RatioReport report;
    report.trials = trials;
    report.value_ratio = values.mean;
    report.knapsack_ratio = values.mean;
    report.std_error = values.std_error;
    report.intersection_ratio = overlap.mean;
    report.intersection_std_error = overlap.std_error;
    report.value_ratio_of_means = offline_total.value() != 0.0 ? online_total.value() / offline_total.value() : 0.0;
    return report;
}

RatioReport run_attack(Stream const &stream, PolicyKind policy, PolicyConfig const &config, SeededRng &rng) {
    if (!stream.has_fooled_flags()) {
        throw input_error("attack stream is missing 'fooled' flags");
    }
    auto trace = run_policy(policy, stream, config, rng);
    auto const k = trace.config.k;

    std::size_t fooled = 0;
    for (auto arrival : trace.selected) {
        if (*stream[static_cast<std::size_t>(arrival - 1)].fooled) {
            ++fooled;
        }
    }
    RatioReport report;
    report.trials = 1;
    report.fool_rate = static_cast<double>(fooled) / k;
    if (stream.has_true_values()) {
        auto score = score_selection(stream, trace.selected, k);
        report.value_ratio = score.value_ratio;
        report.knapsack_ratio = score.value_ratio;
        report.intersection_ratio = score.intersection_ratio;
        report.value_ratio_of_means = score.value_ratio;
    }
    return report;
}

AttackSummary run_attack_permutations(Stream const &stream, PolicyKind policy, PolicyConfig const &config,
                                      std::uint64_t seed, std::int64_t permutations) {
    if (permutations < 1) {
        throw invalid_config("permutations must be at least 1");
    }
    AttackSummary summary;
    summary.policy = policy;
    summary.config = resolve_config(policy, stream.size(), config);
    summary.permutations = permutations;

    bool const scored = stream.has_true_values();
    std::vector<double> value_ratios;
    std::vector<double> intersections;
    for (std::int64_t p = 0; p < permutations; ++p) {
        SeededRng rng(seed, static_cast<std::uint64_t>(p));
        auto shuffled = permute(stream, rng);
        auto report = run_attack(shuffled, policy, summary.config, rng);
        summary.fool_rates.push_back(*report.fool_rate);
        if (scored) {
            value_ratios.push_back(report.value_ratio);
            intersections.push_back(report.intersection_ratio);
        }
    }
    auto fool = summarize(summary.fool_rates);
    summary.fool_rate_mean = fool.mean;
    summary.fool_rate_std = fool.std_dev;
    summary.fool_rate_std_error = fool.std_error;
    if (scored) {
        summary.value_ratio_mean = summarize(value_ratios).mean;
        summary.intersection_ratio_mean = summarize(intersections).mean;
    }
    return summary;
}

std::vector<SweepRow> sweep(std::span<PolicyKind const> policies, std::span<int const> ks, std::size_t n,
                            double sigma2, std::int64_t trials, std::uint64_t seed, SweepOptions const &options) {
    std::vector<SweepRow> rows;
    rows.reserve(policies.size() * ks.size());
    for (auto policy : policies) {
        for (int k : ks) {
            PolicyConfig config;
            config.k = k;
            config.exhaust_budget = options.exhaust_budget;
            if (policy != PolicyKind::naive && policy != PolicyKind::opt) {
                config.t = options.t;
            }
            if (policy == PolicyKind::single_ref) {
                config.r = options.r;
            }
            SweepRow row;
            row.policy = policy;
            row.config = resolve_config(policy, n, config);
            row.report = estimate_ratios(policy, n, row.config, sigma2, trials, seed, {options.jobs});
            rows.push_back(std::move(row));
        }
    }
    return rows;
}

}  // namespace seclab::harness
