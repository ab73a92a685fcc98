#include <algorithm>
#include <numeric>
#include <string>

#include "seclab/analysis.hpp"

namespace seclab::analysis {

EnumerationReport enumerate_exact(PolicyKind policy, int n, PolicyConfig const &config) {
    if (n < 1 || n > 8) {
        throw precondition_error("exact enumeration supports 1 <= n <= 8, got n=" + std::to_string(n));
    }
    if (!is_online(policy) || policy == PolicyKind::naive) {
        throw precondition_error("exact enumeration needs a deterministic online policy, not " +
                                 std::string(to_string(policy)));
    }
    auto const size = static_cast<std::size_t>(n);
    auto const resolved = resolve_config(policy, size, config);

    EnumerationReport report;
    report.policy = policy;
    report.n = n;
    report.k = resolved.k;
    report.t = resolved.t.value_or(0);

    std::vector<std::int64_t> rank_hits(size, 0);
    std::vector<std::int64_t> not_full_hits(size + 1, 0);
    std::vector<int> values(size);
    std::iota(values.begin(), values.end(), 1);

    SeededRng unused_rng(0);
    std::int64_t permutations = 0;
    do {
        ++permutations;
        auto state = make_policy(policy, size, resolved, unused_rng);
        std::size_t chosen = 0;
        if (resolved.k > 0) {
            ++not_full_hits[0];
        }
        for (std::size_t i = 0; i < size; ++i) {
            auto decision = state->step(TotalOrderKey{static_cast<double>(values[i]), static_cast<std::int64_t>(i + 1)});
            if (decision.select) {
                ++chosen;
                // value v has rank n - v + 1
                ++rank_hits[size - static_cast<std::size_t>(values[i])];
            }
            if (chosen < static_cast<std::size_t>(resolved.k)) {
                ++not_full_hits[i + 1];
            }
        }
    } while (std::next_permutation(values.begin(), values.end()));

    report.permutations = permutations;
    for (auto hits : rank_hits) {
        report.rank_probability.emplace_back(hits, permutations);
    }
    for (auto hits : not_full_hits) {
        report.not_full_after.emplace_back(hits, permutations);
    }
    Rational total(0);
    for (std::size_t a = 0; a < static_cast<std::size_t>(resolved.k); ++a) {
        total += report.rank_probability[a];
    }
    report.competitive_ratio = total / Rational(resolved.k);
    return report;
}

}  // namespace seclab::analysis
