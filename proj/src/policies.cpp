#include "seclab/policies.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "seclab/analysis.hpp"

namespace seclab {

std::string_view to_string(PolicyKind kind) noexcept {
    switch (kind) {
    case PolicyKind::naive: return "naive";
    case PolicyKind::opt: return "opt";
    case PolicyKind::virtual_: return "virtual";
    case PolicyKind::optimistic: return "optimistic";
    case PolicyKind::single_ref: return "single-ref";
    case PolicyKind::virtual_plus: return "virtual+";
    }
    return "unknown";
}

std::optional<PolicyKind> parse_policy(std::string_view name) noexcept {
    for (auto kind : {PolicyKind::naive, PolicyKind::opt, PolicyKind::virtual_, PolicyKind::optimistic,
                      PolicyKind::single_ref, PolicyKind::virtual_plus}) {
        if (name == to_string(kind)) {
            return kind;
        }
    }
    return std::nullopt;
}

std::string_view to_string(DecisionReason reason) noexcept {
    switch (reason) {
    case DecisionReason::sampling: return "sampling";
    case DecisionReason::rule_select: return "rule_select";
    case DecisionReason::rule_skip: return "rule_skip";
    case DecisionReason::budget_full: return "budget_full";
    case DecisionReason::forced_exhaust: return "forced_exhaust";
    case DecisionReason::naive_draw: return "naive_draw";
    }
    return "unknown";
}

void ReferenceList::offer(TotalOrderKey key) {
    if (full()) {
        if (capacity_ == 0 || !(key > entries_.back())) {
            return;
        }
        entries_.pop_back();
    }
    auto pos = std::upper_bound(entries_.begin(), entries_.end(), key, std::greater<>{});
    entries_.insert(pos, key);
}

void ReferenceList::replace_last(TotalOrderKey key) {
    if (!entries_.empty()) {
        entries_.pop_back();
    }
    auto pos = std::upper_bound(entries_.begin(), entries_.end(), key, std::greater<>{});
    entries_.insert(pos, key);
}

namespace {

int floor_n_over_e(std::size_t n) { return static_cast<int>(std::floor(static_cast<double>(n) / std::numbers::e)); }

bool uses_threshold(PolicyKind kind) { return kind != PolicyKind::naive && kind != PolicyKind::opt; }

}  // namespace

PolicyConfig resolve_config(PolicyKind kind, std::size_t n, PolicyConfig config) {
    auto const n_int = static_cast<long long>(n);
    if (n == 0) {
        throw invalid_config("stream length must be at least 1");
    }
    if (config.k < 1) {
        throw invalid_config("budget k must be at least 1");
    }
    if (config.k > n_int) {
        throw invalid_config("budget k=" + std::to_string(config.k) + " exceeds stream length n=" + std::to_string(n));
    }
    if (kind != PolicyKind::single_ref && config.r) {
        throw invalid_config("reference rank r is only meaningful for single-ref");
    }
    if (!uses_threshold(kind)) {
        return config;
    }
    if (2LL * config.k > n_int) {
        throw invalid_config("no valid threshold: need k <= t <= n-k but k=" + std::to_string(config.k) +
                             ", n=" + std::to_string(n));
    }

    switch (kind) {
    case PolicyKind::virtual_:
    case PolicyKind::optimistic:
        if (!config.t) {
            config.t = floor_n_over_e(n);
        }
        break;
    case PolicyKind::virtual_plus:
        if (!config.t) {
            config.t = config.k == 1
                           ? floor_n_over_e(n)
                           : static_cast<int>(std::lround(analysis::optimal_alpha(config.k) * static_cast<double>(n)));
        }
        break;
    case PolicyKind::single_ref:
        if (config.k == 1) {
            if (!config.t) config.t = floor_n_over_e(n);
            if (!config.r) config.r = 1;
        } else if (config.k == 1000) {
            if (!config.t) config.t = static_cast<int>(std::floor(0.13 * static_cast<double>(n)));
            if (!config.r) config.r = 40;
        }
        if (!config.t || !config.r) {
            throw invalid_config("single-ref has no default (t, r) for k=" + std::to_string(config.k) +
                                 "; supply both threshold and reference rank");
        }
        if (*config.r < 1 || *config.r > config.k) {
            throw invalid_config("reference rank r=" + std::to_string(*config.r) + " must lie in [1, k=" +
                                 std::to_string(config.k) + "]");
        }
        break;
    default: break;
    }
    config.t = std::clamp(*config.t, config.k, static_cast<int>(n_int - config.k));
    return config;
}

OnlinePolicy::OnlinePolicy(PolicyKind kind, std::size_t n, PolicyConfig config)
    : reference_(static_cast<std::size_t>(config.k)), kind_(kind), n_(n), config_(config), t_(config.t.value_or(0)) {
    selected_.reserve(static_cast<std::size_t>(config.k));
}

Decision OnlinePolicy::step(StreamItem const &item) { return step(item.observed_key()); }

Decision OnlinePolicy::step(TotalOrderKey key) {
    if (next_arrival_ > static_cast<std::int64_t>(n_)) {
        throw sequence_error("step after end of stream (n=" + std::to_string(n_) + ")");
    }
    if (key.arrival != next_arrival_) {
        throw sequence_error("expected arrival " + std::to_string(next_arrival_) + ", got " +
                             std::to_string(key.arrival));
    }
    ++next_arrival_;

    if (has_sampling_phase() && key.arrival <= t_) {
        observe_sample(key);
        return {false, DecisionReason::sampling};
    }

    Decision decision{false, select_rule(key)};
    decision.select = decision.reason == DecisionReason::rule_select || decision.reason == DecisionReason::naive_draw;

    if (!decision.select && config_.exhaust_budget && budget_left()) {
        auto remaining = static_cast<std::size_t>(static_cast<std::int64_t>(n_) - key.arrival + 1);
        if (remaining <= budget() - selected_.size()) {
            decision = {true, DecisionReason::forced_exhaust};
        }
    }
    if (decision.select) {
        selected_.push_back(key.arrival);
    }
    return decision;
}

namespace {

bool beats_last(ReferenceList const &reference, TotalOrderKey key) {
    return !reference.full() || key > reference.last();
}

class VirtualPolicy final : public OnlinePolicy {
  public:
    VirtualPolicy(std::size_t n, PolicyConfig config) : OnlinePolicy(PolicyKind::virtual_, n, config) {}

  private:
    DecisionReason select_rule(TotalOrderKey key) override {
        if (!beats_last(reference_, key)) {
            return DecisionReason::rule_skip;
        }
        bool last_from_selection = reference_.full() && reference_.last().arrival > threshold();
        reference_.offer(key);
        if (last_from_selection) {
            return DecisionReason::rule_skip;  // virtual update only
        }
        return budget_left() ? DecisionReason::rule_select : DecisionReason::budget_full;
    }
};

class VirtualPlusPolicy final : public OnlinePolicy {
  public:
    VirtualPlusPolicy(std::size_t n, PolicyConfig config) : OnlinePolicy(PolicyKind::virtual_plus, n, config) {}

  private:
    DecisionReason select_rule(TotalOrderKey key) override {
        if (!beats_last(reference_, key)) {
            return DecisionReason::rule_skip;
        }
        // R keeps tracking the running top-k even once the budget is spent;
        // selections are unaffected.
        reference_.offer(key);
        return budget_left() ? DecisionReason::rule_select : DecisionReason::budget_full;
    }
};

class OptimisticPolicy final : public OnlinePolicy {
  public:
    OptimisticPolicy(std::size_t n, PolicyConfig config) : OnlinePolicy(PolicyKind::optimistic, n, config) {}

  private:
    DecisionReason select_rule(TotalOrderKey key) override {
        if (reference_.empty() || !budget_left()) {
            return DecisionReason::budget_full;
        }
        if (!(key > reference_.last())) {
            return DecisionReason::rule_skip;
        }
        reference_.pop_last();
        return DecisionReason::rule_select;
    }
};

class SingleRefPolicy final : public OnlinePolicy {
  public:
    SingleRefPolicy(std::size_t n, PolicyConfig config)
        : OnlinePolicy(PolicyKind::single_ref, n, config), rank_(static_cast<std::size_t>(*config.r)) {}

  private:
    DecisionReason select_rule(TotalOrderKey key) override {
        if (!budget_left()) {
            return DecisionReason::budget_full;
        }
        if (reference_.size() >= rank_ && !(key > reference_.rank(rank_))) {
            return DecisionReason::rule_skip;
        }
        return DecisionReason::rule_select;
    }

    std::size_t rank_;
};

class NaivePolicy final : public OnlinePolicy {
  public:
    NaivePolicy(std::size_t n, PolicyConfig config, SeededRng &rng)
        : OnlinePolicy(PolicyKind::naive, n, config), drawn_(n + 1, false) {
        std::vector<std::size_t> positions(n);
        std::iota(positions.begin(), positions.end(), std::size_t{1});
        // partial Fisher-Yates: the first k slots form a uniform k-subset
        for (std::size_t i = 0; i < static_cast<std::size_t>(config.k); ++i) {
            auto j = i + static_cast<std::size_t>(rng.uniform_below(n - i));
            std::swap(positions[i], positions[j]);
            drawn_[positions[i]] = true;
        }
    }

  private:
    bool has_sampling_phase() const noexcept override { return false; }

    DecisionReason select_rule(TotalOrderKey key) override {
        return drawn_[static_cast<std::size_t>(key.arrival)] ? DecisionReason::naive_draw : DecisionReason::rule_skip;
    }

    std::vector<bool> drawn_;
};

}  // namespace

std::unique_ptr<OnlinePolicy> make_policy(PolicyKind kind, std::size_t n, PolicyConfig const &config,
                                          SeededRng &rng) {
    auto resolved = resolve_config(kind, n, config);
    switch (kind) {
    case PolicyKind::naive: return std::make_unique<NaivePolicy>(n, resolved, rng);
    case PolicyKind::virtual_: return std::make_unique<VirtualPolicy>(n, resolved);
    case PolicyKind::optimistic: return std::make_unique<OptimisticPolicy>(n, resolved);
    case PolicyKind::single_ref: return std::make_unique<SingleRefPolicy>(n, resolved);
    case PolicyKind::virtual_plus: return std::make_unique<VirtualPlusPolicy>(n, resolved);
    case PolicyKind::opt: break;
    }
    throw invalid_config("opt is an offline baseline and has no online state");
}

SelectionTrace run_policy(PolicyKind kind, Stream const &stream, PolicyConfig const &config, SeededRng &rng,
                          TraceOptions options) {
    if (kind == PolicyKind::opt) {
        return run_offline_opt(stream, config.k);
    }
    auto policy = make_policy(kind, stream.size(), config, rng);
    SelectionTrace trace;
    trace.policy = kind;
    trace.config = policy->config();
    trace.decisions.reserve(stream.size());
    if (options.record_reference) {
        trace.reference_snapshots.reserve(stream.size());
    }
    for (auto const &item : stream) {
        trace.decisions.push_back(policy->step(item));
        if (options.record_reference) {
            trace.reference_snapshots.push_back(policy->reference().entries());
        }
    }
    trace.selected = policy->selected();
    return trace;
}

SelectionTrace run_offline_opt(Stream const &stream, int k) {
    if (k < 1) {
        throw invalid_config("budget k must be at least 1");
    }
    std::vector<TotalOrderKey> keys;
    keys.reserve(stream.size());
    for (auto const &item : stream) {
        keys.push_back(item.true_key());
    }
    auto take = std::min(static_cast<std::size_t>(k), keys.size());
    std::partial_sort(keys.begin(), keys.begin() + static_cast<std::ptrdiff_t>(take), keys.end(), std::greater<>{});

    SelectionTrace trace;
    trace.policy = PolicyKind::opt;
    trace.config.k = k;
    for (std::size_t i = 0; i < take; ++i) {
        trace.selected.push_back(keys[i].arrival);
    }
    std::sort(trace.selected.begin(), trace.selected.end());
    return trace;
}

}  // namespace seclab
