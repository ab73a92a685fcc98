#pragma once

#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "seclab/core.hpp"

namespace seclab {

/// Raised when items are fed to a policy out of arrival order or past the end.
class sequence_error : public std::logic_error {
  public:
    using std::logic_error::logic_error;
};

enum class PolicyKind { naive, opt, virtual_, optimistic, single_ref, virtual_plus };

[[nodiscard]] std::string_view to_string(PolicyKind kind) noexcept;

/// Accepts the CLI spellings: naive, opt, virtual, optimistic, single-ref, virtual+.
[[nodiscard]] std::optional<PolicyKind> parse_policy(std::string_view name) noexcept;

/// Policies that decide online, one item at a time (everything except opt).
[[nodiscard]] constexpr bool is_online(PolicyKind kind) noexcept { return kind != PolicyKind::opt; }

enum class DecisionReason { sampling, rule_select, rule_skip, budget_full, forced_exhaust, naive_draw };

[[nodiscard]] std::string_view to_string(DecisionReason reason) noexcept;

struct Decision {
    bool select = false;
    DecisionReason reason = DecisionReason::sampling;
};

/// Descending list of at most `capacity` keys; position 1 is the best.
class ReferenceList {
  public:
    explicit ReferenceList(std::size_t capacity) : capacity_(capacity) { entries_.reserve(capacity + 1); }

    /// Adds the key if the list has room or it beats the current last entry.
    void offer(TotalOrderKey key);

    /// Drops the last entry and inserts `key` in sorted position.
    void replace_last(TotalOrderKey key);

    void pop_last() { entries_.pop_back(); }

    [[nodiscard]] std::size_t size() const noexcept { return entries_.size(); }
    [[nodiscard]] std::size_t capacity() const noexcept { return capacity_; }
    [[nodiscard]] bool empty() const noexcept { return entries_.empty(); }
    [[nodiscard]] bool full() const noexcept { return entries_.size() >= capacity_; }

    /// 1-based access matching R[1] >= R[2] >= ...
    [[nodiscard]] TotalOrderKey const &rank(std::size_t r) const { return entries_.at(r - 1); }
    [[nodiscard]] TotalOrderKey const &last() const { return entries_.back(); }
    [[nodiscard]] std::vector<TotalOrderKey> const &entries() const noexcept { return entries_; }

  private:
    std::size_t capacity_;
    std::vector<TotalOrderKey> entries_;
};

/// Validates `config` for a stream of length n and fills in defaults:
///  - virtual, optimistic: t = floor(n/e)
///  - virtual+: t = round(alpha_k * n) with alpha_k from optimal_threshold(k)
///    (floor(n/e) for k = 1, where the rule is the classical secretary rule)
///  - single-ref: only the presets k = 1 -> (floor(n/e), 1) and
///    k = 1000 -> (floor(0.13 n), 40); other budgets must supply t and r
/// t is then clamped into [k, n - k]. naive and opt ignore t.
[[nodiscard]] PolicyConfig resolve_config(PolicyKind kind, std::size_t n, PolicyConfig config);

/// Mutable state of one online policy run over a stream of known length.
class OnlinePolicy {
  public:
    virtual ~OnlinePolicy() = default;

    /// Feeds the next item; arrivals must be 1, 2, ..., n in order.
    Decision step(StreamItem const &item);
    Decision step(TotalOrderKey key);

    [[nodiscard]] PolicyKind kind() const noexcept { return kind_; }
    [[nodiscard]] PolicyConfig const &config() const noexcept { return config_; }
    [[nodiscard]] std::size_t stream_length() const noexcept { return n_; }
    [[nodiscard]] std::int64_t threshold() const noexcept { return t_; }
    [[nodiscard]] std::vector<std::int64_t> const &selected() const noexcept { return selected_; }
    [[nodiscard]] ReferenceList const &reference() const noexcept { return reference_; }
    [[nodiscard]] std::int64_t next_arrival() const noexcept { return next_arrival_; }

  protected:
    OnlinePolicy(PolicyKind kind, std::size_t n, PolicyConfig config);

    [[nodiscard]] std::size_t budget() const noexcept { return static_cast<std::size_t>(config_.k); }
    [[nodiscard]] bool budget_left() const noexcept { return selected_.size() < budget(); }

    /// Sampling-phase observation. Default: keep the top-k in R.
    virtual void observe_sample(TotalOrderKey key) { reference_.offer(key); }

    /// Selection-phase rule; returns rule_select or a skip reason.
    virtual DecisionReason select_rule(TotalOrderKey key) = 0;

    /// Naive overrides this to bypass the sampling phase entirely.
    virtual bool has_sampling_phase() const noexcept { return true; }

    ReferenceList reference_;

  private:
    PolicyKind kind_;
    std::size_t n_;
    PolicyConfig config_;
    std::int64_t t_;
    std::int64_t next_arrival_ = 1;
    std::vector<std::int64_t> selected_;
};

/// Fresh policy state. Throws invalid_config for opt (offline) or invalid
/// budgets; naive draws its k positions from `rng` here.
[[nodiscard]] std::unique_ptr<OnlinePolicy> make_policy(PolicyKind kind, std::size_t n, PolicyConfig const &config,
                                                        SeededRng &rng);

struct SelectionTrace {
    PolicyKind policy = PolicyKind::virtual_plus;
    PolicyConfig config;                        // resolved
    std::vector<std::int64_t> selected;         // strictly increasing arrivals
    std::vector<Decision> decisions;            // one per arrival (empty for opt)
    std::vector<std::vector<TotalOrderKey>> reference_snapshots;  // R after each arrival, if requested
};

struct TraceOptions {
    bool record_reference = false;
};

/// Runs a policy over the whole stream on observed values. opt is routed to
/// run_offline_opt (true values).
[[nodiscard]] SelectionTrace run_policy(PolicyKind kind, Stream const &stream, PolicyConfig const &config,
                                        SeededRng &rng, TraceOptions options = {});

/// The k items with the largest true values; requires true values on every item.
[[nodiscard]] SelectionTrace run_offline_opt(Stream const &stream, int k);

}  // namespace seclab
