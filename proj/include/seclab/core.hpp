#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace seclab {

/// Raised when a policy configuration is inconsistent with the stream it runs on.
class invalid_config : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

/// Raised when an analytic routine is called outside its domain.
class precondition_error : public std::domain_error {
  public:
    using std::domain_error::domain_error;
};

/// Raised for malformed or incomplete input data (streams, records).
class input_error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Ordering key for a stream item. Higher value wins; on equal values the
/// earlier arrival is strictly larger, so any two distinct arrivals compare
/// unequal and "top-k" is always unique.
struct TotalOrderKey {
    double value = 0.0;
    std::int64_t arrival = 0;
};

[[nodiscard]] std::strong_ordering compare(TotalOrderKey const &a, TotalOrderKey const &b) noexcept;

inline std::strong_ordering operator<=>(TotalOrderKey const &a, TotalOrderKey const &b) noexcept {
    return compare(a, b);
}

inline bool operator==(TotalOrderKey const &a, TotalOrderKey const &b) noexcept {
    return compare(a, b) == 0;
}

struct StreamItem {
    std::string id;
    std::int64_t arrival = 0;
    double observed_value = 0.0;
    std::optional<double> true_value;
    std::optional<bool> fooled;

    [[nodiscard]] TotalOrderKey observed_key() const noexcept { return {observed_value, arrival}; }

    /// Key over the true value; throws input_error when it is absent.
    [[nodiscard]] TotalOrderKey true_key() const;
};

/// An ordered, validated sequence of items with arrivals exactly 1..n.
class Stream {
  public:
    explicit Stream(std::vector<StreamItem> items);

    /// Items with ids "1".."n", observed values in the given order and no true values.
    static Stream from_values(std::span<double const> observed);

    [[nodiscard]] std::size_t size() const noexcept { return items_.size(); }
    [[nodiscard]] std::span<StreamItem const> items() const noexcept { return items_; }
    [[nodiscard]] StreamItem const &operator[](std::size_t i) const { return items_[i]; }
    [[nodiscard]] auto begin() const noexcept { return items_.begin(); }
    [[nodiscard]] auto end() const noexcept { return items_.end(); }

    [[nodiscard]] bool has_true_values() const noexcept;
    [[nodiscard]] bool has_fooled_flags() const noexcept;

  private:
    std::vector<StreamItem> items_;
};

/// Budget, threshold and reference rank for one policy instance. Unset
/// fields are filled by resolve_config().
struct PolicyConfig {
    int k = 1;
    std::optional<int> t;
    std::optional<int> r;
    bool exhaust_budget = false;
};

/// Deterministic generator identified by (seed, stream_index). Distinct
/// stream indices give statistically independent substreams, so parallel
/// trials can each own one without coordination.
class SeededRng {
  public:
    using engine_type = std::mt19937_64;

    explicit SeededRng(std::uint64_t seed, std::uint64_t stream_index = 0);

    [[nodiscard]] std::uint64_t seed() const noexcept { return seed_; }
    [[nodiscard]] std::uint64_t stream_index() const noexcept { return stream_index_; }

    [[nodiscard]] SeededRng substream(std::uint64_t index) const { return SeededRng(seed_, index); }

    /// Uniform integer in [0, bound).
    std::uint64_t uniform_below(std::uint64_t bound);
    double normal(double mean, double stddev);

    /// Unbiased Fisher-Yates shuffle.
    template <typename T>
    void shuffle(std::span<T> values) {
        for (std::size_t i = values.size(); i > 1; --i) {
            auto j = static_cast<std::size_t>(uniform_below(i));
            std::swap(values[i - 1], values[j]);
        }
    }

    engine_type &engine() noexcept { return engine_; }

  private:
    std::uint64_t seed_;
    std::uint64_t stream_index_;
    engine_type engine_;
};

/// Uniformly random reordering of the stream; arrivals are renumbered 1..n.
[[nodiscard]] Stream permute(Stream const &stream, SeededRng &rng);

/// Neumaier-compensated running sum.
class CompensatedSum {
  public:
    void add(double x) noexcept;
    [[nodiscard]] double value() const noexcept { return sum_ + compensation_; }

  private:
    double sum_ = 0.0;
    double compensation_ = 0.0;
};

}  // namespace seclab
