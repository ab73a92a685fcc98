#include "seclab/core.hpp"

#include <cmath>
#include <string>
#include <utility>

namespace seclab {

namespace {

std::uint64_t splitmix64(std::uint64_t &state) noexcept {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

SeededRng::engine_type make_engine(std::uint64_t seed, std::uint64_t stream_index) {
    // Expand (seed, stream_index) into a full seed sequence; the stream index
    // is folded in through a second splitmix chain so neighbouring indices
    // land far apart in state space.
    std::uint64_t a = seed;
    std::uint64_t b = stream_index ^ 0xD1B54A32D192ED03ULL;
    std::vector<std::uint32_t> words;
    words.reserve(16);
    for (int i = 0; i < 4; ++i) {
        std::uint64_t x = splitmix64(a) ^ splitmix64(b);
        words.push_back(static_cast<std::uint32_t>(x));
        words.push_back(static_cast<std::uint32_t>(x >> 32));
    }
    std::seed_seq seq(words.begin(), words.end());
    return SeededRng::engine_type(seq);
}

}  // namespace

std::strong_ordering compare(TotalOrderKey const &a, TotalOrderKey const &b) noexcept {
    if (a.value < b.value) {
        return std::strong_ordering::less;
    }
    if (a.value > b.value) {
        return std::strong_ordering::greater;
    }
    // earlier arrival ranks higher
    return b.arrival <=> a.arrival;
}

TotalOrderKey StreamItem::true_key() const {
    if (!true_value) {
        throw input_error("item '" + id + "' has no true value");
    }
    return {*true_value, arrival};
}

Stream::Stream(std::vector<StreamItem> items) : items_(std::move(items)) {
    if (items_.empty()) {
        throw input_error("stream must contain at least one item");
    }
    for (std::size_t i = 0; i < items_.size(); ++i) {
        auto const &item = items_[i];
        if (item.arrival != static_cast<std::int64_t>(i + 1)) {
            throw input_error("stream arrivals must be exactly 1..n in order; position " + std::to_string(i + 1) +
                              " has arrival " + std::to_string(item.arrival));
        }
        if (!std::isfinite(item.observed_value)) {
            throw input_error("item '" + item.id + "' has a non-finite observed value");
        }
        if (item.true_value && !std::isfinite(*item.true_value)) {
            throw input_error("item '" + item.id + "' has a non-finite true value");
        }
    }
}

Stream Stream::from_values(std::span<double const> observed) {
    std::vector<StreamItem> items;
    items.reserve(observed.size());
    for (std::size_t i = 0; i < observed.size(); ++i) {
        StreamItem item;
        item.id = std::to_string(i + 1);
        item.arrival = static_cast<std::int64_t>(i + 1);
        item.observed_value = observed[i];
        items.push_back(std::move(item));
    }
    return Stream(std::move(items));
}

bool Stream::has_true_values() const noexcept {
    for (auto const &item : items_) {
        if (!item.true_value) {
            return false;
        }
    }
    return true;
}

bool Stream::has_fooled_flags() const noexcept {
    for (auto const &item : items_) {
        if (!item.fooled) {
            return false;
        }
    }
    return true;
}

SeededRng::SeededRng(std::uint64_t seed, std::uint64_t stream_index)
    : seed_(seed), stream_index_(stream_index), engine_(make_engine(seed, stream_index)) {}

std::uint64_t SeededRng::uniform_below(std::uint64_t bound) {
    std::uniform_int_distribution<std::uint64_t> dist(0, bound - 1);
    return dist(engine_);
}

double SeededRng::normal(double mean, double stddev) {
    std::normal_distribution<double> dist(mean, stddev);
    return dist(engine_);
}

Stream permute(Stream const &stream, SeededRng &rng) {
    std::vector<StreamItem> items(stream.begin(), stream.end());
    rng.shuffle(std::span<StreamItem>(items));
    for (std::size_t i = 0; i < items.size(); ++i) {
        items[i].arrival = static_cast<std::int64_t>(i + 1);
    }
    return Stream(std::move(items));
}

void CompensatedSum::add(double x) noexcept {
    double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
        compensation_ += (sum_ - t) + x;
    } else {
        compensation_ += (x - t) + sum_;
    }
    sum_ = t;
}

}  // namespace seclab
