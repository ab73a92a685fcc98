#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "seclab/cli/stream_io.hpp"
#include "seclab/harness.hpp"

using namespace seclab;
using namespace seclab::harness;

namespace {

Stream fixture() { return cli::to_stream(cli::read_records_file(SECLAB_TEST_DATA "/attack_fixture.jsonl")); }

Stream five_records() {
    std::vector<StreamItem> items;
    std::array<bool, 5> fooled{true, false, false, true, true};
    for (int i = 0; i < 5; ++i) {
        items.push_back({"r" + std::to_string(i), i + 1, 1.0 + i, 1.0 + i, fooled[static_cast<std::size_t>(i)]});
    }
    return Stream(items);
}

}  // namespace

TEST_CASE("synthetic stream without noise") {
    SeededRng rng(1);
    auto stream = synth_stream({50, 0.0, 1}, rng);
    REQUIRE(stream.size() == 50);
    for (std::size_t i = 0; i < stream.size(); ++i) {
        CHECK(stream[i].true_value == static_cast<double>(i + 1));
        CHECK(stream[i].observed_value == static_cast<double>(i + 1));
    }
}

TEST_CASE("synthetic noise moments") {
    SeededRng rng(12);
    std::size_t n = 100000;
    auto stream = synth_stream({n, 10.0, 12}, rng);
    CompensatedSum sum, sum_sq;
    for (auto const &item : stream) {
        double e = item.observed_value - *item.true_value;
        sum.add(e);
        sum_sq.add(e * e);
    }
    double mean = sum.value() / static_cast<double>(n);
    double var = sum_sq.value() / static_cast<double>(n) - mean * mean;
    CHECK(std::abs(mean) < 0.05);
    CHECK(std::abs(var / 10.0 - 1.0) < 0.05);

    SeededRng again(12);
    auto replay = synth_stream({n, 10.0, 12}, again);
    CHECK(replay[777].observed_value == stream[777].observed_value);
}

TEST_CASE("score_selection") {
    auto stream = five_records();
    std::vector<std::int64_t> best{4, 5};
    auto top = score_selection(stream, best, 2);
    CHECK(top.value_ratio == 1.0);
    CHECK(top.intersection_ratio == 1.0);
    std::vector<std::int64_t> one{1};
    auto partial = score_selection(stream, one, 2);
    CHECK(partial.value_ratio == doctest::Approx(1.0 / 9.0));
    CHECK(partial.intersection_ratio == 0.0);
}

TEST_CASE("fool rate counts over k") {
    auto stream = five_records();
    SeededRng rng(0);
    // single-ref: t=1 is clamped up to k=2, so arrivals 3 and 4 beat the sample best
    auto report = run_attack(stream, PolicyKind::single_ref, PolicyConfig{2, 1, 1, false}, rng);
    CHECK(report.fool_rate == 0.5);

    // virtual+ with t=2 on increasing values selects arrivals 3 and 4
    auto plus = run_attack(stream, PolicyKind::virtual_plus, PolicyConfig{2, 2, {}, false}, rng);
    CHECK(plus.fool_rate == 0.5);

    // reversed stream: nothing beats the sampling phase, so nothing is selected
    std::vector<StreamItem> reversed;
    for (int i = 0; i < 5; ++i) {
        reversed.push_back({"r", i + 1, 5.0 - i, 5.0 - i, true});
    }
    auto none = run_attack(Stream(reversed), PolicyKind::virtual_plus, PolicyConfig{2, 2, {}, false}, rng);
    CHECK(none.fool_rate == 0.0);
    auto forced = run_attack(Stream(reversed), PolicyKind::virtual_plus, PolicyConfig{2, 2, {}, true}, rng);
    CHECK(forced.fool_rate == 1.0);

    std::array<double, 3> plain{1, 2, 3};
    CHECK_THROWS_AS((void)run_attack(Stream::from_values(plain), PolicyKind::naive, PolicyConfig{1, {}, {}, false}, rng),
                    input_error);
}

TEST_CASE("estimates are reproducible and independent of jobs") {
    auto a = estimate_ratios(PolicyKind::virtual_plus, 60, PolicyConfig{3, {}, {}, false}, 4.0, 500, 9);
    auto b = estimate_ratios(PolicyKind::virtual_plus, 60, PolicyConfig{3, {}, {}, false}, 4.0, 500, 9, {4});
    CHECK(a.value_ratio == b.value_ratio);
    CHECK(a.intersection_ratio == b.intersection_ratio);
    CHECK(a.std_error == b.std_error);
    CHECK(a.trials == 500);
    CHECK(a.value_ratio <= 1.0);
    CHECK(a.value_ratio >= 0.0);
    CHECK(a.knapsack_ratio == a.value_ratio);
    auto c = estimate_ratios(PolicyKind::virtual_plus, 60, PolicyConfig{3, {}, {}, false}, 4.0, 500, 10);
    CHECK(c.value_ratio != a.value_ratio);
}

TEST_CASE("opt scores one on every trial") {
    auto report = estimate_ratios(PolicyKind::opt, 40, PolicyConfig{4, {}, {}, false}, 10.0, 200, 3);
    CHECK(report.value_ratio == 1.0);
    CHECK(report.intersection_ratio == 1.0);
    CHECK(report.std_error == 0.0);
}

TEST_CASE("naive intersection ratio is k/n") {
    for (int k : {2, 7}) {
        auto report = estimate_ratios(PolicyKind::naive, 50, PolicyConfig{k, {}, {}, false}, 0.0, 10000, 21);
        CAPTURE(k);
        CHECK(std::abs(report.intersection_ratio - k / 50.0) < 3.0 * report.intersection_std_error);
    }
}

TEST_CASE("k=1 value ratio barely moves with noise") {
    auto clean = estimate_ratios(PolicyKind::virtual_plus, 100, PolicyConfig{1, 37, {}, false}, 0.0, 10000, 4);
    auto noisy = estimate_ratios(PolicyKind::virtual_plus, 100, PolicyConfig{1, 37, {}, false}, 10.0, 10000, 4);
    CHECK(std::abs(clean.value_ratio - noisy.value_ratio) < 0.03);
    // the classical success probability, not the value ratio, sits at 1/e
    CHECK(std::abs(clean.intersection_ratio - 0.371) < 3.0 * clean.intersection_std_error + 0.005);
}

TEST_CASE("sweep covers every cell with the same seed") {
    std::array<PolicyKind, 2> policies{PolicyKind::virtual_, PolicyKind::virtual_plus};
    std::array<int, 3> ks{1, 2, 3};
    auto rows = sweep(policies, ks, 50, 1.0, 200, 5);
    REQUIRE(rows.size() == 6);
    CHECK(rows[0].policy == PolicyKind::virtual_);
    CHECK(rows[3].policy == PolicyKind::virtual_plus);
    CHECK(rows[4].config.k == 2);
    // at k=1 the two rules coincide, and identical seeds give identical estimates
    CHECK(rows[0].report.value_ratio == rows[3].report.value_ratio);
}

TEST_CASE("attack on the fixture") {
    auto stream = fixture();
    REQUIRE(stream.size() == 1000);
    auto opt = run_attack_permutations(stream, PolicyKind::opt, PolicyConfig{10, {}, {}, true}, 1, 20);
    CHECK(opt.fool_rate_std == 0.0);
    CHECK(opt.fool_rate_mean == 0.9);
    CHECK(opt.value_ratio_mean == 1.0);

    double base = 0.0;
    for (auto const &item : stream) {
        base += *item.fooled ? 1.0 : 0.0;
    }
    base /= static_cast<double>(stream.size());
    auto naive = run_attack_permutations(stream, PolicyKind::naive, PolicyConfig{10, {}, {}, true}, 1, 100);
    CHECK(std::abs(naive.fool_rate_mean - base) < 3.0 * naive.fool_rate_std_error);
    CHECK(opt.fool_rate_mean >= naive.fool_rate_mean);

    auto plus = run_attack_permutations(stream, PolicyKind::virtual_plus, PolicyConfig{10, {}, {}, true}, 1, 50);
    CHECK(plus.fool_rate_mean > naive.fool_rate_mean);
    for (double rate : plus.fool_rates) {
        CHECK(rate >= 0.0);
        CHECK(rate <= 1.0);
    }
}
