#include <doctest.h>

#include <array>
#include <cmath>

#include "seclab/analysis.hpp"

using namespace seclab;
using namespace seclab::analysis;

namespace {

double closed_form_k2(double alpha) { return alpha * (3.0 * (1.0 - alpha) + 2.0 * alpha * std::log(alpha)); }

// Classical single-choice rule: P(best is picked) = sum_{j=t+1}^{n} t/(j-1) * 1/n.
Rational classical_success(int n, int t) {
    Rational sum(0);
    for (int j = t + 1; j <= n; ++j) {
        sum += Rational(t, j - 1) * Rational(1, n);
    }
    return sum;
}

}  // namespace

TEST_CASE("coefficients for k=2 and k=3") {
    auto two = coefficients(2);
    REQUIRE(two.a.size() == 2);
    CHECK(two.a[0] == doctest::Approx(-3.0).epsilon(1e-14));
    CHECK(two.a[1] == doctest::Approx(2.0).epsilon(1e-14));

    auto three = coefficients(3);
    REQUIRE(three.a.size() == 3);
    CHECK(three.a[0] == doctest::Approx(-19.0 / 8.0).epsilon(1e-14));
    CHECK(three.a[1] == doctest::Approx(15.0 / 4.0).epsilon(1e-14));
    CHECK(three.a[2] == doctest::Approx(-9.0 / 4.0).epsilon(1e-14));
    for (std::size_t m = 0; m < three.a.size(); ++m) {
        CHECK(three.log_terms[m].value() == doctest::Approx(three.a[m]).epsilon(1e-13));
    }

    CHECK_THROWS_AS((void)coefficients(1), precondition_error);
    CHECK_THROWS_AS((void)coefficients(1001), precondition_error);
}

TEST_CASE("coefficient recurrence holds in log space") {
    for (int k : {2, 3, 5, 12, 50, 200, 1000}) {
        CAPTURE(k);
        auto residuals = recurrence_residuals(coefficients(k));
        REQUIRE(residuals.size() == static_cast<std::size_t>(std::max(k - 2, 0) + 1));
        for (double r : residuals) {
            CHECK(r < 1e-9);
        }
    }
    // large k overflows the plain doubles but not the log form
    auto big = coefficients(600);
    CHECK(std::isfinite(big.log_terms.back().log_magnitude));
}

TEST_CASE("bound_f matches the k=2 closed form") {
    CHECK(bound_f(2, 0.5) == doctest::Approx(0.40342640972002735).epsilon(1e-14));
    for (int i = 1; i < 1000; ++i) {
        double alpha = i / 1000.0;
        REQUIRE(std::abs(bound_f(2, alpha) - closed_form_k2(alpha)) < 1e-12);
    }
}

TEST_CASE("bound_f endpoints and concavity") {
    for (int k : {2, 3, 7, 40, 300}) {
        CAPTURE(k);
        CHECK(std::abs(bound_f(k, 1.0 - 1e-9)) < 1e-6);
        CHECK(std::abs(bound_f(k, 1e-9)) < 1e-6);
        double h = 1e-3;
        for (double alpha = 0.05; alpha < 0.95; alpha += 0.05) {
            double second = bound_f(k, alpha + h) - 2.0 * bound_f(k, alpha) + bound_f(k, alpha - h);
            CHECK(second <= 1e-12);
        }
    }
}

TEST_CASE("optimal threshold reproduces the reference table") {
    struct Row {
        int k;
        double alpha;
        double c;
    };
    std::array<Row, 10> rows{{{2, 0.3824, 0.4273},
                              {3, 0.3867, 0.4575},
                              {4, 0.3884, 0.4769},
                              {5, 0.3890, 0.4906},
                              {100, 0.3781, 0.5959},
                              {200, 0.3755, 0.6062},
                              {300, 0.3743, 0.6109},
                              {400, 0.3735, 0.6137},
                              {500, 0.3729, 0.6156},
                              {600, 0.3726, 0.6170}}};
    for (auto const &row : rows) {
        CAPTURE(row.k);
        auto result = optimal_threshold(row.k, true);
        CHECK(std::abs(result.alpha_star - row.alpha) < 5e-4);
        CHECK(std::abs(result.c_k - row.c) < 5e-4);
        CHECK(result.c_k == doctest::Approx(bound_f(row.k, result.alpha_star)).epsilon(1e-12));
        CHECK_FALSE(result.evaluations.empty());
        CHECK(optimal_alpha(row.k) == result.alpha_star);
    }
}

TEST_CASE("golden section on a known parabola") {
    auto [x, fx] = golden_section_maximize([](double v) { return -(v - 0.3) * (v - 0.3) + 2.0; }, 0.0, 1.0, 1e-10);
    CHECK(x == doctest::Approx(0.3).epsilon(1e-8));
    CHECK(fx == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("classical rule: enumeration equals the textbook sum") {
    auto three = enumerate_exact(PolicyKind::virtual_plus, 3, PolicyConfig{1, 1, {}, false});
    CHECK(three.rank_probability[0] == Rational(1, 2));
    CHECK(three.competitive_ratio == Rational(1, 2));
    CHECK(three.permutations == 6);
    for (int n = 4; n <= 8; ++n) {
        int t = static_cast<int>(std::floor(n / std::numbers::e));
        CAPTURE(n);
        for (auto kind : {PolicyKind::virtual_plus, PolicyKind::virtual_}) {
            auto report = enumerate_exact(kind, n, PolicyConfig{1, t, {}, false});
            CHECK(report.competitive_ratio == classical_success(n, t));
        }
    }
}

TEST_CASE("enumeration sanity") {
    CHECK_THROWS_AS((void)enumerate_exact(PolicyKind::virtual_plus, 9, PolicyConfig{2, 3, {}, false}),
                    precondition_error);
    CHECK_THROWS_AS((void)enumerate_exact(PolicyKind::naive, 5, PolicyConfig{2, 2, {}, false}), precondition_error);
    for (auto kind : {PolicyKind::virtual_, PolicyKind::optimistic, PolicyKind::virtual_plus}) {
        auto report = enumerate_exact(kind, 6, PolicyConfig{3, 3, {}, false});
        Rational expected_total(0);
        for (auto const &p : report.rank_probability) {
            CHECK(p >= Rational(0));
            CHECK(p <= Rational(1));
            expected_total += p;
        }
        CHECK(expected_total <= Rational(3));
        CHECK(report.competitive_ratio <= Rational(1));
    }
    auto plus = enumerate_exact(PolicyKind::virtual_plus, 6, PolicyConfig{2, 2, {}, false});
    auto virt = enumerate_exact(PolicyKind::virtual_, 6, PolicyConfig{2, 2, {}, false});
    CHECK(plus.competitive_ratio >= virt.competitive_ratio);
}

TEST_CASE("finite-n k=2 formula agrees with enumeration") {
    for (int n = 5; n <= 8; ++n) {
        for (int t = 2; t <= n - 2; ++t) {
            CAPTURE(n);
            CAPTURE(t);
            auto report = enumerate_exact(PolicyKind::virtual_plus, n, PolicyConfig{2, t, {}, false});
            CHECK(std::abs(finite_ratio_k2(n, t) - report.competitive_ratio_value()) < 1e-12);
        }
    }
    // the 1/(p-1) variant is off once the inner sum is nonempty
    auto report = enumerate_exact(PolicyKind::virtual_plus, 6, PolicyConfig{2, 2, {}, false});
    CHECK(report.competitive_ratio == Rational(47, 90));
    CHECK(std::abs(finite_ratio_k2_as_printed(6, 2) - report.competitive_ratio_value()) > 0.05);
}

TEST_CASE("finite-n k=2 formula at larger n") {
    CHECK(finite_ratio_k2(100, 38) >= closed_form_k2(0.38));
    CHECK(std::abs(finite_ratio_k2(100, 38) - 0.427) < 0.02);
    double late = finite_ratio_k2(100, 98);
    CHECK(late > 0.0);
    CHECK(late < optimal_threshold(2).c_k);
    CHECK_THROWS_AS((void)finite_ratio_k2(10, 1), precondition_error);
    CHECK_THROWS_AS((void)finite_ratio_k2(10, 9), precondition_error);
}

TEST_CASE("not-full probabilities") {
    CHECK(not_full_probability(6, 2, 3, 2, 1) == doctest::Approx(2.0 / 3.0).epsilon(1e-14));
    CHECK(not_full_probability(6, 2, 3, 2, 0) == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
    CHECK(not_full_probability(20, 7, 12, 3, 0) == doctest::Approx((7.0 * 6 * 5) / (12.0 * 11 * 10)).epsilon(1e-14));

    for (int n = 5; n <= 8; ++n) {
        for (int k = 1; k <= 3; ++k) {
            for (int t = k; t <= n - k; ++t) {
                auto report = enumerate_exact(PolicyKind::virtual_plus, n, PolicyConfig{k, t, {}, false});
                for (int j = t; j <= n - 1; ++j) {
                    CAPTURE(n);
                    CAPTURE(k);
                    CAPTURE(t);
                    CAPTURE(j);
                    double exact = boost::rational_cast<double>(report.not_full_after[static_cast<std::size_t>(j)]);
                    CHECK(not_full_probability(n, t, j, k) == doctest::Approx(exact).epsilon(1e-12));
                }
            }
        }
    }
    CHECK_THROWS_AS((void)not_full_probability(300, 100, 250, 6, 4), precondition_error);
}

TEST_CASE("stochastic factor") {
    double sigma = 1.3;
    double delta = 2.0 * sigma * sigma * std::log(2.0);
    CHECK(stochastic_factor(delta, sigma) == doctest::Approx(std::pow(0.5, 4.0 / 3.0)).epsilon(1e-12));
    CHECK(stochastic_factor(delta, sigma) == doctest::Approx(0.39685).epsilon(1e-4));
    CHECK(stochastic_factor(0.5, 1e-6) >= 1.0 - 1e-9);
    double previous = 0.0;
    for (double s : {5.0, 2.0, 1.0, 0.5, 0.25}) {
        double f = stochastic_factor(1.0, s);
        CHECK(f > previous);
        CHECK(f <= 1.0);
        previous = f;
    }
    CHECK_THROWS_AS((void)stochastic_factor(0.0, 1.0), precondition_error);
    CHECK_THROWS_AS((void)stochastic_factor(1.0, 0.0), precondition_error);
}

TEST_CASE("min gap") {
    std::array<double, 5> grid{1, 2, 3, 4, 5};
    CHECK(min_gap(grid) == 0.5);
    std::array<double, 3> uneven{10.5, 0, 10};
    CHECK(min_gap(uneven) == 0.25);
    std::array<double, 3> dup{1, 2, 1};
    CHECK(min_gap(dup) == 0.0);
}
