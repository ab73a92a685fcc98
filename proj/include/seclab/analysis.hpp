#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include <boost/rational.hpp>

#include "seclab/core.hpp"
#include "seclab/policies.hpp"

namespace seclab::analysis {

/// A real number carried as sign * exp(log_magnitude).
struct SignedLog {
    int sign = 0;  // -1, 0 or +1
    double log_magnitude = -INFINITY;

    [[nodiscard]] double value() const noexcept { return sign == 0 ? 0.0 : sign * std::exp(log_magnitude); }
};

/// Coefficients a_0..a_{k-1} of the Virtual+ lower-bound function
///   a_m = (k^k / (k-1)^(k-m) - k^m) * (-1)^(m+1) / m!
/// `log_terms` is exact in log space for every supported k; `a` holds the
/// plain doubles, which overflow to +-inf once k grows past ~140.
struct CoefficientSet {
    int k = 0;
    std::vector<SignedLog> log_terms;
    std::vector<double> a;
};

[[nodiscard]] CoefficientSet coefficients(int k);

/// Relative residuals of the identities
///   k(k-1) a_m + (2k-1)(m+1) a_{m+1} + (m+1)(m+2) a_{m+2} = 0,  0 <= m <= k-3
///   k(k-1) a_{k-2} + (2k-1)(k-1) a_{k-1} = 0
/// each normalised by the largest term magnitude, evaluated in log space.
/// Entry m holds the first family; the last entry holds the second identity.
[[nodiscard]] std::vector<double> recurrence_residuals(CoefficientSet const &coeffs);

/// f(alpha) = alpha^k * sum_m a_m ln^m(alpha) - alpha * a_0, evaluated through
/// truncated exponentials in u = -ln(alpha) so that large k does not overflow.
[[nodiscard]] double bound_f(int k, double alpha);

struct BoundResult {
    int k = 0;
    double alpha_star = 0.0;
    double c_k = 0.0;
    std::vector<std::pair<double, double>> evaluations;
};

/// Maximises bound_f over (1e-9, 1 - 1e-9) by golden-section search to an
/// absolute alpha tolerance of 1e-10. f is concave, so the bracket always
/// contains the maximiser.
[[nodiscard]] BoundResult optimal_threshold(int k, bool record_evaluations = false);

/// Memoised alpha_star for k, shared across threads.
[[nodiscard]] double optimal_alpha(int k);

/// Golden-section maximisation of a unimodal function on [lo, hi].
template <typename F>
std::pair<double, double> golden_section_maximize(F &&f, double lo, double hi, double tolerance) {
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = hi - inv_phi * (hi - lo);
    double d = lo + inv_phi * (hi - lo);
    double fc = f(c);
    double fd = f(d);
    while (hi - lo > tolerance) {
        if (fc >= fd) {
            hi = d;
            d = c;
            fd = fc;
            c = hi - inv_phi * (hi - lo);
            fc = f(c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + inv_phi * (hi - lo);
            fd = f(d);
        }
    }
    double x = (lo + hi) / 2.0;
    return {x, f(x)};
}

/// Exact finite-n competitive ratio of Virtual+ at k = 2:
///   C_n = t(t-1)/n * sum_{j=t}^{n-1} 1/(j(j-1)) * (1 + 2 sum_{p=t+1}^{j} 1/(p-2))
/// Requires 2 <= t <= n-2. The inner sum runs over the step p at which the
/// single selection happened; see finite_ratio_k2_as_printed for the variant
/// with 1/(p-1), which does not match exhaustive enumeration.
[[nodiscard]] double finite_ratio_k2(int n, int t);

/// Same double sum with the inner factor 1/(p-1). Kept for comparison only.
[[nodiscard]] double finite_ratio_k2_as_printed(int n, int t);

/// Probability that Virtual+ has made exactly nu selections after the first
/// j arrivals (threshold t, budget k):
///   prod_{i<k} (t-i)/(j-i) * sum_{t+1 <= p_1 < ... < p_nu <= j} k^nu / prod (p_i - k)
/// by direct nested summation. Requires k <= t <= j <= n-1 and 0 <= nu <= k-1;
/// refuses nu > 3 with j > 200.
[[nodiscard]] double not_full_probability(int n, int t, int j, int k, int nu);

/// Sum over nu = 0..k-1 of not_full_probability.
[[nodiscard]] double not_full_probability(int n, int t, int j, int k);

/// Probability lower bound that noisy observations preserve the top-k set,
/// with x = delta / (2 sigma^2):  (1 - e^-x)^(2 e^-x / (1 - e^-2x)).
[[nodiscard]] double stochastic_factor(double delta, double sigma);

/// Half the smallest pairwise distance between values.
[[nodiscard]] double min_gap(std::span<double const> values);

using Rational = boost::rational<std::int64_t>;

struct EnumerationReport {
    PolicyKind policy = PolicyKind::virtual_plus;
    int n = 0;
    int k = 0;
    int t = 0;
    std::int64_t permutations = 0;
    /// P(a-th largest item is selected), a = 1..n. The first k entries are
    /// the per-rank probabilities that define the competitive ratio.
    std::vector<Rational> rank_probability;
    /// P(fewer than k selections after the first j arrivals), j = 0..n.
    std::vector<Rational> not_full_after;
    Rational competitive_ratio;

    [[nodiscard]] std::span<Rational const> per_rank_probability() const {
        return std::span<Rational const>(rank_probability).first(static_cast<std::size_t>(k));
    }
    [[nodiscard]] double competitive_ratio_value() const { return boost::rational_cast<double>(competitive_ratio); }
};

/// Runs `policy` on every ordering of the values 1..n (n <= 8) and counts,
/// exactly, how often each rank is selected. naive and opt are rejected.
[[nodiscard]] EnumerationReport enumerate_exact(PolicyKind policy, int n, PolicyConfig const &config);

}  // namespace seclab::analysis
