#include "seclab/analysis.hpp"

#include <algorithm>
#include <array>
#include <map>
#include <mutex>
#include <string>

namespace seclab::analysis {

namespace {

void require_k(int k, int max_k) {
    if (k < 2 || k > max_k) {
        throw precondition_error("k must lie in [2, " + std::to_string(max_k) + "], got " + std::to_string(k));
    }
}

// Normalised |sum of signed terms| / max |term|.
double relative_residual(std::span<SignedLog const> terms) {
    double max_log = -INFINITY;
    for (auto const &term : terms) {
        if (term.sign != 0) {
            max_log = std::max(max_log, term.log_magnitude);
        }
    }
    if (max_log == -INFINITY) {
        return 0.0;
    }
    CompensatedSum sum;
    for (auto const &term : terms) {
        if (term.sign != 0) {
            sum.add(term.sign * std::exp(term.log_magnitude - max_log));
        }
    }
    return std::abs(sum.value());
}

SignedLog scaled(SignedLog x, double factor) {
    if (x.sign == 0 || factor == 0.0) {
        return {};
    }
    int sign = factor < 0 ? -x.sign : x.sign;
    return {sign, x.log_magnitude + std::log(std::abs(factor))};
}

}  // namespace

CoefficientSet coefficients(int k) {
    require_k(k, 1000);
    CoefficientSet out;
    out.k = k;
    out.log_terms.reserve(static_cast<std::size_t>(k));
    out.a.reserve(static_cast<std::size_t>(k));
    const double log_k = std::log(static_cast<double>(k));
    const double log_km1 = std::log(static_cast<double>(k - 1));
    for (int m = 0; m < k; ++m) {
        // k^k / (k-1)^(k-m) > k^m for m < k, so the bracket is positive.
        double log_first = k * log_k - (k - m) * log_km1;
        double log_second = m * log_k;
        double log_bracket = log_first + std::log1p(-std::exp(log_second - log_first));
        SignedLog term{(m % 2 == 0) ? -1 : 1, log_bracket - std::lgamma(m + 1.0)};
        out.log_terms.push_back(term);
        out.a.push_back(term.value());
    }
    return out;
}

std::vector<double> recurrence_residuals(CoefficientSet const &coeffs) {
    const int k = coeffs.k;
    auto const &a = coeffs.log_terms;
    const double kk = static_cast<double>(k) * (k - 1);
    std::vector<double> residuals;
    for (int m = 0; m + 2 <= k - 1; ++m) {
        std::array<SignedLog, 3> terms{scaled(a[m], kk), scaled(a[m + 1], (2.0 * k - 1) * (m + 1)),
                                       scaled(a[m + 2], (m + 1.0) * (m + 2))};
        residuals.push_back(relative_residual(terms));
    }
    std::array<SignedLog, 2> tail{scaled(a[k - 2], kk), scaled(a[k - 1], (2.0 * k - 1) * (k - 1))};
    residuals.push_back(relative_residual(tail));
    return residuals;
}

double bound_f(int k, double alpha) {
    if (k < 2) {
        throw precondition_error("bound_f requires k >= 2");
    }
    if (!(alpha > 0.0 && alpha < 1.0)) {
        throw precondition_error("alpha must lie in (0, 1)");
    }
    // With u = -ln(alpha):
    //   f = alpha^k [E(k u) - c E((k-1) u)] + alpha (c - 1),   c = (k/(k-1))^k
    // where E is the exponential series truncated after k terms.
    const double log_alpha = std::log(alpha);
    const double u = -log_alpha;
    const double log_c = -k * std::log1p(-1.0 / k);
    const double log_x1 = std::log(k * u);
    const double log_x2 = std::log((k - 1) * u);

    CompensatedSum sum;
    for (int m = 0; m < k; ++m) {
        double base = k * log_alpha - std::lgamma(m + 1.0);
        sum.add(std::exp(base + m * log_x1));
        sum.add(-std::exp(log_c + base + m * log_x2));
    }
    sum.add(alpha * std::expm1(log_c));
    return sum.value();
}

BoundResult optimal_threshold(int k, bool record_evaluations) {
    require_k(k, 1000);
    BoundResult result;
    result.k = k;
    auto f = [&](double alpha) {
        double value = bound_f(k, alpha);
        if (record_evaluations) {
            result.evaluations.emplace_back(alpha, value);
        }
        return value;
    };
    constexpr double edge = 1e-9;
    auto [alpha, value] = golden_section_maximize(f, edge, 1.0 - edge, 1e-10);
    result.alpha_star = alpha;
    result.c_k = value;
    return result;
}

double optimal_alpha(int k) {
    static std::mutex mutex;
    static std::map<int, double> cache;
    {
        std::lock_guard lock(mutex);
        if (auto it = cache.find(k); it != cache.end()) {
            return it->second;
        }
    }
    double alpha = optimal_threshold(k).alpha_star;
    std::lock_guard lock(mutex);
    cache.emplace(k, alpha);
    return alpha;
}

namespace {

double finite_ratio_k2_impl(int n, int t, int inner_offset) {
    if (t < 2 || t > n - 2) {
        throw precondition_error("finite_ratio_k2 requires 2 <= t <= n-2, got n=" + std::to_string(n) +
                                 ", t=" + std::to_string(t));
    }
    CompensatedSum outer;
    CompensatedSum inner;  // sum_{p=t+1}^{j} 1/(p - offset), grown with j
    for (int j = t; j <= n - 1; ++j) {
        if (j > t) {
            inner.add(1.0 / (j - inner_offset));
        }
        outer.add((1.0 + 2.0 * inner.value()) / (static_cast<double>(j) * (j - 1)));
    }
    return static_cast<double>(t) * (t - 1) / n * outer.value();
}

double nested_sum(int depth, int start, int j, int k) {
    if (depth == 0) {
        return 1.0;
    }
    double total = 0.0;
    for (int p = start; p <= j - depth + 1; ++p) {
        total += static_cast<double>(k) / (p - k) * nested_sum(depth - 1, p + 1, j, k);
    }
    return total;
}

}  // namespace

double finite_ratio_k2(int n, int t) { return finite_ratio_k2_impl(n, t, 2); }

double finite_ratio_k2_as_printed(int n, int t) { return finite_ratio_k2_impl(n, t, 1); }

double not_full_probability(int n, int t, int j, int k, int nu) {
    if (k < 1 || t < k || j < t || j > n - 1) {
        throw precondition_error("not_full_probability requires k <= t <= j <= n-1");
    }
    if (nu < 0 || nu > k - 1) {
        throw precondition_error("nu must lie in [0, k-1]");
    }
    if (nu > 3 && j > 200) {
        throw precondition_error("instance too large for direct nested summation (nu > 3, j > 200)");
    }
    double prefactor = 1.0;
    for (int i = 0; i < k; ++i) {
        prefactor *= static_cast<double>(t - i) / (j - i);
    }
    return prefactor * nested_sum(nu, t + 1, j, k);
}

double not_full_probability(int n, int t, int j, int k) {
    CompensatedSum sum;
    for (int nu = 0; nu < k; ++nu) {
        sum.add(not_full_probability(n, t, j, k, nu));
    }
    return sum.value();
}

double stochastic_factor(double delta, double sigma) {
    if (!(delta > 0.0) || !(sigma > 0.0) || !std::isfinite(delta) || !std::isfinite(sigma)) {
        throw precondition_error("stochastic_factor requires finite delta > 0 and sigma > 0");
    }
    const double x = delta / (2.0 * sigma * sigma);
    const double tail = std::exp(-x);
    const double exponent = 2.0 * tail / -std::expm1(-2.0 * x);
    return std::exp(exponent * std::log1p(-tail));
}

double min_gap(std::span<double const> values) {
    if (values.size() < 2) {
        throw precondition_error("min_gap needs at least two values");
    }
    std::vector<double> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());
    double best = INFINITY;
    for (std::size_t i = 1; i < sorted.size(); ++i) {
        best = std::min(best, sorted[i] - sorted[i - 1]);
    }
    return best / 2.0;
}

}  // namespace seclab::analysis
