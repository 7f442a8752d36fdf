#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "newsaudit/core/error.hpp"
#include "newsaudit/numeric/integrate.hpp"
#include "newsaudit/numeric/special.hpp"
#include "newsaudit/stats/anova.hpp"

namespace newsaudit::stats {

namespace detail {

// CDF of the range of k standard normals:
//   P(W <= w) = k * integral phi(z) [Phi(z) - Phi(z - w)]^(k-1) dz.
// The integrand is entire and vanishes beyond |z| ~ 9, so two fixed 64-point
// Gauss-Legendre panels carry more than enough accuracy and keep the outer
// adaptive pass cheap.
inline double normal_range_cdf(double w, int k) {
    if (w <= 0.0) return 0.0;
    auto integrand = [w, k](double z) {
        const double span = numeric::normal_cdf(z) - numeric::normal_cdf(z - w);
        if (span <= 0.0) return 0.0;
        return numeric::normal_pdf(z) * std::pow(span, k - 1);
    };
    return k * (numeric::integrate_gl64(integrand, -9.0, 0.0) +
                numeric::integrate_gl64(integrand, 0.0, 9.0));
}

} // namespace detail

// CDF of the studentized range statistic: the normal-range CDF mixed over the
// distribution of s = sqrt(chi2_df / df). Adaptive quadrature throughout;
// absolute error comfortably below 1e-7 in the resulting probability, and a
// NumericalError (never a fallback value) if either integral fails to
// converge.
inline double studentized_range_cdf(double q, int k, double df) {
    if (k < 2) throw ParameterError("studentized_range_cdf: k must be >= 2");
    if (df < 1.0) throw ParameterError("studentized_range_cdf: df must be >= 1");
    if (q <= 0.0) return 0.0;

    // density of s: 2 (df/2)^(df/2) / Gamma(df/2) * s^(df-1) exp(-df s^2 / 2)
    const double half_df = df / 2.0;
    const double log_norm = half_df * std::log(half_df) - std::lgamma(half_df) + std::log(2.0);
    auto s_density = [&](double s) {
        if (s <= 0.0) return 0.0;
        return std::exp(log_norm + (df - 1.0) * std::log(s) - half_df * s * s);
    };
    auto integrand = [&](double s) {
        const double d = s_density(s);
        if (d <= 0.0) return 0.0;
        return d * detail::normal_range_cdf(q * s, k);
    };

    // s concentrates around 1 with spread ~ 1/sqrt(2 df)
    const double spread = 14.0 / std::sqrt(2.0 * df);
    const double lo = std::max(0.0, 1.0 - spread);
    const double hi = 1.0 + spread;
    const double p = numeric::integrate(integrand, lo, hi, 1e-9);
    return std::min(1.0, std::max(0.0, p));
}

// Quantile by bisection on the monotone CDF.
inline double studentized_range_quantile(double p, int k, double df) {
    if (!(p > 0.0 && p < 1.0)) throw ParameterError("studentized_range_quantile: p in (0,1)");
    double lo = 0.0, hi = 16.0;
    while (studentized_range_cdf(hi, k, df) < p) {
        hi *= 2.0;
        if (hi > 1e4) throw NumericalError("studentized_range_quantile: bracket failed");
    }
    for (int it = 0; it < 200 && hi - lo > 1e-10 * std::max(1.0, hi); ++it) {
        const double mid = 0.5 * (lo + hi);
        if (studentized_range_cdf(mid, k, df) < p) lo = mid;
        else hi = mid;
    }
    return 0.5 * (lo + hi);
}

struct TukeyPair {
    std::string group_a;
    std::string group_b;
    double mean_diff = 0.0; // mean(a) - mean(b)
    double q_stat = 0.0;
    double p_adjusted = 1.0;
    double ci_low = 0.0;
    double ci_high = 0.0;
};

struct TukeyResult {
    std::vector<TukeyPair> pairs;
    double q_critical = 0.0; // at the requested alpha
    double ms_within = 0.0;
    int df_within = 0;
};

// All pairwise Tukey HSD contrasts (Tukey-Kramer standard errors for
// unbalanced groups).
inline TukeyResult tukey_hsd(const GroupedSample& sample, double alpha = 0.05) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw ParameterError("tukey_hsd: alpha in (0,1)");
    const auto gs = detail::group_stats(sample);

    std::map<std::string, double> means;
    for (const auto& [g, ns] : gs.sums) means[g] = ns.second / static_cast<double>(ns.first);
    double ss_within = 0.0;
    for (std::size_t i = 0; i < sample.values.size(); ++i) {
        const double d = sample.values[i] - means[sample.groups[i]];
        ss_within += d * d;
    }
    const int k = static_cast<int>(gs.sums.size());
    const int df_within = static_cast<int>(gs.n_total) - k;
    if (ss_within <= 0.0) throw ParameterError("tukey_hsd: zero within-group variance");
    const double ms_within = ss_within / df_within;

    TukeyResult result;
    result.ms_within = ms_within;
    result.df_within = df_within;
    result.q_critical = studentized_range_quantile(1.0 - alpha, k, df_within);

    std::vector<std::string> names;
    for (const auto& [g, _] : gs.sums) names.push_back(g);
    for (std::size_t i = 0; i < names.size(); ++i) {
        for (std::size_t j = i + 1; j < names.size(); ++j) {
            const auto& [na, sum_a] = gs.sums.at(names[i]);
            const auto& [nb, sum_b] = gs.sums.at(names[j]);
            TukeyPair pair;
            pair.group_a = names[i];
            pair.group_b = names[j];
            pair.mean_diff = sum_a / na - sum_b / nb;
            const double se = std::sqrt(ms_within / 2.0 * (1.0 / na + 1.0 / nb));
            pair.q_stat = std::fabs(pair.mean_diff) / se;
            pair.p_adjusted = 1.0 - studentized_range_cdf(pair.q_stat, k, df_within);
            pair.ci_low = pair.mean_diff - result.q_critical * se;
            pair.ci_high = pair.mean_diff + result.q_critical * se;
            result.pairs.push_back(std::move(pair));
        }
    }
    return result;
}

} // namespace newsaudit::stats
