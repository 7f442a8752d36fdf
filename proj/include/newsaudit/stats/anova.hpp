#pragma once

#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "newsaudit/core/error.hpp"
#include "newsaudit/numeric/special.hpp"

namespace newsaudit::stats {

// Observations paired with their group labels; the shared input shape for
// ANOVA and Tukey HSD.
struct GroupedSample {
    std::vector<double> values;
    std::vector<std::string> groups;
};

struct AnovaResult {
    double f_stat = 0.0;
    int df_between = 0;
    int df_within = 0;
    double p_value = 1.0;
    std::map<std::string, double> group_means;
};

namespace detail {

struct GroupStats {
    std::map<std::string, std::pair<long, double>> sums; // group -> (n, sum)
    double grand_sum = 0.0;
    long n_total = 0;
};

inline GroupStats group_stats(const GroupedSample& sample) {
    if (sample.values.size() != sample.groups.size())
        throw ParameterError("anova: values and groups must have equal length");
    GroupStats gs;
    for (std::size_t i = 0; i < sample.values.size(); ++i) {
        auto& [n, sum] = gs.sums[sample.groups[i]];
        ++n;
        sum += sample.values[i];
        gs.grand_sum += sample.values[i];
        ++gs.n_total;
    }
    if (gs.sums.size() < 2) throw ParameterError("anova: need at least 2 groups");
    for (const auto& [g, ns] : gs.sums)
        if (ns.first < 2)
            throw ParameterError("anova: group '" + g + "' has fewer than 2 observations");
    return gs;
}

} // namespace detail

// Classic one-way between/within decomposition with the F p-value taken from
// the regularized incomplete beta.
inline AnovaResult anova_oneway(const GroupedSample& sample) {
    const auto gs = detail::group_stats(sample);
    const double grand_mean = gs.grand_sum / static_cast<double>(gs.n_total);

    std::map<std::string, double> means;
    double ss_between = 0.0;
    for (const auto& [g, ns] : gs.sums) {
        const double mean = ns.second / static_cast<double>(ns.first);
        means[g] = mean;
        ss_between += static_cast<double>(ns.first) * (mean - grand_mean) * (mean - grand_mean);
    }
    double ss_within = 0.0;
    for (std::size_t i = 0; i < sample.values.size(); ++i) {
        const double d = sample.values[i] - means[sample.groups[i]];
        ss_within += d * d;
    }

    AnovaResult res;
    res.df_between = static_cast<int>(gs.sums.size()) - 1;
    res.df_within = static_cast<int>(gs.n_total) - static_cast<int>(gs.sums.size());
    res.group_means = means;
    if (ss_within <= 0.0)
        throw ParameterError("anova: zero within-group variance, F undefined");
    const double ms_between = ss_between / res.df_between;
    const double ms_within = ss_within / res.df_within;
    res.f_stat = ms_between / ms_within;
    res.p_value = numeric::f_sf(res.f_stat, res.df_between, res.df_within);
    return res;
}

inline AnovaResult anova_oneway(const std::vector<double>& values,
                                const std::vector<std::string>& groups) {
    return anova_oneway(GroupedSample{values, groups});
}

} // namespace newsaudit::stats
