#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "newsaudit/core/error.hpp"
#include "newsaudit/numeric/special.hpp"
#include "newsaudit/stats/lmm.hpp"

namespace newsaudit::stats {

// Fixed-effect design for an engine factor plus optional numeric covariates:
// intercept, one dummy per non-baseline engine (sorted), then covariates.
// Keeps the level map and covariate grand means needed to evaluate EMMs.
struct EngineDesign {
    FixedDesign design;
    std::vector<std::string> levels; // sorted, includes baseline
    std::string baseline;
    std::map<std::string, std::size_t> dummy_col;
    std::vector<std::string> covariate_names;
    std::vector<double> covariate_means;
};

inline EngineDesign
build_engine_design(const std::vector<std::string>& engine_per_row, const std::string& baseline,
                    const std::vector<std::pair<std::string, std::vector<double>>>& covariates = {}) {
    if (engine_per_row.empty()) throw ParameterError("design: no observations");
    std::set<std::string> level_set(engine_per_row.begin(), engine_per_row.end());
    if (!level_set.count(baseline))
        throw ParameterError("design: baseline engine '" + baseline + "' not present in data");

    EngineDesign ed;
    ed.levels.assign(level_set.begin(), level_set.end());
    ed.baseline = baseline;
    const std::size_t n = engine_per_row.size();
    std::size_t p = 1;
    ed.design.colnames.push_back("(intercept)");
    for (const auto& level : ed.levels) {
        if (level == baseline) continue;
        ed.dummy_col[level] = p++;
        ed.design.colnames.push_back("engine:" + level);
    }
    for (const auto& [name, values] : covariates) {
        if (values.size() != n) throw ParameterError("design: covariate '" + name + "' length");
        ed.covariate_names.push_back(name);
        ed.design.colnames.push_back(name);
        double mean = 0.0;
        for (double v : values) mean += v;
        ed.covariate_means.push_back(mean / static_cast<double>(n));
        ++p;
    }

    ed.design.x = numeric::Matrix(n, p);
    for (std::size_t i = 0; i < n; ++i) {
        ed.design.x(i, 0) = 1.0;
        if (auto it = ed.dummy_col.find(engine_per_row[i]); it != ed.dummy_col.end())
            ed.design.x(i, it->second) = 1.0;
        for (std::size_t c = 0; c < covariates.size(); ++c)
            ed.design.x(i, 1 + ed.dummy_col.size() + c) = covariates[c].second[i];
    }
    return ed;
}

struct EmmContrast {
    std::string engine;
    double emm = 0.0;
    double diff_vs_baseline = 0.0;
    double std_error = 0.0; // of the difference; 0 for the baseline itself
    double ci_low = 0.0;
    double ci_high = 0.0;
    double p_value = 1.0;
};

// Estimated marginal means at covariate grand means (or caller-supplied
// reference values), with Wald 95% intervals and normal-reference p-values
// for each engine-vs-baseline difference. The baseline row is the exact zero
// self-contrast with a degenerate interval.
inline std::vector<EmmContrast>
emm_contrasts(const MixedModelFit& fit, const EngineDesign& design,
              const std::vector<double>& covariate_values = {}) {
    const std::size_t p = fit.estimates.size();
    if (design.design.colnames != fit.coef_names)
        throw ParameterError("emm_contrasts: fit does not match design");
    std::vector<double> cov_at = covariate_values;
    if (cov_at.empty()) cov_at = design.covariate_means;
    if (cov_at.size() != design.covariate_means.size())
        throw ParameterError("emm_contrasts: covariate value count mismatch");

    auto reference_row = [&](const std::string& level) {
        std::vector<double> row(p, 0.0);
        row[0] = 1.0;
        if (auto it = design.dummy_col.find(level); it != design.dummy_col.end())
            row[it->second] = 1.0;
        for (std::size_t c = 0; c < cov_at.size(); ++c)
            row[1 + design.dummy_col.size() + c] = cov_at[c];
        return row;
    };

    const auto base_row = reference_row(design.baseline);
    std::vector<EmmContrast> contrasts;
    for (const auto& level : design.levels) {
        const auto row = reference_row(level);
        EmmContrast c;
        c.engine = level;
        for (std::size_t a = 0; a < p; ++a) c.emm += row[a] * fit.estimates[a];
        if (level == design.baseline) {
            contrasts.push_back(c); // exact zero with degenerate interval
            continue;
        }
        std::vector<double> d(p, 0.0);
        for (std::size_t a = 0; a < p; ++a) d[a] = row[a] - base_row[a];
        double diff = 0.0, var = 0.0;
        for (std::size_t a = 0; a < p; ++a) {
            diff += d[a] * fit.estimates[a];
            for (std::size_t b = 0; b < p; ++b) var += d[a] * fit.coef_cov(a, b) * d[b];
        }
        c.diff_vs_baseline = diff;
        c.std_error = std::sqrt(std::max(var, 0.0));
        c.ci_low = diff - numeric::z_975 * c.std_error;
        c.ci_high = diff + numeric::z_975 * c.std_error;
        c.p_value = c.std_error > 0.0 ? numeric::normal_two_sided_p(diff / c.std_error) : 1.0;
        contrasts.push_back(c);
    }
    return contrasts;
}

} // namespace newsaudit::stats
