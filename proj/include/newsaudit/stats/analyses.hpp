#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "newsaudit/metrics/descriptive.hpp"
#include "newsaudit/metrics/exposure.hpp"
#include "newsaudit/metrics/gini.hpp"
#include "newsaudit/stats/anova.hpp"
#include "newsaudit/stats/emm.hpp"
#include "newsaudit/stats/lmm.hpp"
#include "newsaudit/stats/tukey.hpp"
#include "newsaudit/version.hpp"

namespace newsaudit::stats {

struct AnalysisConfig {
    std::string baseline_engine;
    metrics::PersonaScope persona_scope = metrics::PersonaScope::baseline_only;
    double tukey_alpha = 0.05;
    bool serp_length_sensitivity = true; // RQ1 robustness refits
    double rtd_alpha = 1.0 / 3.0;        // recorded in metadata; RTD itself lives in metrics
    std::map<std::string, std::string> dataset_snapshots;
};

// One research question's inferential block. A skipped RQ keeps its reason;
// nothing is silently absent.
struct RqStats {
    std::string name;
    bool skipped = false;
    std::string skip_reason;
    long n_observations = 0;
    std::optional<AnovaResult> anova;
    std::optional<TukeyResult> tukey;
    std::optional<MixedModelFit> lmm;
    std::vector<EmmContrast> contrasts;
    // named sensitivity refits (RQ1: SERP-length covariate, linear and log)
    std::vector<std::pair<std::string, std::vector<EmmContrast>>> sensitivity;
};

struct AnalysisBundle {
    RqStats rq1_diversity;
    RqStats rq2_attention;
    RqStats rq4_ideology;
    RqStats rq5_factuality;
    RqStats psl_reliability;
    std::map<std::string, std::string> metadata;
};

namespace detail {

struct Observations {
    std::vector<double> values;
    std::vector<std::string> engines;
    std::vector<std::string> topics;
    std::vector<double> normalized_ranks; // only for per-row extractions
};

// Per-(engine, topic) cells: unique-outlet counts or attention Gini.
inline Observations per_topic_cells(const metrics::ExposureTable& table,
                                    metrics::PersonaScope scope, bool gini_not_diversity,
                                    std::vector<double>* serp_lengths = nullptr) {
    Observations obs;
    for (const auto& engine : metrics::engines_in(table, scope)) {
        for (const auto& topic : metrics::topics_in(table, scope)) {
            std::map<std::string, long> counts;
            long rows_in_cell = 0;
            for (const auto& row : table.rows) {
                if (row.engine != engine || row.topic != topic || !in_scope(row, scope)) continue;
                ++counts[row.domain];
                ++rows_in_cell;
            }
            if (rows_in_cell == 0) continue;
            double value;
            if (gini_not_diversity) {
                std::vector<double> x;
                x.reserve(counts.size());
                for (const auto& [_, c] : counts) x.push_back(static_cast<double>(c));
                value = metrics::gini(std::move(x));
            } else {
                value = static_cast<double>(counts.size());
            }
            obs.values.push_back(value);
            obs.engines.push_back(engine);
            obs.topics.push_back(topic);
            if (serp_lengths) serp_lengths->push_back(static_cast<double>(rows_in_cell));
        }
    }
    return obs;
}

// Per-row score extraction (ideology, factuality, PSL reliability).
template <class Getter>
inline Observations per_row_scores(const metrics::ExposureTable& table,
                                   metrics::PersonaScope scope, Getter getter) {
    Observations obs;
    for (const auto& row : table.rows) {
        if (!in_scope(row, scope)) continue;
        const auto score = getter(row);
        if (!score) continue;
        obs.values.push_back(static_cast<double>(*score));
        obs.engines.push_back(row.engine);
        obs.topics.push_back(row.topic);
        obs.normalized_ranks.push_back(row.normalized_rank);
    }
    return obs;
}

inline RqStats run_rq(const std::string& name, const Observations& obs,
                      const AnalysisConfig& config, bool use_rank_covariate,
                      const std::vector<double>* serp_lengths = nullptr) {
    RqStats rq;
    rq.name = name;
    rq.n_observations = static_cast<long>(obs.values.size());
    try {
        if (obs.values.empty()) throw ParameterError("no observations with the required score");
        const GroupedSample sample{obs.values, obs.engines};
        rq.anova = anova_oneway(sample);
        rq.tukey = tukey_hsd(sample, config.tukey_alpha);

        std::vector<std::pair<std::string, std::vector<double>>> covariates;
        if (use_rank_covariate) covariates.emplace_back("normalized_rank", obs.normalized_ranks);
        const auto design = build_engine_design(obs.engines, config.baseline_engine, covariates);
        rq.lmm = fit_lmm_reml(obs.values, design.design, obs.topics);
        rq.contrasts = emm_contrasts(*rq.lmm, design);

        if (serp_lengths && config.serp_length_sensitivity) {
            // robustness refits; a degenerate covariate (for instance a
            // constant SERP length, collinear with the intercept) drops the
            // refit without touching the main result
            auto with_covariate = [&](const std::string& label, std::vector<double> values) {
                try {
                    const auto sens_design = build_engine_design(
                        obs.engines, config.baseline_engine, {{label, std::move(values)}});
                    const auto sens_fit = fit_lmm_reml(obs.values, sens_design.design, obs.topics);
                    rq.sensitivity.emplace_back(label, emm_contrasts(sens_fit, sens_design));
                } catch (const std::exception&) {
                }
            };
            with_covariate("serp_results", *serp_lengths);
            std::vector<double> logged(serp_lengths->size());
            for (std::size_t i = 0; i < logged.size(); ++i) logged[i] = std::log((*serp_lengths)[i]);
            with_covariate("log_serp_results", std::move(logged));
        }
    } catch (const ParameterError& e) {
        rq = RqStats{};
        rq.name = name;
        rq.n_observations = static_cast<long>(obs.values.size());
        rq.skipped = true;
        rq.skip_reason = e.what();
    } catch (const NumericalError& e) {
        rq = RqStats{};
        rq.name = name;
        rq.n_observations = static_cast<long>(obs.values.size());
        rq.skipped = true;
        rq.skip_reason = std::string("numerical failure: ") + e.what();
    }
    return rq;
}

} // namespace detail

// The audit's inferential battery: diversity and attention inequality on
// per-topic cells; ideology, factuality, and PSL reliability on per-entry
// scores with a normalized-rank covariate. Topic is the random intercept
// throughout.
inline AnalysisBundle run_rq_analyses(const metrics::ExposureTable& table,
                                      const AnalysisConfig& config) {
    if (config.baseline_engine.empty())
        throw ParameterError("run_rq_analyses: baseline engine not set");
    AnalysisBundle bundle;
    const auto scope = config.persona_scope;
    const auto engines = metrics::engines_in(table, scope);
    if (std::find(engines.begin(), engines.end(), config.baseline_engine) == engines.end())
        throw ParameterError("run_rq_analyses: baseline engine '" + config.baseline_engine +
                             "' has no rows in scope");

    std::vector<double> serp_lengths;
    const auto diversity = detail::per_topic_cells(table, scope, false, &serp_lengths);
    bundle.rq1_diversity = detail::run_rq("rq1_diversity", diversity, config, false, &serp_lengths);

    const auto attention = detail::per_topic_cells(table, scope, true);
    bundle.rq2_attention = detail::run_rq("rq2_attention", attention, config, false);

    bundle.rq4_ideology = detail::run_rq(
        "rq4_ideology",
        detail::per_row_scores(table, scope, [](const metrics::ExposureRow& r) { return r.mbfc_bias; }),
        config, true);
    bundle.rq5_factuality = detail::run_rq(
        "rq5_factuality",
        detail::per_row_scores(table, scope,
                               [](const metrics::ExposureRow& r) { return r.mbfc_factuality; }),
        config, true);
    bundle.psl_reliability = detail::run_rq(
        "psl_reliability",
        detail::per_row_scores(table, scope, [](const metrics::ExposureRow& r) { return r.psl_score; }),
        config, true);

    bundle.metadata["software_version"] = NEWSAUDIT_VERSION;
    bundle.metadata["baseline_engine"] = config.baseline_engine;
    bundle.metadata["interval_method"] = "wald_normal_95";
    bundle.metadata["covariate_centering"] = "grand_mean";
    bundle.metadata["rtd_alpha"] = std::to_string(config.rtd_alpha);
    bundle.metadata["persona_scope"] =
        scope == metrics::PersonaScope::baseline_only
            ? "baseline_only"
            : (scope == metrics::PersonaScope::grid_only ? "grid_only" : "all");
    for (const auto& [k, v] : config.dataset_snapshots) bundle.metadata["snapshot_" + k] = v;
    return bundle;
}

// --- serialization ---------------------------------------------------------

inline nlohmann::ordered_json anova_to_json(const AnovaResult& a) {
    nlohmann::ordered_json j;
    j["f_stat"] = a.f_stat;
    j["df_between"] = a.df_between;
    j["df_within"] = a.df_within;
    j["p_value"] = a.p_value;
    nlohmann::ordered_json means = nlohmann::ordered_json::object();
    for (const auto& [g, m] : a.group_means) means[g] = m;
    j["group_means"] = std::move(means);
    return j;
}

inline nlohmann::ordered_json tukey_to_json(const TukeyResult& t) {
    nlohmann::ordered_json j;
    j["q_critical"] = t.q_critical;
    j["df_within"] = t.df_within;
    nlohmann::ordered_json pairs = nlohmann::ordered_json::array();
    for (const auto& p : t.pairs) {
        nlohmann::ordered_json jp;
        jp["group_a"] = p.group_a;
        jp["group_b"] = p.group_b;
        jp["mean_diff"] = p.mean_diff;
        jp["q_stat"] = p.q_stat;
        jp["p_adjusted"] = p.p_adjusted;
        jp["ci_low"] = p.ci_low;
        jp["ci_high"] = p.ci_high;
        pairs.push_back(std::move(jp));
    }
    j["pairs"] = std::move(pairs);
    return j;
}

inline nlohmann::ordered_json lmm_to_json(const MixedModelFit& m) {
    nlohmann::ordered_json j;
    nlohmann::ordered_json coefs = nlohmann::ordered_json::object();
    for (std::size_t i = 0; i < m.coef_names.size(); ++i) {
        nlohmann::ordered_json c;
        c["estimate"] = m.estimates[i];
        c["std_error"] = m.std_errors[i];
        coefs[m.coef_names[i]] = std::move(c);
    }
    j["fixed_effects"] = std::move(coefs);
    j["sigma_u2"] = m.sigma_u2;
    j["sigma_e2"] = m.sigma_e2;
    j["reml_loglik"] = m.reml_loglik;
    j["converged"] = m.converged;
    j["diagnostics"] = m.diagnostics;
    j["n_obs"] = m.n_obs;
    j["n_groups"] = m.n_groups;
    return j;
}

inline nlohmann::ordered_json contrasts_to_json(const std::vector<EmmContrast>& contrasts) {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const auto& c : contrasts) {
        nlohmann::ordered_json j;
        j["engine"] = c.engine;
        j["emm"] = c.emm;
        j["diff_vs_baseline"] = c.diff_vs_baseline;
        j["std_error"] = c.std_error;
        j["ci_low"] = c.ci_low;
        j["ci_high"] = c.ci_high;
        j["p_value"] = c.p_value;
        arr.push_back(std::move(j));
    }
    return arr;
}

inline nlohmann::ordered_json rq_to_json(const RqStats& rq) {
    nlohmann::ordered_json j;
    j["name"] = rq.name;
    j["skipped"] = rq.skipped;
    if (rq.skipped) j["skip_reason"] = rq.skip_reason;
    j["n_observations"] = rq.n_observations;
    if (rq.anova) j["anova"] = anova_to_json(*rq.anova);
    if (rq.tukey) j["tukey"] = tukey_to_json(*rq.tukey);
    if (rq.lmm) j["lmm"] = lmm_to_json(*rq.lmm);
    if (!rq.contrasts.empty()) j["contrasts"] = contrasts_to_json(rq.contrasts);
    if (!rq.sensitivity.empty()) {
        nlohmann::ordered_json sens = nlohmann::ordered_json::object();
        for (const auto& [label, contrasts] : rq.sensitivity)
            sens[label] = contrasts_to_json(contrasts);
        j["sensitivity"] = std::move(sens);
    }
    return j;
}

inline nlohmann::ordered_json bundle_to_json(const AnalysisBundle& b) {
    nlohmann::ordered_json j;
    j["metadata"] = nlohmann::ordered_json::object();
    for (const auto& [k, v] : b.metadata) j["metadata"][k] = v;
    j["rq1_diversity"] = rq_to_json(b.rq1_diversity);
    j["rq2_attention"] = rq_to_json(b.rq2_attention);
    j["rq4_ideology"] = rq_to_json(b.rq4_ideology);
    j["rq5_factuality"] = rq_to_json(b.rq5_factuality);
    j["psl_reliability"] = rq_to_json(b.psl_reliability);
    return j;
}

} // namespace newsaudit::stats
