#pragma once

#include <algorithm>
#include <filesystem>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include "newsaudit/attribution/serp.hpp"
#include "newsaudit/collection/agents.hpp"
#include "newsaudit/collection/runner.hpp"
#include "newsaudit/collection/schedule.hpp"
#include "newsaudit/config.hpp"
#include "newsaudit/enrichment/profiles.hpp"
#include "newsaudit/metrics/descriptive.hpp"
#include "newsaudit/metrics/gini.hpp"
#include "newsaudit/report/paths.hpp"
#include "newsaudit/stats/analyses.hpp"

namespace newsaudit::pipeline {

namespace fs = std::filesystem;

// --- collect ----------------------------------------------------------------

inline std::vector<std::string> fixture_days(const std::string& fixture_path) {
    std::set<std::string> days;
    jsonl::for_each(fixture_path,
                    [&](jsonl::json& obj, long) { days.insert(obj.at("day").get<std::string>()); });
    return {days.begin(), days.end()};
}

inline collection::AgentRegistry build_registry(const Config& cfg,
                                                std::shared_ptr<jsonl::Writer> recorder = nullptr) {
    collection::AgentRegistry registry;
    std::shared_ptr<collection::ReplayAgent> shared_replay;
    for (const auto& e : cfg.engines) {
        std::shared_ptr<collection::SearchAgent> agent;
        if (!cfg.replay_fixture.empty() || e.kind == "replay") {
            if (cfg.replay_fixture.empty())
                throw ConfigError("engine '" + e.id + "' is replay-kind but no replay fixture is set");
            if (!shared_replay)
                shared_replay = std::make_shared<collection::ReplayAgent>(cfg.replay_fixture);
            agent = shared_replay;
        } else {
            collection::HttpAgentConfig hc;
            hc.engine_id = e.id;
            hc.base_url = e.endpoint;
            hc.path = e.path;
            hc.model = e.model;
            hc.key_env = e.key_env;
            if (hc.base_url.empty())
                throw ConfigError("engine '" + e.id + "' has no endpoint configured");
            agent = std::make_shared<collection::HttpChatAgent>(hc);
        }
        if (recorder) agent = std::make_shared<collection::RecordingAgent>(agent, recorder);
        registry.add(e.id, agent);
    }
    return registry;
}

struct CollectSummary {
    long probes = 0;
    long answers = 0;
    long failures = 0;
    std::vector<std::string> days;
};

inline CollectSummary stage_collect(const Config& cfg, const Paths& paths) {
    fs::create_directories(paths.raw_dir());

    std::vector<std::string> days = cfg.days;
    if (days.empty()) {
        if (!cfg.replay_fixture.empty()) days = fixture_days(cfg.replay_fixture);
        else days = {collection::today_local_iso()};
    }

    std::shared_ptr<jsonl::Writer> recorder;
    if (!cfg.record_fixture.empty())
        recorder = std::make_shared<jsonl::Writer>(cfg.record_fixture, /*truncate=*/true);
    const auto registry = build_registry(cfg, recorder);

    std::vector<std::string> engine_ids;
    for (const auto& e : cfg.engines) engine_ids.push_back(e.id);
    const auto plan = collection::build_plan(cfg.topics, engine_ids, cfg.personas(), days);

    // fresh per-day stores for this run; appends are within-run only
    std::map<std::string, std::unique_ptr<jsonl::Writer>> day_writers;
    for (const auto& day : days)
        day_writers[day] =
            std::make_unique<jsonl::Writer>(paths.raw_answers(day).string(), /*truncate=*/true);

    const auto outcome = collection::run_collection(
        plan, registry, cfg.retry, [&](const collection::RawAnswer& answer) {
            day_writers.at(answer.probe.day)->write(collection::raw_answer_to_json(answer));
        });

    jsonl::Writer failure_log(paths.failures().string(), /*truncate=*/true);
    for (const auto& f : outcome.failures) {
        nlohmann::ordered_json j;
        j["engine"] = f.probe.engine_id;
        j["topic"] = f.probe.topic;
        j["persona"] = collection::to_json(f.probe.persona);
        j["day"] = f.probe.day;
        j["error"] = f.error;
        j["attempts"] = f.attempts;
        failure_log.write(j);
    }

    CollectSummary summary;
    summary.probes = static_cast<long>(plan.size());
    summary.answers = static_cast<long>(outcome.answers.size());
    summary.failures = static_cast<long>(outcome.failures.size());
    summary.days = days;

    nlohmann::ordered_json manifest;
    manifest["days"] = days;
    manifest["engines"] = engine_ids;
    manifest["topics"] = cfg.topics;
    manifest["persona_mode"] = cfg.persona_mode;
    manifest["probes"] = summary.probes;
    manifest["answers"] = summary.answers;
    manifest["failures"] = summary.failures;
    std::ofstream mf(paths.manifest());
    if (!mf) throw IoError("cannot write manifest");
    mf << manifest.dump(2) << '\n';
    return summary;
}

// --- attribute ---------------------------------------------------------------

struct AttributionSettings {
    attribution::NormalizationRules rules;
    std::set<std::string> shorteners = attribution::default_shortener_hosts();
    std::shared_ptr<attribution::RedirectResolver> resolver;
};

inline AttributionSettings attribution_settings(const Config& cfg) {
    AttributionSettings s;
    if (!cfg.public_suffix_file.empty())
        s.rules.psl = attribution::PublicSuffixList::from_file(cfg.public_suffix_file);
    if (!cfg.keep_subdomains_file.empty())
        s.rules.keep_subdomains = attribution::load_host_list(cfg.keep_subdomains_file);
    if (!cfg.shorteners_file.empty())
        s.shorteners = attribution::load_host_list(cfg.shorteners_file);
    if (!cfg.redirects_fixture.empty()) {
        std::map<std::string, std::string> hops;
        jsonl::for_each(cfg.redirects_fixture, [&](jsonl::json& obj, long) {
            hops[obj.at("from").get<std::string>()] = obj.at("to").get<std::string>();
        });
        s.resolver = std::make_shared<attribution::FixtureResolver>(std::move(hops));
    } else {
        s.resolver = std::make_shared<attribution::HttpRedirectResolver>();
    }
    return s;
}

inline void stage_attribute(const Config& cfg, const Paths& paths) {
    fs::create_directories(paths.serp_dir());
    auto settings = attribution_settings(cfg);

    std::vector<fs::path> answer_files;
    for (const auto& entry : fs::directory_iterator(paths.raw_dir()))
        if (entry.is_regular_file() && entry.path().filename().string().rfind("answers_", 0) == 0)
            answer_files.push_back(entry.path());
    std::sort(answer_files.begin(), answer_files.end());
    if (answer_files.empty()) throw IoError("no raw answer stores under " + paths.raw_dir().string());

    jsonl::Writer out(paths.serp_store().string(), /*truncate=*/true);
    long records = 0, misses = 0, truncated = 0, dropped = 0;
    for (const auto& file : answer_files) {
        jsonl::for_each(file.string(), [&](jsonl::json& obj, long) {
            const auto answer = collection::raw_answer_from_json(obj);
            const auto record =
                attribution::attribute(answer, *settings.resolver, settings.rules, settings.shorteners);
            out.write(attribution::serp_to_json(record));
            ++records;
            misses += record.attribution_miss;
            truncated += record.truncated;
            dropped += record.dropped;
        });
    }

    nlohmann::ordered_json summary;
    summary["records"] = records;
    summary["attribution_misses"] = misses;
    summary["truncated_records"] = truncated;
    summary["dropped_entries"] = dropped;
    std::ofstream sf(paths.serp_summary());
    sf << summary.dump(2) << '\n';
}

// --- enrich -------------------------------------------------------------------

inline std::vector<attribution::SerpRecord> read_serp_store(const std::string& path) {
    std::vector<attribution::SerpRecord> records;
    jsonl::for_each(path, [&](jsonl::json& obj, long) {
        records.push_back(attribution::serp_from_json(obj));
    });
    return records;
}

inline void stage_enrich(const Config& cfg, const Paths& paths) {
    fs::create_directories(paths.enrich_dir());
    const auto records = read_serp_store(paths.serp_store().string());

    std::set<std::string> domains;
    for (const auto& r : records)
        for (const auto& e : r.entries) domains.insert(e.domain);

    const auto settings = attribution_settings(cfg);
    enrichment::MbfcDataset mbfc;
    enrichment::PslDataset psl;
    std::map<std::string, std::string> overrides;
    if (!cfg.mbfc_csv.empty()) mbfc = enrichment::load_mbfc(cfg.mbfc_csv, settings.rules);
    if (!cfg.psl_csv.empty()) psl = enrichment::load_psl(cfg.psl_csv, settings.rules);
    if (!cfg.iab_overrides_csv.empty())
        overrides = enrichment::load_iab_overrides(cfg.iab_overrides_csv, settings.rules);
    enrichment::IabCache cache(cfg.iab_cache);

    enrichment::EnrichmentSources sources;
    sources.mbfc = &mbfc;
    sources.psl = &psl;
    sources.iab_provider = nullptr; // offline: cache + overrides only
    sources.iab_overrides = &overrides;
    sources.iab_cache = &cache;
    const auto result = enrichment::build_profiles(domains, sources);

    jsonl::Writer out(paths.profiles().string(), /*truncate=*/true);
    std::map<std::string, enrichment::OutletProfile> by_domain;
    for (const auto& p : result.profiles) {
        out.write(enrichment::profile_to_json(p));
        by_domain[p.domain] = p;
    }

    nlohmann::ordered_json cov = enrichment::coverage_to_json(result.coverage);
    cov["domains"] = static_cast<long>(domains.size());
    nlohmann::ordered_json snapshots = nlohmann::ordered_json::object();
    if (!mbfc.snapshot.empty()) snapshots["mbfc"] = mbfc.snapshot;
    if (!psl.snapshot.empty()) snapshots["psl"] = psl.snapshot;
    cov["snapshots"] = snapshots;
    std::ofstream cf(paths.coverage());
    cf << cov.dump(2) << '\n';

    const auto table = metrics::build_exposure(records, by_domain);
    metrics::write_exposure_csv(table, paths.exposure().string());
}

// --- metrics -------------------------------------------------------------------

inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

inline void stage_metrics(const Config& cfg, const Paths& paths) {
    fs::create_directories(paths.metrics_dir());
    const auto table = metrics::read_exposure_csv(paths.exposure().string());
    const auto scope = cfg.persona_scope;
    const auto engines = metrics::engines_in(table, scope);
    const auto topics = metrics::topics_in(table, scope);

    // table1: per-engine SERP result and unique-domain counts
    {
        std::vector<std::vector<std::string>> rows;
        for (const auto& engine : engines)
            rows.push_back({engine, std::to_string(metrics::serp_result_count(table, engine, scope)),
                            std::to_string(metrics::unique_outlets_global(table, engine, scope))});
        csv::write_file(paths.table1().string(), {"engine", "serp_results", "unique_domains"}, rows);
    }

    // per-topic diversity and attention inequality
    {
        std::vector<std::vector<std::string>> rows;
        for (const auto& engine : engines) {
            for (const auto& topic : topics) {
                const auto counts = metrics::attention(table, engine, topic, scope);
                if (counts.counts.empty()) continue;
                std::vector<double> x;
                for (const auto& [_, c] : counts.counts) x.push_back(static_cast<double>(c));
                rows.push_back({engine, topic, std::to_string(x.size()),
                                format_double(metrics::gini(std::move(x)))});
            }
        }
        csv::write_file(paths.diversity_gini().string(),
                        {"engine", "topic", "unique_outlets", "gini"}, rows);
    }

    // category composition
    {
        std::vector<std::vector<std::string>> rows;
        for (const auto& engine : engines) {
            try {
                const auto comp = metrics::category_composition(table, engine, scope);
                for (const auto& [cat, share] : comp.shares)
                    rows.push_back({engine, cat, format_double(share)});
            } catch (const ParameterError&) {
                // engine without categorized rows: reported via coverage instead
            }
        }
        csv::write_file(paths.composition().string(), {"engine", "category", "share"}, rows);
    }

    // global attention: whole-run gini, lorenz points, RTD vs baseline
    {
        std::vector<std::vector<std::string>> gini_rows;
        std::vector<std::vector<std::string>> lorenz_rows;
        std::vector<std::vector<std::string>> rtd_rows;
        nlohmann::ordered_json ps_json;
        ps_json["alpha"] = cfg.rtd_alpha;
        ps_json["top_k"] = cfg.rtd_top_k;
        ps_json["baseline"] = cfg.baseline_engine;
        nlohmann::ordered_json ps_engines = nlohmann::ordered_json::object();

        const auto baseline_attention = metrics::attention(table, cfg.baseline_engine, "", scope);
        for (const auto& engine : engines) {
            const auto counts = metrics::attention(table, engine, "", scope);
            if (counts.counts.empty()) continue;
            std::vector<double> x;
            for (const auto& [_, c] : counts.counts) x.push_back(static_cast<double>(c));
            gini_rows.push_back({engine, format_double(metrics::gini(x))});
            for (const auto& [pop, att] : metrics::lorenz(std::move(x)))
                lorenz_rows.push_back({engine, format_double(pop), format_double(att)});

            if (engine == cfg.baseline_engine || baseline_attention.counts.empty()) continue;
            const auto ps =
                metrics::promoted_silenced(counts, baseline_attention, cfg.rtd_alpha, cfg.rtd_top_k);
            for (const auto& c : ps.rtd.per_domain)
                rtd_rows.push_back({engine, c.domain, format_double(c.signed_contribution),
                                    metrics::rtd_band_name(c.band)});
            nlohmann::ordered_json je;
            auto dump_list = [](const std::vector<metrics::RtdContribution>& list) {
                nlohmann::ordered_json arr = nlohmann::ordered_json::array();
                for (const auto& c : list) {
                    nlohmann::ordered_json j;
                    j["domain"] = c.domain;
                    j["contribution"] = c.signed_contribution;
                    j["band"] = metrics::rtd_band_name(c.band);
                    arr.push_back(std::move(j));
                }
                return arr;
            };
            je["promoted"] = dump_list(ps.promoted);
            je["silenced"] = dump_list(ps.silenced);
            je["total_divergence"] = ps.rtd.total_divergence;
            je["normalized_divergence"] = ps.rtd.normalized_divergence;
            ps_engines[engine] = std::move(je);
        }
        ps_json["engines"] = std::move(ps_engines);
        csv::write_file((paths.metrics_dir() / "gini_global.csv").string(), {"engine", "gini"},
                        gini_rows);
        csv::write_file(paths.lorenz().string(), {"engine", "population_share", "attention_share"},
                        lorenz_rows);
        csv::write_file(paths.rtd().string(), {"engine", "domain", "rtd_contribution", "band"},
                        rtd_rows);
        std::ofstream psf(paths.promoted_silenced());
        psf << ps_json.dump(2) << '\n';
    }
}

// --- analyze --------------------------------------------------------------------

inline void stage_analyze(const Config& cfg, const Paths& paths) {
    fs::create_directories(paths.analysis_dir());
    const auto table = metrics::read_exposure_csv(paths.exposure().string());

    stats::AnalysisConfig ac;
    ac.baseline_engine = cfg.baseline_engine;
    ac.persona_scope = cfg.persona_scope;
    ac.rtd_alpha = cfg.rtd_alpha;
    ac.serp_length_sensitivity = cfg.serp_length_sensitivity;
    if (fs::exists(paths.coverage())) {
        std::ifstream cf(paths.coverage());
        const auto cov = nlohmann::ordered_json::parse(cf);
        if (cov.contains("snapshots"))
            for (const auto& [k, v] : cov["snapshots"].items())
                ac.dataset_snapshots[k] = v.get<std::string>();
    }

    const auto bundle = stats::run_rq_analyses(table, ac);
    std::ofstream bf(paths.bundle());
    if (!bf) throw IoError("cannot write analysis bundle");
    bf << stats::bundle_to_json(bundle).dump(2) << '\n';
}

} // namespace newsaudit::pipeline
