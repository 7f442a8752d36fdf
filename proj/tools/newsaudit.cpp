// newsaudit: audit how web-connected LLM agents expose users to news media,
// against a baseline aggregator. Subcommands cover the pipeline stages
// individually plus an end-to-end `run`.

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <thread>

#include "newsaudit/config.hpp"
#include "newsaudit/report/report.hpp"
#include "newsaudit/version.hpp"

namespace na = newsaudit;

namespace {

int run_collect(const std::string& config_path, const std::string& replay,
                const std::string& record, bool once) {
    auto cfg = na::load_config(config_path);
    if (!replay.empty()) cfg.replay_fixture = std::filesystem::absolute(replay).string();
    if (!record.empty()) cfg.record_fixture = std::filesystem::absolute(record).string();

    const na::pipeline::Paths paths(cfg.output_dir);
    const bool single_shot = once || !cfg.replay_fixture.empty();
    if (!single_shot) {
        // thin daily loop; use --once (or external cron) for single runs
        while (true) {
            const std::time_t now = std::time(nullptr);
            const std::time_t next = na::collection::next_run_after(now, cfg.schedule_time);
            std::fprintf(stderr, "next collection at %s", std::ctime(&next));
            std::this_thread::sleep_for(std::chrono::seconds(next - now));
            const auto summary = na::pipeline::stage_collect(cfg, paths);
            std::fprintf(stderr, "collected %ld answers (%ld failures) of %ld probes\n",
                         summary.answers, summary.failures, summary.probes);
        }
    }
    const auto summary = na::pipeline::stage_collect(cfg, paths);
    std::printf("collect: %ld answers, %ld failures, %ld probes\n", summary.answers,
                summary.failures, summary.probes);
    return summary.failures == 0 ? 0 : 2;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"newsaudit - LLM news exposure audit toolkit"};
    app.set_version_flag("--version", std::string("newsaudit ") + NEWSAUDIT_VERSION);
    app.require_subcommand(1);

    // collect
    std::string collect_config, collect_replay, collect_record;
    bool collect_once = false;
    auto* collect = app.add_subcommand("collect", "query agents and persist raw answers");
    collect->add_option("--config", collect_config, "config file")->required();
    collect->add_option("--replay", collect_replay, "replay fixture instead of live agents");
    collect->add_option("--record", collect_record, "record live answers into a fixture");
    collect->add_flag("--once", collect_once, "run a single collection instead of the daily loop");

    // attribute
    std::string attr_in, attr_out, attr_shorteners, attr_psl, attr_keep, attr_redirects;
    auto* attribute = app.add_subcommand("attribute", "turn raw answers into attributed SERPs");
    attribute->add_option("--in", attr_in, "raw answer store (jsonl)")->required();
    attribute->add_option("--out", attr_out, "serp store to write (jsonl)")->required();
    attribute->add_option("--shorteners", attr_shorteners, "shortener host list file");
    attribute->add_option("--psl", attr_psl, "public suffix list file");
    attribute->add_option("--keep-subdomains", attr_keep, "keep-subdomain exception list file");
    attribute->add_option("--redirects", attr_redirects, "offline redirect fixture (jsonl)");

    // enrich
    std::string enr_serps, enr_mbfc, enr_psl, enr_cache, enr_overrides, enr_out, enr_exposure;
    auto* enrich = app.add_subcommand("enrich", "join outlet domains with MBFC/PSL/IAB data");
    enrich->add_option("--serps", enr_serps, "serp store (jsonl)")->required();
    enrich->add_option("--mbfc", enr_mbfc, "MBFC csv (domain,bias_label,factuality_label)")->required();
    enrich->add_option("--psl", enr_psl, "perennial sources csv (domain,psl_label)")->required();
    enrich->add_option("--iab-cache", enr_cache, "persistent IAB category cache (jsonl)");
    enrich->add_option("--overrides", enr_overrides, "manual IAB overrides csv");
    enrich->add_option("--out", enr_out, "outlet profiles to write (jsonl)")->required();
    enrich->add_option("--exposure-out", enr_exposure, "also write the joined exposure table (csv)");

    // metrics
    std::string met_exposure, met_outdir, met_baseline = "google_news";
    double met_alpha = 1.0 / 3.0;
    std::size_t met_topk = 10;
    auto* metrics_cmd = app.add_subcommand("metrics", "descriptive measures and RTD tables");
    metrics_cmd->add_option("--exposure", met_exposure, "exposure table (csv)")->required();
    metrics_cmd->add_option("--out-dir", met_outdir, "directory for metrics csv files")->required();
    metrics_cmd->add_option("--baseline", met_baseline, "baseline engine id");
    metrics_cmd->add_option("--alpha", met_alpha, "RTD alpha");
    metrics_cmd->add_option("--top-k", met_topk, "promoted/silenced list length");

    // analyze
    std::string ana_table, ana_out, ana_baseline = "google_news";
    auto* analyze = app.add_subcommand("analyze", "ANOVA / Tukey / LMM / EMM per research question");
    analyze->add_option("--table", ana_table, "exposure table (csv)")->required();
    analyze->add_option("--baseline", ana_baseline, "baseline engine id");
    analyze->add_option("--out", ana_out, "analysis bundle to write (json)")->required();

    // run
    std::string run_config, run_from = "collect", run_format, run_replay, run_outdir;
    auto* run = app.add_subcommand("run", "full pipeline: collect through report");
    run->add_option("--config", run_config, "config file")->required();
    run->add_option("--from-stage", run_from,
                    "resume from stage (collect|attribute|enrich|metrics|analyze|report)");
    run->add_option("--format", run_format, "restrict report output (markdown|json|csv-bundle)");
    run->add_option("--replay", run_replay, "replay fixture override");
    run->add_option("--out-dir", run_outdir, "output directory override");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*collect) return run_collect(collect_config, collect_replay, collect_record, collect_once);

        if (*attribute) {
            na::Config cfg;
            cfg.base_dir = std::filesystem::current_path();
            cfg.shorteners_file = attr_shorteners;
            cfg.public_suffix_file = attr_psl;
            cfg.keep_subdomains_file = attr_keep;
            cfg.redirects_fixture = attr_redirects;
            const auto settings = na::pipeline::attribution_settings(cfg);
            na::jsonl::Writer out(attr_out, true);
            long records = 0, misses = 0;
            na::jsonl::for_each(attr_in, [&](na::jsonl::json& obj, long) {
                const auto answer = na::collection::raw_answer_from_json(obj);
                const auto record = na::attribution::attribute(answer, *settings.resolver,
                                                               settings.rules, settings.shorteners);
                out.write(na::attribution::serp_to_json(record));
                ++records;
                misses += record.attribution_miss;
            });
            std::printf("attribute: %ld records (%ld attribution misses) -> %s\n", records, misses,
                        attr_out.c_str());
            return 0;
        }

        if (*enrich) {
            const auto records = na::pipeline::read_serp_store(enr_serps);
            std::set<std::string> domains;
            for (const auto& r : records)
                for (const auto& e : r.entries) domains.insert(e.domain);
            const na::attribution::NormalizationRules rules;
            auto mbfc = na::enrichment::load_mbfc(enr_mbfc, rules, [](const std::string& w) {
                std::fprintf(stderr, "warning: %s\n", w.c_str());
            });
            auto psl = na::enrichment::load_psl(enr_psl, rules, [](const std::string& w) {
                std::fprintf(stderr, "warning: %s\n", w.c_str());
            });
            std::map<std::string, std::string> overrides;
            if (!enr_overrides.empty()) overrides = na::enrichment::load_iab_overrides(enr_overrides, rules);
            na::enrichment::IabCache cache(enr_cache);
            na::enrichment::EnrichmentSources sources;
            sources.mbfc = &mbfc;
            sources.psl = &psl;
            sources.iab_overrides = &overrides;
            sources.iab_cache = &cache;
            const auto result = na::enrichment::build_profiles(domains, sources);
            na::jsonl::Writer out(enr_out, true);
            std::map<std::string, na::enrichment::OutletProfile> by_domain;
            for (const auto& p : result.profiles) {
                out.write(na::enrichment::profile_to_json(p));
                by_domain[p.domain] = p;
            }
            auto cov = na::enrichment::coverage_to_json(result.coverage);
            std::ofstream cf(enr_out + ".coverage.json");
            cf << cov.dump(2) << '\n';
            if (!enr_exposure.empty()) {
                const auto table = na::metrics::build_exposure(records, by_domain);
                na::metrics::write_exposure_csv(table, enr_exposure);
            }
            std::printf("enrich: %zu domains, mbfc %ld/%ld, psl %ld/%ld, iab %ld/%ld\n",
                        domains.size(), result.coverage.mbfc.matched, result.coverage.mbfc.missing,
                        result.coverage.psl.matched, result.coverage.psl.missing,
                        result.coverage.iab.matched, result.coverage.iab.missing);
            return 0;
        }

        if (*metrics_cmd) {
            na::Config cfg;
            cfg.baseline_engine = met_baseline;
            cfg.rtd_alpha = met_alpha;
            cfg.rtd_top_k = met_topk;
            cfg.output_dir = met_outdir;
            na::pipeline::Paths paths(met_outdir);
            // the metrics stage reads the exposure table from the canonical
            // location; for the standalone subcommand, point it at the input
            std::filesystem::create_directories(paths.enrich_dir());
            if (std::filesystem::absolute(met_exposure) !=
                std::filesystem::absolute(paths.exposure()))
                std::filesystem::copy_file(met_exposure, paths.exposure(),
                                           std::filesystem::copy_options::overwrite_existing);
            na::pipeline::stage_metrics(cfg, paths);
            std::printf("metrics: wrote tables under %s\n",
                        paths.metrics_dir().string().c_str());
            return 0;
        }

        if (*analyze) {
            const auto table = na::metrics::read_exposure_csv(ana_table);
            na::stats::AnalysisConfig ac;
            ac.baseline_engine = ana_baseline;
            const auto bundle = na::stats::run_rq_analyses(table, ac);
            std::ofstream out(ana_out);
            if (!out) throw na::IoError("cannot write " + ana_out);
            out << na::stats::bundle_to_json(bundle).dump(2) << '\n';
            std::printf("analyze: bundle -> %s\n", ana_out.c_str());
            return 0;
        }

        if (*run) {
            auto cfg = na::load_config(run_config);
            if (!run_replay.empty()) cfg.replay_fixture = std::filesystem::absolute(run_replay).string();
            if (!run_outdir.empty()) cfg.output_dir = std::filesystem::absolute(run_outdir).string();
            std::vector<na::pipeline::ReportFormat> formats;
            if (run_format.empty())
                formats = {na::pipeline::ReportFormat::json_format,
                           na::pipeline::ReportFormat::markdown,
                           na::pipeline::ReportFormat::csv_bundle};
            else
                formats = {na::pipeline::report_format_from_name(run_format)};
            na::pipeline::run_pipeline(cfg, na::pipeline::stage_from_name(run_from), formats);
            std::printf("run: report written under %s\n",
                        na::pipeline::Paths(cfg.output_dir).report_dir().string().c_str());
            return 0;
        }
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
