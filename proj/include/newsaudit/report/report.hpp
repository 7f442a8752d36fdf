#pragma once

#include <fstream>
#include <string>
#include <vector>

#include "newsaudit/collection/agents.hpp"
#include "newsaudit/report/paths.hpp"
#include "newsaudit/report/stages.hpp"

namespace newsaudit::pipeline {

using json = nlohmann::ordered_json;

// Conventional significance markers for the rendered tables.
inline std::string significance_marker(double p) {
    if (p < 0.001) return "***";
    if (p < 0.01) return "**";
    if (p < 0.05) return "*";
    return "";
}

namespace detail {

inline json read_json_file(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());
    return json::parse(in);
}

inline json csv_as_json(const fs::path& path) {
    const auto t = csv::read_file(path.string());
    json rows = json::array();
    for (const auto& r : t.rows) {
        json row = json::object();
        for (std::size_t i = 0; i < t.header.size(); ++i) row[t.header[i]] = r[i];
        rows.push_back(std::move(row));
    }
    return rows;
}

inline std::string format_p(double p) {
    char buf[32];
    if (p < 0.001) return "< 0.001";
    std::snprintf(buf, sizeof buf, "%.3f", p);
    return buf;
}

inline std::string rq_headline(const json& rq) {
    if (rq.value("skipped", false))
        return "skipped: " + rq.value("skip_reason", std::string("unknown reason"));
    if (!rq.contains("anova")) return "no inferential results";
    const auto& a = rq["anova"];
    char buf[160];
    const double p = a["p_value"].get<double>();
    std::snprintf(buf, sizeof buf, "one-way ANOVA F(%d, %d) = %.2f, p %s%s; N = %ld",
                  a["df_between"].get<int>(), a["df_within"].get<int>(),
                  a["f_stat"].get<double>(), p < 0.001 ? "" : "= ",
                  format_p(p).c_str(), rq["n_observations"].get<long>());
    std::string line(buf);
    const auto marker = significance_marker(p);
    if (!marker.empty()) line += " " + marker;
    return line;
}

} // namespace detail

// Assemble the machine-readable audit report from persisted stage artifacts.
// The reporter computes nothing: every number is read from a stage file and
// carries a source pointer for traceability.
inline json assemble_report(const Config& cfg, const Paths& paths) {
    json report;

    json meta;
    meta["generated_at"] = collection::HttpChatAgent::now_utc_iso();
    meta["toolkit_version"] = NEWSAUDIT_VERSION;
    meta["baseline_engine"] = cfg.baseline_engine;

    json table1_rows = detail::csv_as_json(paths.table1());
    json engines = json::array();
    for (const auto& row : table1_rows) engines.push_back(row["engine"]);
    meta["engines"] = engines;

    if (fs::exists(paths.manifest())) {
        const auto manifest = detail::read_json_file(paths.manifest());
        meta["days"] = manifest.value("days", json::array());
        meta["topics"] = manifest.value("topics", json::array());
        meta["persona_mode"] = manifest.value("persona_mode", "");
        json collection_counts;
        collection_counts["probes"] = manifest.value("probes", 0L);
        collection_counts["answers"] = manifest.value("answers", 0L);
        collection_counts["failures"] = manifest.value("failures", 0L);
        meta["collection"] = collection_counts;
    }

    const auto bundle = detail::read_json_file(paths.bundle());
    meta["parameters"] = bundle.value("metadata", json::object());
    report["run_metadata"] = std::move(meta);

    {
        json section;
        section["source"] = "metrics/table1.csv";
        section["rows"] = std::move(table1_rows);
        report["table1"] = std::move(section);
    }

    json rq_sections = json::object();
    for (const char* key :
         {"rq1_diversity", "rq2_attention", "rq4_ideology", "rq5_factuality", "psl_reliability"}) {
        if (!bundle.contains(key)) continue;
        json section;
        section["headline"] = detail::rq_headline(bundle[key]);
        section["source"] = std::string("analysis/bundle.json#") + key;
        section["statistics"] = bundle[key];
        rq_sections[key] = std::move(section);
    }
    {
        // RQ3 is descriptive: category composition + promoted/silenced RTD
        json section;
        section["headline"] = "category composition and promoted/silenced outlets vs baseline";
        section["source"] = "metrics/composition.csv";
        section["composition"] = detail::csv_as_json(paths.composition());
        rq_sections["rq3_landscape"] = std::move(section);
    }
    report["rq_sections"] = std::move(rq_sections);

    {
        json section = detail::read_json_file(paths.promoted_silenced());
        section["source"] = "metrics/promoted_silenced.json";
        report["promoted_silenced"] = std::move(section);
    }

    if (fs::exists(paths.coverage())) {
        json section = detail::read_json_file(paths.coverage());
        section["source"] = "enrich/coverage.json";
        report["coverage"] = std::move(section);
    }
    if (fs::exists(paths.serp_summary())) {
        json section = detail::read_json_file(paths.serp_summary());
        section["source"] = "serps/summary.json";
        report["attribution"] = std::move(section);
    }

    {
        json plot;
        plot["lorenz"] = detail::csv_as_json(paths.lorenz());
        plot["lorenz_source"] = "metrics/lorenz.csv";
        report["plot_data"] = std::move(plot);
    }

    // csv bundle contents are declared up front so emitters and declaration
    // can never drift apart
    json declared = json::array();
    declared.push_back("table1.csv");
    declared.push_back("composition.csv");
    declared.push_back("lorenz.csv");
    declared.push_back("promoted_silenced.csv");
    for (const auto& [key, section] : report["rq_sections"].items()) {
        if (!section.contains("statistics")) continue;
        if (section["statistics"].contains("contrasts"))
            declared.push_back("contrasts_" + key + ".csv");
    }
    report["csv_bundle"] = json::object();
    report["csv_bundle"]["declared_files"] = std::move(declared);
    return report;
}

// --- markdown ---------------------------------------------------------------

inline std::string render_markdown(const json& report) {
    std::string md;
    auto line = [&md](const std::string& s) { md += s + "\n"; };

    const auto& meta = report["run_metadata"];
    line("# News exposure audit report");
    line("");
    line("Generated: " + meta["generated_at"].get<std::string>() + " | toolkit " +
         meta["toolkit_version"].get<std::string>());
    line("");
    line("Baseline engine: `" + meta["baseline_engine"].get<std::string>() + "`");
    if (meta.contains("days") && !meta["days"].empty()) {
        std::string days;
        for (const auto& d : meta["days"]) days += (days.empty() ? "" : ", ") + d.get<std::string>();
        line("Run days: " + days);
    }
    line("");

    line("## Engines at a glance");
    line("");
    line("| Engine | SERP results | Unique domains |");
    line("|---|---:|---:|");
    for (const auto& row : report["table1"]["rows"])
        line("| " + row["engine"].get<std::string>() + " | " +
             row["serp_results"].get<std::string>() + " | " +
             row["unique_domains"].get<std::string>() + " |");
    line("");
    line("_Source: " + report["table1"]["source"].get<std::string>() + "_");
    line("");

    static const std::vector<std::pair<const char*, const char*>> rq_titles = {
        {"rq1_diversity", "RQ1 - Media outlet diversity"},
        {"rq2_attention", "RQ2 - Attention inequality (Gini)"},
        {"rq3_landscape", "RQ3 - Category and outlet landscape"},
        {"rq4_ideology", "RQ4 - Ideological orientation"},
        {"rq5_factuality", "RQ5 - Factual reliability"},
        {"psl_reliability", "Robustness - PSL reliability"},
    };
    for (const auto& [key, title] : rq_titles) {
        if (!report["rq_sections"].contains(key)) continue;
        const auto& section = report["rq_sections"][key];
        line(std::string("## ") + title);
        line("");
        line(section["headline"].get<std::string>());
        line("");
        if (section.contains("statistics") && section["statistics"].contains("contrasts")) {
            line("| Engine | EMM | Diff vs baseline | 95% CI | p |");
            line("|---|---:|---:|---|---|");
            for (const auto& c : section["statistics"]["contrasts"]) {
                char buf[200];
                const double p = c["p_value"].get<double>();
                std::snprintf(buf, sizeof buf, "| %s | %.3f | %.3f | [%.3f, %.3f] | %s %s |",
                              c["engine"].get<std::string>().c_str(), c["emm"].get<double>(),
                              c["diff_vs_baseline"].get<double>(), c["ci_low"].get<double>(),
                              c["ci_high"].get<double>(), detail::format_p(p).c_str(),
                              significance_marker(p).c_str());
                line(buf);
            }
            line("");
        }
        if (section.contains("composition")) {
            line("| Engine | Category | Share |");
            line("|---|---|---:|");
            for (const auto& row : section["composition"])
                line("| " + row["engine"].get<std::string>() + " | " +
                     row["category"].get<std::string>() + " | " + row["share"].get<std::string>() +
                     " |");
            line("");
        }
        line("_Source: " + section["source"].get<std::string>() + "_");
        line("");
    }

    if (report.contains("promoted_silenced")) {
        line("## Promoted and silenced outlets (RTD vs baseline)");
        line("");
        const auto& ps = report["promoted_silenced"];
        for (const auto& [engine, lists] : ps["engines"].items()) {
            line("### " + engine);
            line("");
            for (const char* which : {"promoted", "silenced"}) {
                std::string row = std::string(which) + ": ";
                bool first = true;
                for (const auto& c : lists[which]) {
                    char buf[120];
                    std::snprintf(buf, sizeof buf, "%s%s (%.3f, %s)", first ? "" : ", ",
                                  c["domain"].get<std::string>().c_str(),
                                  c["contribution"].get<double>(),
                                  c["band"].get<std::string>().c_str());
                    row += buf;
                    first = false;
                }
                if (first) row += "none";
                line("- " + row);
            }
            line("");
        }
        line("_Source: " + ps["source"].get<std::string>() + "_");
        line("");
    }

    if (report.contains("coverage")) {
        const auto& cov = report["coverage"];
        line("## Enrichment coverage");
        line("");
        line("| Source | Matched | Missing |");
        line("|---|---:|---:|");
        for (const char* src : {"mbfc", "psl", "iab"})
            line(std::string("| ") + src + " | " + std::to_string(cov[src]["matched"].get<long>()) +
                 " | " + std::to_string(cov[src]["missing"].get<long>()) + " |");
        line("");
        line("_Source: " + cov["source"].get<std::string>() + "_");
        line("");
    }
    return md;
}

// --- emit ---------------------------------------------------------------------

enum class ReportFormat { markdown, json_format, csv_bundle };

inline ReportFormat report_format_from_name(const std::string& name) {
    if (name == "markdown") return ReportFormat::markdown;
    if (name == "json") return ReportFormat::json_format;
    if (name == "csv-bundle") return ReportFormat::csv_bundle;
    throw ConfigError("unknown report format '" + name + "'");
}

inline void emit_report(const json& report, ReportFormat format, const Paths& paths) {
    fs::create_directories(paths.report_dir());
    switch (format) {
    case ReportFormat::json_format: {
        std::ofstream out(paths.report_json());
        if (!out) throw IoError("cannot write " + paths.report_json().string());
        out << report.dump(2) << '\n';
        break;
    }
    case ReportFormat::markdown: {
        std::ofstream out(paths.report_md());
        if (!out) throw IoError("cannot write " + paths.report_md().string());
        out << render_markdown(report);
        break;
    }
    case ReportFormat::csv_bundle: {
        fs::create_directories(paths.report_csv_dir());
        auto write_csv = [&](const std::string& name, const std::vector<std::string>& header,
                             const std::vector<std::vector<std::string>>& rows) {
            csv::write_file((paths.report_csv_dir() / name).string(), header, rows);
        };
        for (const auto& jname : report["csv_bundle"]["declared_files"]) {
            const std::string name = jname.get<std::string>();
            if (name == "table1.csv") {
                std::vector<std::vector<std::string>> rows;
                for (const auto& r : report["table1"]["rows"])
                    rows.push_back({r["engine"].get<std::string>(),
                                    r["serp_results"].get<std::string>(),
                                    r["unique_domains"].get<std::string>()});
                write_csv(name, {"engine", "serp_results", "unique_domains"}, rows);
            } else if (name == "composition.csv") {
                std::vector<std::vector<std::string>> rows;
                for (const auto& r : report["rq_sections"]["rq3_landscape"]["composition"])
                    rows.push_back({r["engine"].get<std::string>(),
                                    r["category"].get<std::string>(),
                                    r["share"].get<std::string>()});
                write_csv(name, {"engine", "category", "share"}, rows);
            } else if (name == "lorenz.csv") {
                std::vector<std::vector<std::string>> rows;
                for (const auto& r : report["plot_data"]["lorenz"])
                    rows.push_back({r["engine"].get<std::string>(),
                                    r["population_share"].get<std::string>(),
                                    r["attention_share"].get<std::string>()});
                write_csv(name, {"engine", "population_share", "attention_share"}, rows);
            } else if (name == "promoted_silenced.csv") {
                std::vector<std::vector<std::string>> rows;
                for (const auto& [engine, lists] : report["promoted_silenced"]["engines"].items())
                    for (const char* which : {"promoted", "silenced"})
                        for (const auto& c : lists[which])
                            rows.push_back({engine, which, c["domain"].get<std::string>(),
                                            format_double(c["contribution"].get<double>()),
                                            c["band"].get<std::string>()});
                write_csv(name, {"engine", "direction", "domain", "contribution", "band"}, rows);
            } else if (name.rfind("contrasts_", 0) == 0) {
                const std::string key = name.substr(10, name.size() - 14); // strip prefix + .csv
                std::vector<std::vector<std::string>> rows;
                for (const auto& c : report["rq_sections"][key]["statistics"]["contrasts"])
                    rows.push_back({c["engine"].get<std::string>(),
                                    format_double(c["emm"].get<double>()),
                                    format_double(c["diff_vs_baseline"].get<double>()),
                                    format_double(c["ci_low"].get<double>()),
                                    format_double(c["ci_high"].get<double>()),
                                    format_double(c["p_value"].get<double>())});
                write_csv(name, {"engine", "emm", "diff_vs_baseline", "ci_low", "ci_high", "p_value"},
                          rows);
            } else {
                throw IoError("declared csv bundle file with no emitter: " + name);
            }
        }
        break;
    }
    }
}

inline json stage_report(const Config& cfg, const Paths& paths,
                         const std::vector<ReportFormat>& formats) {
    const auto report = assemble_report(cfg, paths);
    for (const auto f : formats) emit_report(report, f, paths);
    return report;
}

// --- orchestration ---------------------------------------------------------------

enum class Stage { collect, attribute, enrich, metrics, analyze, report };

inline Stage stage_from_name(const std::string& name) {
    if (name == "collect") return Stage::collect;
    if (name == "attribute") return Stage::attribute;
    if (name == "enrich") return Stage::enrich;
    if (name == "metrics") return Stage::metrics;
    if (name == "analyze") return Stage::analyze;
    if (name == "report") return Stage::report;
    throw ConfigError("unknown stage '" + name + "'");
}

inline const char* stage_name(Stage s) {
    switch (s) {
    case Stage::collect: return "collect";
    case Stage::attribute: return "attribute";
    case Stage::enrich: return "enrich";
    case Stage::metrics: return "metrics";
    case Stage::analyze: return "analyze";
    case Stage::report: return "report";
    }
    return "?";
}

// Run collect -> attribute -> enrich -> metrics -> analyze -> report, or
// resume part-way when earlier artifacts are already persisted. A stage
// failure surfaces with its stage name; completed artifacts stay on disk.
inline json run_pipeline(const Config& cfg, Stage from = Stage::collect,
                         const std::vector<ReportFormat>& formats = {ReportFormat::json_format,
                                                                     ReportFormat::markdown,
                                                                     ReportFormat::csv_bundle}) {
    const Paths paths(cfg.output_dir);
    fs::create_directories(paths.root);

    // resuming only needs the artifacts the starting stage actually consumes
    std::vector<fs::path> required;
    switch (from) {
    case Stage::collect: break;
    case Stage::attribute: required = {paths.raw_dir()}; break;
    case Stage::enrich: required = {paths.serp_store()}; break;
    case Stage::metrics:
    case Stage::analyze: required = {paths.exposure()}; break;
    case Stage::report:
        required = {paths.table1(), paths.composition(), paths.lorenz(),
                    paths.promoted_silenced(), paths.bundle()};
        break;
    }
    for (const auto& artifact : required)
        if (!fs::exists(artifact))
            throw ConfigError(std::string("cannot resume from '") + stage_name(from) +
                              "': missing artifact " + artifact.string());

    auto guarded = [&](Stage s, auto&& fn) {
        if (from > s) return;
        try {
            fn();
        } catch (const std::exception& e) {
            throw std::runtime_error(std::string("stage ") + stage_name(s) + ": " + e.what());
        }
    };

    guarded(Stage::collect, [&] { stage_collect(cfg, paths); });
    guarded(Stage::attribute, [&] { stage_attribute(cfg, paths); });
    guarded(Stage::enrich, [&] { stage_enrich(cfg, paths); });
    guarded(Stage::metrics, [&] { stage_metrics(cfg, paths); });
    guarded(Stage::analyze, [&] { stage_analyze(cfg, paths); });

    json report;
    guarded(Stage::report, [&] { report = stage_report(cfg, paths, formats); });
    return report;
}

} // namespace newsaudit::pipeline
