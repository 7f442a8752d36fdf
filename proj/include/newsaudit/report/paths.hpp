#pragma once

#include <filesystem>
#include <string>

namespace newsaudit::pipeline {

// Canonical layout of a run's persisted artifacts under the output dir.
// Every stage reads its predecessor's files, which is what makes runs
// resumable from any stage.
struct Paths {
    std::filesystem::path root;

    explicit Paths(const std::string& output_dir) : root(output_dir) {}

    std::filesystem::path raw_dir() const { return root / "raw"; }
    std::filesystem::path raw_answers(const std::string& day) const {
        return raw_dir() / ("answers_" + day + ".jsonl");
    }
    std::filesystem::path failures() const { return raw_dir() / "failures.jsonl"; }
    std::filesystem::path manifest() const { return raw_dir() / "manifest.json"; }

    std::filesystem::path serp_dir() const { return root / "serps"; }
    std::filesystem::path serp_store() const { return serp_dir() / "serps.jsonl"; }
    std::filesystem::path serp_summary() const { return serp_dir() / "summary.json"; }

    std::filesystem::path enrich_dir() const { return root / "enrich"; }
    std::filesystem::path profiles() const { return enrich_dir() / "profiles.jsonl"; }
    std::filesystem::path coverage() const { return enrich_dir() / "coverage.json"; }
    std::filesystem::path exposure() const { return enrich_dir() / "exposure.csv"; }

    std::filesystem::path metrics_dir() const { return root / "metrics"; }
    std::filesystem::path table1() const { return metrics_dir() / "table1.csv"; }
    std::filesystem::path diversity_gini() const { return metrics_dir() / "diversity_gini.csv"; }
    std::filesystem::path composition() const { return metrics_dir() / "composition.csv"; }
    std::filesystem::path rtd() const { return metrics_dir() / "rtd.csv"; }
    std::filesystem::path lorenz() const { return metrics_dir() / "lorenz.csv"; }
    std::filesystem::path promoted_silenced() const {
        return metrics_dir() / "promoted_silenced.json";
    }

    std::filesystem::path analysis_dir() const { return root / "analysis"; }
    std::filesystem::path bundle() const { return analysis_dir() / "bundle.json"; }

    std::filesystem::path report_dir() const { return root / "report"; }
    std::filesystem::path report_json() const { return report_dir() / "report.json"; }
    std::filesystem::path report_md() const { return report_dir() / "report.md"; }
    std::filesystem::path report_csv_dir() const { return report_dir() / "csv"; }
};

} // namespace newsaudit::pipeline
