#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "newsaudit/stats/emm.hpp"
#include "newsaudit/stats/lmm.hpp"

using namespace newsaudit;
using namespace newsaudit::stats;

namespace {

struct Sim {
    std::vector<double> y;
    std::vector<std::string> groups;
};

Sim simulate_random_intercepts(std::mt19937& rng, int n_groups, int per_group, double mu,
                               double sigma_u, double sigma_e) {
    std::normal_distribution<double> normal(0.0, 1.0);
    Sim sim;
    for (int g = 0; g < n_groups; ++g) {
        const double u = sigma_u * normal(rng);
        for (int i = 0; i < per_group; ++i) {
            sim.y.push_back(mu + u + sigma_e * normal(rng));
            sim.groups.push_back("g" + std::to_string(g));
        }
    }
    return sim;
}

FixedDesign intercept_only(std::size_t n) {
    FixedDesign d;
    d.x = numeric::Matrix(n, 1, 1.0);
    d.colnames = {"(intercept)"};
    return d;
}

// ANOVA estimators for the balanced one-way random-effects design; REML
// coincides with them whenever MSB >= MSW.
std::pair<double, double> balanced_moments(const Sim& sim, int n_groups, int per_group) {
    const double n = static_cast<double>(sim.y.size());
    double grand = 0.0;
    for (double v : sim.y) grand += v;
    grand /= n;
    std::map<std::string, std::pair<long, double>> acc;
    for (std::size_t i = 0; i < sim.y.size(); ++i) {
        acc[sim.groups[i]].first++;
        acc[sim.groups[i]].second += sim.y[i];
    }
    double msb = 0.0;
    for (const auto& [g, ns] : acc) {
        const double mean = ns.second / ns.first;
        msb += per_group * (mean - grand) * (mean - grand);
    }
    msb /= (n_groups - 1);
    double msw = 0.0;
    for (std::size_t i = 0; i < sim.y.size(); ++i) {
        const double mean = acc[sim.groups[i]].second / acc[sim.groups[i]].first;
        msw += (sim.y[i] - mean) * (sim.y[i] - mean);
    }
    msw /= (n - n_groups);
    return {(msb - msw) / per_group, msw};
}

} // namespace

TEST_CASE("balanced one-way design recovers the closed-form variance components") {
    std::mt19937 rng(1234);
    for (int trial = 0; trial < 5; ++trial) {
        const int n_groups = 12, per_group = 6;
        const auto sim = simulate_random_intercepts(rng, n_groups, per_group, 3.0, 2.0, 1.0);
        const auto [sigma_u2_ref, sigma_e2_ref] = balanced_moments(sim, n_groups, per_group);
        if (sigma_u2_ref <= 0.0) continue; // boundary case handled elsewhere
        const auto fit = fit_lmm_reml(sim.y, intercept_only(sim.y.size()), sim.groups);
        REQUIRE(fit.converged);
        CHECK(std::fabs(fit.sigma_u2 - sigma_u2_ref) <= 1e-8 * std::max(1.0, sigma_u2_ref));
        CHECK(std::fabs(fit.sigma_e2 - sigma_e2_ref) <= 1e-8 * std::max(1.0, sigma_e2_ref));
    }
}

TEST_CASE("sigma_u2 = 0 data collapses to OLS") {
    // groups are exact replicas of one another (identical covariate and
    // response patterns), so the between-group variance is exactly zero and
    // REML must land on the lambda -> 0 boundary
    std::mt19937 rng(5678);
    std::normal_distribution<double> normal(0.0, 1.0);
    const std::size_t n_groups = 10, per_group = 12, n = n_groups * per_group;
    std::vector<double> member_noise(per_group);
    for (auto& v : member_noise) v = normal(rng);

    FixedDesign design;
    design.x = numeric::Matrix(n, 2, 1.0);
    design.colnames = {"(intercept)", "slope"};
    std::vector<double> y(n);
    std::vector<std::string> groups(n);
    for (std::size_t g = 0; g < n_groups; ++g)
        for (std::size_t j = 0; j < per_group; ++j) {
            const std::size_t i = g * per_group + j;
            const double x = static_cast<double>(j) / per_group;
            design.x(i, 1) = x;
            y[i] = 1.5 + 2.0 * x + member_noise[j];
            groups[i] = "g" + std::to_string(g);
        }
    const auto fit = fit_lmm_reml(y, design, groups);
    REQUIRE(fit.converged);
    CHECK(fit.sigma_u2 <= 1e-6);

    // OLS via the normal equations, assembled independently
    double sxx = 0, sx = 0, sxy = 0, sy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double x = design.x(i, 1);
        sxx += x * x;
        sx += x;
        sxy += x * y[i];
        sy += y[i];
    }
    const double det = n * sxx - sx * sx;
    const double slope_ols = (n * sxy - sx * sy) / det;
    const double intercept_ols = (sy - slope_ols * sx) / n;
    CHECK(std::fabs(fit.estimates[0] - intercept_ols) <= 1e-8);
    CHECK(std::fabs(fit.estimates[1] - slope_ols) <= 1e-8);
}

TEST_CASE("monte carlo recovery: median sigma_u2 within 15% of truth") {
    // 24 groups x 4 observations, sigma_u2 = 4, sigma_e2 = 1, 500 replicates
    std::mt19937 rng(20250521);
    std::vector<double> estimates;
    estimates.reserve(500);
    for (int rep = 0; rep < 500; ++rep) {
        const auto sim = simulate_random_intercepts(rng, 24, 4, 0.0, 2.0, 1.0);
        const auto fit = fit_lmm_reml(sim.y, intercept_only(sim.y.size()), sim.groups);
        estimates.push_back(fit.sigma_u2);
    }
    std::nth_element(estimates.begin(), estimates.begin() + 250, estimates.end());
    const double median = estimates[250];
    CHECK(median >= 4.0 * 0.85);
    CHECK(median <= 4.0 * 1.15);
}

TEST_CASE("rank-deficient designs are rejected") {
    FixedDesign design;
    design.x = numeric::Matrix(12, 2, 1.0); // two identical columns
    design.colnames = {"a", "b"};
    std::vector<double> y(12, 1.0);
    std::vector<std::string> groups(12);
    for (std::size_t i = 0; i < 12; ++i) {
        y[i] = static_cast<double>(i);
        groups[i] = "g" + std::to_string(i % 3);
    }
    CHECK_THROWS_AS(fit_lmm_reml(y, design, groups), NumericalError);
}

TEST_CASE("input shape validation") {
    FixedDesign design = intercept_only(4);
    CHECK_THROWS_AS(fit_lmm_reml({1, 2, 3}, design, {"a", "a", "b", "b"}), ParameterError);
    CHECK_THROWS_AS(fit_lmm_reml({1, 2, 3, 4}, design, {"a", "a", "b"}), ParameterError);
    // too few observations for p columns
    FixedDesign wide;
    wide.x = numeric::Matrix(3, 3, 1.0);
    wide.colnames = {"a", "b", "c"};
    CHECK_THROWS_AS(fit_lmm_reml({1, 2, 3}, wide, {"a", "b", "c"}), ParameterError);
}

TEST_CASE("engine design builder layout") {
    const std::vector<std::string> engines = {"gpt", "google_news", "claude", "gpt", "google_news",
                                              "claude"};
    const std::vector<double> rank = {0.1, 0.5, 1.0, 0.2, 0.4, 0.8};
    const auto ed = build_engine_design(engines, "google_news", {{"normalized_rank", rank}});
    CHECK(ed.design.colnames ==
          std::vector<std::string>{"(intercept)", "engine:claude", "engine:gpt", "normalized_rank"});
    CHECK(ed.design.x.rows() == 6);
    CHECK(ed.design.x(0, 2) == 1.0);  // gpt dummy
    CHECK(ed.design.x(1, 1) == 0.0);  // baseline row: no dummies
    CHECK(ed.design.x(1, 2) == 0.0);
    CHECK(ed.design.x(2, 1) == 1.0);  // claude dummy
    CHECK(ed.covariate_means[0] == doctest::Approx(0.5).epsilon(1e-15));
    CHECK_THROWS_AS(build_engine_design(engines, "not-present", {}), ParameterError);
}

namespace {

struct EngineSim {
    std::vector<double> y;
    std::vector<std::string> engines;
    std::vector<std::string> topics;
};

EngineSim simulate_engine_data(std::mt19937& rng, double effect_for_target,
                               const std::string& target, int topics = 24, int per_cell = 4) {
    std::normal_distribution<double> normal(0.0, 1.0);
    const std::vector<std::string> engines = {"claude", "gemini", "google_news", "gpt"};
    EngineSim sim;
    for (int t = 0; t < topics; ++t) {
        const double topic_effect = 0.5 * normal(rng);
        for (const auto& engine : engines)
            for (int i = 0; i < per_cell; ++i) {
                double mu = 2.0 + topic_effect + normal(rng);
                if (engine == target) mu += effect_for_target;
                sim.y.push_back(mu);
                sim.engines.push_back(engine);
                sim.topics.push_back("t" + std::to_string(t));
            }
    }
    return sim;
}

} // namespace

TEST_CASE("emm contrasts: baseline self-contrast is exactly zero") {
    std::mt19937 rng(1);
    const auto sim = simulate_engine_data(rng, 1.0, "gpt");
    const auto design = build_engine_design(sim.engines, "google_news");
    const auto fit = fit_lmm_reml(sim.y, design.design, sim.topics);
    const auto contrasts = emm_contrasts(fit, design);
    REQUIRE(contrasts.size() == 4);
    for (const auto& c : contrasts) {
        if (c.engine == "google_news") {
            CHECK(c.diff_vs_baseline == 0.0);
            CHECK(c.ci_low == 0.0);
            CHECK(c.ci_high == 0.0);
        } else {
            CHECK(c.ci_low <= c.diff_vs_baseline);
            CHECK(c.diff_vs_baseline <= c.ci_high);
        }
    }
}

TEST_CASE("emm shift invariance: adding a constant moves EMMs, not contrasts") {
    std::mt19937 rng(2);
    const auto sim = simulate_engine_data(rng, 0.8, "claude", 12, 3);
    const auto design = build_engine_design(sim.engines, "google_news");
    const auto fit = fit_lmm_reml(sim.y, design.design, sim.topics);
    const auto base = emm_contrasts(fit, design);

    const double c = 7.25;
    std::vector<double> shifted = sim.y;
    for (auto& v : shifted) v += c;
    const auto fit2 = fit_lmm_reml(shifted, design.design, sim.topics);
    const auto moved = emm_contrasts(fit2, design);

    REQUIRE(base.size() == moved.size());
    for (std::size_t i = 0; i < base.size(); ++i) {
        CHECK(std::fabs(moved[i].emm - (base[i].emm + c)) <= 1e-10);
        CHECK(std::fabs(moved[i].diff_vs_baseline - base[i].diff_vs_baseline) <= 1e-10);
        CHECK(std::fabs(moved[i].std_error - base[i].std_error) <= 1e-10);
        CHECK(std::fabs(moved[i].p_value - base[i].p_value) <= 1e-10);
    }
}

TEST_CASE("emm contrast antisymmetry under baseline swap") {
    std::mt19937 rng(3);
    const auto sim = simulate_engine_data(rng, 1.2, "gpt", 10, 3);
    const auto d1 = build_engine_design(sim.engines, "google_news");
    const auto f1 = fit_lmm_reml(sim.y, d1.design, sim.topics);
    const auto c1 = emm_contrasts(f1, d1);

    const auto d2 = build_engine_design(sim.engines, "gpt");
    const auto f2 = fit_lmm_reml(sim.y, d2.design, sim.topics);
    const auto c2 = emm_contrasts(f2, d2);

    auto find = [](const std::vector<EmmContrast>& cs, const std::string& engine) {
        for (const auto& c : cs)
            if (c.engine == engine) return c;
        REQUIRE(false);
        return cs[0];
    };
    const auto gpt_vs_google = find(c1, "gpt");
    const auto google_vs_gpt = find(c2, "google_news");
    CHECK(gpt_vs_google.diff_vs_baseline ==
          doctest::Approx(-google_vs_gpt.diff_vs_baseline).epsilon(1e-9));
    CHECK(gpt_vs_google.p_value == doctest::Approx(google_vs_gpt.p_value).epsilon(1e-9));
}

TEST_CASE("single-engine data yields only the zero self-contrast") {
    std::vector<double> y = {1, 2, 3, 4, 5, 6};
    std::vector<std::string> engines(6, "google_news");
    std::vector<std::string> topics = {"a", "a", "b", "b", "c", "c"};
    const auto design = build_engine_design(engines, "google_news");
    const auto fit = fit_lmm_reml(y, design.design, topics);
    const auto contrasts = emm_contrasts(fit, design);
    REQUIRE(contrasts.size() == 1);
    CHECK(contrasts[0].engine == "google_news");
    CHECK(contrasts[0].diff_vs_baseline == 0.0);
}

TEST_CASE("planted +1 effect is detected with the correct sign") {
    std::mt19937 rng(20240815);
    int detected = 0;
    const int reps = 60; // the full 200-replicate sweep runs in acceptance
    for (int rep = 0; rep < reps; ++rep) {
        const auto sim = simulate_engine_data(rng, 1.0, "gpt", 24, 5);
        const auto design = build_engine_design(sim.engines, "google_news");
        const auto fit = fit_lmm_reml(sim.y, design.design, sim.topics);
        for (const auto& c : emm_contrasts(fit, design))
            if (c.engine == "gpt" && c.diff_vs_baseline > 0.0 && c.p_value < 0.01) ++detected;
    }
    CHECK(detected >= reps * 95 / 100);
}

TEST_CASE("diversity-shaped fixture: EMMs reproduce the per-topic group means") {
    // 24 per-topic unique-outlet counts per engine with means 11.125 and
    // 19.833..: integer counts shaped after the audit's reported contrast in
    // outlet diversity. Balanced design, so each engine's EMM must equal its
    // sample mean exactly and the gap must be strongly significant.
    std::vector<double> y;
    std::vector<std::string> engines, topics;
    for (int t = 0; t < 24; ++t) {
        const double gpt = t < 21 ? 11.0 : 12.0;     // mean 11.125
        const double google = t < 20 ? 20.0 : 19.0;  // mean 19.8333..
        y.push_back(gpt);
        engines.push_back("gpt-4o-mini");
        topics.push_back("t" + std::to_string(t));
        y.push_back(google);
        engines.push_back("google_news");
        topics.push_back("t" + std::to_string(t));
    }
    const auto design = build_engine_design(engines, "google_news");
    const auto fit = fit_lmm_reml(y, design.design, topics);
    const auto contrasts = emm_contrasts(fit, design);
    for (const auto& c : contrasts) {
        if (c.engine == "gpt-4o-mini") {
            CHECK(c.emm == doctest::Approx(11.125).epsilon(1e-9));
            CHECK(c.diff_vs_baseline == doctest::Approx(11.125 - 476.0 / 24.0).epsilon(1e-9));
            CHECK(c.p_value < 0.001);
        } else {
            CHECK(c.emm == doctest::Approx(476.0 / 24.0).epsilon(1e-9));
        }
    }
}

TEST_CASE("normalized rank covariate is evaluated at its grand mean") {
    std::mt19937 rng(11);
    std::normal_distribution<double> normal(0.0, 0.3);
    std::vector<double> y;
    std::vector<std::string> engines, topics;
    std::vector<double> ranks;
    for (int t = 0; t < 8; ++t)
        for (const char* engine : {"a_engine", "google_news"})
            for (int i = 1; i <= 5; ++i) {
                const double r = i / 5.0;
                ranks.push_back(r);
                y.push_back(1.0 + 0.5 * r + (engine[0] == 'a' ? 0.7 : 0.0) + normal(rng));
                engines.push_back(engine);
                topics.push_back("t" + std::to_string(t));
            }
    const auto design = build_engine_design(engines, "google_news", {{"normalized_rank", ranks}});
    const auto fit = fit_lmm_reml(y, design.design, topics);
    const auto contrasts = emm_contrasts(fit, design);
    // EMM difference equals the dummy coefficient: covariate terms cancel
    const double dummy = fit.estimates[1];
    for (const auto& c : contrasts)
        if (c.engine == "a_engine") CHECK(c.diff_vs_baseline == doctest::Approx(dummy).epsilon(1e-12));
    // and the EMMs themselves sit at the covariate grand mean
    const double grand_mean_rank = design.covariate_means[0];
    const double expected_baseline_emm = fit.estimates[0] + fit.estimates[2] * grand_mean_rank;
    for (const auto& c : contrasts)
        if (c.engine == "google_news") CHECK(c.emm == doctest::Approx(expected_baseline_emm).epsilon(1e-12));
}
