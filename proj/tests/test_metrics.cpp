#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "newsaudit/metrics/descriptive.hpp"
#include "newsaudit/metrics/exposure.hpp"
#include "newsaudit/metrics/gini.hpp"
#include "newsaudit/metrics/rtd.hpp"
#include "support/oracles.hpp"

using namespace newsaudit;
using namespace newsaudit::metrics;

namespace {

ExposureRow row(const std::string& engine, const std::string& topic, const std::string& domain,
                int rank = 1, const std::string& day = "2025-05-15",
                const std::string& persona = "") {
    ExposureRow r;
    r.engine = engine;
    r.topic = topic;
    r.day = day;
    r.persona = persona;
    r.rank = rank;
    r.normalized_rank = rank / 10.0;
    r.domain = domain;
    return r;
}

} // namespace

TEST_CASE("gini: exact values on the canonical cases") {
    CHECK(gini({5, 5, 5, 5}) == 0.0);
    CHECK(gini({0, 0, 0, 8}) == 0.75); // (n-1)/n for one-hot, n=4
    CHECK(gini({1, 2, 3, 4}) == doctest::Approx(0.25).epsilon(1e-14));
    CHECK(gini({7}) == 0.0); // single outlet: no dispersion by the formula
}

TEST_CASE("gini equals the double-sum definition on random vectors") {
    std::mt19937 rng(20250515);
    std::uniform_int_distribution<int> size_dist(1, 50);
    std::uniform_int_distribution<int> count_dist(0, 100);
    for (int trial = 0; trial < 1000; ++trial) {
        std::vector<double> counts(size_dist(rng));
        double total = 0.0;
        for (auto& c : counts) {
            c = count_dist(rng);
            total += c;
        }
        if (total == 0.0) counts[0] = 1.0;
        CHECK(std::fabs(gini(counts) - oracle::gini_double_sum(counts)) <= 1e-12);
    }
}

TEST_CASE("gini: bounds, equality case, scale invariance") {
    std::mt19937 rng(7);
    std::uniform_int_distribution<int> size_dist(2, 40);
    std::uniform_int_distribution<int> count_dist(0, 60);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<double> counts(size_dist(rng));
        double total = 0;
        for (auto& c : counts) {
            c = count_dist(rng);
            total += c;
        }
        if (total == 0.0) counts[0] = 3.0;
        const double g = gini(counts);
        CHECK(g >= 0.0);
        CHECK(g < 1.0);
        std::vector<double> scaled = counts;
        for (auto& c : scaled) c *= 17.5;
        CHECK(gini(scaled) == doctest::Approx(g).epsilon(1e-12));
    }
    CHECK(gini({3, 3, 3}) == 0.0);
    CHECK_THROWS_AS(gini({}), ParameterError);
    CHECK_THROWS_AS(gini({0, 0, 0}), ParameterError);
    CHECK_THROWS_AS(gini({-1, 2}), ParameterError);
}

TEST_CASE("lorenz curve shape and endpoints") {
    SUBCASE("uniform counts lie on the diagonal") {
        const auto pts = lorenz({1, 1, 1, 1});
        REQUIRE(pts.size() == 5);
        for (const auto& [x, y] : pts) CHECK(y == doctest::Approx(x).epsilon(1e-12));
    }
    SUBCASE("one-hot: flat then a jump to (1,1)") {
        const auto pts = lorenz({0, 0, 0, 8});
        REQUIRE(pts.size() == 5);
        CHECK(pts[0] == std::pair{0.0, 0.0});
        CHECK(pts[3].first == doctest::Approx(0.75));
        CHECK(pts[3].second == doctest::Approx(0.0));
        CHECK(pts[4].first == doctest::Approx(1.0));
        CHECK(pts[4].second == doctest::Approx(1.0));
    }
    SUBCASE("curve is monotone and below the diagonal") {
        const auto pts = lorenz({1, 4, 2, 9, 9, 3});
        for (std::size_t i = 1; i < pts.size(); ++i) {
            CHECK(pts[i].second >= pts[i - 1].second);
            CHECK(pts[i].second <= pts[i].first + 1e-12);
        }
    }
}

TEST_CASE("lorenz/gini consistency: 1 - 2*AUC == G") {
    std::mt19937 rng(99);
    std::uniform_int_distribution<int> size_dist(1, 50);
    std::uniform_int_distribution<int> count_dist(0, 100);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<double> counts(size_dist(rng));
        double total = 0;
        for (auto& c : counts) {
            c = count_dist(rng);
            total += c;
        }
        if (total == 0.0) counts[0] = 2.0;
        const auto pts = lorenz(counts);
        double auc = 0.0; // independent trapezoid accumulation
        for (std::size_t i = 1; i < pts.size(); ++i)
            auc += (pts[i].first - pts[i - 1].first) * (pts[i].second + pts[i - 1].second) / 2.0;
        CHECK(std::fabs(1.0 - 2.0 * auc - gini(counts)) <= 1e-9);
    }
}

TEST_CASE("rtd bands: exact edges at 0.2 and 0.5") {
    CHECK(rtd_band(0.0) == RtdBand::negligible);
    CHECK(rtd_band(0.1999999999) == RtdBand::negligible);
    CHECK(rtd_band(0.2) == RtdBand::moderate);
    CHECK(rtd_band(0.35) == RtdBand::moderate);
    CHECK(rtd_band(0.5) == RtdBand::moderate);
    CHECK(rtd_band(0.5000000001) == RtdBand::strong);
    CHECK(rtd_band(-0.6) == RtdBand::strong); // magnitude-based
}

namespace {

AttentionVector vec(const std::string& engine, std::map<std::string, long> counts) {
    AttentionVector v;
    v.engine = engine;
    v.scope = "global";
    v.counts = std::move(counts);
    return v;
}

std::map<std::string, long> random_counts(std::mt19937& rng, int max_size) {
    std::uniform_int_distribution<int> size_dist(1, max_size);
    std::uniform_int_distribution<int> count_dist(1, 40);
    std::uniform_int_distribution<int> id_dist(0, max_size * 2);
    std::map<std::string, long> counts;
    const int n = size_dist(rng);
    while (static_cast<int>(counts.size()) < n)
        counts["d" + std::to_string(id_dist(rng))] = count_dist(rng);
    return counts;
}

} // namespace

TEST_CASE("rtd: identical inputs give all-zero contributions") {
    const auto a = vec("x", {{"a", 5}, {"b", 3}, {"c", 1}});
    const auto result = rank_turbulence(a, a, 1.0 / 3.0);
    CHECK(result.total_divergence == 0.0);
    CHECK(result.normalized_divergence == 0.0);
    for (const auto& c : result.per_domain) {
        CHECK(c.signed_contribution == 0.0);
        CHECK(c.band == RtdBand::negligible);
    }
}

TEST_CASE("rtd: swapping arguments negates every signed contribution") {
    std::mt19937 rng(2024);
    for (int trial = 0; trial < 50; ++trial) {
        const auto a = vec("a", random_counts(rng, 12));
        const auto b = vec("b", random_counts(rng, 12));
        const auto ab = rank_turbulence(a, b);
        const auto ba = rank_turbulence(b, a);
        REQUIRE(ab.per_domain.size() == ba.per_domain.size());
        std::map<std::string, double> forward;
        for (const auto& c : ab.per_domain) forward[c.domain] = c.signed_contribution;
        for (const auto& c : ba.per_domain)
            CHECK(c.signed_contribution == -forward.at(c.domain)); // exact negation
        CHECK(ab.total_divergence == ba.total_divergence);
    }
}

TEST_CASE("rtd matches the brute-force reference construction") {
    std::mt19937 rng(31337);
    const double alpha = 1.0 / 3.0;
    for (int trial = 0; trial < 200; ++trial) {
        const auto a = vec("a", random_counts(rng, 30));
        const auto b = vec("b", random_counts(rng, 30));
        const auto result = rank_turbulence(a, b, alpha);
        const auto ref = oracle::rtd_reference(a.counts, b.counts, alpha);
        for (const auto& c : result.per_domain) {
            CHECK(std::fabs(c.signed_contribution - ref.signed_contribution.at(c.domain)) <= 1e-9);
            CHECK(std::fabs(c.signed_contribution) <= 1.0);
        }
        CHECK(std::fabs(result.total_divergence - ref.total) <= 1e-9);
        CHECK(std::fabs(result.normalized_divergence - ref.normalized) <= 1e-9);
        CHECK(result.normalized_divergence <= 1.0 + 1e-12);
    }
}

TEST_CASE("rtd: disjoint systems normalize to exactly 1") {
    const auto a = vec("a", {{"a1", 5}, {"a2", 3}});
    const auto b = vec("b", {{"b1", 9}, {"b2", 2}, {"b3", 1}});
    const auto result = rank_turbulence(a, b);
    CHECK(result.normalized_divergence == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("rtd parameter validation") {
    const auto a = vec("a", {{"x", 1}});
    CHECK_THROWS_AS(rank_turbulence(a, a, 0.0), ParameterError);
    CHECK_THROWS_AS(rank_turbulence(a, a, -1.0), ParameterError);
    CHECK_THROWS_AS(rank_turbulence(vec("e", {}), a), ParameterError);
}

TEST_CASE("promoted/silenced: baseline-only outlet lands in silenced as strong") {
    // Mirrors the nytimes.com pattern: heavily present in the baseline,
    // absent from the LLM; with a 5-domain union its last-rank magnitude
    // clears the strong band.
    const auto llm = vec("llm", {{"alpha.com", 9}, {"beta.com", 7}, {"gamma.com", 5}, {"delta.com", 3}});
    const auto baseline = vec("google_news", {{"nytimes.com", 50},
                                              {"alpha.com", 8},
                                              {"beta.com", 6},
                                              {"gamma.com", 4},
                                              {"delta.com", 2}});
    const auto ps = promoted_silenced(llm, baseline, 1.0 / 3.0, 10);
    REQUIRE(!ps.silenced.empty());
    CHECK(ps.silenced[0].domain == "nytimes.com");
    CHECK(ps.silenced[0].signed_contribution < 0.0);
    CHECK(ps.silenced[0].band == RtdBand::strong);
}

TEST_CASE("promoted/silenced: LLM-only outlet lands in promoted") {
    const auto llm = vec("llm", {{"en.wikipedia.org", 40}, {"shared.com", 5}});
    const auto baseline = vec("google_news", {{"shared.com", 6}, {"other.com", 3}});
    const auto ps = promoted_silenced(llm, baseline);
    REQUIRE(!ps.promoted.empty());
    CHECK(ps.promoted[0].domain == "en.wikipedia.org");
    CHECK(ps.promoted[0].signed_contribution > 0.0);
}

TEST_CASE("promoted/silenced: k beyond the union returns full lists, no padding") {
    const auto llm = vec("llm", {{"a.com", 3}, {"b.com", 1}});
    const auto baseline = vec("google_news", {{"b.com", 4}, {"c.com", 2}});
    const auto ps = promoted_silenced(llm, baseline, 1.0 / 3.0, 100);
    CHECK(ps.promoted.size() + ps.silenced.size() <= 3);
    for (const auto& c : ps.promoted) CHECK(c.signed_contribution > 0.0);
    for (const auto& c : ps.silenced) CHECK(c.signed_contribution < 0.0);
}

TEST_CASE("unique outlets per engine/topic and globally") {
    ExposureTable table;
    for (int i = 1; i <= 10; ++i)
        table.rows.push_back(row("e1", "T", "site" + std::to_string(i) + ".com", i));
    table.rows.push_back(row("e1", "T2", "site1.com"));
    table.rows.push_back(row("e2", "T", "site1.com"));

    CHECK(unique_outlets(table, "e1", "T") == 10);
    CHECK(unique_outlets(table, "e1", "T2") == 1);
    CHECK(unique_outlets_global(table, "e1") == 10);
    CHECK(serp_result_count(table, "e1") == 11);

    std::vector<std::string> warnings;
    CHECK(unique_outlets(table, "e9", "T", PersonaScope::baseline_only,
                         [&](const std::string& w) { warnings.push_back(w); }) == 0);
    CHECK(warnings.size() == 1);
}

TEST_CASE("attention respects persona scope") {
    ExposureTable table;
    table.rows.push_back(row("e1", "T", "base.com"));
    table.rows.push_back(row("e1", "T", "grid.com", 1, "2025-05-15", "poor male young left"));
    const auto baseline_counts = attention(table, "e1");
    CHECK(baseline_counts.counts.size() == 1);
    CHECK(baseline_counts.counts.count("base.com") == 1);
    const auto grid_counts = attention(table, "e1", "", PersonaScope::grid_only);
    CHECK(grid_counts.counts.count("grid.com") == 1);
    const auto all_counts = attention(table, "e1", "", PersonaScope::all);
    CHECK(all_counts.counts.size() == 2);
}

TEST_CASE("category composition shares sum to one over known categories") {
    ExposureTable table;
    for (int i = 0; i < 6; ++i) {
        auto r = row("e1", "T", "n" + std::to_string(i) + ".com", i + 1);
        r.iab_category = "News";
        table.rows.push_back(r);
    }
    for (int i = 0; i < 4; ++i) {
        auto r = row("e1", "T2", "g" + std::to_string(i) + ".gov", i + 1);
        r.iab_category = "Law & Government";
        table.rows.push_back(r);
    }
    table.rows.push_back(row("e1", "T3", "unknown.com")); // uncategorized

    const auto comp = category_composition(table, "e1");
    CHECK(comp.shares.at("News") == doctest::Approx(0.6).epsilon(1e-12));
    CHECK(comp.shares.at("Law & Government") == doctest::Approx(0.4).epsilon(1e-12));
    CHECK(comp.categorized == 10);
    CHECK(comp.missing == 1);
    double total = 0.0;
    for (const auto& [_, share] : comp.shares) total += share;
    CHECK(total == doctest::Approx(1.0).epsilon(1e-9));

    CHECK_THROWS_AS(category_composition(table, "engine-without-rows"), ParameterError);
}

TEST_CASE("build_exposure joins profiles and rejects duplicate coordinates") {
    attribution::SerpRecord record;
    record.engine = "e1";
    record.topic = "T";
    record.day = "2025-05-15";
    attribution::SerpEntry e1;
    e1.rank = 1;
    e1.domain = "bbc.com";
    e1.normalized_rank = 0.5;
    attribution::SerpEntry e2 = e1;
    e2.rank = 2;
    e2.domain = "cnn.com";
    e2.normalized_rank = 1.0;
    record.entries = {e1, e2};

    std::map<std::string, enrichment::OutletProfile> profiles;
    enrichment::OutletProfile p;
    p.domain = "bbc.com";
    p.mbfc_bias = -1;
    p.mbfc_factuality = 4;
    profiles["bbc.com"] = p;

    const auto table = build_exposure({record}, profiles);
    REQUIRE(table.rows.size() == 2);
    CHECK(table.rows[0].mbfc_bias == -1);
    CHECK_FALSE(table.rows[1].mbfc_bias.has_value());

    auto dup = record;
    CHECK_THROWS_AS(build_exposure({record, dup}, profiles), LoadError);
}

TEST_CASE("exposure csv round trip") {
    ExposureTable table;
    auto r1 = row("e1", "Topic, with comma", "bbc.com", 1);
    r1.mbfc_bias = -1;
    r1.mbfc_factuality = 4;
    r1.iab_category = "News";
    table.rows.push_back(r1);
    table.rows.push_back(row("e2", "T", "cnn.com", 2, "2025-05-16", "poor male young left"));

    const auto path =
        (std::filesystem::temp_directory_path() / "newsaudit_tests" / "exposure_rt.csv").string();
    std::filesystem::create_directories(std::filesystem::path(path).parent_path());
    write_exposure_csv(table, path);
    const auto back = read_exposure_csv(path);
    REQUIRE(back.rows.size() == 2);
    CHECK(back.rows[0].topic == "Topic, with comma");
    CHECK(back.rows[0].mbfc_bias == -1);
    CHECK(back.rows[0].iab_category == "News");
    CHECK_FALSE(back.rows[1].mbfc_bias.has_value());
    CHECK(back.rows[1].persona == "poor male young left");
    CHECK(back.rows[1].normalized_rank == doctest::Approx(0.2));
}
