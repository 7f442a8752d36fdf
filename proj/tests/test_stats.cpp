#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "newsaudit/numeric/special.hpp"
#include "newsaudit/stats/anova.hpp"
#include "newsaudit/stats/tukey.hpp"

using namespace newsaudit;
using namespace newsaudit::stats;
namespace num = newsaudit::numeric;

TEST_CASE("regularized incomplete beta: analytic anchors") {
    // I_x(1,1) = x; I_x(a,1) = x^a; I_x(1,b) = 1-(1-x)^b
    for (double x : {0.1, 0.3, 0.5, 0.9}) {
        CHECK(num::regularized_incomplete_beta(x, 1, 1) == doctest::Approx(x).epsilon(1e-14));
        CHECK(num::regularized_incomplete_beta(x, 4.5, 1) ==
              doctest::Approx(std::pow(x, 4.5)).epsilon(1e-13));
        CHECK(num::regularized_incomplete_beta(x, 1, 3.0) ==
              doctest::Approx(1.0 - std::pow(1.0 - x, 3.0)).epsilon(1e-13));
    }
    CHECK(num::regularized_incomplete_beta(0.5, 2.5, 2.5) == doctest::Approx(0.5).epsilon(1e-13));
    CHECK(num::regularized_incomplete_beta(0.0, 2, 3) == 0.0);
    CHECK(num::regularized_incomplete_beta(1.0, 2, 3) == 1.0);
}

TEST_CASE("normal cdf basics") {
    CHECK(num::normal_cdf(0.0) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(num::normal_cdf(1.959963984540054) == doctest::Approx(0.975).epsilon(1e-12));
    CHECK(num::normal_two_sided_p(1.959963984540054) == doctest::Approx(0.05).epsilon(1e-10));
}

TEST_CASE("anova: identical groups give F = 0, p = 1") {
    const auto res = anova_oneway({1, 2, 3, 1, 2, 3}, {"a", "a", "a", "b", "b", "b"});
    CHECK(res.f_stat == 0.0);
    CHECK(res.p_value == 1.0);
    CHECK(res.group_means.at("a") == doctest::Approx(2.0));
}

TEST_CASE("anova: hand-computed fixture is exact") {
    // groups {1,2,3,4}, {2,3,4,5}, {4,5,6,7}:
    // SSB = 56/3, SSW = 15, df = (2, 9), F = (28/3)/(5/3) = 5.6 exactly;
    // with df_between = 2 the upper tail has the closed form
    // (df2/(df2 + df1 F))^(df2/2) = (9/20.2)^4.5.
    GroupedSample sample;
    for (double v : {1, 2, 3, 4}) sample.values.push_back(v), sample.groups.push_back("g1");
    for (double v : {2, 3, 4, 5}) sample.values.push_back(v), sample.groups.push_back("g2");
    for (double v : {4, 5, 6, 7}) sample.values.push_back(v), sample.groups.push_back("g3");
    const auto res = anova_oneway(sample);
    CHECK(res.df_between == 2);
    CHECK(res.df_within == 9);
    CHECK(std::fabs(res.f_stat - 5.6) <= 1e-10);
    CHECK(std::fabs(res.p_value - std::pow(9.0 / 20.2, 4.5)) <= 1e-8);
}

TEST_CASE("anova: 4 engines x 24 topics gives df (3, 92)") {
    GroupedSample sample;
    std::mt19937 rng(42);
    std::normal_distribution<double> noise(0.0, 1.0);
    const char* engines[] = {"claude", "gemini", "gpt", "google_news"};
    for (int e = 0; e < 4; ++e)
        for (int t = 0; t < 24; ++t) {
            sample.values.push_back(10.0 + 2.0 * e + noise(rng));
            sample.groups.push_back(engines[e]);
        }
    const auto res = anova_oneway(sample);
    CHECK(res.df_between == 3);
    CHECK(res.df_within == 92);
}

TEST_CASE("anova: degenerate inputs error out") {
    CHECK_THROWS_AS(anova_oneway({1, 2, 3}, {"a", "a", "a"}), ParameterError);
    CHECK_THROWS_AS(anova_oneway({1, 2}, {"a", "b"}), ParameterError);
    CHECK_THROWS_AS(anova_oneway({1, 1, 2, 2}, {"a", "a", "b", "b"}), ParameterError);
    CHECK_THROWS_AS(anova_oneway({1, 2, 3}, {"a", "a"}), ParameterError);
}

TEST_CASE("F p-value decreases as F grows at fixed dfs") {
    double prev = 1.0;
    for (double f : {0.1, 0.5, 1.0, 2.0, 4.0, 8.0, 16.0, 64.0}) {
        const double p = num::f_sf(f, 3, 92);
        CHECK(p < prev);
        prev = p;
    }
}

TEST_CASE("anova identity: SS_total = SS_between + SS_within") {
    std::mt19937 rng(555);
    std::normal_distribution<double> noise(0.0, 2.0);
    GroupedSample sample;
    for (int g = 0; g < 5; ++g)
        for (int i = 0; i < 8; ++i) {
            sample.values.push_back(g + noise(rng));
            sample.groups.push_back("g" + std::to_string(g));
        }
    double grand = 0.0;
    for (double v : sample.values) grand += v;
    grand /= sample.values.size();
    double ss_total = 0.0;
    for (double v : sample.values) ss_total += (v - grand) * (v - grand);

    const auto res = anova_oneway(sample);
    // reconstruct SSB and SSW from the reported statistics
    const double msw_like = ss_total; // reference only
    (void)msw_like;
    double ssb = 0.0;
    std::map<std::string, long> ns;
    for (const auto& g : sample.groups) ++ns[g];
    for (const auto& [g, mean] : res.group_means) ssb += ns[g] * (mean - grand) * (mean - grand);
    const double ssw = res.f_stat > 0 ? ssb / res.df_between * res.df_within / res.f_stat : 0.0;
    CHECK(std::fabs(ss_total - (ssb + ssw)) <= 1e-9 * std::max(1.0, std::fabs(ss_total)));
}

TEST_CASE("studentized range cdf: frozen reference values") {
    // references computed with SciPy 1.15.3 studentized_range.cdf
    struct Ref {
        double q;
        int k;
        double df;
        double p;
    };
    const Ref refs[] = {
        {3.5, 3, 10, 0.922896689162}, {2.0, 2, 5, 0.783562770730},
        {4.0, 4, 16, 0.946783222637}, {1.0, 2, 92, 0.518712618788},
        {0.5, 3, 7, 0.065948721889},  {6.5, 2, 2, 0.955779008722},
    };
    for (const auto& r : refs)
        CHECK(studentized_range_cdf(r.q, r.k, r.df) == doctest::Approx(r.p).epsilon(5e-7));
    CHECK(studentized_range_cdf(0.0, 3, 10) == 0.0);
    CHECK(studentized_range_cdf(-1.0, 3, 10) == 0.0);
}

TEST_CASE("studentized range quantile inverts the cdf") {
    // q_crit(0.05, 4, 16) = 4.0460930606 (SciPy reference)
    CHECK(studentized_range_quantile(0.95, 4, 16) == doctest::Approx(4.0460930606).epsilon(1e-6));
    const double q = studentized_range_quantile(0.9, 3, 20);
    CHECK(studentized_range_cdf(q, 3, 20) == doctest::Approx(0.9).epsilon(1e-8));
}

TEST_CASE("tukey hsd on the plasma etch worked example") {
    // Montgomery's plasma etch-rate experiment (power 160/180/200/220 W,
    // n = 5 each). Reference q, adjusted p, and CI bounds computed with
    // SciPy 1.15.3 (stats.tukey_hsd / studentized_range).
    GroupedSample sample;
    auto add = [&](const char* g, std::initializer_list<double> values) {
        for (double v : values) {
            sample.values.push_back(v);
            sample.groups.push_back(g);
        }
    };
    add("p160", {575, 542, 530, 539, 570});
    add("p180", {565, 593, 590, 579, 610});
    add("p200", {600, 651, 610, 637, 629});
    add("p220", {725, 700, 715, 685, 710});

    const auto anova = anova_oneway(sample);
    CHECK(anova.f_stat == doctest::Approx(66.797073219459).epsilon(1e-10));
    CHECK(anova.p_value == doctest::Approx(2.88286590849327e-09).epsilon(1e-6));

    const auto tukey = tukey_hsd(sample, 0.05);
    CHECK(tukey.df_within == 16);
    CHECK(tukey.ms_within == doctest::Approx(333.7).epsilon(1e-12));
    CHECK(tukey.q_critical == doctest::Approx(4.0460930606).epsilon(1e-6));

    struct Ref {
        const char *a, *b;
        double diff, q, p, lo, hi;
    };
    const Ref refs[] = {
        {"p160", "p180", -36.2, 4.4311399773, 0.029427945616, -69.25437642, -3.14562358},
        {"p160", "p200", -74.2, 9.0826128816, 0.000045486126, -107.25437642, -41.14562358},
        {"p160", "p220", -155.8, 19.0710389078, 0.000000002091, -188.85437642, -122.74562358},
        {"p180", "p200", -38.0, 4.6514729043, 0.021599480302, -71.05437642, -4.94562358},
        {"p180", "p220", -119.6, 14.6398989305, 0.000000094241, -152.65437642, -86.54562358},
        {"p200", "p220", -81.6, 9.9884260262, 0.000014597780, -114.65437642, -48.54562358},
    };
    REQUIRE(tukey.pairs.size() == 6);
    for (const auto& ref : refs) {
        const TukeyPair* found = nullptr;
        for (const auto& pair : tukey.pairs)
            if (pair.group_a == ref.a && pair.group_b == ref.b) found = &pair;
        REQUIRE(found != nullptr);
        CHECK(std::fabs(found->mean_diff - ref.diff) <= 1e-10);
        CHECK(std::fabs(found->q_stat - ref.q) <= 1e-4);
        CHECK(std::fabs(found->p_adjusted - ref.p) <= 1e-4);
        CHECK(std::fabs(found->ci_low - ref.lo) <= 1e-4);
        CHECK(std::fabs(found->ci_high - ref.hi) <= 1e-4);
        CHECK(found->ci_low <= found->mean_diff);
        CHECK(found->mean_diff <= found->ci_high);
    }
}

TEST_CASE("tukey: identical groups yield p ~ 1 and CIs containing zero") {
    GroupedSample sample;
    for (const char* g : {"a", "b", "c"})
        for (double v : {1.0, 2.0, 3.0, 4.0}) {
            sample.values.push_back(v);
            sample.groups.push_back(g);
        }
    const auto tukey = tukey_hsd(sample, 0.05);
    for (const auto& pair : tukey.pairs) {
        CHECK(pair.p_adjusted == doctest::Approx(1.0).epsilon(1e-9));
        CHECK(pair.ci_low < 0.0);
        CHECK(pair.ci_high > 0.0);
        CHECK(pair.mean_diff == 0.0);
    }
}

TEST_CASE("tukey k=2 identity: q = sqrt(2)|t| reproduces the pooled t-test p") {
    std::mt19937 rng(777);
    std::normal_distribution<double> noise(0.0, 1.0);
    std::uniform_int_distribution<int> n_dist(3, 15);
    for (int trial = 0; trial < 50; ++trial) {
        GroupedSample sample;
        const int n1 = n_dist(rng), n2 = n_dist(rng);
        const double shift = (trial % 5) * 0.4;
        double s1 = 0, s2 = 0;
        for (int i = 0; i < n1; ++i) {
            sample.values.push_back(noise(rng));
            s1 += sample.values.back();
            sample.groups.push_back("a");
        }
        for (int i = 0; i < n2; ++i) {
            sample.values.push_back(shift + noise(rng));
            s2 += sample.values.back();
            sample.groups.push_back("b");
        }
        const auto tukey = tukey_hsd(sample, 0.05);
        REQUIRE(tukey.pairs.size() == 1);
        const auto& pair = tukey.pairs[0];

        // two-sample pooled-variance t statistic, independently assembled
        const double m1 = s1 / n1, m2 = s2 / n2;
        double ss = 0.0;
        for (int i = 0; i < n1; ++i) ss += std::pow(sample.values[i] - m1, 2);
        for (int i = 0; i < n2; ++i) ss += std::pow(sample.values[n1 + i] - m2, 2);
        const int df = n1 + n2 - 2;
        const double sp2 = ss / df;
        const double t = (m1 - m2) / std::sqrt(sp2 * (1.0 / n1 + 1.0 / n2));
        CHECK(pair.q_stat == doctest::Approx(std::sqrt(2.0) * std::fabs(t)).epsilon(1e-12));
        const double p_t = num::t_two_sided_p(t, df);
        CHECK(std::fabs(pair.p_adjusted - p_t) <= 1e-6);
    }
}

TEST_CASE("tukey input validation") {
    GroupedSample constant;
    for (const char* g : {"a", "b"})
        for (int i = 0; i < 3; ++i) {
            constant.values.push_back(g[0] == 'a' ? 1.0 : 2.0);
            constant.groups.push_back(g);
        }
    CHECK_THROWS_AS(tukey_hsd(constant, 0.05), ParameterError); // zero within-variance
    GroupedSample ok;
    ok.values = {1, 2, 3, 4};
    ok.groups = {"a", "a", "b", "b"};
    CHECK_THROWS_AS(tukey_hsd(ok, 0.0), ParameterError);
    CHECK_THROWS_AS(tukey_hsd(ok, 1.0), ParameterError);
}
