#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "newsaudit/core/error.hpp"

namespace newsaudit::metrics {

// Attention a system pays each outlet: occurrence counts over its SERPs in
// some scope (one topic or the whole run).
struct AttentionVector {
    std::string engine;
    std::string scope; // "global" or a topic name
    std::map<std::string, long> counts;
};

enum class RtdBand { negligible, moderate, strong };

// Band edges follow the conventional reading of rank-turbulence magnitudes:
// < 0.2 negligible, 0.2..0.5 moderate, > 0.5 strong.
inline RtdBand rtd_band(double magnitude) {
    const double m = std::fabs(magnitude);
    if (m < 0.2) return RtdBand::negligible;
    if (m <= 0.5) return RtdBand::moderate;
    return RtdBand::strong;
}

inline const char* rtd_band_name(RtdBand band) {
    switch (band) {
    case RtdBand::negligible: return "negligible";
    case RtdBand::moderate: return "moderate";
    case RtdBand::strong: return "strong";
    }
    return "?";
}

struct RtdContribution {
    std::string domain;
    double signed_contribution = 0.0; // positive: ranks better in system a
    RtdBand band = RtdBand::negligible;
};

struct RtdResult {
    double alpha = 1.0 / 3.0;
    std::vector<RtdContribution> per_domain; // |contribution| descending, then domain
    double total_divergence = 0.0;           // sum of |signed_contribution|
    // Dodds-style divergence with the disjoint-systems normalization; 1 when
    // the two systems share no outlet.
    double normalized_divergence = 0.0;
};

namespace detail {

// Fractional (tie-averaged) ranks by descending count. Zero counts for
// absent union members fall to a shared last-equivalent rank automatically.
inline std::map<std::string, double> fractional_ranks(const std::map<std::string, long>& counts) {
    std::vector<std::pair<std::string, long>> items(counts.begin(), counts.end());
    std::sort(items.begin(), items.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    });
    std::map<std::string, double> ranks;
    std::size_t i = 0;
    while (i < items.size()) {
        std::size_t j = i;
        while (j < items.size() && items[j].second == items[i].second) ++j;
        // positions i..j-1 share the average 1-based rank
        const double avg = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
        for (std::size_t k = i; k < j; ++k) ranks[items[k].first] = avg;
        i = j;
    }
    return ranks;
}

inline double rtd_term(double rank_a, double rank_b, double alpha) {
    const double inv_a = std::pow(rank_a, -alpha);
    const double inv_b = std::pow(rank_b, -alpha);
    return std::pow(std::fabs(inv_a - inv_b), 1.0 / (alpha + 1.0));
}

} // namespace detail

// Rank Turbulence Divergence between two attention vectors.
//
// Every union outlet is ranked within each system by descending count with
// tie-averaged fractional ranks; outlets absent from a system take the shared
// last rank of the union. The per-domain magnitude is
//
//   |r_a^-alpha - r_b^-alpha|^(1/(alpha+1))  in [0, 1],
//
// signed positive when the domain ranks better (smaller rank) in system a.
// total_divergence sums those magnitudes; normalized_divergence additionally
// divides by the disjoint-systems constant (the value the sum would take if
// the two systems shared nothing), the standard whole-system normalization.
// The (alpha+1)/alpha prefactor cancels between numerator and constant and is
// omitted from both.
inline RtdResult rank_turbulence(const AttentionVector& system_a, const AttentionVector& system_b,
                                 double alpha = 1.0 / 3.0) {
    if (!(alpha > 0.0)) throw ParameterError("rank_turbulence: alpha must be > 0");
    if (system_a.counts.empty() || system_b.counts.empty())
        throw ParameterError("rank_turbulence: empty attention vector");

    std::map<std::string, long> union_a, union_b;
    for (const auto& [d, c] : system_a.counts) {
        if (c < 0) throw ParameterError("rank_turbulence: negative count");
        union_a[d] = c;
        union_b.try_emplace(d, 0);
    }
    for (const auto& [d, c] : system_b.counts) {
        if (c < 0) throw ParameterError("rank_turbulence: negative count");
        union_b[d] = c;
        union_a.try_emplace(d, 0);
    }

    const auto ranks_a = detail::fractional_ranks(union_a);
    const auto ranks_b = detail::fractional_ranks(union_b);

    RtdResult result;
    result.alpha = alpha;
    for (const auto& [domain, ra] : ranks_a) {
        const double rb = ranks_b.at(domain);
        const double magnitude = detail::rtd_term(ra, rb, alpha);
        double contribution = 0.0;
        if (ra < rb) contribution = magnitude;
        else if (ra > rb) contribution = -magnitude;
        result.per_domain.push_back({domain, contribution, rtd_band(magnitude)});
        result.total_divergence += std::fabs(contribution);
    }
    std::sort(result.per_domain.begin(), result.per_domain.end(),
              [](const RtdContribution& a, const RtdContribution& b) {
                  const double ma = std::fabs(a.signed_contribution);
                  const double mb = std::fabs(b.signed_contribution);
                  if (ma != mb) return ma > mb;
                  return a.domain < b.domain;
              });

    // disjoint-systems normalization constant
    long n_a = 0, n_b = 0;
    for (const auto& [_, c] : system_a.counts) n_a += (c > 0);
    for (const auto& [_, c] : system_b.counts) n_b += (c > 0);
    const double last_in_b = static_cast<double>(n_b) + (static_cast<double>(n_a) + 1.0) / 2.0;
    const double last_in_a = static_cast<double>(n_a) + (static_cast<double>(n_b) + 1.0) / 2.0;
    double normalizer = 0.0;
    for (const auto& [domain, count] : system_a.counts)
        if (count > 0) normalizer += detail::rtd_term(ranks_a.at(domain), last_in_b, alpha);
    for (const auto& [domain, count] : system_b.counts)
        if (count > 0) normalizer += detail::rtd_term(last_in_a, ranks_b.at(domain), alpha);
    result.normalized_divergence = normalizer > 0.0 ? result.total_divergence / normalizer : 0.0;
    return result;
}

struct PromotedSilenced {
    std::vector<RtdContribution> promoted; // best-ranked in the LLM, descending
    std::vector<RtdContribution> silenced; // best-ranked in the baseline, descending magnitude
    RtdResult rtd;
};

// Top-k outlets an LLM surfaces that the baseline buries, and vice versa.
// Deterministic: magnitude descending, ties broken by domain name.
inline PromotedSilenced promoted_silenced(const AttentionVector& llm,
                                          const AttentionVector& baseline, double alpha = 1.0 / 3.0,
                                          std::size_t k = 10) {
    PromotedSilenced out;
    out.rtd = rank_turbulence(llm, baseline, alpha);
    for (const auto& c : out.rtd.per_domain) {
        if (c.signed_contribution > 0.0 && out.promoted.size() < k) out.promoted.push_back(c);
        else if (c.signed_contribution < 0.0 && out.silenced.size() < k) out.silenced.push_back(c);
    }
    return out;
}

} // namespace newsaudit::metrics
