// Independent reference implementations used as test oracles. These stay
// deliberately naive (direct formula transcriptions, O(n^2) where the library
// is O(n log n)) and share no code with the implementations they check.
#pragma once

#include <cmath>
#include <map>
#include <string>
#include <vector>

namespace oracle {

// Gini by the literal double sum: sum_ij |x_i - x_j| / (2 n^2 mean).
inline double gini_double_sum(const std::vector<double>& x) {
    const std::size_t n = x.size();
    double mean = 0.0;
    for (double v : x) mean += v;
    mean /= static_cast<double>(n);
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) acc += std::fabs(x[i] - x[j]);
    return acc / (2.0 * static_cast<double>(n) * static_cast<double>(n) * mean);
}

// Fractional rank of `domain` among `counts` by the direct definition:
// (# strictly greater) + (1 + # tied) / 2.
inline double fractional_rank(const std::map<std::string, long>& counts,
                              const std::string& domain) {
    const long c = counts.at(domain);
    long greater = 0, tied = 0;
    for (const auto& [d, v] : counts) {
        if (v > c) ++greater;
        else if (v == c) ++tied;
    }
    return static_cast<double>(greater) + (1.0 + static_cast<double>(tied)) / 2.0;
}

struct RtdReference {
    std::map<std::string, double> signed_contribution;
    double total = 0.0;
    double normalized = 0.0;
};

// Direct evaluation of the rank-turbulence construction, including the
// disjoint-systems normalization constant.
inline RtdReference rtd_reference(const std::map<std::string, long>& a,
                                  const std::map<std::string, long>& b, double alpha) {
    std::map<std::string, long> ua = a, ub = b;
    for (const auto& [d, _] : a) ub.try_emplace(d, 0);
    for (const auto& [d, _] : b) ua.try_emplace(d, 0);

    auto term = [alpha](double ra, double rb) {
        return std::pow(std::fabs(std::pow(ra, -alpha) - std::pow(rb, -alpha)),
                        1.0 / (alpha + 1.0));
    };

    RtdReference ref;
    for (const auto& [d, _] : ua) {
        const double ra = fractional_rank(ua, d);
        const double rb = fractional_rank(ub, d);
        const double m = term(ra, rb);
        double s = 0.0;
        if (ra < rb) s = m;
        else if (ra > rb) s = -m;
        ref.signed_contribution[d] = s;
        ref.total += std::fabs(s);
    }

    std::map<std::string, long> only_a, only_b;
    for (const auto& [d, c] : a)
        if (c > 0) only_a[d] = c;
    for (const auto& [d, c] : b)
        if (c > 0) only_b[d] = c;
    const double na = static_cast<double>(only_a.size());
    const double nb = static_cast<double>(only_b.size());
    const double last_b = nb + (na + 1.0) / 2.0;
    const double last_a = na + (nb + 1.0) / 2.0;
    double norm = 0.0;
    for (const auto& [d, _] : only_a) norm += term(fractional_rank(only_a, d), last_b);
    for (const auto& [d, _] : only_b) norm += term(last_a, fractional_rank(only_b, d));
    ref.normalized = norm > 0.0 ? ref.total / norm : 0.0;
    return ref;
}

} // namespace oracle
