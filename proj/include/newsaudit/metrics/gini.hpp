#pragma once

#include <algorithm>
#include <cmath>
#include <utility>
#include <vector>

#include "newsaudit/core/error.hpp"

namespace newsaudit::metrics {

// Gini index of an attention distribution:
//
//   G = sum_i sum_j |x_i - x_j| / (2 n^2 xbar)
//
// computed in the O(n log n) sorted form, which is algebraically identical to
// the double sum: for ascending x_(1..n),
//   sum_i sum_j |x_i - x_j| = 2 * sum_i (2i - n - 1) x_(i).
// 0 = uniform exposure; (n-1)/n = everything on one outlet.
inline double gini(std::vector<double> counts) {
    if (counts.empty()) throw ParameterError("gini: empty counts");
    double total = 0.0;
    for (double c : counts) {
        if (c < 0.0 || !std::isfinite(c)) throw ParameterError("gini: counts must be finite and >= 0");
        total += c;
    }
    if (total <= 0.0) throw ParameterError("gini: all counts are zero");
    std::sort(counts.begin(), counts.end());
    const double n = static_cast<double>(counts.size());
    double weighted = 0.0;
    for (std::size_t i = 0; i < counts.size(); ++i)
        weighted += (2.0 * static_cast<double>(i + 1) - n - 1.0) * counts[i];
    return weighted / (n * total);
}

// Lorenz curve points: (0,0) then cumulative (population share, attention
// share) over ascending counts, ending at (1,1). Piecewise-linear area under
// these points relates back to the index as G = 1 - 2*AUC.
inline std::vector<std::pair<double, double>> lorenz(std::vector<double> counts) {
    if (counts.empty()) throw ParameterError("lorenz: empty counts");
    double total = 0.0;
    for (double c : counts) {
        if (c < 0.0 || !std::isfinite(c))
            throw ParameterError("lorenz: counts must be finite and >= 0");
        total += c;
    }
    if (total <= 0.0) throw ParameterError("lorenz: all counts are zero");
    std::sort(counts.begin(), counts.end());
    std::vector<std::pair<double, double>> points;
    points.reserve(counts.size() + 1);
    points.emplace_back(0.0, 0.0);
    const double n = static_cast<double>(counts.size());
    double cum = 0.0;
    for (std::size_t i = 0; i < counts.size(); ++i) {
        cum += counts[i];
        points.emplace_back(static_cast<double>(i + 1) / n, cum / total);
    }
    points.back().second = 1.0; // pin the endpoint against rounding drift
    return points;
}

// Trapezoid area under a Lorenz curve (used by the consistency checks and
// the plot-data emitters).
inline double lorenz_auc(const std::vector<std::pair<double, double>>& points) {
    double area = 0.0;
    for (std::size_t i = 1; i < points.size(); ++i)
        area += (points[i].first - points[i - 1].first) *
                (points[i].second + points[i - 1].second) * 0.5;
    return area;
}

} // namespace newsaudit::metrics
