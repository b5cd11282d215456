#pragma once

// Local hotspot statistic and simple regression.

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <stdexcept>
#include <vector>

#include "hexgrid.hpp"

namespace svicov {

enum class HotspotClass { hot, cold, neutral };

inline const char* to_string(HotspotClass c) {
    switch (c) {
        case HotspotClass::hot: return "hot";
        case HotspotClass::cold: return "cold";
        case HotspotClass::neutral: return "neutral";
    }
    return "?";
}

struct GiStar {
    CellId cell;
    std::optional<double> z;  // empty when the values have zero spread
    HotspotClass classification = HotspotClass::neutral;
    HotspotClass rank_class = HotspotClass::neutral;  // top / bottom 5% by z
};

/// Getis-Ord Gi* with binary weights. `neighbors[c]` must include c itself;
/// neighbours without a value are ignored.
inline std::vector<GiStar> getis_ord_gi_star(const std::map<CellId, double>& values,
                                             const std::map<CellId, std::set<CellId>>& neighbors,
                                             double z_cutoff = 1.96, double rank_fraction = 0.05) {
    const auto n = static_cast<double>(values.size());
    if (values.size() < 2) throw std::invalid_argument("Gi* needs at least two cells");
    double sum = 0.0;
    for (const auto& [c, v] : values) sum += v;
    const double mean = sum / n;
    double ss = 0.0;
    for (const auto& [c, v] : values) ss += (v - mean) * (v - mean);
    const double s = std::sqrt(ss / n);

    std::vector<GiStar> out;
    out.reserve(values.size());
    // Relative guard: float noise on equal values must not create hotspots.
    const bool flat = !(s > 1e-12 * std::max(1.0, std::abs(mean)));
    for (const auto& [cell, v] : values) {
        GiStar g{cell, std::nullopt};
        if (!flat) {
            double wx = 0.0, w = 0.0;
            if (auto it = neighbors.find(cell); it != neighbors.end()) {
                for (const auto& nb : it->second) {
                    auto jt = values.find(nb);
                    if (jt == values.end()) continue;
                    wx += jt->second;
                    w += 1.0;
                }
            }
            const double den = s * std::sqrt((n * w - w * w) / (n - 1.0));
            if (den > 0.0) g.z = (wx - mean * w) / den;
            else g.z = 0.0;
            if (std::abs(*g.z) >= z_cutoff) g.classification = *g.z > 0 ? HotspotClass::hot : HotspotClass::cold;
        }
        out.push_back(g);
    }

    // Rank view: the top and bottom `rank_fraction` of defined z scores.
    std::vector<std::size_t> order;
    for (std::size_t i = 0; i < out.size(); ++i)
        if (out[i].z) order.push_back(i);
    if (!order.empty()) {
        std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return *out[a].z < *out[b].z; });
        const auto k = static_cast<std::size_t>(std::ceil(rank_fraction * static_cast<double>(order.size())));
        for (std::size_t i = 0; i < k && i < order.size(); ++i) {
            out[order[i]].rank_class = HotspotClass::cold;
            out[order[order.size() - 1 - i]].rank_class = HotspotClass::hot;
        }
    }
    return out;
}

/// Self plus the six adjacent hexes, restricted to cells in `cells`.
inline std::map<CellId, std::set<CellId>> hex_contiguity(const std::set<CellId>& cells, const HexGrid& g) {
    std::map<CellId, std::set<CellId>> out;
    for (const auto& c : cells) {
        auto& nb = out[c];
        nb.insert(c);
        for (auto n : g.neighbors(c))
            if (cells.count(n)) nb.insert(n);
    }
    return out;
}

struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;
    double pearson_r = 0.0;
};

inline LinearFit ols_fit(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw std::invalid_argument("ols_fit: x and y differ in length");
    if (x.size() < 2) throw std::invalid_argument("ols_fit: need at least two points");
    const auto n = static_cast<double>(x.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    if (!(sxx > 0.0)) throw std::invalid_argument("ols_fit: x has zero variance");
    LinearFit f;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    f.pearson_r = syy > 0.0 ? std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0) : 0.0;
    return f;
}

/// Linear-interpolation quantile (numpy's default) of unsorted data.
inline double quantile(std::vector<double> v, double p) {
    if (v.empty()) throw std::invalid_argument("quantile of empty data");
    std::sort(v.begin(), v.end());
    const double pos = p * static_cast<double>(v.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, v.size() - 1);
    return v[lo] + (v[hi] - v[lo]) * (pos - static_cast<double>(lo));
}

}  // namespace svicov
