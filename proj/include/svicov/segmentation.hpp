#pragma once

// Image-content check for geometric sightlines. Panoramas are split into
// 12 heading-anchored 30 degree bins; each bin carries per-class pixel
// areas (Cityscapes label ids) produced by an upstream segmentation step.

#include <array>
#include <cmath>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sightline.hpp"

namespace svicov {

inline constexpr int kBinCount = 12;
inline constexpr double kBinWidthDeg = 360.0 / kBinCount;

using ClassAreas = std::map<int, double>;

struct SegmentationBins {
    std::string svi_id;
    std::array<ClassAreas, kBinCount> bins;
};

struct BinProportion {
    std::string svi_id;
    int bin_index = 0;
    std::optional<double> p_building;  // empty when no vertical content
};

namespace cityscapes {
// building, wall, fence
inline bool is_building_element(int id) { return id == 11 || id == 12 || id == 13; }
// void 0-6, flat 7-10, sky 23
inline bool is_excluded(int id) { return (id >= 0 && id <= 10) || id == 23; }
}  // namespace cityscapes

inline std::optional<double> building_proportion(const ClassAreas& areas) {
    double num = 0.0, den = 0.0;
    for (const auto& [id, area] : areas) {
        if (cityscapes::is_building_element(id)) num += area;
        if (!cityscapes::is_excluded(id)) den += area;
    }
    if (!(den > 0.0)) return std::nullopt;
    return num / den;
}

/// Bin 0 starts at the heading plus `origin_offset` degrees.
inline int bin_of_bearing(double line_bearing, double heading, double origin_offset = 0.0) {
    double rel = std::fmod(line_bearing - heading - origin_offset, 360.0);
    if (rel < 0.0) rel += 360.0;
    int bin = static_cast<int>(std::floor(rel / kBinWidthDeg));
    // fmod can leave rel a hair under 360 after the shift.
    return bin >= kBinCount ? kBinCount - 1 : bin;
}

enum class MissingPolicy { keep, drop };

inline std::vector<BinProportion> bin_proportions(const SegmentationBins& b) {
    std::vector<BinProportion> out;
    for (int i = 0; i < kBinCount; ++i) out.push_back({b.svi_id, i, building_proportion(b.bins[i])});
    return out;
}

/// Demotes visible lines whose bin proportion is below `threshold` (strict)
/// or undefined. SVI points without bins follow `missing`: keep leaves the
/// line alone, drop demotes it.
inline std::vector<SightLine> apply_filter(std::vector<SightLine> lines, std::span<const SviPoint> svis,
                                           const std::map<std::string, SegmentationBins>& bins_by_svi,
                                           double threshold, MissingPolicy missing = MissingPolicy::keep,
                                           double bin_origin_offset = 0.0) {
    if (!(threshold >= 0.0 && threshold <= 1.0)) throw std::invalid_argument("threshold must be in [0, 1]");
    // Per-SVI pass/fail table; empty optional = no bins for that point.
    std::vector<std::optional<std::array<bool, kBinCount>>> pass(svis.size());
    for (std::size_t i = 0; i < svis.size(); ++i) {
        auto it = bins_by_svi.find(svis[i].id);
        if (it == bins_by_svi.end()) continue;
        std::array<bool, kBinCount> ok{};
        for (int b = 0; b < kBinCount; ++b) {
            const auto p = building_proportion(it->second.bins[b]);
            ok[b] = p.has_value() && !(*p < threshold);
        }
        pass[i] = ok;
    }
    for (auto& line : lines) {
        if (line.status != LineStatus::visible) continue;
        const auto& table = pass.at(line.svi);
        if (!table) {
            if (missing == MissingPolicy::drop) line.status = LineStatus::segmentation_filtered;
            continue;
        }
        if (!(*table)[bin_of_bearing(line.bearing, svis[line.svi].heading, bin_origin_offset)])
            line.status = LineStatus::segmentation_filtered;
    }
    return lines;
}

}  // namespace svicov
