#pragma once

// Scene-level coverage: sample facades, resolve sightlines per coarse hex
// cell (observers and occluders taken from a buffered neighbourhood),
// apply the segmentation filter and aggregate building indicators.

#include <algorithm>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hexgrid.hpp"
#include "indicators.hpp"
#include "point_grid.hpp"
#include "segmentation.hpp"
#include "sightline.hpp"

namespace svicov {

struct Scene {
    std::vector<Footprint> footprints;
    std::vector<Road> roads;
    std::vector<SviPoint> svi;
    std::map<std::string, SegmentationBins> bins;
    std::map<CellId, double> population;  // fine cell -> persons
    std::string crs_note;
};

struct CoverageParams {
    VisibilityParams vis;
    double spacing = 2.0;
    double threshold = 0.5;
    MissingPolicy missing = MissingPolicy::keep;
    double bin_origin_offset = 0.0;
    bool geometric_only = false;
    double buffer = 200.0;        // coarse-cell neighbourhood for observers and occluders
    double coarse_edge = 1400.0;  // 0 disables partitioning
    Point2 grid_origin{};
    unsigned workers = 1;
};

struct CoverageResult {
    std::vector<FacadeSample> samples;
    std::vector<SightLine> lines;
    std::vector<BuildingCoverage> buildings;
    std::size_t svi_inside_footprints = 0;
    bool filtered = false;  // true when segmentation bins were applied
};

inline std::vector<FacadeSample> sample_all(std::span<const Footprint> footprints, double spacing) {
    std::vector<FacadeSample> out;
    for (const auto& fp : footprints) {
        auto s = sample_boundary(fp, spacing);
        out.insert(out.end(), std::make_move_iterator(s.begin()), std::make_move_iterator(s.end()));
    }
    return out;
}

/// Geometric sightlines over the whole scene with one index.
inline std::vector<SightLine> sightlines_global(std::span<const Footprint> footprints,
                                                std::span<const FacadeSample> samples, std::span<const SviPoint> svi,
                                                const VisibilityParams& vis, unsigned workers = 1) {
    const SceneIndex index({footprints.begin(), footprints.end()}, {samples.begin(), samples.end()}, vis.radius);
    return compute_all_sightlines(index, svi, vis, workers);
}

/// Same result as sightlines_global when buffer >= radius, computed one
/// coarse hex at a time: each cell's samples are observed from SVI points
/// and blocked by footprints within `buffer` of the cell.
inline std::vector<SightLine> sightlines_partitioned(std::span<const Footprint> footprints,
                                                     std::span<const FacadeSample> samples,
                                                     std::span<const SviPoint> svi, const VisibilityParams& vis,
                                                     const HexGrid& coarse, double buffer, unsigned workers = 1) {
    std::map<CellId, std::vector<std::size_t>> samples_by_cell;
    for (std::size_t i = 0; i < samples.size(); ++i) samples_by_cell[cell_of(samples[i].position, coarse)].push_back(i);

    std::vector<Point2> svi_pos;
    svi_pos.reserve(svi.size());
    for (const auto& s : svi) svi_pos.push_back(s.position);
    const PointGrid svi_grid(svi_pos, std::max(buffer, 1.0));

    std::vector<SightLine> out;
    for (const auto& [cell, members] : samples_by_cell) {
        const auto hex = coarse.corners(cell);
        const Box hex_box = bounds_of(hex);
        const Box reach = hex_box.inflated(buffer);

        std::vector<std::uint32_t> fp_global;
        std::vector<Footprint> local_fps;
        for (std::uint32_t f = 0; f < footprints.size(); ++f) {
            if (!footprints[f].box.intersects(reach)) continue;
            if (ring_ring_distance(footprints[f].exterior, hex) > buffer) continue;
            fp_global.push_back(f);
            local_fps.push_back(footprints[f]);
        }
        std::vector<FacadeSample> local_samples;
        local_samples.reserve(members.size());
        for (auto i : members) local_samples.push_back(samples[i]);

        std::vector<std::uint32_t> svi_global;
        std::vector<SviPoint> local_svi;
        for (auto i : svi_grid.in_box(reach)) {
            if (point_ring_distance(svi_pos[i], hex) > buffer) continue;
            svi_global.push_back(static_cast<std::uint32_t>(i));
            local_svi.push_back(svi[i]);
        }
        if (local_svi.empty()) continue;

        const SceneIndex index(std::move(local_fps), std::move(local_samples), vis.radius);
        for (auto line : compute_all_sightlines(index, local_svi, vis, workers)) {
            line.svi = svi_global[line.svi];
            line.building = fp_global[line.building];
            out.push_back(line);
        }
    }
    std::sort(out.begin(), out.end(), key_less);
    return out;
}

inline CoverageResult compute_coverage(const Scene& scene, const CoverageParams& p) {
    CoverageResult r;
    r.samples = sample_all(scene.footprints, p.spacing);
    if (p.coarse_edge > 0.0) {
        const HexGrid coarse(p.coarse_edge, p.grid_origin, GridLevel::coarse);
        r.lines = sightlines_partitioned(scene.footprints, r.samples, scene.svi, p.vis, coarse,
                                         std::max(p.buffer, p.vis.radius), p.workers);
    } else {
        r.lines = sightlines_global(scene.footprints, r.samples, scene.svi, p.vis, p.workers);
    }
    if (!p.geometric_only && !scene.bins.empty()) {
        r.lines = apply_filter(std::move(r.lines), scene.svi, scene.bins, p.threshold, p.missing, p.bin_origin_offset);
        r.filtered = true;
    }
    r.buildings = aggregate_building_coverage(r.lines, r.samples, scene.footprints);
    assign_size_quintiles(r.buildings);
    if (!scene.footprints.empty()) {
        const SceneIndex probe(scene.footprints, {}, std::max(p.vis.radius, 1.0));
        for (const auto& s : scene.svi)
            if (svi_inside_footprint(probe, s.position)) ++r.svi_inside_footprints;
    }
    return r;
}

}  // namespace svicov
