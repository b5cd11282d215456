#pragma once

// Seeded synthetic city: a lattice of street blocks with rectangular
// buildings on a slot grid inside each block, road centrelines on the
// block boundaries and SVI points along the roads.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "pipeline.hpp"

namespace svicov {

struct SynthConfig {
    std::uint64_t seed = 42;
    int block_rows = 4;
    int block_cols = 4;
    double block_size = 100.0;  // centreline spacing of the street lattice
    double building_density = 0.6;
    double road_width = 12.0;
    double setback = 2.0;
    double building_size_min = 8.0;
    double building_size_max = 25.0;
    double svi_spacing = 10.0;
    double core_density_boost = 1.0;
    bool with_bins = true;
    bool with_population = true;
    double fine_edge = 174.0;  // cell size used to key the population table
};

struct SynthCity {
    Scene scene;
    std::vector<bool> footprint_in_core;  // parallel to scene.footprints
};

namespace detail {

// Uniform [0, 1) from the top 53 bits; keeps streams identical across
// standard library implementations.
inline double unit(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }
inline double uniform(std::mt19937_64& rng, double lo, double hi) { return lo + (hi - lo) * unit(rng); }

inline const char* synth_osm_tag(double u) {
    // Residential-heavy mix with a tail of commercial and civic uses.
    if (u < 0.45) return "house";
    if (u < 0.60) return "apartments";
    if (u < 0.70) return "retail";
    if (u < 0.80) return "office";
    if (u < 0.85) return "commercial;detached";
    if (u < 0.90) return "school";
    if (u < 0.93) return "train_station";
    if (u < 0.96) return "yes";
    return "";
}

}  // namespace detail

inline SynthCity generate_city(const SynthConfig& c, const TypeMapping& mapping = TypeMapping::defaults()) {
    if (c.block_rows <= 0 || c.block_cols <= 0) throw std::invalid_argument("synthetic city needs at least one block");
    if (!(c.block_size > c.road_width + 2.0 * c.setback)) throw std::invalid_argument("blocks too small for roads");
    if (!(c.svi_spacing > 0.0)) throw std::invalid_argument("svi spacing must be positive");
    if (c.building_density < 0.0 || c.building_density > 1.0) throw std::invalid_argument("density must be in [0, 1]");
    if (!(c.building_size_min > 0.0 && c.building_size_max >= c.building_size_min))
        throw std::invalid_argument("bad building size range");
    if (!(c.core_density_boost > 0.0)) throw std::invalid_argument("core density boost must be positive");

    std::mt19937_64 rng(c.seed);
    SynthCity city;
    Scene& scene = city.scene;
    scene.crs_note = "synthetic planar metres";
    const double B = c.block_size;

    // Core: the middle third of block rows and columns (at least one each).
    auto core_range = [](int n) {
        const int k = std::max(1, (n + 2) / 3);
        const int start = (n - k) / 2;
        return std::pair{start, start + k};
    };
    const auto [r0, r1] = core_range(c.block_rows);
    const auto [c0, c1] = core_range(c.block_cols);

    const double inner = B - c.road_width - 2.0 * c.setback;
    const double slot_target = c.building_size_max + 2.0;
    const int base_slots = std::max(1, static_cast<int>(std::floor(inner / slot_target)));
    int bid = 0;
    for (int br = 0; br < c.block_rows; ++br) {
        for (int bc = 0; bc < c.block_cols; ++bc) {
            const bool core = br >= r0 && br < r1 && bc >= c0 && bc < c1;
            const int cols = core ? std::max(1, static_cast<int>(std::lround(base_slots * c.core_density_boost))) : base_slots;
            const int rows = base_slots;
            const double x0 = bc * B + c.road_width / 2.0 + c.setback;
            const double y0 = br * B + c.road_width / 2.0 + c.setback;
            const double sw = inner / cols, sh = inner / rows;
            for (int sr = 0; sr < rows; ++sr) {
                for (int sc = 0; sc < cols; ++sc) {
                    // Draw every variate so the stream does not depend on occupancy.
                    const double occ = detail::unit(rng);
                    const double w_raw = detail::uniform(rng, c.building_size_min, c.building_size_max);
                    const double h_raw = detail::uniform(rng, c.building_size_min, c.building_size_max);
                    const double jx = detail::unit(rng), jy = detail::unit(rng);
                    const double tag_u = detail::unit(rng);
                    if (!(occ < c.building_density)) continue;
                    const double w = std::min(w_raw, sw - 2.0), h = std::min(h_raw, sh - 2.0);
                    if (w <= 0.5 || h <= 0.5) continue;
                    const double bx = x0 + sc * sw + 1.0 + jx * (sw - 2.0 - w);
                    const double by = y0 + sr * sh + 1.0 + jy * (sh - 2.0 - h);
                    const std::string osm = detail::synth_osm_tag(tag_u);
                    Footprint fp("b" + std::to_string(bid++),
                                 {{bx, by}, {bx + w, by}, {bx + w, by + h}, {bx, by + h}},
                                 map_building_type(std::nullopt, osm.empty() ? std::nullopt : std::optional(osm), mapping));
                    scene.footprints.push_back(std::move(fp));
                    city.footprint_in_core.push_back(core);
                }
            }
        }
    }

    // Full-length centrelines; horizontal roads run east, vertical north.
    const double W = c.block_cols * B, H = c.block_rows * B;
    for (int j = 0; j <= c.block_rows; ++j)
        scene.roads.push_back({"h" + std::to_string(j), {{0.0, j * B}, {W, j * B}}});
    for (int i = 0; i <= c.block_cols; ++i)
        scene.roads.push_back({"v" + std::to_string(i), {{i * B, 0.0}, {i * B, H}}});

    // Observers along each road; a point shared by two roads is kept once.
    int sid = 0;
    std::set<std::pair<long long, long long>> placed;
    for (const auto& road : scene.roads) {
        const Point2 a = road.points[0], b = road.points[1];
        const double len = distance(a, b);
        const double heading = bearing(a, b);
        for (std::size_t k = 0;; ++k) {
            const double s = static_cast<double>(k) * c.svi_spacing;
            if (s > len + 1e-9) break;
            const Point2 p = a + (b - a) * (s / len);
            const auto key = std::pair{std::llround(p.x * 1000.0), std::llround(p.y * 1000.0)};
            if (!placed.insert(key).second) continue;
            scene.svi.push_back({"s" + std::to_string(sid++), p, heading, "synthetic"});
        }
    }

    if (c.with_bins) {
        // Building share per bin drawn around a per-point openness level so
        // some directions fail a 0.5 threshold.
        for (const auto& s : scene.svi) {
            SegmentationBins sb;
            sb.svi_id = s.id;
            const double openness = detail::unit(rng);
            for (int k = 0; k < kBinCount; ++k) {
                const double share = std::clamp(0.35 + 0.6 * detail::unit(rng) - 0.3 * openness, 0.0, 1.0);
                const double vertical = 1000.0;
                sb.bins[k][11] = std::round(vertical * share);
                sb.bins[k][21] = std::round(vertical * (1.0 - share) * 0.7);  // vegetation
                sb.bins[k][26] = std::round(vertical * (1.0 - share) * 0.3);  // car
                sb.bins[k][23] = std::round(400.0 * detail::unit(rng));       // sky
                sb.bins[k][7] = 300.0;                                        // road
            }
            scene.bins.emplace(s.id, std::move(sb));
        }
    }

    if (c.with_population) {
        const HexGrid fine(c.fine_edge);
        for (const auto& fp : scene.footprints) {
            const double occupants = fp.type_label == types::kResidential ? std::round(detail::uniform(rng, 2.0, 40.0)) : 0.0;
            scene.population[cell_of(centroid(fp.exterior), fine)] += occupants;
        }
    }
    return city;
}

}  // namespace svicov
