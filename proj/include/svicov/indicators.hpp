#pragma once

// Completeness and frequency indicators at building and area level, road
// coverage, population coverage, building-type mapping and grouped
// summaries.

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "hexgrid.hpp"
#include "point_grid.hpp"
#include "sightline.hpp"
#include "stats.hpp"

namespace svicov {

struct BuildingCoverage {
    std::string building_id;
    std::string type_label;
    std::size_t u_avail = 0;
    std::size_t u_seen = 0;
    std::size_t v = 0;
    double perimeter = 0.0;
    double coc_b = 0.0;
    double foc_b = 0.0;
    int size_quintile = 0;
    bool valid = true;  // false when the building has no facade samples
};

/// Per-building unique-seen samples and visible line counts. Every
/// footprint gets a row, reached or not.
inline std::vector<BuildingCoverage> aggregate_building_coverage(std::span<const SightLine> lines,
                                                                 std::span<const FacadeSample> samples,
                                                                 std::span<const Footprint> footprints) {
    std::unordered_map<std::string, std::size_t> by_id;
    std::vector<BuildingCoverage> out(footprints.size());
    for (std::size_t i = 0; i < footprints.size(); ++i) {
        by_id.emplace(footprints[i].id, i);
        out[i].building_id = footprints[i].id;
        out[i].type_label = footprints[i].type_label;
        out[i].perimeter = footprints[i].perimeter;
    }
    for (const auto& s : samples) {
        auto it = by_id.find(s.building_id);
        if (it == by_id.end()) throw std::invalid_argument("sample refers to unknown building " + s.building_id);
        ++out[it->second].u_avail;
    }
    std::vector<std::set<std::uint32_t>> seen(footprints.size());
    for (const auto& l : lines) {
        if (l.building >= footprints.size()) throw std::invalid_argument("sightline refers to unknown building");
        if (l.status != LineStatus::visible) continue;
        ++out[l.building].v;
        seen[l.building].insert(l.sample_index);
    }
    for (std::size_t i = 0; i < out.size(); ++i) {
        auto& b = out[i];
        b.u_seen = seen[i].size();
        b.valid = b.u_avail > 0;
        b.coc_b = b.valid ? static_cast<double>(b.u_seen) / static_cast<double>(b.u_avail) : 0.0;
        b.foc_b = b.perimeter > 0.0 ? static_cast<double>(b.v) / b.perimeter : 0.0;
    }
    return out;
}

/// Quintile 1..5 of each valid building's perimeter within the set; cut
/// points at the 20/40/60/80th percentiles, a perimeter equal to a cut
/// falls in the lower group.
inline void assign_size_quintiles(std::vector<BuildingCoverage>& buildings) {
    std::vector<double> per;
    for (const auto& b : buildings)
        if (b.valid) per.push_back(b.perimeter);
    if (per.empty()) return;
    const std::array<double, 4> cuts{quantile(per, 0.2), quantile(per, 0.4), quantile(per, 0.6), quantile(per, 0.8)};
    for (auto& b : buildings) {
        if (!b.valid) continue;
        b.size_quintile = 1 + static_cast<int>(std::count_if(cuts.begin(), cuts.end(), [&](double c) { return b.perimeter > c; }));
    }
}

/// Share of buildings reached by at least one line. Empty when no valid
/// building is present.
inline std::optional<double> coc_a(std::span<const BuildingCoverage> buildings) {
    std::size_t total = 0, seen = 0;
    for (const auto& b : buildings) {
        if (!b.valid) continue;
        ++total;
        if (b.u_seen > 0) ++seen;
    }
    if (total == 0) return std::nullopt;
    return static_cast<double>(seen) / static_cast<double>(total);
}

/// Share of all visible-line occurrences in the set that fall on
/// buildings of `type` (raw counts, not perimeter-weighted).
inline std::optional<double> foc_a(std::span<const BuildingCoverage> buildings, std::string_view type) {
    double typed = 0.0, total = 0.0;
    for (const auto& b : buildings) {
        if (!b.valid) continue;
        total += static_cast<double>(b.v);
        if (b.type_label == type) typed += static_cast<double>(b.v);
    }
    if (!(total > 0.0)) return std::nullopt;
    return typed / total;
}

struct AreaCoverage {
    CellId cell;
    std::size_t n_total = 0;
    std::size_t n_seen = 0;
    std::optional<double> coc_a;
    std::optional<double> mean_coc_b;
    std::optional<double> mean_foc_b;
    std::map<std::string, std::size_t> v_by_type;
    std::map<std::string, double> foc_a_by_type;
    std::map<std::string, std::size_t> count_by_type;
};

/// Groups buildings by the cell that contains their footprint centroid.
inline std::map<CellId, std::vector<BuildingCoverage>> group_by_cell(std::span<const BuildingCoverage> buildings,
                                                                     std::span<const Footprint> footprints,
                                                                     const HexGrid& grid) {
    std::map<CellId, std::vector<BuildingCoverage>> out;
    for (std::size_t i = 0; i < buildings.size(); ++i)
        out[cell_of(centroid(footprints[i].exterior), grid)].push_back(buildings[i]);
    return out;
}

/// Area indicators for one cell. `covered_only` restricts the mean
/// building indicators to buildings with at least one seen sample.
inline AreaCoverage area_coverage(CellId cell, std::span<const BuildingCoverage> buildings,
                                  bool covered_only = false) {
    AreaCoverage a;
    a.cell = cell;
    double sum_coc = 0.0, sum_foc = 0.0;
    std::size_t n_mean = 0, v_total = 0;
    for (const auto& b : buildings) {
        if (!b.valid) continue;
        ++a.n_total;
        if (b.u_seen > 0) ++a.n_seen;
        ++a.count_by_type[b.type_label];
        a.v_by_type[b.type_label] += b.v;
        v_total += b.v;
        if (!covered_only || b.u_seen > 0) {
            sum_coc += b.coc_b;
            sum_foc += b.foc_b;
            ++n_mean;
        }
    }
    a.coc_a = svicov::coc_a(buildings);
    if (n_mean > 0) {
        a.mean_coc_b = sum_coc / static_cast<double>(n_mean);
        a.mean_foc_b = sum_foc / static_cast<double>(n_mean);
    }
    if (v_total > 0)
        for (const auto& [t, v] : a.v_by_type)
            a.foc_a_by_type[t] = static_cast<double>(v) / static_cast<double>(v_total);
    return a;
}

// ---------------------------------------------------------------- roads --

struct RoadCoverage {
    CellId cell;
    double covered_length = 0.0;
    double total_length = 0.0;
    std::optional<double> completeness;
};

namespace detail {

using Interval = std::pair<double, double>;

// Parameter range of segment a-b inside the disc (c, r), if any.
inline std::optional<Interval> clip_segment_to_disc(Point2 a, Point2 b, Point2 c, double r) {
    const Point2 d = b - a, f = a - c;
    const double qa = dot(d, d);
    if (qa == 0.0) return distance(a, c) <= r ? std::optional<Interval>({0.0, 1.0}) : std::nullopt;
    const double qb = 2.0 * dot(d, f), qc = dot(f, f) - r * r;
    const double disc = qb * qb - 4.0 * qa * qc;
    if (disc < 0.0) return std::nullopt;
    const double s = std::sqrt(disc);
    const double t0 = std::max(0.0, (-qb - s) / (2.0 * qa)), t1 = std::min(1.0, (-qb + s) / (2.0 * qa));
    if (t0 >= t1) return std::nullopt;
    return Interval{t0, t1};
}

inline std::vector<Interval> merge_intervals(std::vector<Interval> v) {
    std::sort(v.begin(), v.end());
    std::vector<Interval> out;
    for (const auto& iv : v) {
        if (!out.empty() && iv.first <= out.back().second) out.back().second = std::max(out.back().second, iv.second);
        else out.push_back(iv);
    }
    return out;
}

inline double overlap(const std::vector<Interval>& merged, double lo, double hi) {
    double total = 0.0;
    for (const auto& [a, b] : merged) total += std::max(0.0, std::min(b, hi) - std::max(a, lo));
    return total;
}

inline std::vector<Interval> covered_intervals(Point2 a, Point2 b, const PointGrid& svi, double radius) {
    std::vector<Interval> raw;
    const Box q = segment_box(a, b).inflated(radius);
    for (auto i : svi.in_box(q))
        if (auto iv = clip_segment_to_disc(a, b, svi.points()[i], radius)) raw.push_back(*iv);
    return merge_intervals(std::move(raw));
}

// Parameter of the crossing of segment a-b with segment c-d, if proper.
inline std::optional<double> crossing_param(Point2 a, Point2 b, Point2 c, Point2 d) {
    const Point2 r = b - a, s = d - c;
    const double den = cross(r, s);
    if (den == 0.0) return std::nullopt;
    const double t = cross(c - a, s) / den, u = cross(c - a, r) / den;
    if (t <= 0.0 || t >= 1.0 || u < 0.0 || u > 1.0) return std::nullopt;
    return t;
}

}  // namespace detail

/// Road length within `radius` of any SVI point, over all roads.
inline RoadCoverage road_coverage(std::span<const Road> roads, std::span<const Point2> svi, double radius = 50.0) {
    if (!(radius > 0.0)) throw std::invalid_argument("buffer radius must be positive");
    const PointGrid grid(svi, std::max(radius, 1.0));
    RoadCoverage rc;
    for (const auto& road : roads) {
        for (std::size_t i = 0; i + 1 < road.points.size(); ++i) {
            const Point2 a = road.points[i], b = road.points[i + 1];
            const double len = distance(a, b);
            rc.total_length += len;
            rc.covered_length += len * detail::overlap(detail::covered_intervals(a, b, grid, radius), 0.0, 1.0);
        }
    }
    if (rc.total_length > 0.0) rc.completeness = rc.covered_length / rc.total_length;
    return rc;
}

/// Road coverage split by the hex cell each stretch of road falls in.
inline std::map<CellId, RoadCoverage> road_coverage_by_cell(std::span<const Road> roads, std::span<const Point2> svi,
                                                            const HexGrid& hex, double radius = 50.0) {
    if (!(radius > 0.0)) throw std::invalid_argument("buffer radius must be positive");
    const PointGrid grid(svi, std::max(radius, 1.0));
    std::map<CellId, RoadCoverage> out;
    for (const auto& road : roads) {
        for (std::size_t i = 0; i + 1 < road.points.size(); ++i) {
            const Point2 a = road.points[i], b = road.points[i + 1];
            const double len = distance(a, b);
            if (len == 0.0) continue;
            const auto covered = detail::covered_intervals(a, b, grid, radius);
            std::vector<double> cuts{0.0, 1.0};
            for (auto c : cells_covering(segment_box(a, b), hex)) {
                const auto ring = hex.corners(c);
                for (std::size_t k = 0; k < 6; ++k)
                    if (auto t = detail::crossing_param(a, b, ring[k], ring[(k + 1) % 6])) cuts.push_back(*t);
            }
            std::sort(cuts.begin(), cuts.end());
            for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
                const double lo = cuts[k], hi = cuts[k + 1];
                if (hi <= lo) continue;
                const CellId cell = cell_of(a + (b - a) * (0.5 * (lo + hi)), hex);
                auto& rc = out[cell];
                rc.cell = cell;
                rc.total_length += len * (hi - lo);
                rc.covered_length += len * detail::overlap(covered, lo, hi);
            }
        }
    }
    for (auto& [c, rc] : out)
        if (rc.total_length > 0.0) rc.completeness = std::min(1.0, rc.covered_length / rc.total_length);
    return out;
}

// ----------------------------------------------------------- population --

struct PopulationCell {
    double residential_coc_a = 0.0;
    double population = 0.0;
};

struct PopulationCoverage {
    double total_covered = 0.0;
    double total = 0.0;
    std::optional<double> ratio;
};

inline PopulationCoverage population_coverage(std::span<const PopulationCell> cells) {
    PopulationCoverage pc;
    for (const auto& c : cells) {
        if (c.population < 0.0) throw std::invalid_argument("population must be non-negative");
        pc.total_covered += c.residential_coc_a * c.population;
        pc.total += c.population;
    }
    if (pc.total > 0.0) pc.ratio = pc.total_covered / pc.total;
    return pc;
}

// --------------------------------------------------------- type mapping --

namespace types {
inline constexpr const char* kResidential = "Residential";
inline constexpr const char* kUnclassified = "Unclassified";
inline constexpr const char* kUnlabeled = "Unlabeled";
}  // namespace types

/// Land-use category per OSM `building=*` value.
struct TypeMapping {
    std::map<std::string, std::string> osm_to_type;

    void add(const std::string& type, std::initializer_list<const char*> labels) {
        for (auto l : labels) osm_to_type.try_emplace(l, type);
    }

    static TypeMapping defaults() {
        TypeMapping m;
        m.add("Residential", {"apartments", "flats", "house", "terrace", "detached", "semidetached_house",
                              "dormitory", "hall_of_residence", "cottage", "bungalow", "terrace_house",
                              "council_flats", "farm_auxiliary", "farm", "houseboat", "stable", "cabin",
                              "terraced_house", "Nursery,_School", "yes;dormitory"});
        m.add("Mixed Use", {"yes, office, shop, r", "apartments;residenti", "apartments;yes", "commercial;detached",
                            "retail;yes"});
        m.add("Industry and Business", {"office", "data_center", "commercial", "warehouse", "industrial",
                                        "light_industrial", "factory", "manufacture", "office;yes",
                                        "telecommunication", "business", "artists_studio"});
        m.add("Community Services", {"church", "university", "school", "government", "public", "hospital",
                                     "college", "Community_Building", "kindergarten", "memorial",
                                     "student_residence", "gatehouse", "cafe", "greenhouse", "monument",
                                     "pavilion", "palace", "mosque", "synagogue", "police_station", "religious",
                                     "clock_tower", "village_hall", "conservatory", "chapel"});
        m.add("Retail", {"retail", "pub", "kiosk", "stall", "bar", "shop"});
        m.add("Transport", {"train_station", "transportation", "ship", "boat", "bridge", "railway_arch", "railway",
                            "bus", "viaduct", "tunnel_mouth", "tunnel_entrance", "bus_garage"});
        // 'ruins' is listed under two categories; it is mapped to Vacant and Derelict.
        m.add("Vacant and Derelict", {"vacant", "disused_station", "abandoned", "ruins"});
        m.add("Recreation and Leisure", {"civic", "hall", "stadium", "recreational", "gallery", "theatre", "cinema",
                                         "museum", "sports_centre", "sports_hall", "swimming_pool", "parking",
                                         "yes;public;sports_ce"});
        m.add("Utilities and Infrastructure", {"service", "construction", "roof", "vent_shaft", "air_shaft",
                                               "ventilation_shaft", "electricity", "substation", "gasometer",
                                               "air_vent", "tunnel_shaft", "water"});
        m.add("Defence", {"guardhouse", "bunker", "barracks"});
        m.add("Unclassified", {"None", "yes", "no", "multiple", "part"});
        return m;
    }
};

/// Land-use label wins; otherwise the OSM tag through the table; tags the
/// table does not know, and missing tags, give Unlabeled.
inline std::string map_building_type(const std::optional<std::string>& ccrp_label,
                                     const std::optional<std::string>& osm_label, const TypeMapping& mapping) {
    if (ccrp_label && !ccrp_label->empty()) return *ccrp_label;
    if (osm_label && !osm_label->empty()) {
        if (auto it = mapping.osm_to_type.find(*osm_label); it != mapping.osm_to_type.end()) return it->second;
    }
    return types::kUnlabeled;
}

// ------------------------------------------------------- group summary --

enum class Grouping { type, perimeter_quintile };

struct GroupSummary {
    std::string group;
    std::size_t n = 0;
    double proportion_covered = 0.0;
    double mean_coc_b_all = 0.0;
    std::optional<double> mean_coc_b_covered;
};

/// Per group: share reached, mean CoC-B over all, mean CoC-B over reached.
/// Quintile grouping expects `assign_size_quintiles` to have run.
inline std::vector<GroupSummary> coverage_summary_by_group(std::span<const BuildingCoverage> buildings,
                                                           Grouping grouping) {
    if (buildings.empty()) throw std::invalid_argument("summary of an empty building set");
    struct Acc {
        std::size_t n = 0, covered = 0;
        double sum_all = 0.0, sum_cov = 0.0;
    };
    std::map<std::string, Acc> acc;
    for (const auto& b : buildings) {
        if (!b.valid) continue;
        const std::string key =
            grouping == Grouping::type ? b.type_label : "Q" + std::to_string(b.size_quintile);
        auto& a = acc[key];
        ++a.n;
        a.sum_all += b.coc_b;
        if (b.u_seen > 0) {
            ++a.covered;
            a.sum_cov += b.coc_b;
        }
    }
    std::vector<GroupSummary> out;
    for (const auto& [k, a] : acc) {
        GroupSummary g;
        g.group = k;
        g.n = a.n;
        g.proportion_covered = static_cast<double>(a.covered) / static_cast<double>(a.n);
        g.mean_coc_b_all = a.sum_all / static_cast<double>(a.n);
        if (a.covered > 0) g.mean_coc_b_covered = a.sum_cov / static_cast<double>(a.covered);
        out.push_back(g);
    }
    return out;
}

}  // namespace svicov
