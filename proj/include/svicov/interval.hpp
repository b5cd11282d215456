#pragma once

// Collection-interval experiment: resample observers along roads at a
// range of spacings, track mean building completeness and frequency per
// fine cell, and locate the spacing where their normalised decline rates
// meet.

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "curves.hpp"
#include "pipeline.hpp"
#include "point_grid.hpp"

namespace svicov {

struct IntervalScanConfig {
    std::vector<double> intervals;  // strictly increasing, > 0
    std::vector<double> radii{30.0, 40.0, 50.0};
    double threshold = 0.5;
    std::optional<double> snap_tolerance;  // default: interval / 2
    bool covered_only = false;             // restrict means to reached buildings

    static std::vector<double> default_intervals() {
        std::vector<double> v;
        for (int d = 10; d <= 95; d += 5) v.push_back(d);
        return v;
    }

    void validate() const {
        if (intervals.empty()) throw std::invalid_argument("interval list is empty");
        for (std::size_t i = 0; i < intervals.size(); ++i) {
            if (!(intervals[i] > 0.0)) throw std::invalid_argument("intervals must be positive");
            if (i > 0 && !(intervals[i] > intervals[i - 1]))
                throw std::invalid_argument("intervals must be strictly increasing");
        }
        for (auto r : radii)
            if (!(r > 0.0)) throw std::invalid_argument("radii must be positive");
    }
};

/// Points at arc offsets 0, d, 2d, ... from each polyline's start. Start
/// anchoring makes the point set for d a subset of the set for d/k.
inline std::vector<Point2> resample_along_roads(std::span<const Road> roads, double interval) {
    if (!(interval > 0.0)) throw std::invalid_argument("resampling interval must be positive");
    std::vector<Point2> out;
    for (const auto& road : roads) {
        const auto& pts = road.points;
        if (pts.empty()) continue;
        const double total = polyline_length(pts);
        // Offsets are computed as k * d (not accumulated) so nesting is exact.
        std::size_t seg = 0;
        double seg_start = 0.0;
        for (std::size_t k = 0;; ++k) {
            const double s = static_cast<double>(k) * interval;
            if (s > total + 1e-9) break;
            while (seg + 1 < pts.size() - 1 && s > seg_start + distance(pts[seg], pts[seg + 1])) {
                seg_start += distance(pts[seg], pts[seg + 1]);
                ++seg;
            }
            if (pts.size() == 1) {
                out.push_back(pts[0]);
                break;
            }
            const Point2 a = pts[seg], b = pts[seg + 1];
            const double len = distance(a, b);
            const double t = len > 0.0 ? std::clamp((s - seg_start) / len, 0.0, 1.0) : 0.0;
            out.push_back(a + (b - a) * t);
        }
    }
    return out;
}

/// Nearest SVI point within `tolerance` of each position (ties: smallest
/// id), deduplicated, in first-seen order.
inline std::vector<SviPoint> snap_to_svi(std::span<const Point2> positions, std::span<const SviPoint> svi,
                                         double tolerance) {
    if (!(tolerance > 0.0)) throw std::invalid_argument("snap tolerance must be positive");
    std::vector<Point2> pos;
    for (const auto& s : svi) pos.push_back(s.position);
    const PointGrid grid(pos, tolerance);
    std::vector<SviPoint> out;
    std::set<std::size_t> taken;
    for (auto p : positions) {
        std::size_t best = PointGrid::npos;
        double best_d = 0.0;
        for (auto i : grid.within(p, tolerance)) {
            const double d = distance(p, pos[i]);
            if (best == PointGrid::npos || d < best_d || (d == best_d && svi[i].id < svi[best].id)) {
                best = i;
                best_d = d;
            }
        }
        if (best != PointGrid::npos && taken.insert(best).second) out.push_back(svi[best]);
    }
    return out;
}

struct ScanRow {
    CellId cell;
    double radius = 0.0;
    double interval = 0.0;
    double mean_coc_b = 0.0;
    double mean_foc_b = 0.0;
    std::optional<double> norm_coc_b;
    std::optional<double> norm_foc_b;
};

struct ScanResult {
    std::vector<ScanRow> rows;  // sorted by (cell, radius, interval)
};

/// Fills the normalised columns: each (cell, radius) series divided by its
/// value at the smallest interval. Series with a zero base stay empty.
inline void normalize(ScanResult& scan) {
    std::sort(scan.rows.begin(), scan.rows.end(), [](const ScanRow& a, const ScanRow& b) {
        return std::tie(a.cell, a.radius, a.interval) < std::tie(b.cell, b.radius, b.interval);
    });
    for (std::size_t i = 0; i < scan.rows.size();) {
        std::size_t j = i;
        while (j < scan.rows.size() && scan.rows[j].cell == scan.rows[i].cell && scan.rows[j].radius == scan.rows[i].radius) ++j;
        const double base_c = scan.rows[i].mean_coc_b, base_f = scan.rows[i].mean_foc_b;
        for (std::size_t k = i; k < j; ++k) {
            scan.rows[k].norm_coc_b = base_c > 0.0 ? std::optional(scan.rows[k].mean_coc_b / base_c) : std::nullopt;
            scan.rows[k].norm_foc_b = base_f > 0.0 ? std::optional(scan.rows[k].mean_foc_b / base_f) : std::nullopt;
        }
        i = j;
    }
}

/// Per-cell mean CoC-B and FoC-B for every (interval, radius) pair.
/// Cells without buildings are omitted.
inline ScanResult scan(const Scene& scene, const IntervalScanConfig& cfg, const HexGrid& grid,
                       const CoverageParams& base) {
    cfg.validate();
    const auto samples = sample_all(scene.footprints, base.spacing);
    const double max_r = *std::max_element(cfg.radii.begin(), cfg.radii.end());
    const SceneIndex index(scene.footprints, samples, max_r);

    std::vector<CellId> building_cell;
    for (const auto& fp : scene.footprints) building_cell.push_back(cell_of(centroid(fp.exterior), grid));

    ScanResult result;
    for (double interval : cfg.intervals) {
        const auto positions = resample_along_roads(scene.roads, interval);
        const auto svi = snap_to_svi(positions, scene.svi, cfg.snap_tolerance.value_or(interval / 2.0));
        for (double radius : cfg.radii) {
            VisibilityParams vis = base.vis;
            vis.radius = radius;
            auto lines = compute_all_sightlines(index, svi, vis, base.workers);
            if (!base.geometric_only && !scene.bins.empty())
                lines = apply_filter(std::move(lines), svi, scene.bins, cfg.threshold, base.missing,
                                     base.bin_origin_offset);
            const auto buildings = aggregate_building_coverage(lines, samples, scene.footprints);

            std::map<CellId, std::tuple<double, double, std::size_t>> acc;
            for (std::size_t b = 0; b < buildings.size(); ++b) {
                const auto& bc = buildings[b];
                auto& [sc, sf, n] = acc[building_cell[b]];
                if (!bc.valid || (cfg.covered_only && bc.u_seen == 0)) continue;
                sc += bc.coc_b;
                sf += bc.foc_b;
                ++n;
            }
            for (const auto& [cell, a] : acc) {
                const auto& [sc, sf, n] = a;
                ScanRow row{cell, radius, interval};
                if (n > 0) {
                    row.mean_coc_b = sc / static_cast<double>(n);
                    row.mean_foc_b = sf / static_cast<double>(n);
                }
                result.rows.push_back(row);
            }
        }
    }
    normalize(result);
    return result;
}

enum class OptimumStatus { crossing, tie, none, zero_base, insufficient, fit_failed };

inline const char* to_string(OptimumStatus s) {
    switch (s) {
        case OptimumStatus::crossing: return "crossing";
        case OptimumStatus::tie: return "tie";
        case OptimumStatus::none: return "none";
        case OptimumStatus::zero_base: return "zero_base";
        case OptimumStatus::insufficient: return "insufficient";
        case OptimumStatus::fit_failed: return "fit_failed";
    }
    return "?";
}

struct OptimumRow {
    CellId cell;
    double radius = 0.0;
    std::string fit_kind;
    std::optional<double> r2_coc, r2_foc;
    std::optional<double> optimal_interval;
    OptimumStatus status = OptimumStatus::none;
};

/// `std::nullopt` kind means "auto": every supported kind is tried and the
/// one with the best combined R^2 is kept.
inline std::vector<OptimumRow> detect_optimal_interval(const ScanResult& scan_result,
                                                       std::optional<FitKind> fit_kind = FitKind::spline(),
                                                       double step = 0.1) {
    std::map<std::pair<CellId, double>, std::vector<const ScanRow*>> series;
    for (const auto& r : scan_result.rows) series[{r.cell, r.radius}].push_back(&r);

    std::vector<OptimumRow> out;
    for (auto& [key, rows] : series) {
        std::sort(rows.begin(), rows.end(), [](auto a, auto b) { return a->interval < b->interval; });
        OptimumRow o;
        o.cell = key.first;
        o.radius = key.second;
        o.fit_kind = fit_kind ? fit_kind->str() : "auto";
        if (!rows.front()->norm_coc_b || !rows.front()->norm_foc_b) {
            o.status = OptimumStatus::zero_base;
            out.push_back(o);
            continue;
        }
        std::vector<double> x, yc, yf;
        for (auto r : rows) {
            if (!r->norm_coc_b || !r->norm_foc_b) continue;
            x.push_back(r->interval);
            yc.push_back(*r->norm_coc_b);
            yf.push_back(*r->norm_foc_b);
        }
        if (x.size() < 4) {
            o.status = OptimumStatus::insufficient;
            out.push_back(o);
            continue;
        }

        std::vector<FitKind> kinds;
        if (fit_kind) kinds.push_back(*fit_kind);
        else kinds = {FitKind::polynomial(2), FitKind::polynomial(3), FitKind::power(), FitKind::logarithm(),
                      FitKind::spline()};
        std::optional<std::pair<FittedCurve, FittedCurve>> best;
        for (const auto& k : kinds) {
            try {
                auto fc = fit_curve(x, yc, k);
                auto ff = fit_curve(x, yf, k);
                if (!best || fc.r2 + ff.r2 > best->first.r2 + best->second.r2) best.emplace(std::move(fc), std::move(ff));
            } catch (const FitError&) {
            }
        }
        if (!best) {
            o.status = OptimumStatus::fit_failed;
            out.push_back(o);
            continue;
        }
        o.fit_kind = best->first.kind.str();
        o.r2_coc = best->first.r2;
        o.r2_foc = best->second.r2;
        const auto dc = derivative(best->first), df = derivative(best->second);
        const double lo = x.front(), hi = x.back();

        bool coincident = true;
        for (double t = lo; t <= hi + 1e-9; t += step)
            if (std::abs(dc(t) - df(t)) > 1e-12) {
                coincident = false;
                break;
            }
        if (coincident) {
            o.optimal_interval = lo;
            o.status = OptimumStatus::tie;
        } else if (auto hit = find_intersection(dc, df, lo, hi, step)) {
            o.optimal_interval = *hit;
            o.status = OptimumStatus::crossing;
        } else {
            o.status = OptimumStatus::none;
        }
        out.push_back(o);
    }
    return out;
}

}  // namespace svicov
