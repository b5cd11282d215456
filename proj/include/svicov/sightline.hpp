#pragma once

// Point-to-facade-sample visibility. Lines refer to SVI points and
// buildings by their position in the caller's arrays so that millions of
// lines stay cheap; ids are resolved when tables are written.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <thread>
#include <tuple>
#include <unordered_map>
#include <vector>

#include "geometry.hpp"

namespace svicov {

struct SviPoint {
    std::string id;
    Point2 position;
    double heading = 0.0;  // degrees clockwise from north, [0, 360)
    std::string capture_tag;
};

enum class LineStatus : std::uint8_t { candidate, occluded, segmentation_filtered, visible };

inline const char* to_string(LineStatus s) {
    switch (s) {
        case LineStatus::candidate: return "candidate";
        case LineStatus::occluded: return "occluded";
        case LineStatus::segmentation_filtered: return "segmentation_filtered";
        case LineStatus::visible: return "visible";
    }
    return "?";
}

inline std::optional<LineStatus> parse_status(std::string_view s) {
    if (s == "candidate") return LineStatus::candidate;
    if (s == "occluded") return LineStatus::occluded;
    if (s == "segmentation_filtered") return LineStatus::segmentation_filtered;
    if (s == "visible") return LineStatus::visible;
    return std::nullopt;
}

struct SightLine {
    std::uint32_t svi = 0;       // ordinal into the SVI array
    std::uint32_t building = 0;  // ordinal into the footprint array
    std::uint32_t sample_index = 0;
    double bearing = 0.0;
    double distance = 0.0;
    LineStatus status = LineStatus::candidate;

    auto key() const { return std::tuple(svi, building, sample_index); }
    friend bool operator==(const SightLine&, const SightLine&) = default;
};

inline bool key_less(const SightLine& a, const SightLine& b) { return a.key() < b.key(); }

struct VisibilityParams {
    double radius = 50.0;
    double eps = 1e-6;
};

/// Uniform bucket grid over footprints and facade samples. Immutable after
/// construction; owns copies of its inputs.
class SceneIndex {
public:
    SceneIndex() = default;

    SceneIndex(std::vector<Footprint> footprints, std::vector<FacadeSample> samples, double cell_size)
        : footprints_(std::move(footprints)), samples_(std::move(samples)), cell_(cell_size) {
        if (!(cell_size > 0.0)) throw std::invalid_argument("index cell size must be positive");
        std::unordered_map<std::string, std::uint32_t> by_id;
        by_id.reserve(footprints_.size());
        for (std::uint32_t i = 0; i < footprints_.size(); ++i) {
            if (!by_id.emplace(footprints_[i].id, i).second)
                throw std::invalid_argument("duplicate footprint id " + footprints_[i].id);
            extent_.expand(footprints_[i].box);
        }
        host_.reserve(samples_.size());
        for (const auto& s : samples_) {
            auto it = by_id.find(s.building_id);
            if (it == by_id.end()) throw std::invalid_argument("sample refers to unknown building " + s.building_id);
            host_.push_back(it->second);
            extent_.expand(s.position);
        }
        if (extent_.empty()) return;
        nx_ = static_cast<std::size_t>(std::floor((extent_.hi.x - extent_.lo.x) / cell_)) + 1;
        ny_ = static_cast<std::size_t>(std::floor((extent_.hi.y - extent_.lo.y) / cell_)) + 1;
        fp_cells_.assign(nx_ * ny_, {});
        sample_cells_.assign(nx_ * ny_, {});
        for (std::uint32_t i = 0; i < footprints_.size(); ++i) {
            const auto [x0, y0] = cell_coords(footprints_[i].box.lo);
            const auto [x1, y1] = cell_coords(footprints_[i].box.hi);
            for (std::size_t y = y0; y <= y1; ++y)
                for (std::size_t x = x0; x <= x1; ++x) fp_cells_[y * nx_ + x].push_back(i);
        }
        for (std::uint32_t i = 0; i < samples_.size(); ++i) {
            const auto [x, y] = cell_coords(samples_[i].position);
            sample_cells_[y * nx_ + x].push_back(i);
        }
    }

    const std::vector<Footprint>& footprints() const { return footprints_; }
    const std::vector<FacadeSample>& samples() const { return samples_; }
    std::uint32_t host_of(std::uint32_t sample) const { return host_[sample]; }
    double cell_size() const { return cell_; }
    bool empty() const { return nx_ == 0; }

    /// Footprint ordinals listed in the bucket at (x, y); exposed for tests.
    std::span<const std::uint32_t> footprints_in_cell(std::size_t x, std::size_t y) const {
        if (x >= nx_ || y >= ny_) return {};
        return fp_cells_[y * nx_ + x];
    }
    std::pair<std::size_t, std::size_t> grid_shape() const { return {nx_, ny_}; }

    struct DiscHits {
        std::vector<std::uint32_t> footprints;
        std::vector<std::uint32_t> samples;
    };

    /// Footprints whose box meets the disc's box, and samples inside the disc.
    DiscHits query_disc(Point2 center, double r) const {
        DiscHits hits;
        if (empty()) return hits;
        const Box q{{center.x - r, center.y - r}, {center.x + r, center.y + r}};
        if (!q.intersects(extent_)) return hits;
        const auto [x0, y0] = cell_coords(q.lo);
        const auto [x1, y1] = cell_coords(q.hi);
        for (std::size_t y = y0; y <= y1; ++y) {
            for (std::size_t x = x0; x <= x1; ++x) {
                for (auto f : fp_cells_[y * nx_ + x])
                    if (footprints_[f].box.intersects(q)) hits.footprints.push_back(f);
                for (auto s : sample_cells_[y * nx_ + x])
                    if (distance(samples_[s].position, center) <= r) hits.samples.push_back(s);
            }
        }
        std::sort(hits.footprints.begin(), hits.footprints.end());
        hits.footprints.erase(std::unique(hits.footprints.begin(), hits.footprints.end()), hits.footprints.end());
        std::sort(hits.samples.begin(), hits.samples.end());
        return hits;
    }

private:
    std::pair<std::size_t, std::size_t> cell_coords(Point2 p) const {
        auto clampi = [](double v, std::size_t n) {
            if (!(v > 0.0)) return std::size_t{0};
            return std::min(static_cast<std::size_t>(v), n - 1);
        };
        return {clampi((p.x - extent_.lo.x) / cell_, nx_), clampi((p.y - extent_.lo.y) / cell_, ny_)};
    }

    std::vector<Footprint> footprints_;
    std::vector<FacadeSample> samples_;
    std::vector<std::uint32_t> host_;
    double cell_ = 50.0;
    Box extent_;
    std::size_t nx_ = 0, ny_ = 0;
    std::vector<std::vector<std::uint32_t>> fp_cells_;
    std::vector<std::vector<std::uint32_t>> sample_cells_;
};

inline SceneIndex build_index(std::vector<Footprint> footprints, std::vector<FacadeSample> samples,
                              double cell_size = 50.0) {
    return SceneIndex(std::move(footprints), std::move(samples), cell_size);
}

/// Sightlines from one SVI point to every sample within `radius`, sorted by
/// key. `svi_ordinal` is recorded in each line.
inline std::vector<SightLine> compute_sightlines(const SceneIndex& index, const SviPoint& svi,
                                                 const VisibilityParams& params, std::uint32_t svi_ordinal = 0) {
    if (!(params.radius > 0.0)) throw std::invalid_argument("radius must be positive");
    std::vector<SightLine> out;
    const auto hits = index.query_disc(svi.position, params.radius);
    if (hits.samples.empty()) return out;
    const auto& fps = index.footprints();
    const auto& samples = index.samples();
    out.reserve(hits.samples.size());
    for (auto s : hits.samples) {
        const Point2 target = samples[s].position;
        SightLine line;
        line.svi = svi_ordinal;
        line.building = index.host_of(s);
        line.sample_index = samples[s].index;
        line.distance = distance(svi.position, target);
        line.bearing = line.distance > 0.0 ? bearing(svi.position, target) : 0.0;
        line.status = LineStatus::visible;
        const Box ray = segment_box(svi.position, target).inflated(params.eps);
        for (auto f : hits.footprints) {
            if (!fps[f].box.intersects(ray)) continue;
            if (segment_blocked(svi.position, target, fps[f], params.eps)) {
                line.status = LineStatus::occluded;
                break;
            }
        }
        out.push_back(line);
    }
    std::sort(out.begin(), out.end(), key_less);
    return out;
}

/// Oracle: same contract as compute_sightlines, scanning every sample and
/// testing every footprint for every ray.
inline std::vector<SightLine> brute_force_sightlines(std::span<const Footprint> footprints,
                                                     std::span<const FacadeSample> samples, const SviPoint& svi,
                                                     const VisibilityParams& params, std::uint32_t svi_ordinal = 0) {
    std::unordered_map<std::string, std::uint32_t> by_id;
    for (std::uint32_t i = 0; i < footprints.size(); ++i) by_id.emplace(footprints[i].id, i);
    std::vector<SightLine> out;
    for (const auto& s : samples) {
        const double d = distance(svi.position, s.position);
        if (d > params.radius) continue;
        SightLine line;
        line.svi = svi_ordinal;
        line.building = by_id.at(s.building_id);
        line.sample_index = s.index;
        line.distance = d;
        line.bearing = d > 0.0 ? bearing(svi.position, s.position) : 0.0;
        line.status = LineStatus::visible;
        for (const auto& fp : footprints) {
            if (segment_blocked(svi.position, s.position, fp, params.eps)) {
                line.status = LineStatus::occluded;
                break;
            }
        }
        out.push_back(line);
    }
    std::sort(out.begin(), out.end(), key_less);
    return out;
}

/// True when the SVI point lies strictly inside some footprint; such
/// observers see nothing.
inline bool svi_inside_footprint(const SceneIndex& index, Point2 p) {
    const auto hits = index.query_disc(p, 0.0);
    for (auto f : hits.footprints)
        if (locate(p, index.footprints()[f].exterior, 0.0) == Containment::inside) return true;
    return false;
}

/// Sightlines for a whole SVI set, split across `workers` threads. The
/// result is sorted by key and does not depend on the worker count.
inline std::vector<SightLine> compute_all_sightlines(const SceneIndex& index, std::span<const SviPoint> svis,
                                                     const VisibilityParams& params, unsigned workers = 1) {
    workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(std::max<std::size_t>(1, svis.size()))));
    std::vector<std::vector<SightLine>> parts(workers);
    auto run = [&](unsigned w) {
        for (std::size_t i = w; i < svis.size(); i += workers) {
            auto lines = compute_sightlines(index, svis[i], params, static_cast<std::uint32_t>(i));
            parts[w].insert(parts[w].end(), lines.begin(), lines.end());
        }
    };
    if (workers == 1) {
        run(0);
    } else {
        std::vector<std::jthread> pool;
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(run, w);
    }
    std::vector<SightLine> out;
    std::size_t total = 0;
    for (auto& p : parts) total += p.size();
    out.reserve(total);
    for (auto& p : parts) out.insert(out.end(), p.begin(), p.end());
    std::sort(out.begin(), out.end(), key_less);
    return out;
}

}  // namespace svicov
