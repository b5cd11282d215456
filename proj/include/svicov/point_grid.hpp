#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <unordered_map>
#include <vector>

#include "geometry.hpp"

namespace svicov {

/// Hash-bucketed point set for radius and nearest-neighbour queries.
class PointGrid {
public:
    PointGrid(std::span<const Point2> pts, double cell) : pts_(pts.begin(), pts.end()), cell_(cell) {
        if (!(cell > 0.0)) throw std::invalid_argument("point grid cell must be positive");
        for (std::size_t i = 0; i < pts_.size(); ++i) buckets_[key(pts_[i])].push_back(i);
    }

    /// Indices of points within `r` of `c`, ascending.
    std::vector<std::size_t> within(Point2 c, double r) const {
        std::vector<std::size_t> out;
        visit_box({{c.x - r, c.y - r}, {c.x + r, c.y + r}}, [&](std::size_t i) {
            if (distance(pts_[i], c) <= r) out.push_back(i);
        });
        std::sort(out.begin(), out.end());
        return out;
    }

    /// Indices of points inside the box, ascending.
    std::vector<std::size_t> in_box(const Box& b) const {
        std::vector<std::size_t> out;
        visit_box(b, [&](std::size_t i) {
            if (b.contains(pts_[i])) out.push_back(i);
        });
        std::sort(out.begin(), out.end());
        return out;
    }

    /// Nearest point other than `skip`, or npos for an empty set.
    std::size_t nearest(Point2 c, std::size_t skip = npos) const {
        if (pts_.empty() || (pts_.size() == 1 && skip == 0)) return npos;
        double r = cell_;
        for (;;) {
            std::size_t best = npos;
            double best_d = std::numeric_limits<double>::infinity();
            visit_box({{c.x - r, c.y - r}, {c.x + r, c.y + r}}, [&](std::size_t i) {
                if (i == skip) return;
                const double d = distance(pts_[i], c);
                if (d < best_d || (d == best_d && i < best)) {
                    best_d = d;
                    best = i;
                }
            });
            if (best != npos && best_d <= r) return best;
            r *= 2.0;
        }
    }

    const std::vector<Point2>& points() const { return pts_; }

    static constexpr std::size_t npos = static_cast<std::size_t>(-1);

private:
    using Key = long long;
    static Key pack(long long ix, long long iy) { return (ix << 32) ^ (iy & 0xffffffffLL); }
    Key key(Point2 p) const {
        return pack(static_cast<long long>(std::floor(p.x / cell_)), static_cast<long long>(std::floor(p.y / cell_)));
    }

    template <class F>
    void visit_box(const Box& b, F&& f) const {
        const auto x0 = static_cast<long long>(std::floor(b.lo.x / cell_));
        const auto x1 = static_cast<long long>(std::floor(b.hi.x / cell_));
        const auto y0 = static_cast<long long>(std::floor(b.lo.y / cell_));
        const auto y1 = static_cast<long long>(std::floor(b.hi.y / cell_));
        if ((x1 - x0 + 1) * (y1 - y0 + 1) > static_cast<long long>(buckets_.size()) * 4 + 64) {
            for (std::size_t i = 0; i < pts_.size(); ++i) f(i);
            return;
        }
        for (auto x = x0; x <= x1; ++x)
            for (auto y = y0; y <= y1; ++y)
                if (auto it = buckets_.find(pack(x, y)); it != buckets_.end())
                    for (auto i : it->second) f(i);
    }

    std::vector<Point2> pts_;
    double cell_;
    std::unordered_map<Key, std::vector<std::size_t>> buckets_;
};

}  // namespace svicov
