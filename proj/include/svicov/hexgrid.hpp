#pragma once

// Planar flat-top hexagonal grid in axial coordinates. Two levels are used:
// a coarse partition for processing and a fine one for aggregation.

#include <array>
#include <charconv>
#include <cmath>
#include <compare>
#include <numbers>
#include <optional>
#include <span>
#include <tuple>
#include <string>
#include <vector>

#include "geometry.hpp"

namespace svicov {

enum class GridLevel : char { coarse = 'c', fine = 'f' };

struct CellId {
    int q = 0;
    int r = 0;
    GridLevel level = GridLevel::fine;

    friend auto operator<=>(const CellId&, const CellId&) = default;

    /// "f:q:r" or "c:q:r".
    std::string str() const {
        return std::string(1, static_cast<char>(level)) + ':' + std::to_string(q) + ':' + std::to_string(r);
    }

    static std::optional<CellId> parse(std::string_view s) {
        if (s.size() < 5 || (s[0] != 'c' && s[0] != 'f') || s[1] != ':') return std::nullopt;
        const auto colon = s.find(':', 2);
        if (colon == std::string_view::npos) return std::nullopt;
        CellId id;
        id.level = static_cast<GridLevel>(s[0]);
        auto rq = std::from_chars(s.data() + 2, s.data() + colon, id.q);
        auto rr = std::from_chars(s.data() + colon + 1, s.data() + s.size(), id.r);
        if (rq.ec != std::errc{} || rq.ptr != s.data() + colon) return std::nullopt;
        if (rr.ec != std::errc{} || rr.ptr != s.data() + s.size()) return std::nullopt;
        return id;
    }
};

inline constexpr std::array<std::array<int, 2>, 6> kHexNeighbors{
    {{1, 0}, {1, -1}, {0, -1}, {-1, 0}, {-1, 1}, {0, 1}}};

struct HexGrid {
    double edge = 174.0;
    Point2 origin{};
    GridLevel level = GridLevel::fine;

    HexGrid() = default;
    HexGrid(double edge_length, Point2 o = {}, GridLevel lvl = GridLevel::fine)
        : edge(edge_length), origin(o), level(lvl) {
        if (!(edge_length > 0.0)) throw std::invalid_argument("hex edge length must be positive");
    }

    double cell_area() const { return 1.5 * std::sqrt(3.0) * edge * edge; }

    Point2 center(CellId c) const {
        return {origin.x + edge * 1.5 * c.q, origin.y + edge * std::sqrt(3.0) * (c.r + 0.5 * c.q)};
    }

    std::array<Point2, 6> corners(CellId c) const {
        const Point2 ctr = center(c);
        std::array<Point2, 6> out{};
        for (int k = 0; k < 6; ++k) {
            const double a = std::numbers::pi / 3.0 * k;
            out[k] = {ctr.x + edge * std::cos(a), ctr.y + edge * std::sin(a)};
        }
        return out;
    }

    std::array<CellId, 6> neighbors(CellId c) const {
        std::array<CellId, 6> out{};
        for (int k = 0; k < 6; ++k) out[k] = {c.q + kHexNeighbors[k][0], c.r + kHexNeighbors[k][1], c.level};
        return out;
    }
};

/// The hexagon containing `p`: the cell with the nearest centre. Points
/// equidistant from several centres go to the smallest (q, r).
inline CellId cell_of(Point2 p, const HexGrid& g) {
    const double dx = p.x - g.origin.x, dy = p.y - g.origin.y;
    const double fq = (2.0 / 3.0 * dx) / g.edge;
    const double fr = (-1.0 / 3.0 * dx + std::sqrt(3.0) / 3.0 * dy) / g.edge;
    // cube rounding
    const double fs = -fq - fr;
    double rq = std::round(fq), rr = std::round(fr), rs = std::round(fs);
    const double eq = std::abs(rq - fq), er = std::abs(rr - fr), es = std::abs(rs - fs);
    if (eq > er && eq > es) rq = -rr - rs;
    else if (er > es) rr = -rq - rs;
    const CellId guess{static_cast<int>(rq), static_cast<int>(rr), g.level};

    CellId best = guess;
    double best_d = distance(p, g.center(guess));
    const double tol = 1e-9 * g.edge;
    for (auto n : g.neighbors(guess)) {
        const double d = distance(p, g.center(n));
        if (d < best_d - tol || (std::abs(d - best_d) <= tol && std::tie(n.q, n.r) < std::tie(best.q, best.r))) {
            if (d < best_d) best_d = d;
            best = n;
        }
    }
    return best;
}

/// Cells whose hexagon meets the box (a superset is fine for callers that
/// clip afterwards).
inline std::vector<CellId> cells_covering(const Box& box, const HexGrid& g) {
    std::vector<CellId> out;
    if (box.empty()) return out;
    const double pad = g.edge;
    const CellId a = cell_of(box.lo, g), b = cell_of({box.hi.x, box.lo.y}, g);
    const CellId c = cell_of({box.lo.x, box.hi.y}, g), d = cell_of(box.hi, g);
    const int q0 = std::min({a.q, b.q, c.q, d.q}) - 1, q1 = std::max({a.q, b.q, c.q, d.q}) + 1;
    const int r0 = std::min({a.r, b.r, c.r, d.r}) - 1 - (q1 - q0), r1 = std::max({a.r, b.r, c.r, d.r}) + 1 + (q1 - q0);
    const Box grown = box.inflated(pad);
    for (int q = q0; q <= q1; ++q)
        for (int r = r0; r <= r1; ++r) {
            CellId id{q, r, g.level};
            if (grown.contains(g.center(id))) out.push_back(id);
        }
    return out;
}

/// Items whose distance to the cell's hexagon is at most `buffer`.
inline std::vector<std::size_t> buffered_members(const HexGrid& g, CellId cell, std::span<const Point2> items,
                                                 double buffer = 200.0) {
    if (buffer < 0.0) throw std::invalid_argument("buffer must be non-negative");
    const auto hex = g.corners(cell);
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < items.size(); ++i)
        if (point_ring_distance(items[i], hex) <= buffer) out.push_back(i);
    return out;
}

}  // namespace svicov
