#pragma once

// Planar primitives for facade sampling and line-of-sight tests. All
// coordinates are metres in a projected CRS.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace svicov {

struct GeometryError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct Point2 {
    double x = 0.0;
    double y = 0.0;

    friend constexpr Point2 operator+(Point2 a, Point2 b) { return {a.x + b.x, a.y + b.y}; }
    friend constexpr Point2 operator-(Point2 a, Point2 b) { return {a.x - b.x, a.y - b.y}; }
    friend constexpr Point2 operator*(Point2 a, double s) { return {a.x * s, a.y * s}; }
    friend constexpr bool operator==(Point2, Point2) = default;
};

inline double dot(Point2 a, Point2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Point2 a, Point2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Point2 a) { return std::hypot(a.x, a.y); }
inline double distance(Point2 a, Point2 b) { return norm(b - a); }
inline bool is_finite(Point2 p) { return std::isfinite(p.x) && std::isfinite(p.y); }

struct Box {
    Point2 lo{std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
    Point2 hi{-std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};

    void expand(Point2 p) {
        lo = {std::min(lo.x, p.x), std::min(lo.y, p.y)};
        hi = {std::max(hi.x, p.x), std::max(hi.y, p.y)};
    }
    void expand(const Box& b) {
        if (b.empty()) return;
        expand(b.lo);
        expand(b.hi);
    }
    Box inflated(double d) const { return {{lo.x - d, lo.y - d}, {hi.x + d, hi.y + d}}; }
    bool empty() const { return lo.x > hi.x || lo.y > hi.y; }
    bool intersects(const Box& o) const {
        return !(o.lo.x > hi.x || o.hi.x < lo.x || o.lo.y > hi.y || o.hi.y < lo.y);
    }
    bool contains(Point2 p) const { return p.x >= lo.x && p.x <= hi.x && p.y >= lo.y && p.y <= hi.y; }
};

inline Box bounds_of(std::span<const Point2> pts) {
    Box b;
    for (auto p : pts) b.expand(p);
    return b;
}

inline Box segment_box(Point2 a, Point2 b) {
    return {{std::min(a.x, b.x), std::min(a.y, b.y)}, {std::max(a.x, b.x), std::max(a.y, b.y)}};
}

/// Sum of edge lengths of a closed ring (closing edge included).
inline double perimeter(std::span<const Point2> ring) {
    if (ring.size() < 3) throw GeometryError("ring needs at least 3 vertices");
    double total = 0.0;
    for (std::size_t i = 0; i < ring.size(); ++i)
        total += distance(ring[i], ring[(i + 1) % ring.size()]);
    if (!(total > 0.0)) throw GeometryError("ring has zero perimeter");
    return total;
}

inline double signed_area(std::span<const Point2> ring) {
    double a = 0.0;
    for (std::size_t i = 0; i < ring.size(); ++i) a += cross(ring[i], ring[(i + 1) % ring.size()]);
    return 0.5 * a;
}

/// Area centroid; falls back to the vertex mean for zero-area rings.
inline Point2 centroid(std::span<const Point2> ring) {
    const double a = signed_area(ring);
    if (std::abs(a) < 1e-12) {
        Point2 s{};
        for (auto p : ring) s = s + p;
        return s * (1.0 / static_cast<double>(ring.size()));
    }
    // Shift to the first vertex to keep the products small.
    const Point2 o = ring[0];
    double cx = 0.0, cy = 0.0;
    for (std::size_t i = 0; i < ring.size(); ++i) {
        const Point2 p = ring[i] - o, q = ring[(i + 1) % ring.size()] - o;
        const double c = cross(p, q);
        cx += (p.x + q.x) * c;
        cy += (p.y + q.y) * c;
    }
    return {o.x + cx / (6.0 * a), o.y + cy / (6.0 * a)};
}

namespace detail {

inline int sign_of(double v) { return (v > 0.0) - (v < 0.0); }

inline int orient(Point2 a, Point2 b, Point2 c) { return sign_of(cross(b - a, c - a)); }

// c collinear with ab assumed.
inline bool within_segment_box(Point2 a, Point2 b, Point2 c) {
    return c.x >= std::min(a.x, b.x) && c.x <= std::max(a.x, b.x) && c.y >= std::min(a.y, b.y) &&
           c.y <= std::max(a.y, b.y);
}

inline bool segments_intersect(Point2 a, Point2 b, Point2 c, Point2 d) {
    const int o1 = orient(a, b, c), o2 = orient(a, b, d), o3 = orient(c, d, a), o4 = orient(c, d, b);
    if (o1 * o2 < 0 && o3 * o4 < 0) return true;
    if (o1 == 0 && within_segment_box(a, b, c)) return true;
    if (o2 == 0 && within_segment_box(a, b, d)) return true;
    if (o3 == 0 && within_segment_box(c, d, a)) return true;
    if (o4 == 0 && within_segment_box(c, d, b)) return true;
    return false;
}

inline double point_segment_distance(Point2 p, Point2 a, Point2 b) {
    const Point2 ab = b - a;
    const double len2 = dot(ab, ab);
    if (len2 == 0.0) return distance(p, a);
    const double t = std::clamp(dot(p - a, ab) / len2, 0.0, 1.0);
    return distance(p, a + ab * t);
}

}  // namespace detail

enum class Containment { outside, boundary, inside };

/// Point-in-ring classification. Points within `tol` of an edge are on the boundary.
inline Containment locate(Point2 p, std::span<const Point2> ring, double tol = 1e-9) {
    bool in = false;
    const std::size_t n = ring.size();
    for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
        const Point2 a = ring[j], b = ring[i];
        if (detail::point_segment_distance(p, a, b) <= tol) return Containment::boundary;
        if ((a.y > p.y) != (b.y > p.y)) {
            const double x = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
            if (p.x < x) in = !in;
        }
    }
    return in ? Containment::inside : Containment::outside;
}

/// True when the ring has no two non-adjacent edges touching and no
/// repeated consecutive vertices.
inline bool is_simple(std::span<const Point2> ring) {
    const std::size_t n = ring.size();
    if (n < 3) return false;
    for (std::size_t i = 0; i < n; ++i)
        if (ring[i] == ring[(i + 1) % n]) return false;
    for (std::size_t i = 0; i < n; ++i) {
        // Consecutive edges a-b, b-c must not fold back onto each other.
        const Point2 a = ring[(i + n - 1) % n], b = ring[i], c = ring[(i + 1) % n];
        if (detail::orient(a, b, c) == 0 && dot(a - b, c - b) > 0.0) return false;
    }
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 2; j < n; ++j) {
            if (i == 0 && j == n - 1) continue;
            if (detail::segments_intersect(ring[i], ring[(i + 1) % n], ring[j], ring[(j + 1) % n])) return false;
        }
    }
    return std::abs(signed_area(ring)) > 0.0;
}

struct Footprint {
    std::string id;
    std::vector<Point2> exterior;
    std::string type_label;
    double perimeter = 0.0;
    Box box;

    Footprint() = default;
    Footprint(std::string id_, std::vector<Point2> ring, std::string type = {})
        : id(std::move(id_)), exterior(std::move(ring)), type_label(std::move(type)) {
        if (exterior.size() >= 2 && exterior.front() == exterior.back()) exterior.pop_back();
        for (auto p : exterior)
            if (!is_finite(p)) throw GeometryError("footprint " + id + " has non-finite coordinates");
        perimeter = svicov::perimeter(exterior);
        box = bounds_of(exterior);
    }
};

struct FacadeSample {
    std::string building_id;
    std::uint32_t index = 0;
    Point2 position;
    double arc_offset = 0.0;
};

/// Points every `spacing` metres of arc length, starting at the first
/// vertex; ceil(perimeter / spacing) samples in total.
inline std::vector<FacadeSample> sample_boundary(const Footprint& fp, double spacing) {
    if (!(spacing > 0.0)) throw GeometryError("sample spacing must be positive");
    if (fp.exterior.size() < 3 || !(fp.perimeter > 0.0))
        throw GeometryError("degenerate footprint " + fp.id);
    const auto count = static_cast<std::size_t>(std::ceil(fp.perimeter / spacing));
    std::vector<FacadeSample> out;
    out.reserve(count);
    const auto& ring = fp.exterior;
    std::size_t edge = 0;
    double edge_start = 0.0;
    double edge_len = distance(ring[0], ring[1 % ring.size()]);
    for (std::size_t k = 0; k < count; ++k) {
        const double s = static_cast<double>(k) * spacing;
        while (s >= edge_start + edge_len && edge + 1 < ring.size()) {
            edge_start += edge_len;
            ++edge;
            edge_len = distance(ring[edge], ring[(edge + 1) % ring.size()]);
        }
        const Point2 a = ring[edge], b = ring[(edge + 1) % ring.size()];
        const double t = edge_len > 0.0 ? std::clamp((s - edge_start) / edge_len, 0.0, 1.0) : 0.0;
        out.push_back({fp.id, static_cast<std::uint32_t>(k), a + (b - a) * t, s});
    }
    return out;
}

/// Does the segment origin -> target (stopped `eps` short of target) pass
/// through the interior of the occluder? Touching or running along the
/// boundary without entering does not block.
inline bool segment_blocked(Point2 origin, Point2 target, std::span<const Point2> ring, double eps = 1e-6) {
    const Point2 d = target - origin;
    const double len = norm(d);
    if (len == 0.0) return locate(origin, ring, 0.0) == Containment::inside;
    const double end_t = std::max(0.0, 1.0 - eps / len);
    const Point2 q = origin + d * end_t;

    const std::size_t n = ring.size();
    // Parameters along [origin, q] where the segment meets the boundary.
    double ts_buf[16];
    std::vector<double> ts_heap;
    std::size_t nts = 0;
    auto push_t = [&](double t) {
        if (nts < 16) {
            ts_buf[nts++] = t;
        } else {
            if (ts_heap.empty()) ts_heap.assign(ts_buf, ts_buf + 16);
            ts_heap.push_back(t);
            ++nts;
        }
    };
    push_t(0.0);
    push_t(1.0);
    const Point2 pq = q - origin;
    const double pq2 = dot(pq, pq);
    for (std::size_t i = 0; i < n; ++i) {
        const Point2 a = ring[i], b = ring[(i + 1) % n];
        const int o1 = detail::orient(origin, q, a), o2 = detail::orient(origin, q, b);
        if (o1 * o2 > 0) continue;
        const int o3 = detail::orient(a, b, origin), o4 = detail::orient(a, b, q);
        if (o1 * o2 < 0 && o3 * o4 < 0) return true;
        if (o1 == 0 && detail::within_segment_box(origin, q, a)) push_t(dot(a - origin, pq) / pq2);
        if (o2 == 0 && detail::within_segment_box(origin, q, b)) push_t(dot(b - origin, pq) / pq2);
    }
    double* ts = ts_heap.empty() ? ts_buf : ts_heap.data();
    std::sort(ts, ts + nts);
    for (std::size_t i = 0; i + 1 < nts; ++i) {
        if (ts[i + 1] - ts[i] <= 1e-12) continue;
        const Point2 mid = origin + pq * (0.5 * (ts[i] + ts[i + 1]));
        if (locate(mid, ring, 1e-12) == Containment::inside) return true;
    }
    return false;
}

inline bool segment_blocked(Point2 origin, Point2 target, const Footprint& occluder, double eps = 1e-6) {
    return segment_blocked(origin, target, std::span<const Point2>(occluder.exterior), eps);
}

/// Clockwise angle from north (+y), in [0, 360).
inline double bearing(Point2 from, Point2 to) {
    const Point2 d = to - from;
    if (d.x == 0.0 && d.y == 0.0) throw GeometryError("bearing of coincident points");
    double deg = std::atan2(d.x, d.y) * 180.0 / std::numbers::pi;
    if (deg < 0.0) deg += 360.0;
    if (deg >= 360.0) deg -= 360.0;
    return deg;
}

/// Distance between a point and a closed ring; zero when inside.
inline double point_ring_distance(Point2 p, std::span<const Point2> ring) {
    if (locate(p, ring, 0.0) != Containment::outside) return 0.0;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < ring.size(); ++i)
        best = std::min(best, detail::point_segment_distance(p, ring[i], ring[(i + 1) % ring.size()]));
    return best;
}

/// Distance between two closed rings; zero when they overlap or touch.
inline double ring_ring_distance(std::span<const Point2> a, std::span<const Point2> b) {
    if (locate(a[0], b, 0.0) != Containment::outside || locate(b[0], a, 0.0) != Containment::outside)
        return 0.0;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < a.size(); ++i) {
        const Point2 p = a[i], q = a[(i + 1) % a.size()];
        for (std::size_t j = 0; j < b.size(); ++j) {
            const Point2 r = b[j], s = b[(j + 1) % b.size()];
            if (detail::segments_intersect(p, q, r, s)) return 0.0;
            best = std::min({best, detail::point_segment_distance(p, r, s), detail::point_segment_distance(q, r, s),
                             detail::point_segment_distance(r, p, q), detail::point_segment_distance(s, p, q)});
        }
    }
    return best;
}

struct Road {
    std::string id;
    std::vector<Point2> points;
};

inline double polyline_length(std::span<const Point2> line) {
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < line.size(); ++i) total += distance(line[i], line[i + 1]);
    return total;
}

}  // namespace svicov
