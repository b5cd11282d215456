#pragma once

// Fixtures and independent reference computations shared by the suites.

#include <svicov/svicov.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

namespace fixture {

using namespace svicov;

inline Footprint square(const std::string& id, double x0, double y0, double side, std::string type = "Residential") {
    return Footprint(id, {{x0, y0}, {x0 + side, y0}, {x0 + side, y0 + side}, {x0, y0 + side}}, std::move(type));
}

struct MiniScene {
    std::vector<Footprint> footprints;
    std::vector<SviPoint> svi;
};

// Single 10 x 10 building, one observer 20 m south of its south facade.
inline MiniScene s1() { return {{square("B1", 0, 0, 10)}, {{"P1", {5, -20}, 0.0, {}}}}; }

// S1 with a 10 x 10 occluder between the building and an observer at (5, -30).
inline MiniScene s2() {
    return {{square("B1", 0, 0, 10), Footprint("O1", {{0, -15}, {10, -15}, {10, -5}, {0, -5}}, "Retail")},
            {{"P1", {5, -30}, 0.0, {}}}};
}

inline Scene to_scene(const MiniScene& m) {
    Scene s;
    s.footprints = m.footprints;
    s.svi = m.svi;
    return s;
}

// Random rectangles (some rotated, some on an integer lattice so rays graze
// corners exactly) and random observers.
inline MiniScene random_scene(std::uint64_t seed, std::size_t n_fp, std::size_t n_svi, double extent) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    MiniScene m;
    for (std::size_t i = 0; i < n_fp; ++i) {
        const bool lattice = u(rng) < 0.4;
        const double w = lattice ? std::floor(4 + 16 * u(rng)) : 4 + 16 * u(rng);
        const double h = lattice ? std::floor(4 + 16 * u(rng)) : 4 + 16 * u(rng);
        const double cx = lattice ? std::floor(extent * u(rng)) : extent * u(rng);
        const double cy = lattice ? std::floor(extent * u(rng)) : extent * u(rng);
        std::vector<Point2> ring;
        if (lattice) {
            ring = {{cx, cy}, {cx + w, cy}, {cx + w, cy + h}, {cx, cy + h}};
        } else {
            const double a = 2.0 * std::acos(-1.0) * u(rng);
            const Point2 ex{std::cos(a) * w / 2, std::sin(a) * w / 2}, ey{-std::sin(a) * h / 2, std::cos(a) * h / 2};
            const Point2 c{cx, cy};
            ring = {c - ex - ey, c + ex - ey, c + ex + ey, c - ex + ey};
        }
        if (u(rng) < 0.5) std::reverse(ring.begin(), ring.end());
        m.footprints.emplace_back("f" + std::to_string(i), std::move(ring), u(rng) < 0.5 ? "Residential" : "Retail");
    }
    for (std::size_t i = 0; i < n_svi; ++i) {
        const bool lattice = u(rng) < 0.3;
        Point2 p{extent * u(rng), extent * u(rng)};
        if (lattice) p = {std::floor(p.x), std::floor(p.y)};
        m.svi.push_back({"s" + std::to_string(i), p, 360.0 * u(rng), {}});
    }
    return m;
}

// Does the open segment meet the strict interior of a convex polygon?
// Cyrus-Beck clipping against open half-planes.
inline bool convex_interior_hit(Point2 a, Point2 b, const std::vector<Point2>& ring) {
    double area2 = 0.0;
    for (std::size_t i = 0; i < ring.size(); ++i) area2 += cross(ring[i], ring[(i + 1) % ring.size()]);
    const double orient = area2 > 0 ? 1.0 : -1.0;
    double lo = 0.0, hi = 1.0;
    const Point2 d = b - a;
    for (std::size_t i = 0; i < ring.size(); ++i) {
        const Point2 p = ring[i], q = ring[(i + 1) % ring.size()];
        // inside iff orient * cross(q - p, x - p) > 0
        const double f0 = orient * cross(q - p, a - p);
        const double fd = orient * cross(q - p, d);
        if (fd == 0.0) {
            if (!(f0 > 0.0)) return false;
            continue;
        }
        const double t = -f0 / fd;
        if (fd > 0.0) lo = std::max(lo, t);
        else hi = std::min(hi, t);
    }
    return hi - lo > 1e-9;
}

// Length of the road polyline within r of any point, by fine midpoint
// integration.
inline double covered_length_numeric(const std::vector<Point2>& line, const std::vector<Point2>& pts, double r,
                                     int steps_per_segment = 200000) {
    double covered = 0.0;
    for (std::size_t i = 0; i + 1 < line.size(); ++i) {
        const Point2 a = line[i], b = line[i + 1];
        const double len = distance(a, b);
        const double h = len / steps_per_segment;
        for (int k = 0; k < steps_per_segment; ++k) {
            const Point2 m = a + (b - a) * ((k + 0.5) / steps_per_segment);
            for (const auto& p : pts)
                if (distance(m, p) <= r) {
                    covered += h;
                    break;
                }
        }
    }
    return covered;
}

// Gi* by direct substitution, with an explicit weight matrix.
inline double gi_star_direct(const std::vector<double>& x, const std::vector<std::vector<int>>& w, std::size_t i) {
    const double n = static_cast<double>(x.size());
    double mean = 0.0;
    for (double v : x) mean += v;
    mean /= n;
    double s2 = 0.0;
    for (double v : x) s2 += v * v;
    const double s = std::sqrt(s2 / n - mean * mean);
    double wx = 0.0, wsum = 0.0, w2 = 0.0;
    for (std::size_t j = 0; j < x.size(); ++j) {
        wx += w[i][j] * x[j];
        wsum += w[i][j];
        w2 += w[i][j] * w[i][j];
    }
    return (wx - mean * wsum) / (s * std::sqrt((n * w2 - wsum * wsum) / (n - 1.0)));
}

inline std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline std::vector<std::string> lines_of(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::vector<std::string> out;
    std::string l;
    while (std::getline(in, l)) out.push_back(l);
    return out;
}

inline std::filesystem::path temp_dir(const std::string& name) {
    auto d = std::filesystem::temp_directory_path() / ("svicov_test_" + name);
    std::filesystem::remove_all(d);
    std::filesystem::create_directories(d);
    return d;
}

inline int cli(std::vector<std::string> args) {
    args.insert(args.begin(), "svicov");
    std::vector<const char*> argv;
    for (auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    return run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
}

// The analytic interval-scan fixture: completeness declines linearly,
// frequency quadratically; derivative curves meet at 60 m.
inline ScanResult crossing_fixture() {
    ScanResult s;
    for (int d = 10; d <= 95; d += 5) {
        const double t = d - 10.0;
        s.rows.push_back({CellId{0, 0, GridLevel::fine}, 50.0, static_cast<double>(d), 1.0 - 0.01 * t,
                          1.0 - 0.02 * t + 0.0001 * t * t});
    }
    normalize(s);
    return s;
}

}  // namespace fixture
