// Acceptance run: one PASS/FAIL line per criterion, non-zero exit on any failure.

#include "support.hpp"

#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <set>
#include <tuple>

using namespace svicov;
namespace fs = std::filesystem;

namespace {

using clock_type = std::chrono::steady_clock;

double seconds_since(clock_type::time_point t0) {
    return std::chrono::duration<double>(clock_type::now() - t0).count();
}

struct Outcome {
    bool pass = true;
    std::string detail;

    void require(bool ok, const std::string& what) {
        if (!ok) {
            if (pass) detail = what;
            pass = false;
        }
    }
};

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

using Keyed = std::tuple<std::string, std::string, std::uint32_t, LineStatus>;

std::set<Keyed> keyed(const std::vector<SightLine>& lines, const std::vector<SviPoint>& svi,
                      const std::vector<Footprint>& fps) {
    std::set<Keyed> out;
    for (const auto& l : lines) out.emplace(svi[l.svi].id, fps[l.building].id, l.sample_index, l.status);
    return out;
}

std::vector<SightLine> brute_all(const std::vector<Footprint>& fps, const std::vector<FacadeSample>& samples,
                                 const std::vector<SviPoint>& svi, const VisibilityParams& vis) {
    std::vector<SightLine> out;
    for (std::uint32_t i = 0; i < svi.size(); ++i) {
        auto s = brute_force_sightlines(fps, samples, svi[i], vis, i);
        out.insert(out.end(), s.begin(), s.end());
    }
    return out;
}

std::size_t count_visible(const std::vector<SightLine>& lines) {
    return std::count_if(lines.begin(), lines.end(), [](auto& l) { return l.status == LineStatus::visible; });
}

// ------------------------------------------------------------------------

Outcome oracle_equivalence() {
    Outcome o;
    const auto t0 = clock_type::now();
    std::size_t total_lines = 0;
    const VisibilityParams vis{50.0};
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        const std::size_t n_fp = 100 + (seed * 37) % 201, n_svi = 50 + (seed * 53) % 151;
        const auto m = fixture::random_scene(1000 + seed, n_fp, n_svi, 400);
        const auto samples = sample_all(m.footprints, 2.0);
        const SceneIndex idx(m.footprints, samples, vis.radius);
        const auto fast = compute_all_sightlines(idx, m.svi, vis);
        const auto slow = brute_all(m.footprints, samples, m.svi, vis);
        total_lines += fast.size();
        o.require(keyed(fast, m.svi, m.footprints) == keyed(slow, m.svi, m.footprints),
                  "scene " + std::to_string(seed) + " differs from brute force");
    }
    const double t = seconds_since(t0);
    o.require(t < 300.0, "took " + fmt("%.1f", t) + " s");
    if (o.pass) o.detail = "50 scenes, " + std::to_string(total_lines) + " lines, " + fmt("%.1f", t) + " s";
    return o;
}

Outcome scene_fixtures() {
    Outcome o;
    for (int which : {1, 2}) {
        const auto m = which == 1 ? fixture::s1() : fixture::s2();
        const auto samples = sample_all(m.footprints, 2.0);
        const SceneIndex idx(m.footprints, samples, 50.0);
        const auto lines = compute_all_sightlines(idx, m.svi, {});
        const auto b = aggregate_building_coverage(lines, samples, m.footprints);
        if (which == 1) {
            o.require(count_visible(lines) == 6, "S1 visible " + std::to_string(count_visible(lines)));
            o.require(format_number(b[0].coc_b) == "0.300000000", "S1 coc_b " + format_number(b[0].coc_b));
            o.require(format_number(b[0].foc_b) == "0.150000000", "S1 foc_b " + format_number(b[0].foc_b));
        } else {
            std::size_t to_b1 = 0;
            for (const auto& l : lines) to_b1 += l.building == 0 && l.status == LineStatus::visible;
            o.require(to_b1 == 0, "S2 visible " + std::to_string(to_b1));
        }
    }
    if (o.pass) o.detail = "S1 6 visible, coc_b 0.300000000, foc_b 0.150000000; S2 0 visible";
    return o;
}

BuildingCoverage stub(std::string type, std::size_t u_avail, std::size_t u_seen, std::size_t v) {
    BuildingCoverage b;
    b.type_label = std::move(type);
    b.u_avail = u_avail;
    b.u_seen = u_seen;
    b.v = v;
    b.perimeter = 40;
    b.valid = u_avail > 0;
    b.coc_b = b.valid ? double(u_seen) / double(u_avail) : 0.0;
    b.foc_b = double(v) / 40.0;
    return b;
}

Outcome formula_suite() {
    Outcome o;
    const auto p = building_proportion({{11, 500}, {21, 300}, {23, 150}, {7, 50}});
    o.require(p && *p == 0.625, "building proportion");
    const std::vector<BuildingCoverage> cell{stub("R", 10, 1, 1), stub("R", 10, 2, 2), stub("R", 10, 3, 3),
                                             stub("R", 10, 0, 0)};
    const auto ca = coc_a(cell);
    o.require(ca && *ca == 0.75, "coc_a");
    const std::vector<BuildingCoverage> typed{stub("Residential", 10, 2, 2), stub("Residential", 10, 1, 1),
                                              stub("Retail", 10, 1, 1)};
    const auto fa = foc_a(typed, "Residential");
    o.require(fa && *fa == 0.75, "foc_a");
    const auto rc = road_coverage(std::vector<Road>{{"r", {{0, 0}, {100, 0}}}}, std::vector<Point2>{{25, 0}}, 50);
    o.require(rc.completeness && std::abs(*rc.completeness - 0.75) <= 1e-9, "road completeness");
    const auto pc = population_coverage(std::vector<PopulationCell>{{1.0, 100}, {0.5, 200}});
    o.require(pc.ratio && std::abs(*pc.ratio - 2.0 / 3.0) <= 1e-6, "population coverage");
    if (o.pass) o.detail = "proportion 0.625, coc_a 0.75, foc_a 0.75, road 0.75, population 0.6667";
    return o;
}

Outcome monotonicity() {
    Outcome o;
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> u(0, 1);

    // Visible set grows with radius.
    int radius_cases = 0;
    for (; radius_cases < 1000; ++radius_cases) {
        const auto m = fixture::random_scene(rng(), 10, 3, 80);
        const auto samples = sample_all(m.footprints, 2.0);
        const SceneIndex idx(m.footprints, samples, 50);
        const double r1 = 5 + 50 * u(rng), r2 = r1 + 40 * u(rng);
        auto vis = [&](double r) {
            std::set<std::tuple<std::uint32_t, std::uint32_t, std::uint32_t>> out;
            for (const auto& l : compute_all_sightlines(idx, m.svi, {r, 1e-6}))
                if (l.status == LineStatus::visible) out.emplace(l.svi, l.building, l.sample_index);
            return out;
        };
        const auto a = vis(r1), b = vis(r2);
        o.require(std::includes(b.begin(), b.end(), a.begin(), a.end()), "visible set shrank with radius");
    }

    // Road completeness grows with buffer and with added observers.
    int road_cases = 0;
    for (; road_cases < 1000; ++road_cases) {
        std::vector<Road> roads;
        for (int k = 0; k < 3; ++k) roads.push_back({"r", {{200 * u(rng), 200 * u(rng)}, {200 * u(rng), 200 * u(rng)}}});
        std::vector<Point2> pts;
        for (int i = 0; i < 6; ++i) pts.push_back({200 * u(rng), 200 * u(rng)});
        const double r1 = 1 + 60 * u(rng), r2 = r1 + 30 * u(rng);
        const double base = *road_coverage(roads, pts, r1).completeness;
        o.require(base <= *road_coverage(roads, pts, r2).completeness + 1e-12, "completeness fell with buffer");
        auto more = pts;
        more.push_back({200 * u(rng), 200 * u(rng)});
        o.require(base <= *road_coverage(roads, more, r1).completeness + 1e-12, "completeness fell with observers");
    }

    // Nested interval scan never raises the cell means.
    std::size_t scan_cases = 0;
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        SynthConfig sc;
        sc.seed = 500 + seed;
        sc.block_rows = sc.block_cols = 8;
        sc.svi_spacing = 10;
        const auto city = generate_city(sc);
        const IntervalScanConfig cfg{{10, 20, 40, 80}};
        const auto res = scan(city.scene, cfg, HexGrid(174), CoverageParams{});
        for (std::size_t i = 1; i < res.rows.size(); ++i) {
            const auto &a = res.rows[i - 1], &b = res.rows[i];
            if (a.cell != b.cell || a.radius != b.radius) continue;
            o.require(b.mean_coc_b <= a.mean_coc_b + 1e-12, "mean coc_b rose in cell " + b.cell.str());
            o.require(b.mean_foc_b <= a.mean_foc_b + 1e-12, "mean foc_b rose in cell " + b.cell.str());
            scan_cases += 2;
        }
    }
    o.require(scan_cases >= 1000, "only " + std::to_string(scan_cases) + " scan comparisons");
    if (o.pass)
        o.detail = std::to_string(radius_cases) + " radius, " + std::to_string(road_cases) + " road, " +
                   std::to_string(scan_cases) + " nested-scan cases";
    return o;
}

Outcome statistics_suite() {
    Outcome o;
    const std::vector<double> x{0, 0, 9};
    const std::vector<std::vector<int>> w{{1, 1, 0}, {1, 1, 1}, {0, 1, 1}};
    const CellId c0{0, 0}, c1{1, 0}, c2{2, 0};
    const auto gi = getis_ord_gi_star({{c0, 0}, {c1, 0}, {c2, 9}}, {{c0, {c0, c1}}, {c1, {c0, c1, c2}}, {c2, {c1, c2}}});
    for (std::size_t i : {0u, 2u})
        o.require(gi[i].z && std::abs(*gi[i].z - fixture::gi_star_direct(x, w, i)) <= 1e-9, "Gi* 3-cell fixture");

    std::map<CellId, double> flat;
    for (int q = 0; q < 6; ++q) flat[{q, 0}] = 0.42;
    std::set<CellId> cells;
    for (auto& [c, v] : flat) cells.insert(c);
    for (const auto& g : getis_ord_gi_star(flat, hex_contiguity(cells, HexGrid(10))))
        o.require(g.classification == HotspotClass::neutral, "all-equal input not neutral");

    const auto f = ols_fit(std::vector<double>{1, 2, 3}, std::vector<double>{3, 5, 7});
    o.require(std::abs(f.slope - 2) <= 1e-9 && std::abs(f.intercept - 1) <= 1e-9, "OLS exact line");

    std::vector<double> xs, yq, yp;
    for (int d = 10; d <= 95; d += 5) {
        xs.push_back(d);
        yq.push_back(0.5 - 0.03 * d + 0.0007 * d * d);
        yp.push_back(2.0 * std::pow(d, -0.7));
    }
    o.require(std::abs(fit_curve(xs, yq, FitKind::polynomial(2)).r2 - 1.0) <= 1e-12, "polynomial r2");
    o.require(std::abs(fit_curve(xs, yp, FitKind::power()).params[1] + 0.7) <= 1e-6, "power exponent");
    if (o.pass) o.detail = "Gi* direct formula, neutral flat input, OLS, polynomial r2 = 1, power exponent";
    return o;
}

Outcome optimal_interval() {
    Outcome o;
    const auto opt = detect_optimal_interval(fixture::crossing_fixture(), FitKind::spline());
    const bool hit = opt.size() == 1 && opt[0].optimal_interval;
    o.require(hit && std::abs(*opt[0].optimal_interval - 60.0) <= 2.5, "spline crossing not within 60 +/- 2.5");

    SynthConfig sc;
    sc.seed = 7;
    sc.block_rows = sc.block_cols = 6;
    sc.core_density_boost = 2.0;
    sc.svi_spacing = 5.0;
    const auto city = generate_city(sc);
    IntervalScanConfig cfg{{10, 15}, {50}};
    const auto res = scan(city.scene, cfg, HexGrid(174), CoverageParams{});
    std::size_t populated = 0, agree = 0;
    for (std::size_t i = 0; i + 1 < res.rows.size(); ++i) {
        const auto &a = res.rows[i], &b = res.rows[i + 1];
        if (a.cell != b.cell || a.interval != 10 || a.mean_coc_b <= 0 || a.mean_foc_b <= 0) continue;
        ++populated;
        const double drop_c = (a.mean_coc_b - b.mean_coc_b) / a.mean_coc_b;
        const double drop_f = (a.mean_foc_b - b.mean_foc_b) / a.mean_foc_b;
        agree += drop_f >= drop_c;
    }
    const double share = populated ? double(agree) / double(populated) : 0.0;
    o.require(populated > 0 && share >= 0.8, "frequency drop led in " + fmt("%.2f", share) + " of cells");
    if (o.pass)
        o.detail = "crossing at " + fmt("%.2f", *opt[0].optimal_interval) + " m; frequency drop >= completeness drop in " +
                   std::to_string(agree) + "/" + std::to_string(populated) + " cells";
    return o;
}

Outcome performance() {
    Outcome o;
    SynthConfig sc;
    sc.seed = 99;
    sc.block_rows = sc.block_cols = 12;
    sc.building_density = 1.0;
    sc.building_size_min = 8.0;
    sc.building_size_max = 12.0;
    sc.svi_spacing = 3.0;
    auto city = generate_city(sc);
    CoverageParams p;
    p.workers = 1;
    const auto t0 = clock_type::now();
    const auto cov = compute_coverage(city.scene, p);
    const double t = seconds_since(t0);
    o.require(city.scene.footprints.size() >= 5000, std::to_string(city.scene.footprints.size()) + " buildings");
    o.require(city.scene.svi.size() >= 10000, std::to_string(city.scene.svi.size()) + " svi");
    o.require(t < 120.0, "coverage took " + fmt("%.1f", t) + " s");

    // Index against brute force on a 500 / 500 scene.
    SynthConfig small;
    small.seed = 100;
    small.block_rows = small.block_cols = 8;
    small.building_density = 1.0;
    small.svi_spacing = 7.0;
    auto sm = generate_city(small).scene;
    sm.footprints.resize(std::min<std::size_t>(500, sm.footprints.size()));
    sm.svi.resize(std::min<std::size_t>(500, sm.svi.size()));
    const auto samples = sample_all(sm.footprints, 2.0);
    const VisibilityParams vis{};
    const auto t1 = clock_type::now();
    const SceneIndex idx(sm.footprints, samples, vis.radius);
    const auto fast = compute_all_sightlines(idx, sm.svi, vis);
    const double t_index = seconds_since(t1);
    const auto t2 = clock_type::now();
    const auto slow = brute_all(sm.footprints, samples, sm.svi, vis);
    const double t_brute = seconds_since(t2);
    const double speedup = t_brute / std::max(t_index, 1e-9);
    o.require(sm.footprints.size() == 500 && sm.svi.size() == 500, "small scene not 500/500");
    o.require(keyed(fast, sm.svi, sm.footprints) == keyed(slow, sm.svi, sm.footprints), "small scene mismatch");
    o.require(speedup >= 10.0, "index speedup " + fmt("%.1f", speedup) + "x");
    if (o.pass)
        o.detail = std::to_string(city.scene.footprints.size()) + " buildings, " + std::to_string(cov.samples.size()) +
                   " samples, " + std::to_string(city.scene.svi.size()) + " svi in " + fmt("%.1f", t) +
                   " s; index speedup " + fmt("%.0f", speedup) + "x";
    return o;
}

std::string manifest_without_durations(const fs::path& p) {
    auto j = nlohmann::json::parse(fixture::slurp(p));
    j.erase("durations_ms");
    return j.dump();
}

Outcome determinism() {
    Outcome o;
    const auto root = fixture::temp_dir("acceptance_det");
    {
        std::ofstream cfg(root / "config.json");
        cfg << R"({"intervals": [10, 20, 30, 40, 50, 60], "radii": [40, 50], "synth": {"block_rows": 3, "block_cols": 3}})";
    }
    const std::string config = (root / "config.json").string();
    const std::vector<std::string> cmds{"synth",         "coverage",        "indicators",    "grid-agg",
                                        "road-coverage", "hotspot",         "bias-regression", "interval-scan",
                                        "optimal-interval", "summary"};
    std::size_t files = 0;
    for (const auto& c : cmds) {
        for (const char* run : {"a", "b"}) {
            std::vector<std::string> args{c, "--config", config, "--out", (root / run / c).string()};
            if (c == "synth") {
                args.insert(args.end(), {"--seed", "17"});
            } else {
                args.insert(args.end(), {"--scene", (root / "a" / "synth").string()});
            }
            o.require(fixture::cli(args) == 0, c + " failed");
        }
        if (!fs::exists(root / "a" / c)) continue;
        for (const auto& e : fs::directory_iterator(root / "a" / c)) {
            const auto other = root / "b" / c / e.path().filename();
            const bool same = e.path().filename() == "run_manifest.json"
                                  ? manifest_without_durations(e.path()) == manifest_without_durations(other)
                                  : fixture::slurp(e.path()) == fixture::slurp(other);
            o.require(same, c + ": " + e.path().filename().string() + " differs");
            ++files;
        }
    }
    if (o.pass) o.detail = std::to_string(cmds.size()) + " commands, " + std::to_string(files) + " files identical";
    return o;
}

}  // namespace

int main() {
    const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
        {"oracle equivalence", oracle_equivalence}, {"scene fixtures", scene_fixtures},
        {"formula suite", formula_suite},           {"monotonicity properties", monotonicity},
        {"statistics suite", statistics_suite},     {"optimal interval", optimal_interval},
        {"performance", performance},               {"determinism", determinism},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o.pass = false;
            o.detail = std::string("exception: ") + e.what();
        }
        failed += !o.pass;
        std::cout << (o.pass ? "PASS" : "FAIL") << " [" << i + 1 << "] " << criteria[i].first << ": " << o.detail
                  << std::endl;
    }
    return failed == 0 ? 0 : 1;
}
