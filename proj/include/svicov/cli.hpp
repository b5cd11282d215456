#pragma once

// Command-line front end. `run_cli` is callable in-process so tests can
// drive commands without spawning the binary.

#include <CLI11.hpp>
#include <json.hpp>

#include <Eigen/Core>

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "config.hpp"
#include "interval.hpp"
#include "io.hpp"
#include "pipeline.hpp"
#include "stats.hpp"
#include "synth.hpp"

namespace svicov {

inline constexpr const char* kVersion = "1.0.0";

namespace cli {

namespace fs = std::filesystem;
using nlohmann::json;

struct Options {
    std::string command;
    std::optional<fs::path> config, scene, out, sightlines, scan;
    std::optional<double> radius, interval, threshold, grid_edge;
    std::optional<std::uint64_t> seed;
    std::optional<unsigned> parallelism;
    bool geometric_only = false;
};

inline std::uint64_t fnv1a(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::uint64_t h = 1469598103934665603ull;
    char buf[1 << 14];
    while (in.read(buf, sizeof buf) || in.gcount() > 0) {
        for (std::streamsize i = 0; i < in.gcount(); ++i) {
            h ^= static_cast<unsigned char>(buf[i]);
            h *= 1099511628211ull;
        }
    }
    return h;
}

class Run {
public:
    Run(Options o, std::ostream& log) : opt_(std::move(o)), log_(log), started_(clock::now()) {
        cfg_ = opt_.config ? load_config(*opt_.config) : Config{};
        auto& cov = cfg_.coverage;
        if (opt_.radius) cov.vis.radius = *opt_.radius;
        if (opt_.threshold) cov.threshold = cfg_.scan.threshold = *opt_.threshold;
        if (opt_.grid_edge) cfg_.fine_edge = cfg_.synth.fine_edge = *opt_.grid_edge;
        if (opt_.seed) cfg_.synth.seed = *opt_.seed;
        if (opt_.parallelism) cov.workers = *opt_.parallelism;
        if (opt_.geometric_only) cov.geometric_only = true;
        validate(cfg_);
        if (opt_.interval && !(*opt_.interval > 0.0)) throw InputError("--interval must be positive");
        if (!opt_.out) throw InputError("--out is required");
        fs::create_directories(*opt_.out);
        if (opt_.config) note_input(*opt_.config);
    }

    const Config& config() const { return cfg_; }
    const Options& options() const { return opt_; }

    fs::path output(const std::string& name) {
        outputs_.push_back(name);
        return *opt_.out / name;
    }

    void note_input(const fs::path& p) {
        char hex[17];
        std::snprintf(hex, sizeof hex, "%016llx", static_cast<unsigned long long>(fnv1a(p)));
        inputs_.push_back({{"path", p.generic_string()}, {"bytes", fs::file_size(p)}, {"fnv1a64", hex}});
    }

    template <class F>
    auto timed(const std::string& stage, F&& f) {
        const auto t0 = clock::now();
        if constexpr (std::is_void_v<decltype(f())>) {
            f();
            durations_[stage] = ms_since(t0);
        } else {
            auto r = f();
            durations_[stage] = ms_since(t0);
            return r;
        }
    }

    void warn(const std::string& w) {
        warnings_.push_back(w);
        log_ << "warning: " << w << '\n';
    }

    Scene& scene() {
        if (scene_) return *scene_;
        if (!opt_.scene) throw InputError("--scene is required for '" + opt_.command + "'");
        if (!fs::is_directory(*opt_.scene)) throw InputError("scene directory not found: " + opt_.scene->string());
        const auto paths = ScenePaths::in_directory(*opt_.scene);
        LoadReport report;
        scene_ = timed("load", [&] { return load_scene(paths, report, cfg_.mapping); });
        for (const auto& p : {paths.footprints, paths.roads, paths.svi}) note_input(p);
        if (paths.bins) note_input(*paths.bins);
        if (paths.population) note_input(*paths.population);
        for (const auto& w : report.warnings) warn(w);
        skipped_ = report.skipped_footprints;
        if (opt_.interval) {
            const double d = *opt_.interval;
            const auto pos = resample_along_roads(scene_->roads, d);
            scene_->svi = snap_to_svi(pos, scene_->svi, cfg_.scan.snap_tolerance.value_or(d / 2.0));
        }
        return *scene_;
    }

    const CoverageResult& coverage() {
        if (!coverage_) {
            Scene& s = scene();
            coverage_ = timed("coverage", [&] { return compute_coverage(s, cfg_.coverage); });
            if (coverage_->svi_inside_footprints > 0)
                warn(std::to_string(coverage_->svi_inside_footprints) + " svi points lie inside footprints");
        }
        return *coverage_;
    }

    /// Replaces the computed lines with a re-ingested sightlines table.
    void use_sightlines(const fs::path& p) {
        Scene& s = scene();
        note_input(p);
        CoverageResult r;
        r.samples = sample_all(s.footprints, cfg_.coverage.spacing);
        r.lines = read_sightlines(p, s);
        r.buildings = aggregate_building_coverage(r.lines, r.samples, s.footprints);
        assign_size_quintiles(r.buildings);
        r.filtered = std::any_of(r.lines.begin(), r.lines.end(),
                                 [](const SightLine& l) { return l.status == LineStatus::segmentation_filtered; });
        coverage_ = std::move(r);
    }

    void write_manifest() {
        json m;
        m["command"] = opt_.command;
        m["version"] = kVersion;
        m["libraries"] = {{"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) +
                                        "." + std::to_string(EIGEN_MINOR_VERSION)},
                          {"nlohmann_json", std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." +
                                                std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." +
                                                std::to_string(NLOHMANN_JSON_VERSION_PATCH)},
                          {"cli11", CLI11_VERSION},
                          {"compiler", __VERSION__}};
        m["inputs"] = inputs_;
        m["parameters"] = config_to_json(cfg_);
        if (opt_.interval) m["parameters"]["svi_interval"] = *opt_.interval;
        if (coverage_) m["mode"] = coverage_->filtered ? "segmentation-filtered" : "geometric-only";
        m["outputs"] = outputs_;
        m["skipped_footprints"] = skipped_;
        m["warnings"] = warnings_;
        durations_["total"] = ms_since(started_);
        m["durations_ms"] = durations_;
        std::ofstream out(*opt_.out / "run_manifest.json", std::ios::binary);
        out << m.dump(1) << '\n';
    }

private:
    using clock = std::chrono::steady_clock;
    static double ms_since(clock::time_point t0) {
        return std::chrono::duration<double, std::milli>(clock::now() - t0).count();
    }

    Options opt_;
    std::ostream& log_;
    clock::time_point started_;
    Config cfg_;
    std::optional<Scene> scene_;
    std::optional<CoverageResult> coverage_;
    std::size_t skipped_ = 0;
    json inputs_ = json::array();
    std::vector<std::string> outputs_;
    std::vector<std::string> warnings_;
    std::map<std::string, double> durations_;
};

// ---------------------------------------------------------------- cells --

struct CellRow {
    CellId cell;
    std::size_t n_total = 0, n_seen = 0;
    std::optional<double> coc_a, mean_coc_b, road_completeness;
    std::optional<double> gi_coc_a, gi_mean_coc_b, gi_road;
    HotspotClass cls_coc_a = HotspotClass::neutral, cls_mean_coc_b = HotspotClass::neutral,
                 cls_road = HotspotClass::neutral;
    HotspotClass rank_coc_a = HotspotClass::neutral, rank_mean_coc_b = HotspotClass::neutral,
                 rank_road = HotspotClass::neutral;
};

inline void apply_gi(std::vector<CellRow>& rows, const HexGrid& grid, const Config& cfg,
                     std::optional<double> CellRow::*value, std::optional<double> CellRow::*z,
                     HotspotClass CellRow::*cls, HotspotClass CellRow::*rank) {
    std::map<CellId, double> values;
    for (const auto& r : rows)
        if (r.*value) values[r.cell] = *(r.*value);
    if (values.size() < 2) return;
    std::set<CellId> cells;
    for (const auto& [c, v] : values) cells.insert(c);
    const auto gi = getis_ord_gi_star(values, hex_contiguity(cells, grid), cfg.z_cutoff, cfg.rank_fraction);
    std::map<CellId, const GiStar*> by_cell;
    for (const auto& g : gi) by_cell[g.cell] = &g;
    for (auto& r : rows) {
        auto it = by_cell.find(r.cell);
        if (it == by_cell.end()) continue;
        r.*z = it->second->z;
        r.*cls = it->second->classification;
        r.*rank = it->second->rank_class;
    }
}

inline std::vector<CellRow> cell_rows(Run& run) {
    const Scene& scene = run.scene();
    const auto& cov = run.coverage();
    const auto& cfg = run.config();
    const HexGrid grid = cfg.fine_grid();
    std::map<CellId, CellRow> rows;
    for (const auto& [cell, members] : group_by_cell(cov.buildings, scene.footprints, grid)) {
        const auto a = area_coverage(cell, members, cfg.scan.covered_only);
        auto& r = rows[cell];
        r.cell = cell;
        r.n_total = a.n_total;
        r.n_seen = a.n_seen;
        r.coc_a = a.coc_a;
        r.mean_coc_b = a.mean_coc_b;
    }
    std::vector<Point2> svi_pos;
    for (const auto& s : scene.svi) svi_pos.push_back(s.position);
    for (const auto& [cell, rc] : road_coverage_by_cell(scene.roads, svi_pos, grid, cfg.coverage.vis.radius)) {
        auto& r = rows[cell];
        r.cell = cell;
        r.road_completeness = rc.completeness;
    }
    std::vector<CellRow> out;
    for (auto& [c, r] : rows) out.push_back(r);
    apply_gi(out, grid, cfg, &CellRow::coc_a, &CellRow::gi_coc_a, &CellRow::cls_coc_a, &CellRow::rank_coc_a);
    apply_gi(out, grid, cfg, &CellRow::mean_coc_b, &CellRow::gi_mean_coc_b, &CellRow::cls_mean_coc_b,
             &CellRow::rank_mean_coc_b);
    apply_gi(out, grid, cfg, &CellRow::road_completeness, &CellRow::gi_road, &CellRow::cls_road, &CellRow::rank_road);
    return out;
}

// Property values in GeoJSON carry the same rounding as the tables.
inline json rounded(const std::optional<double>& v) {
    if (!v || !std::isfinite(*v)) return nullptr;
    return std::stod(format_number(*v));
}

// ------------------------------------------------------------- commands --

inline void cmd_synth(Run& run) {
    const auto& cfg = run.config();
    auto city = run.timed("synth", [&] { return generate_city(cfg.synth, cfg.mapping); });
    run.timed("write", [&] { write_scene(city.scene, *run.options().out); });
    for (const char* f : {"footprints.geojson", "roads.geojson", "svi.geojson"}) run.output(f);
    if (!city.scene.bins.empty()) run.output("bins.csv");
    if (!city.scene.population.empty()) run.output("population.csv");
}

inline void cmd_coverage(Run& run) {
    const auto& cov = run.coverage();
    const Scene& s = run.scene();
    write_sightlines(run.output("sightlines.csv"), cov.lines, s.svi, s.footprints);
}

inline void cmd_indicators(Run& run) {
    if (run.options().sightlines) run.use_sightlines(*run.options().sightlines);
    write_buildings(run.output("buildings.csv"), run.coverage().buildings);
}

inline void cmd_grid_agg(Run& run) {
    const auto rows = run.timed("grid", [&] { return cell_rows(run); });
    CsvWriter w(run.output("cells.csv"));
    w.row("cell_id", "n_total", "n_seen", "coc_a", "mean_coc_b", "road_completeness", "gi_z_coc_a", "gi_z_mean_coc_b",
          "gi_z_road");
    const HexGrid grid = run.config().fine_grid();
    json fc = {{"type", "FeatureCollection"}, {"features", json::array()}};
    for (const auto& r : rows) {
        w.row(r.cell.str(), r.n_total, r.n_seen, r.coc_a, r.mean_coc_b, r.road_completeness, r.gi_coc_a,
              r.gi_mean_coc_b, r.gi_road);
        json ring = json::array();
        const auto corners = grid.corners(r.cell);
        for (auto p : corners) ring.push_back({rounded(p.x), rounded(p.y)});
        ring.push_back({rounded(corners[0].x), rounded(corners[0].y)});
        fc["features"].push_back({{"type", "Feature"},
                                  {"properties",
                                   {{"cell_id", r.cell.str()},
                                    {"n_total", r.n_total},
                                    {"n_seen", r.n_seen},
                                    {"coc_a", rounded(r.coc_a)},
                                    {"mean_coc_b", rounded(r.mean_coc_b)},
                                    {"road_completeness", rounded(r.road_completeness)},
                                    {"gi_z_coc_a", rounded(r.gi_coc_a)},
                                    {"gi_z_mean_coc_b", rounded(r.gi_mean_coc_b)},
                                    {"gi_z_road", rounded(r.gi_road)}}},
                                  {"geometry", {{"type", "Polygon"}, {"coordinates", {ring}}}}});
    }
    std::ofstream gj(run.output("cells.geojson"), std::ios::binary);
    gj << fc.dump(1) << '\n';
}

inline void cmd_road_coverage(Run& run) {
    const Scene& s = run.scene();
    const auto& cfg = run.config();
    std::vector<Point2> svi_pos;
    for (const auto& p : s.svi) svi_pos.push_back(p.position);
    const double r = cfg.coverage.vis.radius;
    const auto by_cell = run.timed("roads", [&] { return road_coverage_by_cell(s.roads, svi_pos, cfg.fine_grid(), r); });
    const auto total = road_coverage(s.roads, svi_pos, r);
    CsvWriter w(run.output("road_coverage.csv"));
    w.row("cell_id", "covered_length_m", "total_length_m", "completeness");
    for (const auto& [cell, rc] : by_cell) w.row(cell.str(), rc.covered_length, rc.total_length, rc.completeness);
    w.row("all", total.covered_length, total.total_length, total.completeness);
}

inline void cmd_hotspot(Run& run) {
    const auto rows = run.timed("grid", [&] { return cell_rows(run); });
    CsvWriter w(run.output("hotspots.csv"));
    w.row("cell_id", "metric", "value", "gi_z", "class", "rank_class");
    for (const auto& r : rows) {
        auto emit = [&](const char* metric, const std::optional<double>& v, const std::optional<double>& z,
                        HotspotClass c, HotspotClass rk) {
            if (v) w.row(r.cell.str(), metric, v, z, to_string(c), to_string(rk));
        };
        emit("coc_a", r.coc_a, r.gi_coc_a, r.cls_coc_a, r.rank_coc_a);
        emit("mean_coc_b", r.mean_coc_b, r.gi_mean_coc_b, r.cls_mean_coc_b, r.rank_mean_coc_b);
        emit("road_completeness", r.road_completeness, r.gi_road, r.cls_road, r.rank_road);
    }
}

inline void cmd_bias_regression(Run& run) {
    const auto& cov = run.coverage();
    const auto& cfg = run.config();
    const auto cells = group_by_cell(cov.buildings, run.scene().footprints, cfg.fine_grid());
    std::map<std::string, std::pair<std::vector<double>, std::vector<double>>> series;
    CsvWriter pts(run.output("bias_points.csv"));
    pts.row("cell_id", "type", "count_proportion", "foc_a");
    std::set<std::string> all_types;
    for (const auto& b : cov.buildings)
        if (b.valid) all_types.insert(b.type_label);
    for (const auto& [cell, members] : cells) {
        const auto a = area_coverage(cell, members);
        if (a.foc_a_by_type.empty()) continue;  // no visible lines: FoC-A undefined
        for (const auto& t : all_types) {
            auto ct = a.count_by_type.find(t);
            const double share =
                ct == a.count_by_type.end() ? 0.0 : static_cast<double>(ct->second) / static_cast<double>(a.n_total);
            auto ft = a.foc_a_by_type.find(t);
            const double f = ft == a.foc_a_by_type.end() ? 0.0 : ft->second;
            pts.row(cell.str(), t, share, f);
            series[t].first.push_back(share);
            series[t].second.push_back(f);
        }
    }
    CsvWriter reg(run.output("bias_regression.csv"));
    reg.row("type", "n_cells", "slope", "intercept", "pearson_r");
    for (const auto& [t, xy] : series) {
        std::optional<double> slope, intercept, r;
        try {
            const auto fit = ols_fit(xy.first, xy.second);
            slope = fit.slope;
            intercept = fit.intercept;
            r = fit.pearson_r;
        } catch (const std::invalid_argument&) {
        }
        reg.row(t, xy.first.size(), slope, intercept, r);
    }
}

inline ScanResult run_scan(Run& run) {
    Scene& s = run.scene();
    const auto& cfg = run.config();
    return run.timed("scan", [&] { return scan(s, cfg.scan, cfg.fine_grid(), cfg.coverage); });
}

inline void cmd_interval_scan(Run& run) { write_scan(run.output("scan.csv"), run_scan(run)); }

inline void cmd_optimal_interval(Run& run) {
    ScanResult sc;
    if (run.options().scan) {
        run.note_input(*run.options().scan);
        sc = read_scan(*run.options().scan);
    } else {
        // Fit from the table as written so both routes give identical optima.
        const auto path = run.output("scan.csv");
        write_scan(path, run_scan(run));
        sc = read_scan(path);
    }
    const auto& cfg = run.config();
    const auto optima = run.timed("fit", [&] { return detect_optimal_interval(sc, cfg.fit_kind, cfg.fit_step); });
    write_optima(run.output("optima.csv"), optima);
}

inline void write_group_summary(const fs::path& path, const std::vector<GroupSummary>& rows, const char* key) {
    CsvWriter w(path);
    w.row(key, "n", "proportion_covered", "mean_coc_b_all", "mean_coc_b_covered");
    for (const auto& g : rows) w.row(g.group, g.n, g.proportion_covered, g.mean_coc_b_all, g.mean_coc_b_covered);
}

inline void cmd_summary(Run& run) {
    const auto& cov = run.coverage();
    const Scene& s = run.scene();
    const auto& cfg = run.config();
    std::vector<BuildingCoverage> valid;
    for (const auto& b : cov.buildings)
        if (b.valid) valid.push_back(b);
    if (!valid.empty()) {
        write_group_summary(run.output("summary_by_type.csv"), coverage_summary_by_group(valid, Grouping::type), "type");
        write_group_summary(run.output("summary_by_quintile.csv"),
                            coverage_summary_by_group(valid, Grouping::perimeter_quintile), "quintile");
    } else {
        run.warn("no buildings with facade samples; group summaries skipped");
    }

    // Nearest-neighbour spacing of the SVI set.
    {
        CsvWriter w(run.output("svi_spacing.csv"));
        w.row("quantile", "nn_distance_m");
        if (s.svi.size() >= 2) {
            std::vector<Point2> pos;
            for (const auto& p : s.svi) pos.push_back(p.position);
            const PointGrid grid(pos, 10.0);
            std::vector<double> nn;
            for (std::size_t i = 0; i < pos.size(); ++i) nn.push_back(distance(pos[i], pos[grid.nearest(pos[i], i)]));
            for (double q : {0.01, 0.05, 0.25, 0.5, 0.75, 0.95, 0.99}) w.row(q, quantile(nn, q));
        }
    }

    // Residential completeness weighted by population.
    {
        const HexGrid grid = cfg.fine_grid();
        std::map<CellId, std::vector<BuildingCoverage>> residential;
        for (const auto& [cell, members] : group_by_cell(cov.buildings, s.footprints, grid))
            for (const auto& b : members)
                if (b.type_label == types::kResidential) residential[cell].push_back(b);
        std::vector<PopulationCell> cells;
        for (const auto& [cell, pop] : s.population) {
            PopulationCell pc;
            pc.population = pop;
            if (auto it = residential.find(cell); it != residential.end()) pc.residential_coc_a = coc_a(it->second).value_or(0.0);
            cells.push_back(pc);
        }
        const auto pc = population_coverage(cells);
        CsvWriter w(run.output("population_coverage.csv"));
        w.row("covered_population", "total_population", "ratio");
        w.row(pc.total_covered, pc.total, pc.ratio);
    }

    // Headline counts.
    {
        std::size_t seen = 0, visible = 0;
        for (const auto& b : valid) seen += b.u_seen > 0;
        for (const auto& l : cov.lines) visible += l.status == LineStatus::visible;
        CsvWriter w(run.output("overview.csv"));
        w.row("metric", "value");
        w.row("footprints", s.footprints.size());
        w.row("roads", s.roads.size());
        w.row("svi_points", s.svi.size());
        w.row("facade_samples", cov.samples.size());
        w.row("sightlines", cov.lines.size());
        w.row("visible_sightlines", visible);
        w.row("buildings_covered", seen);
        w.row("share_buildings_covered", valid.empty() ? std::nullopt : std::optional(double(seen) / double(valid.size())));
        w.row("svi_inside_footprints", cov.svi_inside_footprints);
    }
}

}  // namespace cli

/// Parses `argv` and runs one command. Returns the process exit code.
inline int run_cli(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
    using namespace cli;
    CLI::App app{"Street-view imagery facade coverage and bias analysis", "svicov"};
    app.set_version_flag("--version", std::string("svicov ") + kVersion);
    app.require_subcommand(1, 1);
    Options o;
    std::string config, scene, outdir, sightlines, scanpath;

    struct Spec {
        const char* name;
        const char* help;
        void (*fn)(Run&);
    };
    const std::vector<Spec> specs = {
        {"synth", "generate a synthetic city scene", cmd_synth},
        {"coverage", "resolve sightlines (sightlines.csv)", cmd_coverage},
        {"indicators", "building indicators (buildings.csv)", cmd_indicators},
        {"grid-agg", "area indicators per hex cell (cells.csv, cells.geojson)", cmd_grid_agg},
        {"road-coverage", "road completeness per hex cell (road_coverage.csv)", cmd_road_coverage},
        {"hotspot", "Gi* hot and cold spots per metric (hotspots.csv)", cmd_hotspot},
        {"bias-regression", "FoC-A against building-count share per type", cmd_bias_regression},
        {"interval-scan", "indicator means across collection intervals (scan.csv)", cmd_interval_scan},
        {"optimal-interval", "derivative-crossing interval per cell (optima.csv)", cmd_optimal_interval},
        {"summary", "grouped coverage summary, svi spacing, population coverage", cmd_summary},
    };
    std::map<std::string, void (*)(Run&)> dispatch;
    for (const auto& s : specs) {
        auto* sub = app.add_subcommand(s.name, s.help);
        dispatch[s.name] = s.fn;
        sub->add_option("--config", config, "JSON configuration file")->check(CLI::ExistingFile);
        sub->add_option("--out", outdir, "output directory")->required();
        if (std::string(s.name) != "synth") {
            sub->add_option("--scene", scene, "scene directory")->check(CLI::ExistingDirectory);
            sub->add_option("--radius", o.radius, "isovist radius in metres");
            sub->add_option("--interval", o.interval, "thin SVI to this spacing along roads (metres)");
            sub->add_option("--threshold", o.threshold, "building-proportion threshold");
            sub->add_option("--grid-edge", o.grid_edge, "fine hex edge length in metres");
            sub->add_option("--parallelism", o.parallelism, "worker threads");
            sub->add_flag("--geometric-only", o.geometric_only, "skip the segmentation filter");
        } else {
            sub->add_option("--seed", o.seed, "generator seed");
            sub->add_option("--grid-edge", o.grid_edge, "fine hex edge used to key population");
        }
        if (std::string(s.name) == "indicators")
            sub->add_option("--sightlines", sightlines, "re-ingest a sightlines table")->check(CLI::ExistingFile);
        if (std::string(s.name) == "optimal-interval")
            sub->add_option("--scan", scanpath, "use an existing scan table")->check(CLI::ExistingFile);
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e, out, err);
    }

    o.command = app.get_subcommands().front()->get_name();
    if (!config.empty()) o.config = config;
    if (!scene.empty()) o.scene = scene;
    if (!outdir.empty()) o.out = outdir;
    if (!sightlines.empty()) o.sightlines = sightlines;
    if (!scanpath.empty()) o.scan = scanpath;
    try {
        if (o.interval && (o.command == "interval-scan" || o.command == "optimal-interval"))
            throw InputError("--interval does not apply to '" + o.command + "'; set 'intervals' in the config");
        Run run(o, err);
        dispatch.at(o.command)(run);
        run.write_manifest();
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}

}  // namespace svicov
