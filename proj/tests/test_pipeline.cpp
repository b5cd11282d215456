#include <gtest/gtest.h>

#include "support.hpp"

using namespace svicov;
namespace fs = std::filesystem;

namespace {

void write_text(const fs::path& p, const std::string& s) {
    std::ofstream out(p, std::ios::binary);
    out << s;
}

fs::path s1_scene_dir(const std::string& name) {
    const auto dir = fixture::temp_dir(name);
    write_scene(fixture::to_scene(fixture::s1()), dir);
    return dir;
}

const char* kFootprints = R"({"type":"FeatureCollection","features":[
 {"type":"Feature","properties":{"id":"a","building":"house"},
  "geometry":{"type":"Polygon","coordinates":[[[1000,1000],[1010,1000],[1010,1010],[1000,1010],[1000,1000]]]}},
 {"type":"Feature","properties":{"id":"b","ccrp_use":"Retail"},
  "geometry":{"type":"Polygon","coordinates":[[[1100,1000],[1110,1000],[1110,1010],[1100,1000]]]}},
 {"type":"Feature","properties":{"id":"c"},
  "geometry":{"type":"Polygon","coordinates":[[[1200,1000],[1210,1000],[1200,1000]]]}}]})";

const char* kRoads = R"({"type":"FeatureCollection","features":[
 {"type":"Feature","properties":{"id":"r1"},"geometry":{"type":"LineString","coordinates":[[990,990],[1300,990]]}},
 {"type":"Feature","properties":{"id":"r2"},"geometry":{"type":"MultiLineString",
  "coordinates":[[[990,990],[990,1100]],[[1300,990],[1300,1100]]]}}]})";

const char* kSvi = R"({"type":"FeatureCollection","features":[
 {"type":"Feature","properties":{"id":"p1","heading":-90},"geometry":{"type":"Point","coordinates":[1005,990]}},
 {"type":"Feature","properties":{"id":"p2"},"geometry":{"type":"Point","coordinates":[1105,990]}}]})";

}  // namespace

TEST(LoadScene, ParsesAndSkipsDegenerateRings) {
    const auto dir = fixture::temp_dir("load");
    write_text(dir / "footprints.geojson", kFootprints);
    write_text(dir / "roads.geojson", kRoads);
    write_text(dir / "svi.geojson", kSvi);
    LoadReport rep;
    const auto s = load_scene(ScenePaths::in_directory(dir), rep);
    ASSERT_EQ(s.footprints.size(), 2u);
    EXPECT_EQ(rep.skipped_footprints, 1u);
    EXPECT_EQ(s.footprints[0].type_label, types::kResidential);
    EXPECT_EQ(s.footprints[1].type_label, "Retail");
    ASSERT_EQ(s.roads.size(), 3u);
    EXPECT_EQ(s.roads[1].id, "r2/0");
    ASSERT_EQ(s.svi.size(), 2u);
    EXPECT_DOUBLE_EQ(s.svi[0].heading, 270.0);
    EXPECT_FALSE(rep.looks_like_degrees);
    EXPECT_EQ(rep.warnings.size(), 2u);  // degenerate ring, missing heading
}

TEST(LoadScene, WarnsOnDegreeCoordinatesAndRejectsDuplicates) {
    const auto dir = fixture::temp_dir("degrees");
    write_scene(fixture::to_scene(fixture::s1()), dir);
    LoadReport rep;
    load_scene(ScenePaths::in_directory(dir), rep);
    EXPECT_TRUE(rep.looks_like_degrees);

    std::string dup = kSvi;
    dup.replace(dup.find("\"p2\""), 4, "\"p1\"");
    write_text(dir / "svi.geojson", dup);
    LoadReport rep2;
    EXPECT_THROW(load_scene(ScenePaths::in_directory(dir), rep2), InputError);
    write_text(dir / "svi.geojson", "{not json");
    EXPECT_THROW(load_scene(ScenePaths::in_directory(dir), rep2), InputError);
}

TEST(SceneFiles, RoundTrip) {
    SynthConfig sc;
    sc.block_rows = sc.block_cols = 2;
    const auto city = generate_city(sc);
    const auto dir = fixture::temp_dir("roundtrip");
    write_scene(city.scene, dir);
    LoadReport rep;
    const auto back = load_scene(ScenePaths::in_directory(dir), rep);
    ASSERT_EQ(back.footprints.size(), city.scene.footprints.size());
    for (std::size_t i = 0; i < back.footprints.size(); ++i) {
        EXPECT_EQ(back.footprints[i].id, city.scene.footprints[i].id);
        EXPECT_EQ(back.footprints[i].exterior, city.scene.footprints[i].exterior);
        EXPECT_EQ(back.footprints[i].type_label, city.scene.footprints[i].type_label);
    }
    EXPECT_EQ(back.svi.size(), city.scene.svi.size());
    EXPECT_EQ(back.population, city.scene.population);
    ASSERT_EQ(back.bins.size(), city.scene.bins.size());
    for (const auto& [id, b] : city.scene.bins) EXPECT_EQ(back.bins.at(id).bins, b.bins);
}

TEST(FormatNumber, Conventions) {
    EXPECT_EQ(format_number(0.3), "0.300000000");
    EXPECT_EQ(format_number(-0.0), "0.00000000");
    EXPECT_EQ(format_number(std::optional<double>{}), "NA");
    EXPECT_EQ(csv_field("a,b"), "\"a,b\"");
    EXPECT_EQ(split_csv_line("x,\"a,\"\"b\",3"), (std::vector<std::string>{"x", "a,\"b", "3"}));
}

TEST(Synth, DeterministicAndDensityControlled) {
    SynthConfig sc;
    sc.seed = 11;
    const auto a = generate_city(sc), b = generate_city(sc);
    ASSERT_EQ(a.scene.footprints.size(), b.scene.footprints.size());
    for (std::size_t i = 0; i < a.scene.footprints.size(); ++i)
        EXPECT_EQ(a.scene.footprints[i].exterior, b.scene.footprints[i].exterior);
    sc.building_density = 0.0;
    const auto empty = generate_city(sc);
    EXPECT_TRUE(empty.scene.footprints.empty());
    EXPECT_FALSE(empty.scene.svi.empty());
}

TEST(Synth, CoreBoostDoublesCoreDensity) {
    double ratio_sum = 0.0;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        SynthConfig sc;
        sc.seed = seed;
        sc.block_rows = sc.block_cols = 6;
        auto count_core = [](const SynthCity& c) {
            return static_cast<double>(std::count(c.footprint_in_core.begin(), c.footprint_in_core.end(), true));
        };
        const double base = count_core(generate_city(sc));
        sc.core_density_boost = 2.0;
        ratio_sum += count_core(generate_city(sc)) / base;
    }
    EXPECT_NEAR(ratio_sum / 10.0, 2.0, 0.4);
}

TEST(Partitioning, MatchesGlobalIndex) {
    SynthConfig sc;
    sc.seed = 5;
    sc.block_rows = sc.block_cols = 5;
    const auto city = generate_city(sc);
    const auto samples = sample_all(city.scene.footprints, 2.0);
    const VisibilityParams vis{};
    auto global = sightlines_global(city.scene.footprints, samples, city.scene.svi, vis);
    std::sort(global.begin(), global.end(), key_less);
    for (double edge : {60.0, 150.0, 400.0}) {
        const HexGrid coarse(edge, {}, GridLevel::coarse);
        const auto part = sightlines_partitioned(city.scene.footprints, samples, city.scene.svi, vis, coarse, vis.radius);
        ASSERT_EQ(part.size(), global.size()) << edge;
        for (std::size_t i = 0; i < part.size(); ++i) {
            ASSERT_EQ(part[i].key(), global[i].key());
            EXPECT_EQ(part[i].status, global[i].status);
        }
    }
}

TEST(Config, ParsesAndRejects) {
    const auto c = config_from_json(nlohmann::json::parse(R"({"radius": 30, "intervals": [10, 20, 30, 40],
        "fit_kind": "polynomial2", "type_mapping": {"shed": "Industrial"}})"));
    EXPECT_EQ(c.coverage.vis.radius, 30.0);
    EXPECT_EQ(c.scan.intervals.size(), 4u);
    EXPECT_EQ(c.fit_kind->str(), "polynomial2");
    EXPECT_EQ(map_building_type(std::nullopt, std::string("shed"), c.mapping), "Industrial");
    EXPECT_THROW(config_from_json(nlohmann::json::parse(R"({"radus": 30})")), InputError);
    EXPECT_THROW(config_from_json(nlohmann::json::parse(R"({"bins": 8})")), InputError);
    EXPECT_THROW(validate(config_from_json(nlohmann::json::parse(R"({"intervals": [20, 10]})"))), InputError);
    EXPECT_FALSE(parse_fit_kind("auto").has_value());
    const auto round = config_from_json(config_to_json(c));
    EXPECT_EQ(config_to_json(round), config_to_json(c));
}

TEST(Cli, CoverageAndIndicatorsOnS1) {
    const auto scene = s1_scene_dir("cli_s1_scene");
    const auto out = fixture::temp_dir("cli_s1_out");
    ASSERT_EQ(fixture::cli({"coverage", "--scene", scene.string(), "--out", out.string()}), 0);
    const auto lines = read_csv(out / "sightlines.csv");
    const auto st = lines.column("status");
    EXPECT_EQ(std::count_if(lines.rows.begin(), lines.rows.end(), [&](auto& r) { return r[st] == "visible"; }), 6);
    EXPECT_EQ(lines.rows.size(), 20u);

    ASSERT_EQ(fixture::cli({"indicators", "--scene", scene.string(), "--out", out.string()}), 0);
    const auto b = read_csv(out / "buildings.csv");
    ASSERT_EQ(b.rows.size(), 1u);
    EXPECT_EQ(b.rows[0][b.column("coc_b")], "0.300000000");
    EXPECT_EQ(b.rows[0][b.column("foc_b")], "0.150000000");

    // Re-ingesting the written sightlines gives the same buildings table.
    const auto out2 = fixture::temp_dir("cli_s1_out2");
    ASSERT_EQ(fixture::cli({"indicators", "--scene", scene.string(), "--out", out2.string(), "--sightlines",
                            (out / "sightlines.csv").string()}),
              0);
    EXPECT_EQ(fixture::slurp(out2 / "buildings.csv"), fixture::slurp(out / "buildings.csv"));

    const auto manifest = nlohmann::json::parse(fixture::slurp(out / "run_manifest.json"));
    EXPECT_EQ(manifest["command"], "indicators");
    EXPECT_EQ(manifest["mode"], "geometric-only");
    EXPECT_EQ(manifest["inputs"].size(), 3u);
}

TEST(Cli, OptimalIntervalFromScanTable) {
    const auto dir = fixture::temp_dir("cli_opt");
    write_scan(dir / "scan.csv", fixture::crossing_fixture());
    ASSERT_EQ(fixture::cli({"optimal-interval", "--scan", (dir / "scan.csv").string(), "--out", (dir / "o").string()}), 0);
    const auto t = read_csv(dir / "o" / "optima.csv");
    ASSERT_EQ(t.rows.size(), 1u);
    EXPECT_EQ(t.rows[0][t.column("status")], "crossing");
    EXPECT_NEAR(parse_double(t.rows[0][t.column("optimal_interval_m")], "x"), 60.0, 2.5);
}

TEST(Cli, ErrorsAreReported) {
    const auto dir = fixture::temp_dir("cli_err");
    write_text(dir / "bad.json", R"({"radius": 30, "bogus": 1})");
    const auto scene = s1_scene_dir("cli_err_scene");
    EXPECT_EQ(fixture::cli({"coverage", "--scene", scene.string(), "--out", (dir / "o").string(), "--config",
                            (dir / "bad.json").string()}),
              1);
    EXPECT_EQ(fixture::cli({"coverage", "--out", (dir / "o").string()}), 1);  // no scene
    EXPECT_NE(fixture::cli({"nosuch"}), 0);
    EXPECT_EQ(fixture::cli({"interval-scan", "--scene", scene.string(), "--out", (dir / "o").string(), "--interval", "20"}),
              1);
}

TEST(Cli, FullRunIsDeterministic) {
    const auto root = fixture::temp_dir("cli_det");
    ASSERT_EQ(fixture::cli({"synth", "--out", (root / "scene").string(), "--seed", "9"}), 0);
    const std::vector<std::string> cmds{"coverage", "indicators", "grid-agg", "road-coverage", "hotspot",
                                        "bias-regression", "summary"};
    for (const auto& c : cmds) {
        for (const char* run : {"a", "b"}) {
            ASSERT_EQ(fixture::cli({c, "--scene", (root / "scene").string(), "--out", (root / run / c).string()}), 0) << c;
        }
        for (const auto& e : fs::directory_iterator(root / "a" / c)) {
            if (e.path().filename() == "run_manifest.json") continue;
            EXPECT_EQ(fixture::slurp(e.path()), fixture::slurp(root / "b" / c / e.path().filename())) << c << " "
                                                                                                      << e.path();
        }
    }
    const auto cells = read_csv(root / "a" / "grid-agg" / "cells.csv");
    EXPECT_FALSE(cells.rows.empty());
    const auto geo = nlohmann::json::parse(fixture::slurp(root / "a" / "grid-agg" / "cells.geojson"));
    EXPECT_EQ(geo["features"].size(), cells.rows.size());
}
