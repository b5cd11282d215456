#pragma once

// Scene ingestion (GeoJSON geometry, delimited-text bins and population)
// and bit-stable table output: 9 significant digits, '.' decimal point,
// '\n' line endings, "NA" for undefined values.

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "pipeline.hpp"

namespace svicov {

struct InputError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// -------------------------------------------------------------- format --

inline std::string format_number(double v) {
    if (!std::isfinite(v)) return "NA";
    if (v == 0.0) v = 0.0;  // drop the sign of negative zero
    char buf[40];
    std::snprintf(buf, sizeof buf, "%#.9g", v);
    return buf;
}

inline std::string format_number(const std::optional<double>& v) { return v ? format_number(*v) : "NA"; }

inline std::string csv_field(std::string_view s) {
    if (s.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(s);
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + '"';
}

class CsvWriter {
public:
    explicit CsvWriter(const std::filesystem::path& path) : out_(path, std::ios::binary) {
        if (!out_) throw InputError("cannot write " + path.string());
    }

    template <class... Cols>
    void row(const Cols&... cols) {
        bool first = true;
        ((out_ << (first ? "" : ",") << cell(cols), first = false), ...);
        out_ << '\n';
    }

    void row(const std::vector<std::string>& cols) {
        for (std::size_t i = 0; i < cols.size(); ++i) out_ << (i ? "," : "") << csv_field(cols[i]);
        out_ << '\n';
    }

private:
    static std::string cell(const std::string& s) { return csv_field(s); }
    static std::string cell(const char* s) { return csv_field(s); }
    static std::string cell(double v) { return format_number(v); }
    static std::string cell(const std::optional<double>& v) { return format_number(v); }
    template <class I>
        requires std::is_integral_v<I>
    static std::string cell(I v) { return std::to_string(v); }

    std::ofstream out_;
};

/// Rows of a delimited file with a header; quoted fields supported.
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    std::size_t column(std::string_view name) const {
        for (std::size_t i = 0; i < header.size(); ++i)
            if (header[i] == name) return i;
        throw InputError("missing column '" + std::string(name) + "'");
    }
};

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                cur += '"';
                ++i;
            } else if (c == '"') {
                quoted = false;
            } else {
                cur += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            out.push_back(std::move(cur));
            cur.clear();
        } else if (c != '\r') {
            cur += c;
        }
    }
    out.push_back(std::move(cur));
    for (auto& f : out) {
        const auto b = f.find_first_not_of(" \t");
        const auto e = f.find_last_not_of(" \t");
        f = b == std::string::npos ? std::string() : f.substr(b, e - b + 1);
    }
    return out;
}

inline CsvTable read_csv(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot read " + path.string());
    CsvTable t;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line == "\r") continue;
        auto fields = split_csv_line(line);
        if (t.header.empty()) {
            t.header = std::move(fields);
            continue;
        }
        if (fields.size() != t.header.size())
            throw InputError(path.string() + ":" + std::to_string(lineno) + ": expected " +
                             std::to_string(t.header.size()) + " fields");
        t.rows.push_back(std::move(fields));
    }
    if (t.header.empty()) throw InputError(path.string() + ": empty file");
    return t;
}

inline double parse_double(const std::string& s, const std::string& what) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw InputError("bad number '" + s + "' in " + what);
    }
}

// -------------------------------------------------------------- loading --

struct LoadReport {
    std::size_t skipped_footprints = 0;
    std::vector<std::string> warnings;
    bool looks_like_degrees = false;
};

struct ScenePaths {
    std::filesystem::path footprints, roads, svi;
    std::optional<std::filesystem::path> bins, population;

    /// footprints.geojson, roads.geojson, svi.geojson and, when present,
    /// bins.csv and population.csv inside `dir`.
    static ScenePaths in_directory(const std::filesystem::path& dir) {
        ScenePaths p{dir / "footprints.geojson", dir / "roads.geojson", dir / "svi.geojson"};
        if (std::filesystem::exists(dir / "bins.csv")) p.bins = dir / "bins.csv";
        if (std::filesystem::exists(dir / "population.csv")) p.population = dir / "population.csv";
        return p;
    }
};

namespace detail {

using nlohmann::json;

inline json read_json(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot read " + path.string());
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw InputError(path.string() + ": " + e.what());
    }
}

inline const json& features_of(const json& doc, const std::filesystem::path& path) {
    if (!doc.is_object() || doc.value("type", "") != "FeatureCollection" || !doc.contains("features") ||
        !doc["features"].is_array())
        throw InputError(path.string() + ": expected a GeoJSON FeatureCollection");
    return doc["features"];
}

inline std::string feature_id(const json& f, std::size_t ordinal) {
    auto as_text = [](const json& v) -> std::optional<std::string> {
        if (v.is_string()) return v.get<std::string>();
        if (v.is_number_integer()) return std::to_string(v.get<long long>());
        if (v.is_number()) return format_number(v.get<double>());
        return std::nullopt;
    };
    if (f.contains("properties") && f["properties"].is_object() && f["properties"].contains("id"))
        if (auto s = as_text(f["properties"]["id"])) return *s;
    if (f.contains("id"))
        if (auto s = as_text(f["id"])) return *s;
    return "#" + std::to_string(ordinal);
}

inline std::optional<std::string> string_prop(const json& f, const char* key) {
    if (!f.contains("properties") || !f["properties"].is_object()) return std::nullopt;
    const auto& p = f["properties"];
    if (!p.contains(key) || p[key].is_null()) return std::nullopt;
    if (p[key].is_string()) return p[key].get<std::string>();
    return p[key].dump();
}

inline Point2 to_point(const json& c) {
    if (!c.is_array() || c.size() < 2 || !c[0].is_number() || !c[1].is_number())
        throw InputError("bad coordinate " + c.dump());
    return {c[0].get<double>(), c[1].get<double>()};
}

}  // namespace detail

inline Scene load_scene(const ScenePaths& paths, LoadReport& report,
                        const TypeMapping& mapping = TypeMapping::defaults()) {
    using detail::json;
    Scene scene;
    bool all_small = true;
    std::size_t n_points = 0;
    auto track = [&](Point2 p) {
        ++n_points;
        if (std::abs(p.x) > 180.0 || std::abs(p.y) > 90.0) all_small = false;
    };

    {
        const json doc = detail::read_json(paths.footprints);
        std::set<std::string> ids;
        std::size_t k = 0;
        for (const auto& f : detail::features_of(doc, paths.footprints)) {
            const std::string id = detail::feature_id(f, k++);
            if (!ids.insert(id).second) throw InputError("duplicate footprint id " + id);
            const auto& g = f.value("geometry", json());
            if (!g.is_object() || g.value("type", "") != "Polygon" || !g.contains("coordinates") ||
                !g["coordinates"].is_array() || g["coordinates"].empty()) {
                ++report.skipped_footprints;
                report.warnings.push_back("footprint " + id + ": not a Polygon, skipped");
                continue;
            }
            std::vector<Point2> ring;
            for (const auto& c : g["coordinates"][0]) ring.push_back(detail::to_point(c));
            if (ring.size() >= 2 && ring.front() == ring.back()) ring.pop_back();
            for (auto p : ring) track(p);
            if (ring.size() < 3 || !is_simple(ring)) {
                ++report.skipped_footprints;
                report.warnings.push_back("footprint " + id + ": degenerate or self-intersecting ring, skipped");
                continue;
            }
            std::string type = map_building_type(detail::string_prop(f, "ccrp_use"),
                                                 detail::string_prop(f, "building"), mapping);
            if (type == types::kUnlabeled)
                if (auto t = detail::string_prop(f, "type"); t && !t->empty()) type = *t;
            scene.footprints.emplace_back(id, std::move(ring), std::move(type));
        }
    }
    {
        const json doc = detail::read_json(paths.roads);
        std::set<std::string> ids;
        std::size_t k = 0;
        for (const auto& f : detail::features_of(doc, paths.roads)) {
            const std::string id = detail::feature_id(f, k++);
            if (!ids.insert(id).second) throw InputError("duplicate road id " + id);
            const auto& g = f.value("geometry", json());
            const std::string gt = g.is_object() ? g.value("type", "") : "";
            auto add_line = [&](const json& coords, const std::string& rid) {
                Road r{rid, {}};
                for (const auto& c : coords) r.points.push_back(detail::to_point(c));
                for (auto p : r.points) track(p);
                if (r.points.size() >= 2) scene.roads.push_back(std::move(r));
                else report.warnings.push_back("road " + rid + ": fewer than two vertices, skipped");
            };
            if (gt == "LineString") {
                add_line(g["coordinates"], id);
            } else if (gt == "MultiLineString") {
                std::size_t part = 0;
                for (const auto& line : g["coordinates"]) add_line(line, id + "/" + std::to_string(part++));
            } else {
                report.warnings.push_back("road " + id + ": not a LineString, skipped");
            }
        }
    }
    {
        const json doc = detail::read_json(paths.svi);
        std::set<std::string> ids;
        std::size_t k = 0;
        for (const auto& f : detail::features_of(doc, paths.svi)) {
            const std::string id = detail::feature_id(f, k++);
            if (!ids.insert(id).second) throw InputError("duplicate svi id " + id);
            const auto& g = f.value("geometry", json());
            if (!g.is_object() || g.value("type", "") != "Point")
                throw InputError("svi " + id + ": geometry must be a Point");
            SviPoint s{id, detail::to_point(g["coordinates"]), 0.0, {}};
            track(s.position);
            const auto& props = f.value("properties", json::object());
            if (props.is_object() && props.contains("heading") && props["heading"].is_number()) {
                s.heading = std::fmod(props["heading"].get<double>(), 360.0);
                if (s.heading < 0.0) s.heading += 360.0;
            } else {
                report.warnings.push_back("svi " + id + ": no heading, assuming 0");
            }
            if (auto tag = detail::string_prop(f, "capture_tag")) s.capture_tag = *tag;
            scene.svi.push_back(std::move(s));
        }
    }
    if (paths.bins) {
        const auto t = read_csv(*paths.bins);
        const auto c_svi = t.column("svi_id"), c_bin = t.column("bin_index"), c_cls = t.column("class_id"),
                   c_area = t.column("area");
        for (const auto& r : t.rows) {
            const double bin = parse_double(r[c_bin], "bin_index");
            const double area = parse_double(r[c_area], "area");
            if (bin < 0 || bin >= kBinCount || bin != std::floor(bin))
                throw InputError("bin_index out of range for svi " + r[c_svi]);
            if (area < 0.0) throw InputError("negative class area for svi " + r[c_svi]);
            auto& sb = scene.bins[r[c_svi]];
            sb.svi_id = r[c_svi];
            sb.bins[static_cast<int>(bin)][static_cast<int>(parse_double(r[c_cls], "class_id"))] += area;
        }
    }
    if (paths.population) {
        const auto t = read_csv(*paths.population);
        const auto c_cell = t.column("cell_id"), c_pop = t.column("population");
        for (const auto& r : t.rows) {
            auto id = CellId::parse(r[c_cell]);
            if (!id) throw InputError("bad cell id '" + r[c_cell] + "' in population table");
            const double pop = parse_double(r[c_pop], "population");
            if (pop < 0.0) throw InputError("negative population for cell " + r[c_cell]);
            scene.population[*id] += pop;
        }
    }
    if (n_points > 0 && all_small) {
        report.looks_like_degrees = true;
        report.warnings.push_back("all coordinates within +/-180, +/-90: input looks like degrees, metres expected");
    }
    return scene;
}

// -------------------------------------------------------------- writing --

namespace detail {

inline json coords_json(Point2 p) { return json::array({p.x, p.y}); }

inline void write_json(const std::filesystem::path& path, const json& doc) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError("cannot write " + path.string());
    out << doc.dump(1) << '\n';
}

}  // namespace detail

/// Writes the scene in the layout `ScenePaths::in_directory` reads.
inline void write_scene(const Scene& scene, const std::filesystem::path& dir,
                        const std::map<std::string, std::string>& osm_tags = {}) {
    using detail::json;
    std::filesystem::create_directories(dir);
    json fps = {{"type", "FeatureCollection"}, {"features", json::array()}};
    for (const auto& fp : scene.footprints) {
        json ring = json::array();
        for (auto p : fp.exterior) ring.push_back(detail::coords_json(p));
        ring.push_back(detail::coords_json(fp.exterior.front()));
        json props = {{"id", fp.id}, {"type", fp.type_label}};
        if (auto it = osm_tags.find(fp.id); it != osm_tags.end()) props["building"] = it->second;
        fps["features"].push_back(
            {{"type", "Feature"}, {"properties", props}, {"geometry", {{"type", "Polygon"}, {"coordinates", {ring}}}}});
    }
    detail::write_json(dir / "footprints.geojson", fps);

    json roads = {{"type", "FeatureCollection"}, {"features", json::array()}};
    for (const auto& r : scene.roads) {
        json line = json::array();
        for (auto p : r.points) line.push_back(detail::coords_json(p));
        roads["features"].push_back({{"type", "Feature"},
                                     {"properties", {{"id", r.id}}},
                                     {"geometry", {{"type", "LineString"}, {"coordinates", line}}}});
    }
    detail::write_json(dir / "roads.geojson", roads);

    json svi = {{"type", "FeatureCollection"}, {"features", json::array()}};
    for (const auto& s : scene.svi) {
        json props = {{"id", s.id}, {"heading", s.heading}};
        if (!s.capture_tag.empty()) props["capture_tag"] = s.capture_tag;
        svi["features"].push_back({{"type", "Feature"},
                                   {"properties", props},
                                   {"geometry", {{"type", "Point"}, {"coordinates", detail::coords_json(s.position)}}}});
    }
    detail::write_json(dir / "svi.geojson", svi);

    if (!scene.bins.empty()) {
        CsvWriter w(dir / "bins.csv");
        w.row("svi_id", "bin_index", "class_id", "area");
        for (const auto& [id, sb] : scene.bins)
            for (int b = 0; b < kBinCount; ++b)
                for (const auto& [cls, area] : sb.bins[b]) w.row(id, b, cls, area);
    }
    if (!scene.population.empty()) {
        CsvWriter w(dir / "population.csv");
        w.row("cell_id", "population");
        for (const auto& [cell, pop] : scene.population) w.row(cell.str(), pop);
    }
}

inline void write_sightlines(const std::filesystem::path& path, std::span<const SightLine> lines,
                             std::span<const SviPoint> svi, std::span<const Footprint> footprints) {
    CsvWriter w(path);
    w.row("svi_id", "building_id", "sample_index", "bearing_deg", "distance_m", "status");
    for (const auto& l : lines)
        w.row(svi[l.svi].id, footprints[l.building].id, l.sample_index, l.bearing, l.distance,
              std::string(to_string(l.status)));
}

/// Reads a sightlines table back into ordinal form against `scene`.
inline std::vector<SightLine> read_sightlines(const std::filesystem::path& path, const Scene& scene) {
    std::map<std::string, std::uint32_t> svi_ix, fp_ix;
    for (std::uint32_t i = 0; i < scene.svi.size(); ++i) svi_ix.emplace(scene.svi[i].id, i);
    for (std::uint32_t i = 0; i < scene.footprints.size(); ++i) fp_ix.emplace(scene.footprints[i].id, i);
    const auto t = read_csv(path);
    const auto c_svi = t.column("svi_id"), c_b = t.column("building_id"), c_s = t.column("sample_index"),
               c_bear = t.column("bearing_deg"), c_d = t.column("distance_m"), c_st = t.column("status");
    std::vector<SightLine> out;
    out.reserve(t.rows.size());
    for (const auto& r : t.rows) {
        auto si = svi_ix.find(r[c_svi]);
        auto bi = fp_ix.find(r[c_b]);
        if (si == svi_ix.end()) throw InputError("sightline refers to unknown svi " + r[c_svi]);
        if (bi == fp_ix.end()) throw InputError("sightline refers to unknown building " + r[c_b]);
        auto st = parse_status(r[c_st]);
        if (!st) throw InputError("unknown sightline status '" + r[c_st] + "'");
        SightLine l;
        l.svi = si->second;
        l.building = bi->second;
        l.sample_index = static_cast<std::uint32_t>(parse_double(r[c_s], "sample_index"));
        l.bearing = parse_double(r[c_bear], "bearing_deg");
        l.distance = parse_double(r[c_d], "distance_m");
        l.status = *st;
        out.push_back(l);
    }
    std::sort(out.begin(), out.end(), key_less);
    return out;
}

inline void write_buildings(const std::filesystem::path& path, std::span<const BuildingCoverage> buildings) {
    CsvWriter w(path);
    w.row("building_id", "type", "perimeter_m", "u_avail", "u_seen", "v", "coc_b", "foc_b", "quintile");
    for (const auto& b : buildings) {
        const std::optional<double> coc = b.valid ? std::optional(b.coc_b) : std::nullopt;
        w.row(b.building_id, b.type_label, b.perimeter, b.u_avail, b.u_seen, b.v, coc, b.foc_b, b.size_quintile);
    }
}

inline ScanResult read_scan(const std::filesystem::path& path) {
    const auto t = read_csv(path);
    const auto c_cell = t.column("cell_id"), c_r = t.column("radius_m"), c_i = t.column("interval_m"),
               c_c = t.column("mean_coc_b"), c_f = t.column("mean_foc_b");
    ScanResult s;
    for (const auto& r : t.rows) {
        auto cell = CellId::parse(r[c_cell]);
        if (!cell) throw InputError("bad cell id '" + r[c_cell] + "' in scan table");
        s.rows.push_back({*cell, parse_double(r[c_r], "radius_m"), parse_double(r[c_i], "interval_m"),
                          parse_double(r[c_c], "mean_coc_b"), parse_double(r[c_f], "mean_foc_b")});
    }
    normalize(s);
    return s;
}

inline void write_scan(const std::filesystem::path& path, const ScanResult& scan) {
    CsvWriter w(path);
    w.row("cell_id", "radius_m", "interval_m", "mean_coc_b", "mean_foc_b", "norm_coc_b", "norm_foc_b");
    for (const auto& r : scan.rows)
        w.row(r.cell.str(), r.radius, r.interval, r.mean_coc_b, r.mean_foc_b, r.norm_coc_b, r.norm_foc_b);
}

inline void write_optima(const std::filesystem::path& path, std::span<const OptimumRow> rows) {
    CsvWriter w(path);
    w.row("cell_id", "radius_m", "fit_kind", "r2_coc", "r2_foc", "optimal_interval_m", "status");
    for (const auto& o : rows)
        w.row(o.cell.str(), o.radius, o.fit_kind, o.r2_coc, o.r2_foc, o.optimal_interval,
              std::string(to_string(o.status)));
}

}  // namespace svicov
