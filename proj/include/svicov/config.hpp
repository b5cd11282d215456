#pragma once

// Run configuration: one JSON document holding every tunable, with the
// defaults used when a key is absent. Unknown keys are rejected.

#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <optional>
#include <set>
#include <string>

#include "interval.hpp"
#include "io.hpp"
#include "synth.hpp"

namespace svicov {

struct Config {
    CoverageParams coverage;
    double fine_edge = 174.0;
    IntervalScanConfig scan{IntervalScanConfig::default_intervals()};
    std::optional<FitKind> fit_kind = FitKind::spline();  // empty: auto
    double fit_step = 0.1;
    double z_cutoff = 1.96;
    double rank_fraction = 0.05;
    SynthConfig synth;
    TypeMapping mapping = TypeMapping::defaults();
    std::map<std::string, std::string> mapping_overrides;

    HexGrid fine_grid() const { return HexGrid(fine_edge, coverage.grid_origin, GridLevel::fine); }
};

inline std::optional<FitKind> parse_fit_kind(const std::string& s) {
    if (s == "auto") return std::nullopt;
    if (s == "smoothing-spline" || s == "spline" || s == "gam") return FitKind::spline();
    if (s == "power") return FitKind::power();
    if (s == "logarithm" || s == "log") return FitKind::logarithm();
    if (s.rfind("polynomial", 0) == 0 && s.size() > 10) {
        const int d = std::stoi(s.substr(10));
        if (d >= 1 && d <= 6) return FitKind::polynomial(d);
    }
    throw InputError("unknown fit_kind '" + s + "'");
}

namespace detail {

template <class T>
void take(const nlohmann::json& j, const char* key, T& dst) {
    if (!j.contains(key) || j[key].is_null()) return;
    try {
        dst = j[key].get<T>();
    } catch (const nlohmann::json::exception&) {
        throw InputError(std::string("config key '") + key + "' has the wrong type");
    }
}

inline void reject_unknown(const nlohmann::json& j, std::initializer_list<const char*> known, const std::string& where) {
    const std::set<std::string> k(known.begin(), known.end());
    for (const auto& [key, v] : j.items())
        if (!k.count(key)) throw InputError("unknown config key '" + where + key + "'");
}

}  // namespace detail

inline Config config_from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw InputError("config must be a JSON object");
    detail::reject_unknown(j,
                           {"radius", "spacing", "bins", "threshold", "buffer", "missing_bins", "bin_origin_offset",
                            "geometric_only", "eps", "fine_edge", "coarse_edge", "grid_origin", "intervals", "radii",
                            "snap_tolerance", "covered_only", "fit_kind", "fit_step", "z_cutoff", "rank_fraction",
                            "parallelism", "synth", "type_mapping"},
                           "");
    Config c;
    auto& cov = c.coverage;
    detail::take(j, "radius", cov.vis.radius);
    detail::take(j, "eps", cov.vis.eps);
    detail::take(j, "spacing", cov.spacing);
    detail::take(j, "threshold", cov.threshold);
    c.scan.threshold = cov.threshold;
    detail::take(j, "buffer", cov.buffer);
    detail::take(j, "bin_origin_offset", cov.bin_origin_offset);
    detail::take(j, "geometric_only", cov.geometric_only);
    detail::take(j, "coarse_edge", cov.coarse_edge);
    detail::take(j, "fine_edge", c.fine_edge);
    unsigned workers = cov.workers;
    detail::take(j, "parallelism", workers);
    cov.workers = workers;
    int bins = kBinCount;
    detail::take(j, "bins", bins);
    if (bins != kBinCount) throw InputError("config 'bins' must be 12");
    if (j.contains("missing_bins")) {
        const auto m = j["missing_bins"].get<std::string>();
        if (m == "keep") cov.missing = MissingPolicy::keep;
        else if (m == "drop") cov.missing = MissingPolicy::drop;
        else throw InputError("config 'missing_bins' must be keep or drop");
    }
    if (j.contains("grid_origin")) {
        const auto& o = j["grid_origin"];
        if (!o.is_array() || o.size() != 2) throw InputError("config 'grid_origin' must be [x, y]");
        cov.grid_origin = {o[0].get<double>(), o[1].get<double>()};
    }
    detail::take(j, "intervals", c.scan.intervals);
    detail::take(j, "radii", c.scan.radii);
    if (j.contains("snap_tolerance") && !j["snap_tolerance"].is_null())
        c.scan.snap_tolerance = j["snap_tolerance"].get<double>();
    detail::take(j, "covered_only", c.scan.covered_only);
    if (j.contains("fit_kind")) c.fit_kind = parse_fit_kind(j["fit_kind"].get<std::string>());
    detail::take(j, "fit_step", c.fit_step);
    detail::take(j, "z_cutoff", c.z_cutoff);
    detail::take(j, "rank_fraction", c.rank_fraction);

    if (j.contains("synth")) {
        const auto& s = j["synth"];
        if (!s.is_object()) throw InputError("config 'synth' must be an object");
        detail::reject_unknown(s,
                               {"seed", "block_rows", "block_cols", "block_size", "building_density", "road_width",
                                "setback", "building_size_min", "building_size_max", "svi_spacing",
                                "core_density_boost", "with_bins", "with_population"},
                               "synth.");
        auto& y = c.synth;
        detail::take(s, "seed", y.seed);
        detail::take(s, "block_rows", y.block_rows);
        detail::take(s, "block_cols", y.block_cols);
        detail::take(s, "block_size", y.block_size);
        detail::take(s, "building_density", y.building_density);
        detail::take(s, "road_width", y.road_width);
        detail::take(s, "setback", y.setback);
        detail::take(s, "building_size_min", y.building_size_min);
        detail::take(s, "building_size_max", y.building_size_max);
        detail::take(s, "svi_spacing", y.svi_spacing);
        detail::take(s, "core_density_boost", y.core_density_boost);
        detail::take(s, "with_bins", y.with_bins);
        detail::take(s, "with_population", y.with_population);
    }
    if (j.contains("type_mapping")) {
        if (!j["type_mapping"].is_object()) throw InputError("config 'type_mapping' must map tag -> type");
        for (const auto& [tag, type] : j["type_mapping"].items()) {
            c.mapping.osm_to_type[tag] = type.get<std::string>();
            c.mapping_overrides[tag] = type.get<std::string>();
        }
    }
    c.synth.fine_edge = c.fine_edge;
    return c;
}

inline void validate(const Config& c) {
    const auto& cov = c.coverage;
    if (!(cov.vis.radius > 0.0)) throw InputError("radius must be positive");
    if (!(cov.spacing > 0.0)) throw InputError("spacing must be positive");
    if (!(cov.buffer >= 0.0)) throw InputError("buffer must be non-negative");
    if (!(cov.coarse_edge >= 0.0)) throw InputError("coarse_edge must be non-negative");
    if (!(c.fine_edge > 0.0)) throw InputError("fine_edge must be positive");
    if (!(c.fit_step > 0.0)) throw InputError("fit_step must be positive");
    if (cov.workers == 0) throw InputError("parallelism must be at least 1");
    try {
        c.scan.validate();
    } catch (const std::invalid_argument& e) {
        throw InputError(e.what());
    }
}

inline Config load_config(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot read config " + path.string());
    try {
        return config_from_json(nlohmann::json::parse(in));
    } catch (const nlohmann::json::exception& e) {
        throw InputError(path.string() + ": " + e.what());
    }
}

/// Effective parameters, for the run manifest.
inline nlohmann::json config_to_json(const Config& c) {
    const auto& cov = c.coverage;
    nlohmann::json j = {
        {"radius", cov.vis.radius},
        {"eps", cov.vis.eps},
        {"spacing", cov.spacing},
        {"bins", kBinCount},
        {"threshold", cov.threshold},
        {"buffer", cov.buffer},
        {"missing_bins", cov.missing == MissingPolicy::keep ? "keep" : "drop"},
        {"bin_origin_offset", cov.bin_origin_offset},
        {"geometric_only", cov.geometric_only},
        {"fine_edge", c.fine_edge},
        {"coarse_edge", cov.coarse_edge},
        {"grid_origin", {cov.grid_origin.x, cov.grid_origin.y}},
        {"intervals", c.scan.intervals},
        {"radii", c.scan.radii},
        {"snap_tolerance", c.scan.snap_tolerance ? nlohmann::json(*c.scan.snap_tolerance) : nlohmann::json()},
        {"covered_only", c.scan.covered_only},
        {"fit_kind", c.fit_kind ? c.fit_kind->str() : "auto"},
        {"fit_step", c.fit_step},
        {"z_cutoff", c.z_cutoff},
        {"rank_fraction", c.rank_fraction},
        {"parallelism", cov.workers},
        {"type_mapping", c.mapping_overrides},
    };
    const auto& y = c.synth;
    j["synth"] = {{"seed", y.seed},
                  {"block_rows", y.block_rows},
                  {"block_cols", y.block_cols},
                  {"block_size", y.block_size},
                  {"building_density", y.building_density},
                  {"road_width", y.road_width},
                  {"setback", y.setback},
                  {"building_size_min", y.building_size_min},
                  {"building_size_max", y.building_size_max},
                  {"svi_spacing", y.svi_spacing},
                  {"core_density_boost", y.core_density_boost},
                  {"with_bins", y.with_bins},
                  {"with_population", y.with_population}};
    return j;
}

}  // namespace svicov
