#include "vvec/io.hpp"

#include <png.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <memory>

#include <json.hpp>

namespace vvec::io {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct FileCloser {
    void operator()(FILE* f) const {
        if (f) std::fclose(f);
    }
};

const json& require(const json& obj, const std::string& key, const std::string& ctx) {
    if (!obj.contains(key)) throw DataError(ctx + ": missing field \"" + key + "\"");
    return obj.at(key);
}

json sensor_to_json(const SensorModel& s) {
    json offsets;
    for (const auto& [band, ms] : s.band_time_offsets_ms) offsets[band] = ms;
    return json{{"name", s.name},
                {"gsd_m", s.gsd_m},
                {"band_time_offsets_ms", offsets},
                {"speed_rel_error", s.speed_rel_error}};
}

SensorModel sensor_from_json(const json& j) {
    SensorModel s;
    s.name = require(j, "name", "sensor").get<std::string>();
    s.gsd_m = require(j, "gsd_m", "sensor").get<double>();
    json offsets = require(j, "band_time_offsets_ms", "sensor");
    for (const char* band : {"red", "green", "blue"})
        s.band_time_offsets_ms[band] = require(offsets, band, "sensor.band_time_offsets_ms").get<double>();
    s.speed_rel_error = j.value("speed_rel_error", 0.30);
    s.validate();
    return s;
}

json polygon_to_geojson(const Polygon& poly, const GeoTransform& gt) {
    json ring = json::array();
    for (const auto& p : poly) {
        Vec2 g = gt.pixel_to_geo(p.y, p.x);
        ring.push_back({g.x, g.y});
    }
    if (!poly.empty()) {
        Vec2 g = gt.pixel_to_geo(poly.front().y, poly.front().x);
        ring.push_back({g.x, g.y});  // close the ring
    }
    return json{{"type", "Polygon"}, {"coordinates", json::array({ring})}};
}

Polygon polygon_from_geojson(const json& geom, const GeoTransform& gt) {
    if (require(geom, "type", "geometry").get<std::string>() != "Polygon")
        throw DataError("geometry: expected Polygon");
    const json& ring = require(geom, "coordinates", "geometry").at(0);
    Polygon poly;
    for (size_t i = 0; i + 1 < ring.size(); ++i) {  // skip the closing vertex
        Vec2 p = gt.geo_to_pixel(ring[i][0].get<double>(), ring[i][1].get<double>());
        poly.push_back({p.x, p.y});
    }
    return poly;
}

}  // namespace

void write_text_atomic(const std::string& path, const std::string& content) {
    fs::path target(path);
    if (target.has_parent_path()) fs::create_directories(target.parent_path());
    fs::path tmp = target;
    tmp += ".tmp";
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f) throw DataError("cannot open for write: " + tmp.string());
        f << content;
    }
    fs::rename(tmp, target);
}

void write_png_rgb(const std::string& path, const PlaneU8& r, const PlaneU8& g, const PlaneU8& b) {
    if (!r.same_shape(g) || !r.same_shape(b)) throw DataError("write_png_rgb: plane shapes differ");
    fs::path target(path);
    if (target.has_parent_path()) fs::create_directories(target.parent_path());
    fs::path tmp = target;
    tmp += ".tmp";

    std::unique_ptr<FILE, FileCloser> fp(std::fopen(tmp.c_str(), "wb"));
    if (!fp) throw DataError("cannot open for write: " + tmp.string());

    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png_create_info_struct(png);
    if (!png || !info) throw DataError("libpng init failed");
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        throw DataError("png write error: " + path);
    }
    png_init_io(png, fp.get());
    png_set_compression_level(png, 6);
    png_set_filter(png, 0, PNG_FILTER_NONE);
    png_set_IHDR(png, info, r.width(), r.height(), 8, PNG_COLOR_TYPE_RGB, PNG_INTERLACE_NONE,
                 PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);

    std::vector<uint8_t> row(static_cast<size_t>(r.width()) * 3);
    for (int y = 0; y < r.height(); ++y) {
        for (int x = 0; x < r.width(); ++x) {
            row[3 * x] = r.at(y, x);
            row[3 * x + 1] = g.at(y, x);
            row[3 * x + 2] = b.at(y, x);
        }
        png_write_row(png, row.data());
    }
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
    fp.reset();
    fs::rename(tmp, target);
}

void read_png_rgb(const std::string& path, PlaneU8& r, PlaneU8& g, PlaneU8& b) {
    std::unique_ptr<FILE, FileCloser> fp(std::fopen(path.c_str(), "rb"));
    if (!fp) throw DataError("cannot open: " + path);

    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png_create_info_struct(png);
    if (!png || !info) throw DataError("libpng init failed");
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw DataError("png read error: " + path);
    }
    png_init_io(png, fp.get());
    png_read_info(png, info);

    png_set_expand(png);
    png_set_strip_16(png);
    png_set_strip_alpha(png);
    if (png_get_color_type(png, info) == PNG_COLOR_TYPE_GRAY ||
        png_get_color_type(png, info) == PNG_COLOR_TYPE_GRAY_ALPHA)
        png_set_gray_to_rgb(png);
    png_read_update_info(png, info);

    int w = static_cast<int>(png_get_image_width(png, info));
    int h = static_cast<int>(png_get_image_height(png, info));
    if (png_get_channels(png, info) != 3) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw DataError("png: expected 3 channels after conversion: " + path);
    }

    r = PlaneU8(w, h);
    g = PlaneU8(w, h);
    b = PlaneU8(w, h);
    std::vector<uint8_t> row(static_cast<size_t>(w) * 3);
    for (int y = 0; y < h; ++y) {
        png_read_row(png, row.data(), nullptr);
        for (int x = 0; x < w; ++x) {
            r.at(y, x) = row[3 * x];
            g.at(y, x) = row[3 * x + 1];
            b.at(y, x) = row[3 * x + 2];
        }
    }
    png_read_end(png, nullptr);
    png_destroy_read_struct(&png, &info, nullptr);
}

void write_bundle(const RasterBundle& bundle, const std::string& dir) {
    bundle.validate();
    fs::create_directories(dir);
    write_png_rgb(dir + "/bands.png", bundle.red, bundle.green, bundle.blue);
    json sidecar{{"scene_id", bundle.scene_id},
                 {"timestamp", bundle.timestamp},
                 {"geotransform", bundle.geotransform.g},
                 {"sensor", sensor_to_json(bundle.sensor)},
                 {"planes", json::array({"red", "green", "blue"})}};
    write_text_atomic(dir + "/sidecar.json", sidecar.dump(2) + "\n");
}

RasterBundle read_bundle(const std::string& dir) {
    RasterBundle bundle;
    read_png_rgb(dir + "/bands.png", bundle.red, bundle.green, bundle.blue);

    std::ifstream f(dir + "/sidecar.json");
    if (!f) throw DataError("missing sidecar: " + dir + "/sidecar.json");
    json sidecar;
    try {
        f >> sidecar;
    } catch (const json::exception& e) {
        throw DataError("malformed sidecar " + dir + "/sidecar.json: " + e.what());
    }
    bundle.scene_id = require(sidecar, "scene_id", "sidecar").get<std::string>();
    bundle.timestamp = require(sidecar, "timestamp", "sidecar").get<std::string>();
    auto gt = require(sidecar, "geotransform", "sidecar");
    if (gt.size() != 6) throw DataError("sidecar: geotransform must have 6 values");
    for (int i = 0; i < 6; ++i) bundle.geotransform.g[i] = gt[i].get<double>();
    bundle.sensor = sensor_from_json(require(sidecar, "sensor", "sidecar"));
    bundle.validate();
    return bundle;
}

void write_mask(const ProbMask& mask, const std::string& png_path) {
    mask.validate();
    if (mask.planes.empty() || mask.planes.size() > 3)
        throw DataError("write_mask supports 1-3 planes");
    const PlaneU8& p0 = mask.planes[0];
    PlaneU8 zero(p0.width(), p0.height());
    const PlaneU8& p1 = mask.planes.size() > 1 ? mask.planes[1] : zero;
    const PlaneU8& p2 = mask.planes.size() > 2 ? mask.planes[2] : zero;
    write_png_rgb(png_path, p0, p1, p2);

    json sidecar{{"planes", mask.class_labels}};
    fs::path sc(png_path);
    sc.replace_extension(".json");
    write_text_atomic(sc.string(), sidecar.dump(2) + "\n");
}

ProbMask read_mask(const std::string& png_path) {
    ProbMask mask;
    PlaneU8 p0, p1, p2;
    read_png_rgb(png_path, p0, p1, p2);

    fs::path sc(png_path);
    sc.replace_extension(".json");
    std::ifstream f(sc);
    if (!f) throw DataError("missing mask sidecar: " + sc.string());
    json sidecar;
    try {
        f >> sidecar;
    } catch (const json::exception& e) {
        throw DataError("malformed mask sidecar " + sc.string() + ": " + e.what());
    }
    auto labels = require(sidecar, "planes", "mask sidecar").get<std::vector<std::string>>();
    if (labels.empty() || labels.size() > 3)
        throw DataError("mask sidecar: expected 1-3 plane labels");
    mask.class_labels = labels;
    mask.planes.push_back(std::move(p0));
    if (labels.size() > 1) mask.planes.push_back(std::move(p1));
    if (labels.size() > 2) mask.planes.push_back(std::move(p2));
    mask.validate();
    return mask;
}

void write_detections(const std::vector<vectorize::Detection>& dets, const GeoTransform& gt,
                      const std::string& path) {
    json features = json::array();
    for (const auto& d : dets) {
        json props{{"id", d.id},
                   {"class", d.cls},
                   {"timestamp", d.timestamp},
                   {"scene_id", d.scene_id}};
        if (d.velocity) {
            props["speed_kmh"] = d.velocity->speed.speed_kmh;
            props["speed_err_kmh"] = d.velocity->speed.speed_err_kmh;
            props["rainbow_len_px"] = d.velocity->speed.rainbow_len_px;
            props["heading_deg"] = d.velocity->heading_deg;
            props["heading_confidence"] =
                d.velocity->confidence == vectorize::HeadingConfidence::Resolved ? "resolved"
                                                                                 : "ambiguous";
        }
        features.push_back({{"type", "Feature"},
                            {"geometry", polygon_to_geojson(d.footprint, gt)},
                            {"properties", props}});
    }
    json fc{{"type", "FeatureCollection"},
            {"features", features},
            {"properties", {{"geotransform", gt.g}}}};
    write_text_atomic(path, fc.dump(2) + "\n");
}

std::vector<vectorize::Detection> read_detections(const std::string& path, const GeoTransform& gt) {
    std::ifstream f(path);
    if (!f) throw DataError("cannot open: " + path);
    json fc;
    try {
        f >> fc;
    } catch (const json::exception& e) {
        throw DataError("malformed GeoJSON " + path + ": " + e.what());
    }

    std::vector<vectorize::Detection> out;
    for (const auto& feat : require(fc, "features", "detection file")) {
        vectorize::Detection d;
        const json& props = require(feat, "properties", "feature");
        d.id = require(props, "id", "feature").get<int>();
        d.cls = require(props, "class", "feature").get<std::string>();
        d.timestamp = props.value("timestamp", "");
        d.scene_id = props.value("scene_id", "");
        d.footprint = polygon_from_geojson(require(feat, "geometry", "feature"), gt);
        if (props.contains("speed_kmh")) {
            vectorize::VelocityVector v;
            v.speed.speed_kmh = props.at("speed_kmh").get<double>();
            v.speed.speed_err_kmh = props.value("speed_err_kmh", 0.0);
            v.speed.rainbow_len_px = props.value("rainbow_len_px", 0.0);
            v.heading_deg = props.value("heading_deg", 0.0);
            v.confidence = props.value("heading_confidence", "ambiguous") == "resolved"
                               ? vectorize::HeadingConfidence::Resolved
                               : vectorize::HeadingConfidence::Ambiguous;
            d.velocity = v;
        }
        out.push_back(std::move(d));
    }
    return out;
}

void write_truth(const synth::GroundTruthSet& truth, const GeoTransform& gt,
                 const std::string& path) {
    json features = json::array();
    for (const auto& rec : truth.records) {
        json props{{"id", rec.id},
                   {"class", rec.cls},
                   {"speed_kmh", rec.true_speed_kmh},
                   {"heading_deg", rec.true_heading_deg},
                   {"timestamp", rec.timestamp},
                   {"out_of_frame", rec.out_of_frame},
                   {"centroid_px", {rec.centroid_px.x, rec.centroid_px.y}},
                   {"body_length_px", rec.body_length_px},
                   {"body_width_px", rec.body_width_px},
                   {"rainbow_len_px", rec.rainbow_len_px}};
        features.push_back({{"type", "Feature"},
                            {"geometry", polygon_to_geojson(rec.footprint, gt)},
                            {"properties", props}});
    }
    json fc{{"type", "FeatureCollection"},
            {"features", features},
            {"properties",
             {{"width_px", truth.width_px}, {"height_px", truth.height_px}, {"geotransform", gt.g}}}};
    write_text_atomic(path, fc.dump(2) + "\n");
}

synth::GroundTruthSet read_truth(const std::string& path, const GeoTransform& gt) {
    std::ifstream f(path);
    if (!f) throw DataError("cannot open: " + path);
    json fc;
    try {
        f >> fc;
    } catch (const json::exception& e) {
        throw DataError("malformed GeoJSON " + path + ": " + e.what());
    }

    synth::GroundTruthSet truth;
    if (fc.contains("properties")) {
        truth.width_px = fc["properties"].value("width_px", 0);
        truth.height_px = fc["properties"].value("height_px", 0);
    }
    for (const auto& feat : require(fc, "features", "truth file")) {
        synth::TruthRecord rec;
        const json& props = require(feat, "properties", "feature");
        rec.id = require(props, "id", "feature").get<int>();
        rec.cls = require(props, "class", "feature").get<std::string>();
        rec.true_speed_kmh = props.value("speed_kmh", 0.0);
        rec.true_heading_deg = props.value("heading_deg", 0.0);
        rec.timestamp = props.value("timestamp", "");
        rec.out_of_frame = props.value("out_of_frame", false);
        if (props.contains("centroid_px"))
            rec.centroid_px = {props["centroid_px"][0].get<double>(),
                               props["centroid_px"][1].get<double>()};
        rec.body_length_px = props.value("body_length_px", 0.0);
        rec.body_width_px = props.value("body_width_px", 0.0);
        rec.rainbow_len_px = props.value("rainbow_len_px", 0.0);
        rec.footprint = polygon_from_geojson(require(feat, "geometry", "feature"), gt);
        truth.records.push_back(std::move(rec));
    }
    return truth;
}

}  // namespace vvec::io
