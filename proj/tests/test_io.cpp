#include <doctest.h>

#include <unistd.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include "vvec/io.hpp"
#include "vvec/rng.hpp"

using namespace vvec;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() / ("vvec_test_" + std::to_string(::getpid()) + "_" +
                                            std::to_string(counter++));
        fs::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path, ec);
    }
    std::string str(const std::string& name = "") const { return (path / name).string(); }
    static inline int counter = 0;
};

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

RasterBundle noise_bundle(int w, int h, uint64_t seed) {
    RasterBundle b;
    b.red = PlaneU8(w, h, 0);
    b.green = PlaneU8(w, h, 0);
    b.blue = PlaneU8(w, h, 0);
    for (int r = 0; r < h; ++r)
        for (int c = 0; c < w; ++c) {
            b.red.at(r, c) = static_cast<uint8_t>(hash_combine(seed, 1, r * w + c) % 256);
            b.green.at(r, c) = static_cast<uint8_t>(hash_combine(seed, 2, r * w + c) % 256);
            b.blue.at(r, c) = static_cast<uint8_t>(hash_combine(seed, 3, r * w + c) % 256);
        }
    b.sensor = sensor_preset("skysat");
    b.timestamp = "2023-04-10T08:30:00Z";
    b.scene_id = "scene_42";
    b.geotransform.g = {32.5, 0.5e-5, 0.0, 15.6, 0.0, -0.5e-5};
    return b;
}

}  // namespace

TEST_CASE("png round trip preserves planes exactly; repeat writes byte-identical") {
    TempDir tmp;
    auto b = noise_bundle(37, 23, 7);
    io::write_png_rgb(tmp.str("a.png"), b.red, b.green, b.blue);
    PlaneU8 r, g, bl;
    io::read_png_rgb(tmp.str("a.png"), r, g, bl);
    CHECK(r == b.red);
    CHECK(g == b.green);
    CHECK(bl == b.blue);

    io::write_png_rgb(tmp.str("b.png"), b.red, b.green, b.blue);
    CHECK(slurp(tmp.str("a.png")) == slurp(tmp.str("b.png")));
}

TEST_CASE("bundle round trip preserves pixels and sidecar fields") {
    TempDir tmp;
    auto b = noise_bundle(48, 32, 9);
    io::write_bundle(b, tmp.str("bundle"));
    auto back = io::read_bundle(tmp.str("bundle"));
    CHECK(back.red == b.red);
    CHECK(back.blue == b.blue);
    CHECK(back.sensor.name == "skysat");
    CHECK(back.sensor.gsd_m == b.sensor.gsd_m);
    CHECK(back.sensor.delta_rb_ms() == b.sensor.delta_rb_ms());
    CHECK(back.timestamp == b.timestamp);
    CHECK(back.scene_id == b.scene_id);
    CHECK(back.geotransform.g[0] == doctest::Approx(32.5));
}

TEST_CASE("missing sidecar field raises DataError naming the field") {
    TempDir tmp;
    auto b = noise_bundle(16, 16, 1);
    io::write_bundle(b, tmp.str("bundle"));
    // Strip gsd_m from the sidecar.
    std::string sidecar = tmp.str("bundle") + "/sidecar.json";
    std::string text = slurp(sidecar);
    auto pos = text.find("\"gsd_m\"");
    REQUIRE(pos != std::string::npos);
    auto end = text.find(',', pos);
    text.erase(pos, end - pos + 1);
    io::write_text_atomic(sidecar, text);
    try {
        io::read_bundle(tmp.str("bundle"));
        FAIL("expected DataError");
    } catch (const DataError& e) {
        CHECK(std::string(e.what()).find("gsd_m") != std::string::npos);
    }
}

TEST_CASE("missing bundle directory is a DataError") {
    CHECK_THROWS_AS(io::read_bundle("/nonexistent/vvec_bundle"), DataError);
}

TEST_CASE("mask round trip preserves planes and labels") {
    TempDir tmp;
    ProbMask mask;
    mask.class_labels = {"static_car", "moving_car"};
    mask.planes = {PlaneU8(20, 14, 0), PlaneU8(20, 14, 0)};
    for (int i = 0; i < 20; ++i) {
        mask.planes[0].at(3, i) = 200;
        mask.planes[1].at(7, i) = static_cast<uint8_t>(i * 12);
    }
    io::write_mask(mask, tmp.str("mask.png"));
    auto back = io::read_mask(tmp.str("mask.png"));
    REQUIRE(back.class_labels == mask.class_labels);
    CHECK(back.planes[0] == mask.planes[0]);
    CHECK(back.planes[1] == mask.planes[1]);
}

TEST_CASE("detections geojson round trip: geometry, velocity, metadata") {
    TempDir tmp;
    GeoTransform gt{{10.0, 1e-5, 0.0, 50.0, 0.0, -1e-5}};
    std::vector<vectorize::Detection> dets;
    for (int i = 0; i < 3; ++i) {
        vectorize::Detection d;
        d.id = i;
        d.cls = i == 2 ? "static_car" : "moving_car";
        d.footprint = oriented_rect({40.0 + 30.0 * i, 60.0}, 30.0 * i, 10.0, 4.0);
        d.timestamp = "2023-04-10T08:30:00Z";
        d.scene_id = "s7";
        if (i < 2) {
            vectorize::VelocityVector v;
            v.speed.speed_kmh = 40.0 + i;
            v.speed.speed_err_kmh = 12.0 + i;
            v.speed.rainbow_len_px = 10.0;
            v.heading_deg = 123.0;
            v.confidence = i == 0 ? vectorize::HeadingConfidence::Resolved
                                  : vectorize::HeadingConfidence::Ambiguous;
            d.velocity = v;
        }
        dets.push_back(d);
    }
    io::write_detections(dets, gt, tmp.str("dets.geojson"));
    auto back = io::read_detections(tmp.str("dets.geojson"), gt);
    REQUIRE(back.size() == 3);
    for (size_t i = 0; i < 3; ++i) {
        CHECK(back[i].cls == dets[i].cls);
        REQUIRE(back[i].footprint.size() == dets[i].footprint.size());
        for (size_t k = 0; k < back[i].footprint.size(); ++k)
            CHECK(norm(back[i].footprint[k] - dets[i].footprint[k]) < 1e-6);
    }
    REQUIRE(back[0].velocity.has_value());
    CHECK(back[0].velocity->speed.speed_kmh == doctest::Approx(40.0));
    CHECK(back[0].velocity->confidence == vectorize::HeadingConfidence::Resolved);
    CHECK(back[1].velocity->confidence == vectorize::HeadingConfidence::Ambiguous);
    CHECK_FALSE(back[2].velocity.has_value());
}

TEST_CASE("truth geojson round trip") {
    TempDir tmp;
    GeoTransform gt{{10.0, 1e-5, 0.0, 50.0, 0.0, -1e-5}};
    synth::GroundTruthSet truth;
    truth.width_px = 256;
    truth.height_px = 256;
    synth::TruthRecord rec;
    rec.id = 0;
    rec.cls = "moving_truck";
    rec.centroid_px = {120.0, 80.0};
    rec.footprint = oriented_rect(rec.centroid_px, 45.0, 12.0, 3.0);
    rec.true_speed_kmh = 65.0;
    rec.true_heading_deg = 45.0;
    rec.body_length_px = 4.0;
    rec.body_width_px = 0.83;
    rec.rainbow_len_px = 4.8;
    truth.records.push_back(rec);
    io::write_truth(truth, gt, tmp.str("truth.geojson"));
    auto back = io::read_truth(tmp.str("truth.geojson"), gt);
    CHECK(back.width_px == 256);
    REQUIRE(back.records.size() == 1);
    CHECK(back.records[0].cls == "moving_truck");
    CHECK(back.records[0].true_speed_kmh == doctest::Approx(65.0));
    CHECK(norm(back.records[0].centroid_px - rec.centroid_px) < 1e-6);
}

TEST_CASE("geojson output is stable across repeated writes") {
    TempDir tmp;
    GeoTransform gt{{10.0, 1e-5, 0.0, 50.0, 0.0, -1e-5}};
    std::vector<vectorize::Detection> dets;
    vectorize::Detection d;
    d.id = 0;
    d.cls = "moving_car";
    d.footprint = axis_square({30, 30}, 8.0);
    dets.push_back(d);
    io::write_detections(dets, gt, tmp.str("a.geojson"));
    io::write_detections(dets, gt, tmp.str("b.geojson"));
    CHECK(slurp(tmp.str("a.geojson")) == slurp(tmp.str("b.geojson")));
}

TEST_CASE("malformed geojson is a DataError") {
    TempDir tmp;
    io::write_text_atomic(tmp.str("bad.geojson"), "{\"type\": \"FeatureCollection\"");
    GeoTransform gt{{0, 1, 0, 0, 0, -1}};
    CHECK_THROWS_AS(io::read_detections(tmp.str("bad.geojson"), gt), DataError);
}
