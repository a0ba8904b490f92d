#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "vvec/geometry.hpp"
#include "vvec/mask.hpp"
#include "vvec/raster.hpp"
#include "vvec/sensor.hpp"

namespace vvec::synth {

enum class VehicleClass { Car, Truck };

struct VehicleSpec {
    Vec2 centroid_px;          // body center at first-band (red) time
    double length_m = 4.5;
    double width_m = 2.0;
    std::array<double, 3> intensity{200, 200, 200};  // per band, 0-255
    VehicleClass cls = VehicleClass::Car;
    double speed_kmh = 0.0;
    double heading_deg = 0.0;  // compass, 0 = north/up, clockwise
};

struct CloudSpec {
    Vec2 centroid_px;
    double radius_px = 20.0;
    double intensity = 230.0;
    double drift_speed_kmh = 0.0;
    double drift_heading_deg = 0.0;
    double softness_px = 4.0;  // Gaussian edge sigma
};

struct SceneSpec {
    int width_px = 256;
    int height_px = 256;
    SensorModel sensor;
    std::array<double, 3> background_level{90, 90, 90};
    double background_texture_sigma = 0.0;  // static texture, identical in every band
    std::vector<VehicleSpec> vehicles;
    std::vector<CloudSpec> clouds;
    double noise_sigma = 0.0;  // per-band additive Gaussian sensor noise
    uint64_t rng_seed = 0;
    std::string timestamp = "2023-04-01T10:00:00Z";
    std::string scene_id = "scene";

    void validate() const;
};

struct TruthRecord {
    int id = 0;
    std::string cls;           // static_car | moving_car | moving_truck
    Polygon footprint;         // rendered rainbow envelope, pixel coords
    Vec2 centroid_px;          // body center at red-band time
    double true_speed_kmh = 0.0;
    double true_heading_deg = 0.0;  // undefined (0) for static records
    std::string timestamp;
    bool out_of_frame = false;
    double body_length_px = 0.0;
    double body_width_px = 0.0;
    double rainbow_len_px = 0.0;
};

struct GroundTruthSet {
    int width_px = 0;
    int height_px = 0;
    std::vector<TruthRecord> records;
};

enum class MaskSchema { SkySat, PlanetScope };

MaskSchema schema_for_sensor(const SensorModel& sensor);
std::vector<std::string> schema_classes(MaskSchema schema);

// Forward model: each band images every moving object at a band-specific
// time, displaced by rainbow_from_speed(speed) * offset(b)/delta_rb along
// its heading. Deterministic given the spec (incl. seed).
std::pair<RasterBundle, GroundTruthSet> render_scene(const SceneSpec& spec);

// Training-style multi-class masks: buffered disks / linestrings.
// skysat: layer0 = static cars (0.75 m disks), layer1 = moving vehicles
// (buffered rainbow linestring). planetscope: layer0 = moving cars,
// layer1 = moving trucks, 2 m buffer. Buffer below one pixel is clamped.
ProbMask render_truth_mask(const GroundTruthSet& truth, const SensorModel& sensor,
                           MaskSchema schema);

// Random-scene generator used by the CLI and the acceptance suite.
struct RandomSceneConfig {
    int width_px = 512;
    int height_px = 512;
    int n_static = 0;
    int n_moving_cars = 0;
    int n_moving_trucks = 0;
    int n_clouds = 0;
    double speed_min_kmh = 40.0;
    double speed_max_kmh = 120.0;
    double min_separation_px = 0.0;  // 0 = derive from sensor scale
    double noise_sigma = 8.0;
    double vehicle_contrast = 150.0;  // intensity above background
    std::string timestamp = "2023-04-01T10:00:00Z";
    std::string scene_id = "scene";
};

SceneSpec random_scene(const SensorModel& sensor, const RandomSceneConfig& cfg, uint64_t seed);

}  // namespace vvec::synth
