#include "vvec/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "vvec/rng.hpp"

namespace vvec::synth {

namespace {

constexpr int kSuperSample = 4;  // 4x4 coverage samples per pixel

// RNG stream ids within a scene seed.
enum Stream : uint64_t {
    kTexture = 1,
    kBandNoiseBase = 2,  // +0/1/2 for r/g/b
    kPlacement = 16,
};

struct Frame {
    Vec2 u;  // unit long-axis direction (compass heading)
    Vec2 v;  // perpendicular
};

Frame heading_frame(double heading_deg) {
    Vec2 u = compass_to_dir(heading_deg);
    return {u, Vec2{-u.y, u.x}};
}

// Coverage-blend an oriented rectangle into a float canvas.
void draw_rect(PlaneF& canvas, Vec2 center, double heading_deg, double half_len,
               double half_wid, double intensity) {
    Frame f = heading_frame(heading_deg);
    double reach = std::hypot(half_len, half_wid) + 1.0;
    int r0 = std::max(0, static_cast<int>(std::floor(center.y - reach)));
    int r1 = std::min(canvas.height() - 1, static_cast<int>(std::ceil(center.y + reach)));
    int c0 = std::max(0, static_cast<int>(std::floor(center.x - reach)));
    int c1 = std::min(canvas.width() - 1, static_cast<int>(std::ceil(center.x + reach)));
    const double step = 1.0 / kSuperSample;
    for (int r = r0; r <= r1; ++r) {
        for (int c = c0; c <= c1; ++c) {
            int hits = 0;
            for (int sy = 0; sy < kSuperSample; ++sy) {
                for (int sx = 0; sx < kSuperSample; ++sx) {
                    Vec2 p{c + (sx + 0.5) * step - center.x, r + (sy + 0.5) * step - center.y};
                    double along = dot(p, f.u);
                    double across = dot(p, f.v);
                    if (std::abs(along) <= half_len && std::abs(across) <= half_wid) ++hits;
                }
            }
            if (hits == 0) continue;
            double cov = static_cast<double>(hits) / (kSuperSample * kSuperSample);
            float& px = canvas.at(r, c);
            px = static_cast<float>(px + cov * (intensity - px));
        }
    }
}

// Soft-edged disk: full coverage inside radius, Gaussian falloff beyond.
void draw_cloud(PlaneF& canvas, Vec2 center, double radius, double softness,
                double intensity) {
    double reach = radius + 4.0 * softness + 1.0;
    int r0 = std::max(0, static_cast<int>(std::floor(center.y - reach)));
    int r1 = std::min(canvas.height() - 1, static_cast<int>(std::ceil(center.y + reach)));
    int c0 = std::max(0, static_cast<int>(std::floor(center.x - reach)));
    int c1 = std::min(canvas.width() - 1, static_cast<int>(std::ceil(center.x + reach)));
    for (int r = r0; r <= r1; ++r) {
        for (int c = c0; c <= c1; ++c) {
            double d = std::hypot(c - center.x, r - center.y);
            double alpha;
            if (d <= radius) {
                alpha = 1.0;
            } else {
                double t = d - radius;
                alpha = std::exp(-0.5 * t * t / (softness * softness));
            }
            if (alpha < 1e-4) continue;
            float& px = canvas.at(r, c);
            px = static_cast<float>(px + alpha * (intensity - px));
        }
    }
}

double distance_to_segment(Vec2 p, Vec2 a, Vec2 b) {
    Vec2 ab = b - a;
    double len2 = dot(ab, ab);
    if (len2 < 1e-12) return norm(p - a);
    double t = std::clamp(dot(p - a, ab) / len2, 0.0, 1.0);
    return norm(p - (a + ab * t));
}

void fill_stadium(PlaneU8& plane, Vec2 a, Vec2 b, double radius) {
    int r0 = std::max(0, static_cast<int>(std::floor(std::min(a.y, b.y) - radius - 1)));
    int r1 = std::min(plane.height() - 1, static_cast<int>(std::ceil(std::max(a.y, b.y) + radius + 1)));
    int c0 = std::max(0, static_cast<int>(std::floor(std::min(a.x, b.x) - radius - 1)));
    int c1 = std::min(plane.width() - 1, static_cast<int>(std::ceil(std::max(a.x, b.x) + radius + 1)));
    for (int r = r0; r <= r1; ++r)
        for (int c = c0; c <= c1; ++c)
            if (distance_to_segment({static_cast<double>(c), static_cast<double>(r)}, a, b) <= radius)
                plane.at(r, c) = 255;
}

bool polygon_intersects_frame(const Polygon& poly, int width, int height) {
    double minx = 1e30, miny = 1e30, maxx = -1e30, maxy = -1e30;
    for (const auto& p : poly) {
        minx = std::min(minx, p.x);
        maxx = std::max(maxx, p.x);
        miny = std::min(miny, p.y);
        maxy = std::max(maxy, p.y);
    }
    return maxx >= 0 && minx < width && maxy >= 0 && miny < height;
}

}  // namespace

void SceneSpec::validate() const {
    if (width_px <= 0 || height_px <= 0) throw ConfigError("scene dimensions must be positive");
    sensor.validate();
    for (const auto& v : vehicles) {
        if (v.length_m < v.width_m || v.width_m <= 0)
            throw ConfigError("vehicle requires length_m >= width_m > 0");
        if (v.speed_kmh < 0) throw ConfigError("vehicle speed must be >= 0");
        if (v.cls == VehicleClass::Truck && v.length_m < 8.0)
            throw ConfigError("truck length_m must be >= 8");
        if (v.centroid_px.x < 0 || v.centroid_px.x >= width_px || v.centroid_px.y < 0 ||
            v.centroid_px.y >= height_px)
            throw ConfigError("vehicle centroid outside image bounds at red-band time");
        if (v.speed_kmh > 0) sensor.require_timing();
    }
    for (const auto& c : clouds) {
        if (c.radius_px < 15.0) throw ConfigError("cloud radius_px must be >= 15");
        if (c.softness_px < 3.0) throw ConfigError("cloud softness_px must be >= 3");
        if (c.drift_speed_kmh > 0) sensor.require_timing();
    }
}

MaskSchema schema_for_sensor(const SensorModel& sensor) {
    return sensor.gsd_m <= 1.0 ? MaskSchema::SkySat : MaskSchema::PlanetScope;
}

std::vector<std::string> schema_classes(MaskSchema schema) {
    if (schema == MaskSchema::SkySat) return {"static_car", "moving_car"};
    return {"moving_car", "moving_truck"};
}

std::pair<RasterBundle, GroundTruthSet> render_scene(const SceneSpec& spec) {
    spec.validate();

    const int w = spec.width_px, h = spec.height_px;
    std::array<PlaneF, 3> canvas{PlaneF(w, h), PlaneF(w, h), PlaneF(w, h)};

    // Static background texture, identical in every band.
    for (int b = 0; b < 3; ++b) {
        for (int r = 0; r < h; ++r) {
            for (int c = 0; c < w; ++c) {
                double tex = spec.background_texture_sigma > 0
                                 ? spec.background_texture_sigma *
                                       hash_normal(spec.rng_seed, kTexture,
                                                   static_cast<uint64_t>(r) * w + c)
                                 : 0.0;
                canvas[b].at(r, c) = static_cast<float>(spec.background_level[b] + tex);
            }
        }
    }

    GroundTruthSet truth;
    truth.width_px = w;
    truth.height_px = h;

    const std::array<Band, 3> bands{Band::Red, Band::Green, Band::Blue};
    const double delta_rb = spec.sensor.delta_rb_ms();

    int next_id = 0;
    for (const auto& v : spec.vehicles) {
        double body_len = v.length_m / spec.sensor.gsd_m;
        double body_wid = v.width_m / spec.sensor.gsd_m;
        double rainbow = v.speed_kmh > 0 ? rainbow_from_speed(v.speed_kmh, spec.sensor) : 0.0;
        Vec2 dir = compass_to_dir(v.heading_deg);

        for (int b = 0; b < 3; ++b) {
            double frac = (v.speed_kmh > 0 && delta_rb > 0)
                              ? spec.sensor.offset_ms(bands[b]) / delta_rb
                              : 0.0;
            Vec2 center = v.centroid_px + dir * (rainbow * frac);
            draw_rect(canvas[b], center, v.heading_deg, body_len * 0.5, body_wid * 0.5,
                      v.intensity[b]);
        }

        TruthRecord rec;
        rec.id = next_id++;
        rec.cls = v.speed_kmh > 0
                      ? (v.cls == VehicleClass::Truck ? "moving_truck" : "moving_car")
                      : "static_car";
        rec.centroid_px = v.centroid_px;
        rec.true_speed_kmh = v.speed_kmh;
        rec.true_heading_deg = v.speed_kmh > 0 ? v.heading_deg : 0.0;
        rec.timestamp = spec.timestamp;
        rec.body_length_px = body_len;
        rec.body_width_px = body_wid;
        rec.rainbow_len_px = rainbow;
        // Envelope: body at red time swept through body at blue time.
        Vec2 env_center = v.centroid_px + dir * (rainbow * 0.5);
        // Clamp to 2 px so sub-pixel bodies still have a usable IOU target.
        rec.footprint = oriented_rect(env_center, v.heading_deg,
                                      std::max(body_len + rainbow, 2.0), std::max(body_wid, 2.0));
        rec.out_of_frame = !polygon_intersects_frame(rec.footprint, w, h);
        truth.records.push_back(std::move(rec));
    }

    // Clouds follow the same displacement law as vehicles.
    for (const auto& cl : spec.clouds) {
        double rainbow = cl.drift_speed_kmh > 0 ? rainbow_from_speed(cl.drift_speed_kmh, spec.sensor) : 0.0;
        Vec2 dir = compass_to_dir(cl.drift_heading_deg);
        for (int b = 0; b < 3; ++b) {
            double frac = (cl.drift_speed_kmh > 0 && delta_rb > 0)
                              ? spec.sensor.offset_ms(bands[b]) / delta_rb
                              : 0.0;
            draw_cloud(canvas[b], cl.centroid_px + dir * (rainbow * frac), cl.radius_px,
                       cl.softness_px, cl.intensity);
        }
    }

    // Per-band sensor noise.
    RasterBundle bundle;
    bundle.sensor = spec.sensor;
    bundle.timestamp = spec.timestamp;
    bundle.scene_id = spec.scene_id;
    bundle.geotransform.g = {0.0, spec.sensor.gsd_m, 0.0, 0.0, 0.0, -spec.sensor.gsd_m};
    PlaneU8* out[3] = {&bundle.red, &bundle.green, &bundle.blue};
    for (int b = 0; b < 3; ++b) {
        if (spec.noise_sigma > 0) {
            for (int r = 0; r < h; ++r)
                for (int c = 0; c < w; ++c)
                    canvas[b].at(r, c) += static_cast<float>(
                        spec.noise_sigma * hash_normal(spec.rng_seed, kBandNoiseBase + b,
                                                       static_cast<uint64_t>(r) * w + c));
        }
        *out[b] = to_u8_clamped(canvas[b]);
    }

    return {std::move(bundle), std::move(truth)};
}

ProbMask render_truth_mask(const GroundTruthSet& truth, const SensorModel& sensor,
                           MaskSchema schema) {
    sensor.validate();
    if ((schema == MaskSchema::SkySat) != (sensor.gsd_m <= 1.0))
        throw ConfigError("mask schema does not match sensor resolution");

    const int w = truth.width_px, h = truth.height_px;
    if (w <= 0 || h <= 0) throw DataError("ground truth set has no raster dimensions");

    double buffer_m = schema == MaskSchema::SkySat ? 0.75 : 2.0;
    double buffer_px = buffer_m / sensor.gsd_m;
    if (buffer_px < 1.0) {
        std::fprintf(stderr, "warning: mask buffer %.2f px below one pixel, clamping to 1\n",
                     buffer_px);
        buffer_px = 1.0;
    }

    ProbMask mask;
    mask.class_labels = schema_classes(schema);
    mask.planes = {PlaneU8(w, h), PlaneU8(w, h)};

    for (const auto& rec : truth.records) {
        if (rec.out_of_frame) continue;
        Vec2 dir = compass_to_dir(rec.true_heading_deg);
        Vec2 tail = rec.centroid_px;
        Vec2 head = rec.centroid_px + dir * rec.rainbow_len_px;
        if (schema == MaskSchema::SkySat) {
            if (rec.cls == "static_car")
                fill_stadium(mask.planes[0], tail, tail, buffer_px);
            else
                fill_stadium(mask.planes[1], tail, head, buffer_px);
        } else {
            if (rec.cls == "moving_car")
                fill_stadium(mask.planes[0], tail, head, buffer_px);
            else if (rec.cls == "moving_truck")
                fill_stadium(mask.planes[1], tail, head, buffer_px);
        }
    }
    return mask;
}

SceneSpec random_scene(const SensorModel& sensor, const RandomSceneConfig& cfg, uint64_t seed) {
    SceneSpec spec;
    spec.width_px = cfg.width_px;
    spec.height_px = cfg.height_px;
    spec.sensor = sensor;
    spec.noise_sigma = cfg.noise_sigma;
    spec.rng_seed = seed;
    spec.timestamp = cfg.timestamp;
    spec.scene_id = cfg.scene_id;

    // Per-object exclusion radius: half the rainbow envelope plus slack, so
    // neighboring components can never merge after morphological closing.
    struct Placed {
        Vec2 p;
        double radius;
        bool cloud;
    };
    std::vector<Placed> placed;
    uint64_t draw = 0;
    auto place = [&](double radius, bool cloud) -> Vec2 {
        double mgn = std::min({cloud ? radius * 0.5 : radius + 4.0, cfg.width_px / 4.0,
                               cfg.height_px / 4.0});
        double pad = cfg.min_separation_px > 0 ? cfg.min_separation_px : 8.0;
        for (int attempt = 0; attempt < 4000; ++attempt) {
            Vec2 p{mgn + hash_uniform(seed, kPlacement, draw++) * (cfg.width_px - 2 * mgn),
                   mgn + hash_uniform(seed, kPlacement, draw++) * (cfg.height_px - 2 * mgn)};
            bool ok = true;
            for (const auto& q : placed) {
                // Clouds may overlap each other; everything else stays disjoint.
                double need = (cloud && q.cloud) ? std::max(radius, q.radius) * 0.5
                                                 : radius + q.radius + pad;
                if (norm(p - q.p) < need) { ok = false; break; }
            }
            if (ok) {
                placed.push_back({p, radius, cloud});
                return p;
            }
        }
        throw ConfigError("random_scene: could not place objects with requested separation; "
                          "reduce counts or enlarge the scene");
    };
    auto uni = [&](double lo, double hi) {
        return lo + hash_uniform(seed, kPlacement, draw++) * (hi - lo);
    };

    double vi = std::min(255.0, spec.background_level[0] + cfg.vehicle_contrast);
    auto add_vehicle = [&](VehicleClass vc, bool moving) {
        VehicleSpec v;
        v.cls = vc;
        if (vc == VehicleClass::Truck) {
            v.length_m = 12.0;
            v.width_m = 2.5;
        }
        v.heading_deg = uni(0.0, 360.0);
        v.speed_kmh = moving ? uni(cfg.speed_min_kmh, cfg.speed_max_kmh) : 0.0;
        double rainbow = v.speed_kmh > 0 ? rainbow_from_speed(v.speed_kmh, sensor) : 0.0;
        double extent = v.length_m / sensor.gsd_m + rainbow;
        v.centroid_px = place(extent * 0.5 + v.width_m / sensor.gsd_m, false);
        v.intensity = {vi, vi, vi};
        spec.vehicles.push_back(v);
    };

    for (int i = 0; i < cfg.n_moving_cars; ++i) add_vehicle(VehicleClass::Car, true);
    for (int i = 0; i < cfg.n_moving_trucks; ++i) add_vehicle(VehicleClass::Truck, true);
    for (int i = 0; i < cfg.n_static; ++i) add_vehicle(VehicleClass::Car, false);

    for (int i = 0; i < cfg.n_clouds; ++i) {
        CloudSpec cl;
        cl.radius_px = uni(18.0, 40.0);
        cl.softness_px = uni(3.5, 8.0);
        cl.intensity = uni(200.0, 245.0);
        cl.drift_speed_kmh = uni(15.0, 45.0);
        cl.drift_heading_deg = uni(0.0, 360.0);
        cl.centroid_px = place(cl.radius_px + 4.0 * cl.softness_px + 12.0, true);
        spec.clouds.push_back(cl);
    }

    return spec;
}

}  // namespace vvec::synth
