#pragma once

#include <cmath>
#include <map>
#include <string>

#include "vvec/errors.hpp"

namespace vvec {

enum class Band { Red = 0, Green = 1, Blue = 2 };

inline const char* band_name(Band b) {
    switch (b) {
        case Band::Red: return "red";
        case Band::Green: return "green";
        case Band::Blue: return "blue";
    }
    return "?";
}

struct SpeedEstimate {
    double speed_kmh = 0.0;
    double speed_err_kmh = 0.0;
    double rainbow_len_px = 0.0;
};

// Per-constellation imaging geometry and band timing. Immutable after
// construction; safe to share across workers.
struct SensorModel {
    std::string name;
    double gsd_m = 0.0;
    // Capture-time offsets in ms relative to the first band.
    std::map<std::string, double> band_time_offsets_ms;
    double speed_rel_error = 0.30;

    double offset_ms(Band b) const {
        auto it = band_time_offsets_ms.find(band_name(b));
        if (it == band_time_offsets_ms.end())
            throw ConfigError(std::string("sensor '") + name + "' missing band offset: " + band_name(b));
        return it->second;
    }

    // Red<->blue capture delta; must be > 0 for velocity inference.
    double delta_rb_ms() const { return std::abs(offset_ms(Band::Blue) - offset_ms(Band::Red)); }

    void validate() const {
        if (gsd_m <= 0.0) throw ConfigError("sensor gsd_m must be positive");
        if (speed_rel_error < 0.0) throw ConfigError("sensor speed_rel_error must be >= 0");
        for (auto b : {Band::Red, Band::Green, Band::Blue}) {
            if (offset_ms(b) < 0.0) throw ConfigError("band time offsets must be non-negative");
        }
    }

    void require_timing() const {
        validate();
        if (delta_rb_ms() <= 0.0)
            throw ConfigError(std::string("sensor '") + name +
                              "' has zero red-blue time delta; cannot infer velocity");
    }
};

// Exact conversion: km/h = 3.6 * (gsd_m * d_pix) / (delta_rb_ms / 1000).
inline SpeedEstimate speed_from_rainbow(double d_pix, const SensorModel& sensor) {
    if (d_pix < 0.0) throw ConfigError("rainbow length must be >= 0");
    sensor.require_timing();
    SpeedEstimate e;
    e.rainbow_len_px = d_pix;
    e.speed_kmh = 3.6 * (sensor.gsd_m * d_pix) / (sensor.delta_rb_ms() / 1000.0);
    e.speed_err_kmh = sensor.speed_rel_error * e.speed_kmh;
    return e;
}

// Exact algebraic inverse of speed_from_rainbow.
inline double rainbow_from_speed(double speed_kmh, const SensorModel& sensor) {
    if (speed_kmh < 0.0) throw ConfigError("speed must be >= 0");
    sensor.require_timing();
    return speed_kmh * (sensor.delta_rb_ms() / 1000.0) / (3.6 * sensor.gsd_m);
}

// Band capture order red -> green -> blue with offsets {0, delta/2, delta}.
inline SensorModel make_sensor(const std::string& name, double gsd_m, double delta_rb_ms,
                               double speed_rel_error = 0.30) {
    SensorModel s;
    s.name = name;
    s.gsd_m = gsd_m;
    s.band_time_offsets_ms = {{"red", 0.0}, {"green", delta_rb_ms / 2.0}, {"blue", delta_rb_ms}};
    s.speed_rel_error = speed_rel_error;
    return s;
}

// Built-in presets: skysat (0.5 m, 560 ms) and superdove (3 m, 800 ms).
inline SensorModel sensor_preset(const std::string& name) {
    if (name == "skysat") return make_sensor("skysat", 0.5, 560.0);
    if (name == "superdove" || name == "planetscope") return make_sensor("superdove", 3.0, 800.0);
    throw ConfigError("unknown sensor preset: " + name + " (expected skysat|superdove)");
}

}  // namespace vvec
