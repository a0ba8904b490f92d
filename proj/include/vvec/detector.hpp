#pragma once

#include <map>
#include <string>
#include <vector>

#include "vvec/mask.hpp"
#include "vvec/raster.hpp"
#include "vvec/synth.hpp"
#include "vvec/vectorize.hpp"

namespace vvec::detector {

// Classical mask source standing in for the paper-style segmentation model;
// emits the same ProbMask interface, so an external model's masks can be
// dropped in unchanged.
struct DetectorConfig {
    // Chromatic-anomaly (moving) mask.
    int local_norm_window_px = 31;
    double anomaly_smooth_sigma_px = 1.0;
    double anomaly_gain = 24.0;     // score = gain * smoothed|R-B| / (local mean + 1)
    int anomaly_thresh = 128;
    int close_radius_px = 4;        // bridges the separated rainbow head/tail lobes

    // Top-hat (static) mask, high-res sensors only.
    int tophat_radius_px = 6;
    double tophat_gain = 2.0;
    int static_thresh = 128;

    // Component gates.
    int min_area_px = 2;
    int max_area_px = 2000;
    double min_edge_sharpness = 14.0;  // mean boundary gradient floor; soft cloud edges fall below
    int truck_min_area_px = 14;        // car/truck split, planetscope schema

    // Chip confirmation gates (low-res schema, where gradients cannot
    // separate sub-pixel vehicles from cloud rims): each of the red and
    // blue bands must show a strong compact spot, and the red->blue
    // displacement must resolve. Zero / one disables.
    double min_band_excess = 0.0;   // chip peak minus chip median, per band
    double max_bright_frac = 1.0;   // fraction of chip above half the excess
    int max_far_bright_px = -1;     // bright pixels farther than 3 px from the band
                                    // peak; a vehicle spot is a dot, a drifting
                                    // cloud rim smears bright pixels along the arc
                                    // (-1 = off)
    double truck_min_mass = 250.0;  // red-band integrated excess for the truck split
    int trim_radius_px = 0;         // low-res: keep cluster pixels this close to its
                                    // score peak, shedding chained noise specks (0 = off)

    vectorize::VectorizeConfig vec;
};

// Defaults calibrated per sensor preset against the forward model.
DetectorConfig default_config(const SensorModel& sensor);

// Per-pixel moving-vehicle score: locally mean-normalized |red - blue|
// discrepancy, scaled to 0-255. High where band displacement decorrelates
// channels, low on static content and soft cloud gradients.
ProbMask chromatic_anomaly_mask(const RasterBundle& raster, const DetectorConfig& cfg);

// White top-hat response thresholded to a static-vehicle score plane.
// Refused for gsd > 1 m (static detection is not meaningful at low res).
// Inherits the classical limitation: only vehicles brighter than the
// background respond.
ProbMask tophat_static_mask(const RasterBundle& raster, const DetectorConfig& cfg);

// Full pipeline: masks -> threshold -> components (cloud gates) -> geometry
// -> velocity vectors. Deterministic for identical raster + config.
std::vector<vectorize::Detection> detect(const RasterBundle& raster, const SensorModel& sensor,
                                         const DetectorConfig& cfg);

}  // namespace vvec::detector
