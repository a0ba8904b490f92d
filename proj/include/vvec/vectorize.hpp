#pragma once

#include <optional>
#include <string>

#include "vvec/geometry.hpp"
#include "vvec/mask_ops.hpp"
#include "vvec/raster.hpp"

namespace vvec::vectorize {

// Per-band intensity patch around a fitted ellipse.
struct Chip {
    PlaneF red, green, blue;
    int origin_row = 0;  // offset into the parent raster
    int origin_col = 0;

    const PlaneF& band(Band b) const {
        switch (b) {
            case Band::Red: return red;
            case Band::Green: return green;
            case Band::Blue: return blue;
        }
        throw ConfigError("invalid band");
    }
};

enum class HeadingConfidence { Resolved, Ambiguous };

struct VelocityVector {
    SpeedEstimate speed;
    double heading_deg = 0.0;  // compass [0, 360)
    HeadingConfidence confidence = HeadingConfidence::Ambiguous;
    Vec2 env_center_px;  // center of the swept body envelope (midpoint of the
                         // band centroids when resolved, ellipse center otherwise)
};

struct Detection {
    int id = 0;
    std::string cls;  // static_car | moving_car | moving_truck
    Polygon footprint;
    std::optional<VelocityVector> velocity;  // absent for static detections
    std::string timestamp;
    std::string scene_id;
};

struct VectorizeConfig {
    int pad_px = 3;
    double smooth_sigma_px = 1.0;
    double min_peak_sep_px = 1.0;
    double alignment_cos_thresh = 0.5;
    // Subtracted from the moment major-axis length before speed conversion;
    // removes body-length / buffer bias revealed by the forward model.
    double rainbow_len_correction_px = 0.0;
    double min_eccentricity = 1.3;  // a/b gate for "moving" components (skysat schema)
    // Floors for the band-centroid support ellipse; raised for low-res
    // sensors where a component may sit off the actual band spots.
    double support_floor_a_px = 4.0;
    double support_floor_b_px = 2.5;
    // When positive, the band centroid is taken over a disc of this radius
    // around the band's brightest chip pixel instead of the moment-ellipse
    // support. Low-res band spots are compact and the component geometry
    // that shapes the ellipse support is unreliable there.
    double peak_anchor_radius_px = 0.0;
};

// Patch covering the ellipse bounding box plus pad, clipped at raster edges
// (minimum 3x3). Errors if the ellipse center is outside the raster.
Chip extract_chip(const RasterBundle& raster, const mask_ops::EllipseFit& e, int pad_px);

// Location of the maximum of the Gaussian-smoothed band plane, in parent
// raster coordinates. Ties break to smallest (row, col); a constant plane
// yields nullopt (no peak).
std::optional<Vec2> band_peak(const Chip& chip, Band band, double smooth_sigma_px);

// Resolve the 180-degree ambiguity of the ellipse orientation using the
// red->blue peak displacement.
std::pair<double, HeadingConfidence> resolve_heading(const mask_ops::EllipseFit& e,
                                                     std::optional<Vec2> red_peak,
                                                     std::optional<Vec2> blue_peak,
                                                     const VectorizeConfig& cfg);

// Full velocity vector for a moving-class component: d_pix from the major
// axis (minus the configured correction), speed via the sensor model,
// heading via resolve_heading on the extracted chip.
VelocityVector infer_vector(const RasterBundle& raster, const mask_ops::EllipseFit& e,
                            const SensorModel& sensor, const VectorizeConfig& cfg);

}  // namespace vvec::vectorize
