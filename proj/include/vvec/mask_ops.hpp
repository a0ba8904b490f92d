#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "vvec/geometry.hpp"
#include "vvec/mask.hpp"
#include "vvec/sensor.hpp"

namespace vvec::mask_ops {

struct Pixel {
    int row = 0;
    int col = 0;
};

struct Component {
    std::vector<Pixel> pixels;  // sorted by (row, col)
    int area_px = 0;
    Vec2 centroid_px;
    std::string class_label;
};

// Moment-based ellipse fit of a pixel set. a >= b >= 0; orientation is the
// compass direction of the major axis modulo 180.
struct EllipseFit {
    Vec2 center_px;
    double semi_major_px = 0.0;
    double semi_minor_px = 0.0;
    double orientation_deg = 0.0;  // [0, 180)
};

struct ComponentDiagnostics {
    int undersize_dropped = 0;
    int oversize_dropped = 0;
};

// Pixel kept iff score >= threshold for that class. Every class present in
// the mask must have a threshold.
BinaryMask threshold_mask(const ProbMask& mask, const std::map<std::string, int>& per_class_thresh);

// 8-connected components with min_area <= area <= max_area, sorted by
// centroid (row, col). Out-of-range components are dropped but tallied.
std::vector<Component> extract_components(const Plane<uint8_t>& bin, int min_area_px,
                                          int max_area_px, const std::string& class_label = "",
                                          ComponentDiagnostics* diag = nullptr);

// Covariance of the pixel distribution (plus the 1/12 per-pixel term for the
// unit-square extent of each pixel); eigenvalues l1 >= l2 give a = 2*sqrt(l1),
// b = 2*sqrt(l2). Requires area >= 3.
EllipseFit fit_ellipse(const Component& c);

// Axis-aligned square of side 3 m / gsd centered on the component centroid,
// clipped to image bounds.
Polygon static_box(const Component& c, const SensorModel& sensor, int img_width, int img_height);

}  // namespace vvec::mask_ops
