#pragma once

#include <array>
#include <cmath>
#include <vector>

#include "vvec/errors.hpp"

namespace vvec {

struct Vec2 {
    double x = 0.0;  // column direction
    double y = 0.0;  // row direction
};

inline Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
inline Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
inline Vec2 operator*(Vec2 a, double s) { return {a.x * s, a.y * s}; }
inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Vec2 a) { return std::sqrt(dot(a, a)); }

// Vertex list in pixel coordinates (x = col, y = row), implicitly closed.
using Polygon = std::vector<Vec2>;

inline double polygon_area(const Polygon& p) {
    if (p.size() < 3) return 0.0;
    double s = 0.0;
    for (size_t i = 0; i < p.size(); ++i) {
        const Vec2& a = p[i];
        const Vec2& b = p[(i + 1) % p.size()];
        s += cross(a, b);
    }
    return std::abs(s) * 0.5;
}

// Sutherland-Hodgman clip of `subject` against convex `clip`.
// Footprints in this pipeline are convex (rectangles, squares, ellipse outlines).
Polygon clip_convex(const Polygon& subject, const Polygon& clip);

// area(a ∩ b) / area(a ∪ b) for convex polygons; zero-area inputs give 0.
double polygon_iou(const Polygon& a, const Polygon& b);

// Compass convention used repo-wide: 0 deg = image up (north, -row),
// clockwise positive. Returns unit (drow, dcol) packed as Vec2{x=dcol, y=drow}.
inline Vec2 compass_to_dir(double heading_deg) {
    double r = heading_deg * M_PI / 180.0;
    return {std::sin(r), -std::cos(r)};
}

inline double dir_to_compass(Vec2 d) {
    double deg = std::atan2(d.x, -d.y) * 180.0 / M_PI;
    return std::fmod(deg + 360.0, 360.0);
}

inline double wrap_deg_360(double d) {
    d = std::fmod(d, 360.0);
    if (d < 0) d += 360.0;
    return d >= 360.0 ? 0.0 : d;  // -eps + 360 rounds back to 360
}

inline double wrap_deg_180(double d) {
    d = std::fmod(d, 180.0);
    if (d < 0) d += 180.0;
    return d >= 180.0 ? 0.0 : d;
}

// Smallest absolute angular distance in degrees, result in [0, 180].
inline double circular_dist_deg(double a, double b) {
    double d = std::abs(wrap_deg_360(a) - wrap_deg_360(b));
    return d > 180.0 ? 360.0 - d : d;
}

// Oriented rectangle centered at `center`, long axis along compass `heading_deg`.
Polygon oriented_rect(Vec2 center, double heading_deg, double full_len, double full_wid);

// Axis-aligned square of given side centered at `center`.
Polygon axis_square(Vec2 center, double side);

// Ellipse outline sampled as a convex polygon (n vertices).
Polygon ellipse_polygon(Vec2 center, double semi_major, double semi_minor,
                        double orientation_deg, int n = 32);

// GDAL-style 6-value affine: x = g[0] + col*g[1] + row*g[2],
//                            y = g[3] + col*g[4] + row*g[5].
struct GeoTransform {
    std::array<double, 6> g{0.0, 1.0, 0.0, 0.0, 0.0, -1.0};

    Vec2 pixel_to_geo(double row, double col) const {
        return {g[0] + col * g[1] + row * g[2], g[3] + col * g[4] + row * g[5]};
    }

    Vec2 geo_to_pixel(double x, double y) const {
        double det = g[1] * g[5] - g[2] * g[4];
        if (std::abs(det) < 1e-30) throw DataError("geotransform is singular");
        double dx = x - g[0], dy = y - g[3];
        double col = (dx * g[5] - dy * g[2]) / det;
        double row = (dy * g[1] - dx * g[4]) / det;
        return {col, row};
    }
};

}  // namespace vvec
