#include "vvec/geometry.hpp"

#include <algorithm>

namespace vvec {

namespace {

// Signed area sign of the polygon (positive = counter-clockwise in x-right/y-down).
double signed_area2(const Polygon& p) {
    double s = 0.0;
    for (size_t i = 0; i < p.size(); ++i) s += cross(p[i], p[(i + 1) % p.size()]);
    return s;
}

}  // namespace

Polygon clip_convex(const Polygon& subject, const Polygon& clip) {
    if (subject.size() < 3 || clip.size() < 3) return {};

    // Orient the clip polygon consistently so "inside" is a fixed half-plane side.
    Polygon clipper = clip;
    if (signed_area2(clipper) < 0) std::reverse(clipper.begin(), clipper.end());

    Polygon output = subject;
    for (size_t i = 0; i < clipper.size() && !output.empty(); ++i) {
        Vec2 e0 = clipper[i];
        Vec2 e1 = clipper[(i + 1) % clipper.size()];
        Polygon input;
        input.swap(output);

        auto inside = [&](Vec2 p) { return cross(e1 - e0, p - e0) >= 0.0; };
        auto intersect = [&](Vec2 a, Vec2 b) {
            double da = cross(e1 - e0, a - e0);
            double db = cross(e1 - e0, b - e0);
            double t = da / (da - db);
            return a + (b - a) * t;
        };

        for (size_t j = 0; j < input.size(); ++j) {
            Vec2 cur = input[j];
            Vec2 nxt = input[(j + 1) % input.size()];
            bool cin = inside(cur), nin = inside(nxt);
            if (cin) {
                output.push_back(cur);
                if (!nin) output.push_back(intersect(cur, nxt));
            } else if (nin) {
                output.push_back(intersect(cur, nxt));
            }
        }
    }
    return output;
}

double polygon_iou(const Polygon& a, const Polygon& b) {
    double area_a = polygon_area(a);
    double area_b = polygon_area(b);
    if (area_a <= 0.0 || area_b <= 0.0) return 0.0;
    double inter = polygon_area(clip_convex(a, b));
    double uni = area_a + area_b - inter;
    if (uni <= 0.0) return 0.0;
    double iou = inter / uni;
    return iou < 0.0 ? 0.0 : (iou > 1.0 ? 1.0 : iou);
}

Polygon oriented_rect(Vec2 center, double heading_deg, double full_len, double full_wid) {
    Vec2 u = compass_to_dir(heading_deg);          // long axis
    Vec2 v{-u.y, u.x};                             // perpendicular
    double hl = full_len * 0.5, hw = full_wid * 0.5;
    return {center + u * hl + v * hw, center + u * hl - v * hw,
            center - u * hl - v * hw, center - u * hl + v * hw};
}

Polygon axis_square(Vec2 center, double side) {
    double h = side * 0.5;
    return {{center.x - h, center.y - h}, {center.x + h, center.y - h},
            {center.x + h, center.y + h}, {center.x - h, center.y + h}};
}

Polygon ellipse_polygon(Vec2 center, double semi_major, double semi_minor,
                        double orientation_deg, int n) {
    Polygon out;
    out.reserve(n);
    Vec2 u = compass_to_dir(orientation_deg);
    Vec2 v{-u.y, u.x};
    for (int i = 0; i < n; ++i) {
        double t = 2.0 * M_PI * i / n;
        out.push_back(center + u * (semi_major * std::cos(t)) + v * (semi_minor * std::sin(t)));
    }
    return out;
}

}  // namespace vvec
