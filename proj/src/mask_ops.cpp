#include "vvec/mask_ops.hpp"

#include <algorithm>
#include <cmath>
#include <deque>

namespace vvec::mask_ops {

BinaryMask threshold_mask(const ProbMask& mask, const std::map<std::string, int>& per_class_thresh) {
    mask.validate();
    BinaryMask out;
    out.class_labels = mask.class_labels;
    for (size_t i = 0; i < mask.planes.size(); ++i) {
        auto it = per_class_thresh.find(mask.class_labels[i]);
        if (it == per_class_thresh.end())
            throw ConfigError("missing threshold for class: " + mask.class_labels[i]);
        int thresh = it->second;
        if (thresh < 0 || thresh > 255) throw ConfigError("threshold out of range [0,255]");
        const PlaneU8& p = mask.planes[i];
        Plane<uint8_t> bin(p.width(), p.height());
        for (size_t j = 0; j < p.size(); ++j) bin.data()[j] = p.data()[j] >= thresh ? 1 : 0;
        out.planes.push_back(std::move(bin));
    }
    return out;
}

std::vector<Component> extract_components(const Plane<uint8_t>& bin, int min_area_px,
                                          int max_area_px, const std::string& class_label,
                                          ComponentDiagnostics* diag) {
    if (min_area_px < 0 || min_area_px > max_area_px)
        throw ConfigError("require 0 <= min_area <= max_area");

    const int w = bin.width(), h = bin.height();
    std::vector<uint8_t> visited(bin.size(), 0);
    std::vector<Component> out;

    for (int r0 = 0; r0 < h; ++r0) {
        for (int c0 = 0; c0 < w; ++c0) {
            size_t idx0 = static_cast<size_t>(r0) * w + c0;
            if (!bin.data()[idx0] || visited[idx0]) continue;

            Component comp;
            comp.class_label = class_label;
            std::deque<Pixel> queue{{r0, c0}};
            visited[idx0] = 1;
            while (!queue.empty()) {
                Pixel p = queue.front();
                queue.pop_front();
                comp.pixels.push_back(p);
                for (int dr = -1; dr <= 1; ++dr) {
                    for (int dc = -1; dc <= 1; ++dc) {
                        if (dr == 0 && dc == 0) continue;
                        int rr = p.row + dr, cc = p.col + dc;
                        if (rr < 0 || rr >= h || cc < 0 || cc >= w) continue;
                        size_t idx = static_cast<size_t>(rr) * w + cc;
                        if (bin.data()[idx] && !visited[idx]) {
                            visited[idx] = 1;
                            queue.push_back({rr, cc});
                        }
                    }
                }
            }

            comp.area_px = static_cast<int>(comp.pixels.size());
            if (comp.area_px < min_area_px) {
                if (diag) ++diag->undersize_dropped;
                continue;
            }
            if (comp.area_px > max_area_px) {
                if (diag) ++diag->oversize_dropped;
                continue;
            }
            std::sort(comp.pixels.begin(), comp.pixels.end(), [](const Pixel& a, const Pixel& b) {
                return a.row != b.row ? a.row < b.row : a.col < b.col;
            });
            double sr = 0, sc = 0;
            for (const auto& p : comp.pixels) {
                sr += p.row;
                sc += p.col;
            }
            comp.centroid_px = {sc / comp.area_px, sr / comp.area_px};
            out.push_back(std::move(comp));
        }
    }

    std::sort(out.begin(), out.end(), [](const Component& a, const Component& b) {
        if (a.centroid_px.y != b.centroid_px.y) return a.centroid_px.y < b.centroid_px.y;
        return a.centroid_px.x < b.centroid_px.x;
    });
    return out;
}

EllipseFit fit_ellipse(const Component& c) {
    if (c.area_px < 3) throw DataError("fit_ellipse requires component area >= 3");

    const double n = c.area_px;
    double mr = c.centroid_px.y, mc = c.centroid_px.x;
    double srr = 0, scc = 0, src = 0;
    for (const auto& p : c.pixels) {
        double dr = p.row - mr, dc = p.col - mc;
        srr += dr * dr;
        scc += dc * dc;
        src += dr * dc;
    }
    // Each pixel is a unit square, not a point: add its own 1/12 variance.
    double crr = srr / n + 1.0 / 12.0;
    double ccc = scc / n + 1.0 / 12.0;
    double crc = src / n;

    double tr = crr + ccc;
    double det = crr * ccc - crc * crc;
    double disc = std::sqrt(std::max(0.0, tr * tr * 0.25 - det));
    double l1 = tr * 0.5 + disc;
    double l2 = std::max(0.0, tr * 0.5 - disc);

    // Major-axis eigenvector in (drow, dcol).
    double er, ec;
    if (std::abs(crc) > 1e-12) {
        er = l1 - ccc;
        ec = crc;
    } else if (crr >= ccc) {
        er = 1;
        ec = 0;
    } else {
        er = 0;
        ec = 1;
    }

    EllipseFit fit;
    fit.center_px = c.centroid_px;
    fit.semi_major_px = 2.0 * std::sqrt(l1);
    fit.semi_minor_px = 2.0 * std::sqrt(l2);
    fit.orientation_deg = wrap_deg_180(dir_to_compass({ec, er}));
    return fit;
}

Polygon static_box(const Component& c, const SensorModel& sensor, int img_width, int img_height) {
    sensor.validate();
    double side = 3.0 / sensor.gsd_m;
    Polygon box = axis_square(c.centroid_px, side);
    for (auto& p : box) {
        p.x = std::clamp(p.x, 0.0, static_cast<double>(img_width));
        p.y = std::clamp(p.y, 0.0, static_cast<double>(img_height));
    }
    return box;
}

}  // namespace vvec::mask_ops
