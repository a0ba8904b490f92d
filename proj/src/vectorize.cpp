#include "vvec/vectorize.hpp"

#include <algorithm>
#include <cmath>

#include "vvec/kernels.hpp"

namespace vvec::vectorize {

Chip extract_chip(const RasterBundle& raster, const mask_ops::EllipseFit& e, int pad_px) {
    raster.validate();
    const int w = raster.width(), h = raster.height();
    int cr = static_cast<int>(std::lround(e.center_px.y));
    int cc = static_cast<int>(std::lround(e.center_px.x));
    if (cr < 0 || cr >= h || cc < 0 || cc >= w)
        throw DataError("extract_chip: ellipse center outside raster");

    double reach = std::max(1.0, e.semi_major_px) + pad_px;
    int r0 = std::max(0, static_cast<int>(std::floor(e.center_px.y - reach)));
    int r1 = std::min(h - 1, static_cast<int>(std::ceil(e.center_px.y + reach)));
    int c0 = std::max(0, static_cast<int>(std::floor(e.center_px.x - reach)));
    int c1 = std::min(w - 1, static_cast<int>(std::ceil(e.center_px.x + reach)));
    // Keep at least 3x3 after clipping.
    while (r1 - r0 < 2) (r0 > 0) ? --r0 : ++r1;
    while (c1 - c0 < 2) (c0 > 0) ? --c0 : ++c1;

    Chip chip;
    chip.origin_row = r0;
    chip.origin_col = c0;
    const int cw = c1 - c0 + 1, ch = r1 - r0 + 1;
    PlaneF* dst[3] = {&chip.red, &chip.green, &chip.blue};
    const PlaneU8* src[3] = {&raster.red, &raster.green, &raster.blue};
    for (int b = 0; b < 3; ++b) {
        *dst[b] = PlaneF(cw, ch);
        for (int r = 0; r < ch; ++r)
            for (int c = 0; c < cw; ++c)
                dst[b]->at(r, c) = static_cast<float>(src[b]->at(r0 + r, c0 + c));
    }
    return chip;
}

std::optional<Vec2> band_peak(const Chip& chip, Band band, double smooth_sigma_px) {
    const PlaneF& plane = chip.band(band);
    if (plane.empty()) throw DataError("band_peak: empty chip");
    PlaneF sm = smooth_sigma_px > 0
                    ? kernels::gaussian_blur(plane, smooth_sigma_px, kernels::Exec::Serial)
                    : plane;

    float best = sm.at(0, 0);
    int br = 0, bc = 0;
    bool varies = false;
    for (int r = 0; r < sm.height(); ++r) {
        for (int c = 0; c < sm.width(); ++c) {
            float v = sm.at(r, c);
            if (v != best) varies = true;
            if (v > best) {
                best = v;
                br = r;
                bc = c;
            }
        }
    }
    if (!varies) return std::nullopt;  // constant plane: no peak
    return Vec2{static_cast<double>(chip.origin_col + bc), static_cast<double>(chip.origin_row + br)};
}

namespace {

// Intensity-weighted centroid of one band inside the (padded) ellipse
// support, or inside a disc around the band's chip peak when peak
// anchoring is enabled. Weights are the band values above the chip median, cut off at
// 40% of the peak excess so background noise carries no mass. Subpixel,
// and unlike the moment axis it measures the band displacement directly.
std::optional<Vec2> band_centroid(const Chip& chip, Band band, const mask_ops::EllipseFit& e,
                                  const VectorizeConfig& cfg) {
    const PlaneF& plane = chip.band(band);
    if (plane.empty()) throw DataError("band_centroid: empty chip");

    std::vector<float> vals(plane.data(), plane.data() + plane.size());
    std::nth_element(vals.begin(), vals.begin() + vals.size() / 2, vals.end());
    const double med = vals[vals.size() / 2];
    double peak = med;
    for (size_t i = 0; i < plane.size(); ++i) peak = std::max(peak, double(plane.data()[i]));
    if (peak - med < 1e-9) return std::nullopt;  // flat band: nothing to locate
    const double cutoff = 0.4 * (peak - med);

    const bool anchored = cfg.peak_anchor_radius_px > 0;
    Vec2 anchor{};
    if (anchored) {
        int br = 0, bc = 0;
        for (int r = 0; r < plane.height(); ++r)
            for (int c = 0; c < plane.width(); ++c)
                if (plane.at(r, c) > plane.at(br, bc)) { br = r; bc = c; }
        anchor = Vec2{double(chip.origin_col + bc), double(chip.origin_row + br)};
    }
    const Vec2 axis = compass_to_dir(e.orientation_deg);
    const double ra = std::max(e.semi_major_px + 1.5, cfg.support_floor_a_px);
    const double rb = std::max(e.semi_minor_px + 1.5, cfg.support_floor_b_px);
    const double rr = cfg.peak_anchor_radius_px;

    double wsum = 0.0, xsum = 0.0, ysum = 0.0;
    for (int r = 0; r < plane.height(); ++r) {
        for (int c = 0; c < plane.width(); ++c) {
            Vec2 p{double(chip.origin_col + c), double(chip.origin_row + r)};
            if (anchored) {
                Vec2 u = p - anchor;
                if (dot(u, u) > rr * rr) continue;
            } else {
                Vec2 u = p - e.center_px;
                double along = dot(u, axis);
                double perp = cross(axis, u);
                if ((along / ra) * (along / ra) + (perp / rb) * (perp / rb) > 1.0) continue;
            }
            double w = plane.at(r, c) - med - cutoff;
            if (w <= 0) continue;
            wsum += w;
            xsum += w * p.x;
            ysum += w * p.y;
        }
    }
    if (wsum < 1e-9) return std::nullopt;
    return Vec2{xsum / wsum, ysum / wsum};
}

}  // namespace

std::pair<double, HeadingConfidence> resolve_heading(const mask_ops::EllipseFit& e,
                                                     std::optional<Vec2> red_peak,
                                                     std::optional<Vec2> blue_peak,
                                                     const VectorizeConfig& cfg) {
    double orient = wrap_deg_180(e.orientation_deg);
    if (!red_peak || !blue_peak) return {orient, HeadingConfidence::Ambiguous};

    Vec2 disp = *blue_peak - *red_peak;  // red -> blue = direction of travel
    double len = norm(disp);
    if (len < cfg.min_peak_sep_px) return {orient, HeadingConfidence::Ambiguous};

    Vec2 axis = compass_to_dir(orient);
    double cosine = dot(disp, axis) / len;
    if (std::abs(cosine) < cfg.alignment_cos_thresh)
        return {orient, HeadingConfidence::Ambiguous};

    double heading = cosine >= 0 ? orient : wrap_deg_360(orient + 180.0);
    return {heading, HeadingConfidence::Resolved};
}

VelocityVector infer_vector(const RasterBundle& raster, const mask_ops::EllipseFit& e,
                            const SensorModel& sensor, const VectorizeConfig& cfg) {
    sensor.require_timing();

    Chip chip = extract_chip(raster, e, cfg.pad_px);
    auto red = band_centroid(chip, Band::Red, e, cfg);
    auto blue = band_centroid(chip, Band::Blue, e, cfg);
    auto [heading, conf] = resolve_heading(e, red, blue, cfg);

    // The red->blue centroid displacement is the rainbow vector itself, so
    // when it resolves it gives both the length and the direction; the
    // moment axis (minus the body-length correction) is only a fallback for
    // chips where the per-band centroid is undefined or off-axis.
    double d_pix;
    Vec2 env_center = e.center_px;
    if (conf == HeadingConfidence::Resolved) {
        Vec2 disp = *blue - *red;
        d_pix = norm(disp);
        heading = dir_to_compass(disp);
        env_center = (*red + *blue) * 0.5;
    } else {
        d_pix = std::max(0.0, 2.0 * e.semi_major_px - cfg.rainbow_len_correction_px);
    }

    VelocityVector v;
    v.env_center_px = env_center;
    v.speed = speed_from_rainbow(d_pix, sensor);
    v.heading_deg = heading;
    v.confidence = conf;
    return v;
}

}  // namespace vvec::vectorize
