#include "vvec/detector.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "vvec/kernels.hpp"
#include "vvec/mask_ops.hpp"

namespace vvec::detector {

using mask_ops::Component;
using synth::MaskSchema;
using vectorize::Detection;

namespace {

PlaneF gray_mean(const RasterBundle& raster) {
    const int w = raster.width(), h = raster.height();
    PlaneF out(w, h);
    for (int r = 0; r < h; ++r)
        for (int c = 0; c < w; ++c)
            out.at(r, c) =
                (raster.red.at(r, c) + raster.green.at(r, c) + raster.blue.at(r, c)) / 3.0f;
    return out;
}

// Components of `bin` where pixels within 2*radius of each other are linked
// (connectivity taken on the dilated mask, pixel sets from the raw mask).
// A fast mover's |R-B| response splits into separated head and tail lobes;
// plain closing cannot bridge two small distant blobs, linking can, and the
// raw pixel sets keep the lobe geometry for the moment fit.
std::vector<Component> linked_components(const Plane<uint8_t>& bin, int radius, int min_area,
                                         int max_area, const std::string& label) {
    if (radius <= 0) return mask_ops::extract_components(bin, min_area, max_area, label);

    const int w = bin.width(), h = bin.height();
    PlaneF f(w, h);
    for (size_t i = 0; i < bin.size(); ++i) f.data()[i] = bin.data()[i] ? 1.f : 0.f;
    PlaneF dil = kernels::dilate_disk(f, radius);
    Plane<uint8_t> dilb(w, h);
    for (size_t i = 0; i < dilb.size(); ++i) dilb.data()[i] = dil.data()[i] > 0.5f ? 1 : 0;

    auto groups = mask_ops::extract_components(dilb, 1, w * h, label);
    std::vector<int> lab(static_cast<size_t>(w) * h, -1);
    for (size_t g = 0; g < groups.size(); ++g)
        for (const auto& p : groups[g].pixels)
            lab[static_cast<size_t>(p.row) * w + p.col] = static_cast<int>(g);

    std::vector<Component> out(groups.size());
    for (int r = 0; r < h; ++r) {
        for (int c = 0; c < w; ++c) {
            if (!bin.at(r, c)) continue;
            int g = lab[static_cast<size_t>(r) * w + c];
            if (g < 0) continue;
            out[g].pixels.push_back({r, c});
        }
    }
    std::erase_if(out, [&](const Component& comp) {
        int a = static_cast<int>(comp.pixels.size());
        return a < min_area || a > max_area;
    });
    for (auto& comp : out) {
        comp.area_px = static_cast<int>(comp.pixels.size());
        comp.class_label = label;
        double rs = 0.0, cs = 0.0;
        for (const auto& p : comp.pixels) {
            rs += p.row;
            cs += p.col;
        }
        comp.centroid_px = {cs / comp.area_px, rs / comp.area_px};
    }
    std::sort(out.begin(), out.end(), [](const Component& a, const Component& b) {
        if (a.centroid_px.y != b.centroid_px.y) return a.centroid_px.y < b.centroid_px.y;
        return a.centroid_px.x < b.centroid_px.x;
    });
    return out;
}

// Top-decile gradient magnitude inside the component. Vehicles contribute
// sharp anti-aliased edges; soft cloud rims never reach them.
double edge_sharpness(const Component& comp, const PlaneF& grad) {
    std::vector<float> g;
    g.reserve(comp.pixels.size());
    for (const auto& p : comp.pixels) g.push_back(grad.at(p.row, p.col));
    size_t top = std::max<size_t>(3, g.size() / 10);
    top = std::min(top, g.size());
    std::partial_sort(g.begin(), g.begin() + top, g.end(), std::greater<float>());
    double sum = 0.0;
    for (size_t i = 0; i < top; ++i) sum += g[i];
    return sum / top;
}

bool components_overlap(const Component& a, const Component& b, double dist) {
    return norm(a.centroid_px - b.centroid_px) < dist;
}

// Chip confirmation for low-res movers: the displaced red and blue bands
// must each carry a strong spot that stays compact within the chip. Noise
// clusters lack the excess; a cloud rim is bright over half its chip.
// Returns the red-band integrated excess (nullopt = rejected); that mass
// scales with body area and splits cars from trucks where the pixel count
// of a sub-pixel body cannot.
std::optional<double> chip_confirms(const RasterBundle& raster, const mask_ops::EllipseFit& fit,
                                    const DetectorConfig& cfg) {
    vectorize::Chip chip = vectorize::extract_chip(raster, fit, cfg.vec.pad_px);
    double red_mass = 0.0;
    for (const PlaneF* plane : {&chip.red, &chip.blue}) {
        std::vector<float> vals(plane->data(), plane->data() + plane->size());
        std::nth_element(vals.begin(), vals.begin() + vals.size() / 2, vals.end());
        double med = vals[vals.size() / 2];
        int pr = 0, pc = 0;
        for (int r = 0; r < plane->height(); ++r)
            for (int c = 0; c < plane->width(); ++c)
                if (plane->at(r, c) > plane->at(pr, pc)) { pr = r; pc = c; }
        double peak = plane->at(pr, pc);
        double excess = peak - med;
        if (excess < cfg.min_band_excess) return std::nullopt;
        size_t bright = 0, far_bright = 0;
        for (int r = 0; r < plane->height(); ++r)
            for (int c = 0; c < plane->width(); ++c)
                if (plane->at(r, c) > med + 0.5 * excess) {
                    ++bright;
                    if ((r - pr) * (r - pr) + (c - pc) * (c - pc) > 9) ++far_bright;
                }
        if (bright > cfg.max_bright_frac * plane->size()) return std::nullopt;
        if (cfg.max_far_bright_px >= 0 && (int)far_bright > cfg.max_far_bright_px)
            return std::nullopt;
        if (plane == &chip.red)
            for (size_t i = 0; i < plane->size(); ++i)
                red_mass += std::max(0.0, plane->data()[i] - med - 0.5 * cfg.min_band_excess);
    }
    return red_mass;
}

}  // namespace

DetectorConfig default_config(const SensorModel& sensor) {
    DetectorConfig cfg;
    if (sensor.gsd_m <= 1.0) {
        // skysat-scale: car body ~9x4 px, rainbows up to ~40 px
        cfg.close_radius_px = 15;
        cfg.anomaly_thresh = 96;
        cfg.tophat_radius_px = 6;
        cfg.min_area_px = 8;
        cfg.max_area_px = 2000;
        cfg.truck_min_area_px = 1 << 20;  // no car/truck split in skysat schema
        cfg.vec.rainbow_len_correction_px = 14.0;
        cfg.vec.pad_px = 4;
    } else {
        // superdove-scale: car body ~1.5 px, rainbows up to ~9 px. The
        // per-pixel score of a sub-pixel body sits near the noise ceiling,
        // so the threshold is low and the area / sharpness gates do the
        // separating: noise exceedances are isolated pixels, cloud rims
        // are soft.
        cfg.anomaly_smooth_sigma_px = 0.7;
        cfg.anomaly_thresh = 40;
        cfg.close_radius_px = 5;  // must bridge the widest head/tail gap (~9 px)
        cfg.min_area_px = 2;
        cfg.max_area_px = 400;
        cfg.min_edge_sharpness = 0.0;  // sub-pixel bodies have no sharp gray edge
        cfg.min_band_excess = 35.0;
        cfg.max_bright_frac = 0.08;
        cfg.max_far_bright_px = 5;
        cfg.trim_radius_px = 13;
        cfg.truck_min_area_px = 14;
        cfg.vec.rainbow_len_correction_px = 2.5;
        cfg.vec.pad_px = 4;
        // The moment axis of a handful of pixels is too noisy to veto the
        // band displacement; the chip gates carry the false-alarm control.
        cfg.vec.alignment_cos_thresh = 0.0;
        cfg.vec.support_floor_a_px = 6.0;
        cfg.vec.support_floor_b_px = 4.5;
        cfg.vec.peak_anchor_radius_px = 3.0;
    }
    return cfg;
}

ProbMask chromatic_anomaly_mask(const RasterBundle& raster, const DetectorConfig& cfg) {
    raster.validate();
    if (raster.red.empty() || raster.green.empty() || raster.blue.empty())
        throw DataError("chromatic_anomaly_mask requires all three bands");

    PlaneF diff = kernels::absdiff(to_float(raster.red), to_float(raster.blue));
    PlaneF smooth = kernels::gaussian_blur(diff, cfg.anomaly_smooth_sigma_px);
    PlaneF local_mean = kernels::box_mean(smooth, cfg.local_norm_window_px / 2);

    const int w = raster.width(), h = raster.height();
    PlaneU8 score(w, h);
    for (int r = 0; r < h; ++r) {
        for (int c = 0; c < w; ++c) {
            double s = cfg.anomaly_gain * smooth.at(r, c) / (local_mean.at(r, c) + 1.0);
            score.at(r, c) = static_cast<uint8_t>(std::clamp(s, 0.0, 255.0));
        }
    }

    ProbMask mask;
    mask.planes = {std::move(score)};
    mask.class_labels = {"moving"};
    return mask;
}

ProbMask tophat_static_mask(const RasterBundle& raster, const DetectorConfig& cfg) {
    raster.validate();
    if (raster.sensor.gsd_m > 1.0)
        throw ConfigError("tophat_static_mask: static detection needs gsd <= 1 m (got " +
                          std::to_string(raster.sensor.gsd_m) + " m)");

    PlaneF tophat = kernels::white_tophat(gray_mean(raster), cfg.tophat_radius_px);
    const int w = raster.width(), h = raster.height();
    PlaneU8 score(w, h);
    for (int r = 0; r < h; ++r)
        for (int c = 0; c < w; ++c)
            score.at(r, c) = static_cast<uint8_t>(
                std::clamp(cfg.tophat_gain * tophat.at(r, c), 0.0, 255.0));

    ProbMask mask;
    mask.planes = {std::move(score)};
    mask.class_labels = {"static"};
    return mask;
}

std::vector<Detection> detect(const RasterBundle& raster, const SensorModel& sensor,
                              const DetectorConfig& cfg) {
    raster.validate();
    const MaskSchema schema = synth::schema_for_sensor(sensor);
    const PlaneF grad = kernels::gradient_magnitude(gray_mean(raster));

    // Moving-vehicle components from the chromatic anomaly mask.
    ProbMask moving_mask = chromatic_anomaly_mask(raster, cfg);
    Plane<uint8_t> moving_bin(raster.width(), raster.height());
    for (size_t i = 0; i < moving_bin.size(); ++i)
        moving_bin.data()[i] = moving_mask.planes[0].data()[i] >= cfg.anomaly_thresh ? 1 : 0;
    auto moving_comps = linked_components(moving_bin, cfg.close_radius_px, cfg.min_area_px,
                                          cfg.max_area_px, "moving");

    // Linking can chain noise specks onto a vehicle, or fuse two vehicles
    // whose rainbow tails approach each other. Re-segment each cluster
    // around its score maxima: a maximum suppresses weaker ones within the
    // trim radius (so the two ends of one rainbow stay one seed), pixels
    // join their nearest seed, stragglers are shed.
    if (cfg.trim_radius_px > 0) {
        const PlaneU8& score = moving_mask.planes[0];
        const double r2 = double(cfg.trim_radius_px) * cfg.trim_radius_px;
        const double sep2 = r2;  // one reach for seed suppression and assignment
        std::vector<Component> split;
        for (auto& comp : moving_comps) {
            std::vector<mask_ops::Pixel> px = comp.pixels;
            std::sort(px.begin(), px.end(), [&](const auto& a, const auto& b) {
                return score.at(a.row, a.col) > score.at(b.row, b.col);
            });
            std::vector<mask_ops::Pixel> seeds;
            for (const auto& p : px) {
                bool close = false;
                for (const auto& s : seeds) {
                    double dr = p.row - s.row, dc = p.col - s.col;
                    if (dr * dr + dc * dc < sep2) {
                        close = true;
                        break;
                    }
                }
                if (!close) seeds.push_back(p);
            }
            std::vector<Component> sub(seeds.size());
            for (const auto& p : comp.pixels) {
                int best = -1;
                double bd = r2 + 1e-9;
                for (size_t s = 0; s < seeds.size(); ++s) {
                    double dr = p.row - seeds[s].row, dc = p.col - seeds[s].col;
                    double d = dr * dr + dc * dc;
                    if (d < bd) {
                        bd = d;
                        best = static_cast<int>(s);
                    }
                }
                if (best >= 0) sub[best].pixels.push_back(p);
            }
            for (auto& sc : sub) {
                if (static_cast<int>(sc.pixels.size()) < cfg.min_area_px) continue;
                sc.area_px = static_cast<int>(sc.pixels.size());
                sc.class_label = comp.class_label;
                double rs = 0.0, cs = 0.0;
                for (const auto& p : sc.pixels) {
                    rs += p.row;
                    cs += p.col;
                }
                sc.centroid_px = {cs / sc.area_px, rs / sc.area_px};
                split.push_back(std::move(sc));
            }
        }
        moving_comps = std::move(split);
    }

    // Cloud gates: oversize components are already dropped by max_area; soft
    // edges are rejected here.
    std::vector<Component> movers;
    for (auto& comp : moving_comps) {
        if (edge_sharpness(comp, grad) < cfg.min_edge_sharpness) continue;
        movers.push_back(std::move(comp));
    }

    // Static components (high-res schema only).
    std::vector<Component> statics;
    if (schema == MaskSchema::SkySat) {
        ProbMask static_mask = tophat_static_mask(raster, cfg);
        Plane<uint8_t> static_bin(raster.width(), raster.height());
        for (size_t i = 0; i < static_bin.size(); ++i)
            static_bin.data()[i] = static_mask.planes[0].data()[i] >= cfg.static_thresh ? 1 : 0;
        auto static_comps =
            mask_ops::extract_components(static_bin, cfg.min_area_px, cfg.max_area_px, "static");
        // A moving vehicle also fires the top-hat; moving classification wins.
        double overlap_dist = cfg.close_radius_px + 14.0;
        for (auto& comp : static_comps) {
            bool near_mover = false;
            for (const auto& m : movers)
                if (components_overlap(comp, m, overlap_dist)) {
                    near_mover = true;
                    break;
                }
            if (!near_mover) statics.push_back(std::move(comp));
        }
    }

    std::vector<Detection> out;
    std::vector<double> masses;  // parallel to out while movers are emitted
    int next_id = 0;
    auto emit_static = [&](const Component& comp) {
        Detection d;
        d.id = next_id++;
        d.cls = "static_car";
        d.footprint = mask_ops::static_box(comp, sensor, raster.width(), raster.height());
        d.timestamp = raster.timestamp;
        d.scene_id = raster.scene_id;
        out.push_back(std::move(d));
    };

    for (const auto& comp : movers) {
        mask_ops::EllipseFit fit;
        try {
            fit = mask_ops::fit_ellipse(comp);
        } catch (const DataError&) {
            continue;  // sub-minimal component; never aborts the scene
        }
        // Near-circular "moving" blobs have no usable rainbow; in the
        // high-res schema they are reclassified as static.
        if (schema == MaskSchema::SkySat && fit.semi_minor_px > 1e-9 &&
            fit.semi_major_px / fit.semi_minor_px < cfg.vec.min_eccentricity) {
            emit_static(comp);
            continue;
        }
        std::optional<double> chip_mass;
        if (cfg.min_band_excess > 0.0) {
            try {
                chip_mass = chip_confirms(raster, fit, cfg);
            } catch (const DataError&) {
            }
            if (!chip_mass) continue;
        }
        Detection d;
        d.id = next_id++;
        if (schema == MaskSchema::SkySat)
            d.cls = "moving_car";
        else if (chip_mass)
            d.cls = *chip_mass >= cfg.truck_min_mass ? "moving_truck" : "moving_car";
        else
            d.cls = comp.area_px >= cfg.truck_min_area_px ? "moving_truck" : "moving_car";
        try {
            d.velocity = vectorize::infer_vector(raster, fit, sensor, cfg.vec);
        } catch (const std::runtime_error&) {
            d.velocity = std::nullopt;  // per-detection failure, detection kept
        }
        // Low-res schema: an unresolvable displacement means the cluster is
        // not a rainbow pair; drop it rather than emit a junk vector.
        if (cfg.min_band_excess > 0.0 &&
            (!d.velocity || d.velocity->confidence != vectorize::HeadingConfidence::Resolved))
            continue;
        if (schema == MaskSchema::PlanetScope && d.velocity) {
            // Sub-pixel bodies: report the swept envelope along the resolved
            // heading instead of a hairline moment ellipse.
            double d_pix = rainbow_from_speed(d.velocity->speed.speed_kmh, sensor);
            d.footprint =
                oriented_rect(d.velocity->env_center_px, d.velocity->heading_deg, d_pix + 2.0, 2.0);
        } else {
            d.footprint = ellipse_polygon(fit.center_px, std::max(fit.semi_major_px, 0.5),
                                          std::max(fit.semi_minor_px, 0.5), fit.orientation_deg);
        }
        d.timestamp = raster.timestamp;
        d.scene_id = raster.scene_id;
        masses.push_back(chip_mass.value_or(0.0));
        out.push_back(std::move(d));
    }

    // Low-res schema: overlapping clusters can resolve onto the same band
    // spots; keep the strongest per envelope center.
    if (cfg.min_band_excess > 0.0 && out.size() > 1) {
        std::vector<size_t> order(out.size());
        for (size_t i = 0; i < order.size(); ++i) order[i] = i;
        std::stable_sort(order.begin(), order.end(),
                         [&](size_t a, size_t b) { return masses[a] > masses[b]; });
        std::vector<Detection> kept;
        for (size_t i : order) {
            bool dup = false;
            for (const auto& k : kept)
                if (norm(out[i].velocity->env_center_px - k.velocity->env_center_px) < 6.0) {
                    dup = true;
                    break;
                }
            if (!dup) kept.push_back(std::move(out[i]));
        }
        std::sort(kept.begin(), kept.end(), [](const Detection& a, const Detection& b) {
            if (a.velocity->env_center_px.y != b.velocity->env_center_px.y)
                return a.velocity->env_center_px.y < b.velocity->env_center_px.y;
            return a.velocity->env_center_px.x < b.velocity->env_center_px.x;
        });
        out = std::move(kept);
        next_id = 0;
        for (auto& d : out) d.id = next_id++;
    }

    for (const auto& comp : statics) emit_static(comp);

    // Clip footprints to image bounds.
    Polygon frame{{0, 0},
                  {static_cast<double>(raster.width()), 0},
                  {static_cast<double>(raster.width()), static_cast<double>(raster.height())},
                  {0, static_cast<double>(raster.height())}};
    for (auto& d : out) d.footprint = clip_convex(d.footprint, frame);

    return out;
}

}  // namespace vvec::detector
