#include "vvec/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace vvec::kernels {

Exec default_exec() {
#ifdef _OPENMP
    return Exec::Parallel;
#else
    return Exec::Serial;
#endif
}

namespace {

#ifdef _OPENMP
#define VVEC_OMP_FOR(exec) _Pragma("omp parallel for if (exec == Exec::Parallel) schedule(static)")
#else
#define VVEC_OMP_FOR(exec)
#endif

inline int clampi(int v, int lo, int hi) { return v < lo ? lo : (v > hi ? hi : v); }

std::vector<float> gaussian_taps(double sigma) {
    int radius = std::max(1, static_cast<int>(std::ceil(3.0 * sigma)));
    std::vector<float> taps(2 * radius + 1);
    double sum = 0.0;
    for (int i = -radius; i <= radius; ++i) {
        double w = std::exp(-0.5 * (i * i) / (sigma * sigma));
        taps[i + radius] = static_cast<float>(w);
        sum += w;
    }
    for (auto& t : taps) t = static_cast<float>(t / sum);
    return taps;
}

// row/col pass share this: fixed left-to-right tap order keeps results
// independent of thread count.
PlaneF convolve_rows(const PlaneF& img, const std::vector<float>& taps, Exec exec) {
    const int w = img.width(), h = img.height();
    const int radius = static_cast<int>(taps.size()) / 2;
    PlaneF out(w, h);
    VVEC_OMP_FOR(exec)
    for (int r = 0; r < h; ++r) {
        for (int c = 0; c < w; ++c) {
            float acc = 0.f;
            for (int k = -radius; k <= radius; ++k)
                acc += taps[k + radius] * img.at(r, clampi(c + k, 0, w - 1));
            out.at(r, c) = acc;
        }
    }
    return out;
}

PlaneF convolve_cols(const PlaneF& img, const std::vector<float>& taps, Exec exec) {
    const int w = img.width(), h = img.height();
    const int radius = static_cast<int>(taps.size()) / 2;
    PlaneF out(w, h);
    VVEC_OMP_FOR(exec)
    for (int r = 0; r < h; ++r) {
        for (int c = 0; c < w; ++c) {
            float acc = 0.f;
            for (int k = -radius; k <= radius; ++k)
                acc += taps[k + radius] * img.at(clampi(r + k, 0, h - 1), c);
            out.at(r, c) = acc;
        }
    }
    return out;
}

std::vector<std::pair<int, int>> disk_offsets(int radius) {
    std::vector<std::pair<int, int>> offs;
    for (int dr = -radius; dr <= radius; ++dr)
        for (int dc = -radius; dc <= radius; ++dc)
            if (dr * dr + dc * dc <= radius * radius) offs.emplace_back(dr, dc);
    return offs;
}

template <typename Op>
PlaneF morph_disk(const PlaneF& img, int radius, Exec exec, Op op, float init) {
    const int w = img.width(), h = img.height();
    const auto offs = disk_offsets(std::max(0, radius));
    PlaneF out(w, h);
    VVEC_OMP_FOR(exec)
    for (int r = 0; r < h; ++r) {
        for (int c = 0; c < w; ++c) {
            float v = init;
            for (auto [dr, dc] : offs) {
                int rr = r + dr, cc = c + dc;
                if (rr < 0 || rr >= h || cc < 0 || cc >= w) continue;
                v = op(v, img.at(rr, cc));
            }
            out.at(r, c) = v;
        }
    }
    return out;
}

}  // namespace

PlaneF absdiff(const PlaneF& a, const PlaneF& b, Exec exec) {
    if (!a.same_shape(b)) throw DataError("absdiff: plane shapes differ");
    const int w = a.width(), h = a.height();
    PlaneF out(w, h);
    VVEC_OMP_FOR(exec)
    for (int r = 0; r < h; ++r)
        for (int c = 0; c < w; ++c) out.at(r, c) = std::abs(a.at(r, c) - b.at(r, c));
    return out;
}

PlaneF gaussian_blur(const PlaneF& img, double sigma, Exec exec) {
    if (sigma <= 0.0) return img;
    auto taps = gaussian_taps(sigma);
    return convolve_cols(convolve_rows(img, taps, exec), taps, exec);
}

PlaneF box_mean(const PlaneF& img, int radius, Exec exec) {
    if (radius <= 0) return img;
    const int w = img.width(), h = img.height();
    const float inv = 1.0f / ((2 * radius + 1) * (2 * radius + 1));
    PlaneF rowsum(w, h);
    VVEC_OMP_FOR(exec)
    for (int r = 0; r < h; ++r) {
        for (int c = 0; c < w; ++c) {
            float acc = 0.f;
            for (int k = -radius; k <= radius; ++k) acc += img.at(r, clampi(c + k, 0, w - 1));
            rowsum.at(r, c) = acc;
        }
    }
    PlaneF out(w, h);
    VVEC_OMP_FOR(exec)
    for (int r = 0; r < h; ++r) {
        for (int c = 0; c < w; ++c) {
            float acc = 0.f;
            for (int k = -radius; k <= radius; ++k) acc += rowsum.at(clampi(r + k, 0, h - 1), c);
            out.at(r, c) = acc * inv;
        }
    }
    return out;
}

PlaneF erode_disk(const PlaneF& img, int radius, Exec exec) {
    if (radius <= 0) return img;
    return morph_disk(img, radius, exec, [](float a, float b) { return std::min(a, b); },
                      std::numeric_limits<float>::max());
}

PlaneF dilate_disk(const PlaneF& img, int radius, Exec exec) {
    if (radius <= 0) return img;
    return morph_disk(img, radius, exec, [](float a, float b) { return std::max(a, b); },
                      std::numeric_limits<float>::lowest());
}

PlaneF white_tophat(const PlaneF& img, int radius, Exec exec) {
    PlaneF opened = dilate_disk(erode_disk(img, radius, exec), radius, exec);
    const int w = img.width(), h = img.height();
    PlaneF out(w, h);
    VVEC_OMP_FOR(exec)
    for (int r = 0; r < h; ++r)
        for (int c = 0; c < w; ++c) out.at(r, c) = std::max(0.f, img.at(r, c) - opened.at(r, c));
    return out;
}

PlaneF gradient_magnitude(const PlaneF& img, Exec exec) {
    const int w = img.width(), h = img.height();
    PlaneF out(w, h);
    VVEC_OMP_FOR(exec)
    for (int r = 0; r < h; ++r) {
        for (int c = 0; c < w; ++c) {
            auto px = [&](int rr, int cc) {
                return img.at(clampi(rr, 0, h - 1), clampi(cc, 0, w - 1));
            };
            float gx = (px(r - 1, c + 1) + 2.f * px(r, c + 1) + px(r + 1, c + 1)) -
                       (px(r - 1, c - 1) + 2.f * px(r, c - 1) + px(r + 1, c - 1));
            float gy = (px(r + 1, c - 1) + 2.f * px(r + 1, c) + px(r + 1, c + 1)) -
                       (px(r - 1, c - 1) + 2.f * px(r - 1, c) + px(r - 1, c + 1));
            out.at(r, c) = std::sqrt(gx * gx + gy * gy) * 0.125f;
        }
    }
    return out;
}

}  // namespace vvec::kernels
