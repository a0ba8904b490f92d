#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <string>
#include <vector>

#include "vvec/kernels.hpp"
#include "vvec/rng.hpp"

using namespace vvec;
using namespace vvec::kernels;
using Clock = std::chrono::steady_clock;

namespace {

PlaneF noise_plane(int w, int h, uint64_t seed) {
    PlaneF p(w, h, 0.0f);
    for (int r = 0; r < h; ++r)
        for (int c = 0; c < w; ++c)
            p.at(r, c) = static_cast<float>(hash_uniform(seed, r, c) * 255.0);
    return p;
}

template <typename F>
double time_ms(F&& fn, int reps) {
    fn();  // warm-up
    auto t0 = Clock::now();
    for (int i = 0; i < reps; ++i) fn();
    auto t1 = Clock::now();
    return std::chrono::duration<double, std::milli>(t1 - t0).count() / reps;
}

struct Case {
    std::string name;
    std::function<PlaneF(const PlaneF&, Exec)> fn;
};

}  // namespace

int main(int argc, char** argv) {
    int size = argc > 1 ? std::atoi(argv[1]) : 1024;
    int reps = argc > 2 ? std::atoi(argv[2]) : 5;
    auto img = noise_plane(size, size, 42);
    auto img2 = noise_plane(size, size, 43);

    std::vector<Case> cases = {
        {"absdiff", [&](const PlaneF& a, Exec e) { return absdiff(a, img2, e); }},
        {"gaussian_blur s=2", [](const PlaneF& a, Exec e) { return gaussian_blur(a, 2.0, e); }},
        {"box_mean r=15", [](const PlaneF& a, Exec e) { return box_mean(a, 15, e); }},
        {"erode_disk r=5", [](const PlaneF& a, Exec e) { return erode_disk(a, 5, e); }},
        {"dilate_disk r=5", [](const PlaneF& a, Exec e) { return dilate_disk(a, 5, e); }},
        {"white_tophat r=6", [](const PlaneF& a, Exec e) { return white_tophat(a, 6, e); }},
        {"gradient_magnitude", [](const PlaneF& a, Exec e) { return gradient_magnitude(a, e); }},
    };

    std::printf("%dx%d float plane, %d reps\n", size, size, reps);
    std::printf("%-22s %12s %12s %9s %6s\n", "kernel", "serial ms", "parallel ms", "speedup",
                "equal");
    for (const auto& c : cases) {
        PlaneF out_s, out_p;
        double ts = time_ms([&] { out_s = c.fn(img, Exec::Serial); }, reps);
        double tp = time_ms([&] { out_p = c.fn(img, Exec::Parallel); }, reps);
        bool equal = out_s == out_p;
        std::printf("%-22s %12.2f %12.2f %8.2fx %6s\n", c.name.c_str(), ts, tp, ts / tp,
                    equal ? "yes" : "NO");
        if (!equal) return 1;
    }
    return 0;
}
