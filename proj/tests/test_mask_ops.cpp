#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "vvec/mask_ops.hpp"
#include "vvec/rng.hpp"

using namespace vvec;
using namespace vvec::mask_ops;

namespace {

Plane<uint8_t> from_rows(const std::vector<std::string>& rows) {
    Plane<uint8_t> p(static_cast<int>(rows[0].size()), static_cast<int>(rows.size()));
    for (int r = 0; r < p.height(); ++r)
        for (int c = 0; c < p.width(); ++c) p.at(r, c) = rows[r][c] == '#' ? 1 : 0;
    return p;
}

// Independent oracle: recursive flood fill component count (8-connectivity).
int flood_count(const Plane<uint8_t>& bin) {
    Plane<uint8_t> seen(bin.width(), bin.height());
    int count = 0;
    std::vector<std::pair<int, int>> stack;
    for (int r = 0; r < bin.height(); ++r) {
        for (int c = 0; c < bin.width(); ++c) {
            if (!bin.at(r, c) || seen.at(r, c)) continue;
            ++count;
            stack.push_back({r, c});
            seen.at(r, c) = 1;
            while (!stack.empty()) {
                auto [rr, cc] = stack.back();
                stack.pop_back();
                for (int dr = -1; dr <= 1; ++dr)
                    for (int dc = -1; dc <= 1; ++dc) {
                        int r2 = rr + dr, c2 = cc + dc;
                        if (r2 < 0 || r2 >= bin.height() || c2 < 0 || c2 >= bin.width()) continue;
                        if (bin.at(r2, c2) && !seen.at(r2, c2)) {
                            seen.at(r2, c2) = 1;
                            stack.push_back({r2, c2});
                        }
                    }
            }
        }
    }
    return count;
}

// Independent oracle: ellipse parameters from raw moment sums.
struct BruteFit {
    double cr, cc, a, b, orient_deg;
};

BruteFit brute_moments(const std::vector<Pixel>& px) {
    double n = static_cast<double>(px.size());
    double sr = 0, sc = 0;
    for (auto& p : px) {
        sr += p.row;
        sc += p.col;
    }
    double mr = sr / n, mc = sc / n;
    double srr = 0, scc = 0, src = 0;
    for (auto& p : px) {
        srr += (p.row - mr) * (p.row - mr);
        scc += (p.col - mc) * (p.col - mc);
        src += (p.row - mr) * (p.col - mc);
    }
    double crr = srr / n + 1.0 / 12.0, ccc = scc / n + 1.0 / 12.0, crc = src / n;
    double tr = crr + ccc, det = crr * ccc - crc * crc;
    double disc = std::sqrt(std::max(0.0, tr * tr / 4 - det));
    double l1 = tr / 2 + disc, l2 = std::max(0.0, tr / 2 - disc);
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
    double deg = std::atan2(ec, -er) * 180.0 / M_PI;
    deg = std::fmod(std::fmod(deg, 180.0) + 180.0, 180.0);
    return {mr, mc, 2 * std::sqrt(l1), 2 * std::sqrt(l2), deg};
}

Component make_component(const std::vector<Pixel>& px) {
    Component c;
    c.pixels = px;
    c.area_px = static_cast<int>(px.size());
    double sr = 0, sc = 0;
    for (auto& p : px) {
        sr += p.row;
        sc += p.col;
    }
    c.centroid_px = {sc / px.size(), sr / px.size()};
    return c;
}

}  // namespace

TEST_CASE("threshold: trivial and boundary cases") {
    ProbMask mask;
    mask.planes = {PlaneU8(8, 8, 0)};
    mask.class_labels = {"moving"};
    auto bin = threshold_mask(mask, {{"moving", 128}});
    for (size_t i = 0; i < bin.planes[0].size(); ++i) CHECK(bin.planes[0].data()[i] == 0);

    // threshold 0 keeps everything (score >= 0 always true)
    mask.planes[0].at(3, 3) = 1;
    bin = threshold_mask(mask, {{"moving", 0}});
    CHECK(bin.planes[0].at(0, 0) == 1);
    CHECK(bin.planes[0].at(3, 3) == 1);

    // uniform 130 against 128 keeps the full plane
    ProbMask m2;
    m2.planes = {PlaneU8(8, 8, 130)};
    m2.class_labels = {"moving"};
    bin = threshold_mask(m2, {{"moving", 128}});
    for (size_t i = 0; i < bin.planes[0].size(); ++i) CHECK(bin.planes[0].data()[i] == 1);
}

TEST_CASE("threshold: missing class is a configuration error") {
    ProbMask mask;
    mask.planes = {PlaneU8(4, 4, 0)};
    mask.class_labels = {"moving"};
    CHECK_THROWS_AS(threshold_mask(mask, {{"static", 128}}), ConfigError);
}

TEST_CASE("threshold monotonicity: raising a threshold never adds pixels") {
    ProbMask mask;
    mask.planes = {PlaneU8(16, 16)};
    mask.class_labels = {"c"};
    for (size_t i = 0; i < mask.planes[0].size(); ++i)
        mask.planes[0].data()[i] = static_cast<uint8_t>(hash_combine(5, 1, i) & 0xFF);
    for (int t = 0; t < 240; t += 16) {
        auto lo = threshold_mask(mask, {{"c", t}});
        auto hi = threshold_mask(mask, {{"c", t + 16}});
        for (size_t i = 0; i < lo.planes[0].size(); ++i)
            CHECK(hi.planes[0].data()[i] <= lo.planes[0].data()[i]);
    }
}

TEST_CASE("components: two disjoint 3x3 squares") {
    auto bin = from_rows({"###....###",
                          "###....###",
                          "###....###"});
    auto comps = extract_components(bin, 1, 1000);
    REQUIRE(comps.size() == 2);
    CHECK(comps[0].area_px == 9);
    CHECK(comps[1].area_px == 9);
}

TEST_CASE("components: diagonal chain is one component under 8-connectivity") {
    auto bin = from_rows({"#....",
                          ".#...",
                          "..#..",
                          "...#.",
                          "....#"});
    auto comps = extract_components(bin, 1, 1000);
    REQUIRE(comps.size() == 1);
    CHECK(comps[0].area_px == 5);
}

TEST_CASE("components: oversize blob dropped and tallied") {
    Plane<uint8_t> bin(100, 100, 1);
    ComponentDiagnostics diag;
    auto comps = extract_components(bin, 1, 500, "", &diag);
    CHECK(comps.empty());
    CHECK(diag.oversize_dropped == 1);
}

TEST_CASE("component count equals flood-fill oracle on random small images") {
    for (int trial = 0; trial < 50; ++trial) {
        int w = 16 + static_cast<int>(hash_combine(trial, 1, 0) % 48);
        int h = 16 + static_cast<int>(hash_combine(trial, 2, 0) % 48);
        Plane<uint8_t> bin(w, h);
        for (size_t i = 0; i < bin.size(); ++i)
            bin.data()[i] = hash_uniform(trial, 3, i) < 0.35 ? 1 : 0;
        auto comps = extract_components(bin, 1, w * h);
        CHECK(static_cast<int>(comps.size()) == flood_count(bin));
    }
}

TEST_CASE("ellipse fit: 1x20 horizontal bar") {
    std::vector<Pixel> px;
    for (int c = 0; c < 20; ++c) px.push_back({5, c});
    auto fit = fit_ellipse(make_component(px));
    auto oracle = brute_moments(px);
    CHECK(fit.semi_major_px == doctest::Approx(oracle.a).epsilon(1e-9));
    CHECK(fit.semi_minor_px == doctest::Approx(oracle.b).epsilon(1e-9));
    // East-west bar: compass orientation 90.
    CHECK(fit.orientation_deg == doctest::Approx(90.0).epsilon(1e-9));
    CHECK(fit.semi_major_px == doctest::Approx(11.547).epsilon(0.01));
    CHECK(fit.semi_minor_px == doctest::Approx(0.577).epsilon(0.01));
}

TEST_CASE("ellipse fit: filled disk has a ~ b ~ r") {
    for (double r : {5.0, 9.0, 15.0}) {
        std::vector<Pixel> px;
        for (int row = -20; row <= 20; ++row)
            for (int col = -20; col <= 20; ++col)
                if (row * row + col * col <= r * r) px.push_back({row + 25, col + 25});
        auto fit = fit_ellipse(make_component(px));
        CHECK(fit.semi_major_px == doctest::Approx(r).epsilon(0.05));
        CHECK(fit.semi_minor_px == doctest::Approx(r).epsilon(0.05));
    }
}

TEST_CASE("ellipse fit matches brute-force moments on random blobs") {
    for (int trial = 0; trial < 30; ++trial) {
        std::vector<Pixel> px;
        int n = 3 + static_cast<int>(hash_combine(trial, 7, 0) % 40);
        for (int i = 0; i < n; ++i)
            px.push_back({static_cast<int>(hash_combine(trial, 8, i) % 30),
                          static_cast<int>(hash_combine(trial, 9, i) % 30)});
        std::sort(px.begin(), px.end(), [](const Pixel& a, const Pixel& b) {
            return a.row != b.row ? a.row < b.row : a.col < b.col;
        });
        px.erase(std::unique(px.begin(), px.end(),
                             [](const Pixel& a, const Pixel& b) {
                                 return a.row == b.row && a.col == b.col;
                             }),
                 px.end());
        if (px.size() < 3) continue;
        auto fit = fit_ellipse(make_component(px));
        auto oracle = brute_moments(px);
        CHECK(fit.center_px.y == doctest::Approx(oracle.cr).epsilon(1e-9));
        CHECK(fit.center_px.x == doctest::Approx(oracle.cc).epsilon(1e-9));
        CHECK(fit.semi_major_px == doctest::Approx(oracle.a).epsilon(1e-9));
        CHECK(fit.semi_minor_px == doctest::Approx(oracle.b).epsilon(1e-9));
        CHECK(fit.semi_major_px >= fit.semi_minor_px);
    }
}

TEST_CASE("rotating a component by 90 degrees shifts orientation by exactly 90 mod 180") {
    std::vector<Pixel> px;
    for (int i = 0; i < 12; ++i) px.push_back({10 + i, 20 + (i % 3)});
    auto fit = fit_ellipse(make_component(px));
    std::vector<Pixel> rot;
    for (auto& p : px) rot.push_back({p.col, 60 - p.row});  // 90-degree rotation
    auto fit_r = fit_ellipse(make_component(rot));
    double expected = std::fmod(fit.orientation_deg + 90.0, 180.0);
    CHECK(fit_r.orientation_deg == doctest::Approx(expected).epsilon(1e-9));
}

TEST_CASE("translation equivariance of the fit") {
    std::vector<Pixel> px{{3, 4}, {4, 5}, {5, 6}, {5, 7}, {6, 8}};
    auto fit = fit_ellipse(make_component(px));
    std::vector<Pixel> moved;
    for (auto& p : px) moved.push_back({p.row + 11, p.col + 7});
    auto fit_m = fit_ellipse(make_component(moved));
    CHECK(fit_m.center_px.y == doctest::Approx(fit.center_px.y + 11).epsilon(1e-12));
    CHECK(fit_m.center_px.x == doctest::Approx(fit.center_px.x + 7).epsilon(1e-12));
    CHECK(fit_m.semi_major_px == doctest::Approx(fit.semi_major_px).epsilon(1e-12));
    CHECK(fit_m.semi_minor_px == doctest::Approx(fit.semi_minor_px).epsilon(1e-12));
    CHECK(fit_m.orientation_deg == doctest::Approx(fit.orientation_deg).epsilon(1e-9));
}

TEST_CASE("degenerate collinear component has b = 0 pre-pixel-term; area < 3 rejected") {
    CHECK_THROWS_AS(fit_ellipse(make_component({{0, 0}, {0, 1}})), DataError);
}

TEST_CASE("static box arithmetic and clipping") {
    Component c = make_component({{50, 50}, {50, 51}, {51, 50}, {51, 51}});
    c.centroid_px = {50, 50};
    auto s05 = sensor_preset("skysat");
    Polygon box = static_box(c, s05, 200, 200);
    CHECK(polygon_area(box) == doctest::Approx(36.0).epsilon(1e-9));  // side 6 px

    auto s3 = sensor_preset("superdove");
    Polygon box3 = static_box(c, s3, 200, 200);
    CHECK(polygon_area(box3) == doctest::Approx(1.0).epsilon(1e-9));  // side 1 px

    Component corner = make_component({{0, 0}, {0, 1}, {1, 0}});
    corner.centroid_px = {0, 0};
    Polygon clipped = static_box(corner, s05, 200, 200);
    for (auto& p : clipped) {
        CHECK(p.x >= 0.0);
        CHECK(p.y >= 0.0);
    }
    CHECK(polygon_area(clipped) == doctest::Approx(9.0).epsilon(1e-9));  // quarter of 36
}
