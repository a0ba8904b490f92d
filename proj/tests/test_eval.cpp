#include <doctest.h>

#include <algorithm>
#include <functional>
#include <vector>

#include "vvec/eval.hpp"
#include "vvec/rng.hpp"

using namespace vvec;
using namespace vvec::eval;
using vectorize::Detection;

namespace {

Detection det(int id, const std::string& cls, Polygon poly) {
    Detection d;
    d.id = id;
    d.cls = cls;
    d.footprint = std::move(poly);
    return d;
}

synth::TruthRecord gt_rec(int id, const std::string& cls, Polygon poly) {
    synth::TruthRecord r;
    r.id = id;
    r.cls = cls;
    r.footprint = std::move(poly);
    return r;
}

// Brute-force oracle: maximum one-to-one match count over all assignments
// (predictions <= 6, truths <= 6).
int brute_max_matches(const std::vector<std::vector<bool>>& feasible) {
    int np = static_cast<int>(feasible.size());
    if (np == 0) return 0;
    int ng = static_cast<int>(feasible[0].size());
    int best = 0;
    std::vector<int> gt_used(ng, 0);
    std::function<void(int, int)> rec = [&](int pi, int count) {
        best = std::max(best, count);
        if (pi == np) return;
        rec(pi + 1, count);  // leave this prediction unmatched
        for (int gi = 0; gi < ng; ++gi) {
            if (feasible[pi][gi] && !gt_used[gi]) {
                gt_used[gi] = 1;
                rec(pi + 1, count + 1);
                gt_used[gi] = 0;
            }
        }
    };
    rec(0, 0);
    return best;
}

}  // namespace

TEST_CASE("pred equal to gt gives perfect scores") {
    std::vector<Detection> pred;
    synth::GroundTruthSet gt;
    for (int i = 0; i < 4; ++i) {
        Polygon sq = axis_square({i * 10.0, 5.0}, 3.0);
        pred.push_back(det(i, "moving_car", sq));
        gt.records.push_back(gt_rec(i, "moving_car", sq));
    }
    auto rep = score(pred, gt, MatchConfig{});
    CHECK(rep.per_class["moving_car"].precision == 1.0);
    CHECK(rep.per_class["moving_car"].recall == 1.0);
    CHECK(rep.per_class["moving_car"].f1 == 1.0);
    CHECK(rep.per_class["moving_car"].count_frac == 1.0);
}

TEST_CASE("one pred overlapping two gt matches the higher-IOU one") {
    std::vector<Detection> pred{det(0, "c", axis_square({5, 5}, 4.0))};
    synth::GroundTruthSet gt;
    gt.records.push_back(gt_rec(0, "c", axis_square({5.5, 5}, 4.0)));  // high overlap
    gt.records.push_back(gt_rec(1, "c", axis_square({8, 5}, 4.0)));    // low overlap
    auto m = match_detections(pred, gt, MatchConfig{});
    REQUIRE(m.pairs.size() == 1);
    CHECK(m.pairs[0].gt_idx == 0);
    auto rep = score(pred, gt, MatchConfig{});
    CHECK(rep.per_class["c"].recall == doctest::Approx(0.5));
}

TEST_CASE("greedy never matches across classes") {
    std::vector<Detection> pred{det(0, "moving_car", axis_square({5, 5}, 4.0))};
    synth::GroundTruthSet gt;
    gt.records.push_back(gt_rec(0, "moving_truck", axis_square({5, 5}, 4.0)));
    auto m = match_detections(pred, gt, MatchConfig{});
    CHECK(m.pairs.empty());
}

TEST_CASE("greedy equals brute-force optimal count on random small instances") {
    int diverged = 0;
    for (int trial = 0; trial < 500; ++trial) {
        int np = 1 + static_cast<int>(hash_combine(trial, 1, 0) % 6);
        int ng = 1 + static_cast<int>(hash_combine(trial, 2, 0) % 6);
        std::vector<Detection> pred;
        synth::GroundTruthSet gt;
        for (int i = 0; i < np; ++i)
            pred.push_back(det(i, "c",
                               axis_square({hash_uniform(trial, 3, i) * 20.0,
                                            hash_uniform(trial, 4, i) * 20.0},
                                           2.0 + hash_uniform(trial, 5, i) * 3.0)));
        for (int i = 0; i < ng; ++i)
            gt.records.push_back(gt_rec(i, "c",
                                        axis_square({hash_uniform(trial, 6, i) * 20.0,
                                                     hash_uniform(trial, 7, i) * 20.0},
                                                    2.0 + hash_uniform(trial, 8, i) * 3.0)));
        MatchConfig cfg;
        auto m = match_detections(pred, gt, cfg);

        std::vector<std::vector<bool>> feasible(np, std::vector<bool>(ng, false));
        for (int pi = 0; pi < np; ++pi)
            for (int gi = 0; gi < ng; ++gi)
                feasible[pi][gi] =
                    polygon_iou(pred[pi].footprint, gt.records[gi].footprint) >= cfg.iou_thresh;
        if (static_cast<int>(m.pairs.size()) != brute_max_matches(feasible)) ++diverged;
    }
    CHECK(diverged == 0);
}

TEST_CASE("count fraction arithmetic") {
    std::vector<Detection> pred;
    synth::GroundTruthSet gt;
    for (int i = 0; i < 465; ++i) pred.push_back(det(i, "c", axis_square({0, 0}, 1)));
    for (int i = 0; i < 449; ++i) gt.records.push_back(gt_rec(i, "c", axis_square({0, 0}, 1)));
    auto cf = count_fraction(pred, gt);
    CHECK(cf["c"].count_frac == doctest::Approx(465.0 / 449.0).epsilon(1e-12));
    CHECK(cf["c"].count_frac == doctest::Approx(1.0356).epsilon(1e-3));
}

TEST_CASE("count fraction: empty gt flagged undefined, no fault") {
    std::vector<Detection> pred{det(0, "c", axis_square({0, 0}, 1)), det(1, "c", axis_square({0, 0}, 1)),
                                det(2, "c", axis_square({0, 0}, 1))};
    synth::GroundTruthSet gt;
    auto cf = count_fraction(pred, gt);
    CHECK_FALSE(cf["c"].count_frac_defined);
}

TEST_CASE("count fraction ignores geometry entirely") {
    std::vector<Detection> pred{det(0, "c", axis_square({0, 0}, 1))};
    synth::GroundTruthSet gt;
    gt.records.push_back(gt_rec(0, "c", axis_square({100, 100}, 1)));
    auto cf = count_fraction(pred, gt);
    CHECK(cf["c"].count_frac == 1.0);
}

TEST_CASE("F1 symmetry: swapping pred and gt swaps precision/recall, F1 unchanged") {
    std::vector<Detection> pred;
    synth::GroundTruthSet gt;
    for (int i = 0; i < 5; ++i) pred.push_back(det(i, "c", axis_square({i * 5.0, 0}, 3.0)));
    for (int i = 0; i < 3; ++i) gt.records.push_back(gt_rec(i, "c", axis_square({i * 5.0, 0.5}, 3.0)));

    auto rep_fwd = score(pred, gt, MatchConfig{});

    std::vector<Detection> pred2;
    synth::GroundTruthSet gt2;
    for (const auto& r : gt.records) pred2.push_back(det(r.id, r.cls, r.footprint));
    for (const auto& d : pred) gt2.records.push_back(gt_rec(d.id, d.cls, d.footprint));
    auto rep_rev = score(pred2, gt2, MatchConfig{});

    CHECK(rep_fwd.per_class["c"].precision == doctest::Approx(rep_rev.per_class["c"].recall));
    CHECK(rep_fwd.per_class["c"].recall == doctest::Approx(rep_rev.per_class["c"].precision));
    CHECK(rep_fwd.per_class["c"].f1 == doctest::Approx(rep_rev.per_class["c"].f1));
}

TEST_CASE("lowering the IOU threshold never decreases match count") {
    std::vector<Detection> pred;
    synth::GroundTruthSet gt;
    for (int i = 0; i < 8; ++i) {
        pred.push_back(det(i, "c", axis_square({hash_uniform(9, 1, i) * 15, hash_uniform(9, 2, i) * 15}, 3.0)));
        gt.records.push_back(
            gt_rec(i, "c", axis_square({hash_uniform(9, 3, i) * 15, hash_uniform(9, 4, i) * 15}, 3.0)));
    }
    size_t prev = 0;
    for (double t : {0.9, 0.5, 0.25, 0.1, 0.01}) {
        auto m = match_detections(pred, gt, MatchConfig{t});
        CHECK(m.pairs.size() >= prev);
        prev = m.pairs.size();
    }
}
