#pragma once

#include <map>
#include <string>
#include <vector>

#include "vvec/geometry.hpp"
#include "vvec/synth.hpp"
#include "vvec/vectorize.hpp"

namespace vvec::eval {

struct MatchConfig {
    double iou_thresh = 0.25;
};

struct MatchedPair {
    int pred_idx = 0;
    int gt_idx = 0;
    double iou = 0.0;
    std::string cls;
};

struct Matching {
    std::vector<MatchedPair> pairs;
    std::map<std::string, int> n_pred;
    std::map<std::string, int> n_gt;
    std::map<std::string, int> n_matched;
};

struct ClassScore {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    int n_pred = 0;
    int n_gt = 0;
    int n_matched = 0;
    double count_frac = 0.0;
    bool count_frac_defined = false;
};

struct EvalReport {
    std::map<std::string, ClassScore> per_class;
    ClassScore mean;  // unweighted class mean of P/R/F1/count_frac
    std::vector<MatchedPair> pairs;
};

// Greedy one-to-one matching within each class: candidate pairs with
// IOU >= thresh taken in descending IOU, ties broken by (pred id, gt id).
Matching match_detections(const std::vector<vectorize::Detection>& pred,
                          const synth::GroundTruthSet& gt, const MatchConfig& cfg);

// Eq. count_frac = N_pred / N_gt, per class and total; independent of geometry.
// N_gt = 0 leaves the ratio flagged undefined.
std::map<std::string, ClassScore> count_fraction(const std::vector<vectorize::Detection>& pred,
                                                 const synth::GroundTruthSet& gt);

EvalReport score(const std::vector<vectorize::Detection>& pred, const synth::GroundTruthSet& gt,
                 const MatchConfig& cfg);

// Merge per-scene reports by summing counts, then recompute ratios.
EvalReport merge_reports(const std::vector<EvalReport>& reports);

// Aligned-text table mirroring the Class / F1 / count_frac layout.
std::string format_report(const EvalReport& report);

}  // namespace vvec::eval
