#include "vvec/eval.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

namespace vvec::eval {

namespace {

void finish_score(ClassScore& s) {
    s.precision = s.n_pred > 0 ? static_cast<double>(s.n_matched) / s.n_pred : 0.0;
    s.recall = s.n_gt > 0 ? static_cast<double>(s.n_matched) / s.n_gt : 0.0;
    double pr = s.precision + s.recall;
    s.f1 = pr > 0 ? 2.0 * s.precision * s.recall / pr : 0.0;
    s.count_frac_defined = s.n_gt > 0;
    s.count_frac = s.count_frac_defined ? static_cast<double>(s.n_pred) / s.n_gt : 0.0;
}

}  // namespace

Matching match_detections(const std::vector<vectorize::Detection>& pred,
                          const synth::GroundTruthSet& gt, const MatchConfig& cfg) {
    if (cfg.iou_thresh <= 0.0 || cfg.iou_thresh > 1.0)
        throw ConfigError("iou threshold must be in (0, 1]");

    Matching m;
    for (const auto& p : pred) ++m.n_pred[p.cls];
    for (const auto& g : gt.records) ++m.n_gt[g.cls];

    struct Candidate {
        double iou;
        int pred_idx;
        int gt_idx;
    };
    std::vector<Candidate> cands;
    for (size_t pi = 0; pi < pred.size(); ++pi) {
        for (size_t gi = 0; gi < gt.records.size(); ++gi) {
            if (pred[pi].cls != gt.records[gi].cls) continue;  // never match across classes
            double iou = polygon_iou(pred[pi].footprint, gt.records[gi].footprint);
            if (iou >= cfg.iou_thresh)
                cands.push_back({iou, static_cast<int>(pi), static_cast<int>(gi)});
        }
    }
    std::sort(cands.begin(), cands.end(), [](const Candidate& a, const Candidate& b) {
        if (a.iou != b.iou) return a.iou > b.iou;
        if (a.pred_idx != b.pred_idx) return a.pred_idx < b.pred_idx;
        return a.gt_idx < b.gt_idx;
    });

    std::set<int> used_pred, used_gt;
    for (const auto& c : cands) {
        if (used_pred.count(c.pred_idx) || used_gt.count(c.gt_idx)) continue;
        used_pred.insert(c.pred_idx);
        used_gt.insert(c.gt_idx);
        m.pairs.push_back({c.pred_idx, c.gt_idx, c.iou, pred[c.pred_idx].cls});
        ++m.n_matched[pred[c.pred_idx].cls];
    }
    return m;
}

std::map<std::string, ClassScore> count_fraction(const std::vector<vectorize::Detection>& pred,
                                                 const synth::GroundTruthSet& gt) {
    std::map<std::string, ClassScore> out;
    for (const auto& p : pred) ++out[p.cls].n_pred;
    for (const auto& g : gt.records) ++out[g.cls].n_gt;
    for (auto& [cls, s] : out) finish_score(s);
    return out;
}

EvalReport score(const std::vector<vectorize::Detection>& pred, const synth::GroundTruthSet& gt,
                 const MatchConfig& cfg) {
    Matching m = match_detections(pred, gt, cfg);

    EvalReport rep;
    rep.pairs = m.pairs;
    std::set<std::string> classes;
    for (const auto& [cls, n] : m.n_pred) classes.insert(cls);
    for (const auto& [cls, n] : m.n_gt) classes.insert(cls);
    for (const auto& cls : classes) {
        ClassScore s;
        s.n_pred = m.n_pred.count(cls) ? m.n_pred.at(cls) : 0;
        s.n_gt = m.n_gt.count(cls) ? m.n_gt.at(cls) : 0;
        s.n_matched = m.n_matched.count(cls) ? m.n_matched.at(cls) : 0;
        finish_score(s);
        rep.per_class[cls] = s;
    }

    // Unweighted class mean, as in the paper-style summary row.
    int n = static_cast<int>(rep.per_class.size());
    if (n > 0) {
        int n_cf = 0;
        for (const auto& [cls, s] : rep.per_class) {
            rep.mean.precision += s.precision / n;
            rep.mean.recall += s.recall / n;
            rep.mean.f1 += s.f1 / n;
            rep.mean.n_pred += s.n_pred;
            rep.mean.n_gt += s.n_gt;
            rep.mean.n_matched += s.n_matched;
            if (s.count_frac_defined) {
                rep.mean.count_frac += s.count_frac;
                ++n_cf;
            }
        }
        if (n_cf > 0) {
            rep.mean.count_frac /= n_cf;
            rep.mean.count_frac_defined = true;
        }
    }
    return rep;
}

EvalReport merge_reports(const std::vector<EvalReport>& reports) {
    std::map<std::string, ClassScore> sums;
    for (const auto& rep : reports) {
        for (const auto& [cls, s] : rep.per_class) {
            ClassScore& acc = sums[cls];
            acc.n_pred += s.n_pred;
            acc.n_gt += s.n_gt;
            acc.n_matched += s.n_matched;
        }
    }
    EvalReport out;
    for (auto& [cls, s] : sums) {
        finish_score(s);
        out.per_class[cls] = s;
    }
    int n = static_cast<int>(out.per_class.size());
    if (n > 0) {
        int n_cf = 0;
        for (const auto& [cls, s] : out.per_class) {
            out.mean.precision += s.precision / n;
            out.mean.recall += s.recall / n;
            out.mean.f1 += s.f1 / n;
            out.mean.n_pred += s.n_pred;
            out.mean.n_gt += s.n_gt;
            out.mean.n_matched += s.n_matched;
            if (s.count_frac_defined) {
                out.mean.count_frac += s.count_frac;
                ++n_cf;
            }
        }
        if (n_cf > 0) {
            out.mean.count_frac /= n_cf;
            out.mean.count_frac_defined = true;
        }
    }
    return out;
}

std::string format_report(const EvalReport& report) {
    std::ostringstream os;
    os << "Class            F1     count_frac  N_pred  N_gt\n";
    auto row = [&](const std::string& name, const ClassScore& s) {
        char buf[128];
        if (s.count_frac_defined)
            std::snprintf(buf, sizeof(buf), "%-15s %6.3f %10.3f %7d %5d\n", name.c_str(), s.f1,
                          s.count_frac, s.n_pred, s.n_gt);
        else
            std::snprintf(buf, sizeof(buf), "%-15s %6.3f %10s %7d %5d\n", name.c_str(), s.f1,
                          "undef", s.n_pred, s.n_gt);
        os << buf;
    };
    for (const auto& [cls, s] : report.per_class) row(cls, s);
    row("Mean", report.mean);
    return os.str();
}

}  // namespace vvec::eval
