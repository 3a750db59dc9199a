#pragma once

#include <cstddef>
#include <optional>
#include <ostream>
#include <span>
#include <utility>
#include <vector>

#include "simplexseg/types.hpp"

namespace simplexseg {

struct RocPoint {
  double fpr = 0.0;
  double tpr = 0.0;
};

/// ROC curve from (0,0) to (1,1), non-decreasing in both coordinates, with
/// its trapezoidal AUC.
struct RocCurve {
  std::vector<RocPoint> points;
  double auc = 0.0;
};

/// Uncertainty scores split by ground truth: positives are pixels that should
/// be flagged uncertain (OOD), negatives are in-distribution pixels.
struct BinaryScoredSet {
  std::vector<double> positive_scores;
  std::vector<double> negative_scores;
};

/// Sweeps thresholds over the union of distinct scores (rule: score >=
/// threshold predicts positive), grouping tied scores at one threshold so
/// ties contribute diagonal segments. The trapezoidal AUC then equals the
/// Mann-Whitney statistic (#(pos>neg) + 0.5*#(pos==neg)) / (|pos|*|neg|).
/// Throws std::invalid_argument when either list is empty or holds a
/// non-finite value.
RocCurve roc_curve(const BinaryScoredSet& set);

/// One uncertainty map with the label map of the OOD corpus it was measured
/// on; labels use the corpus's own class vocabulary.
struct ScoredSegmentMap {
  const UncertaintyMap* uncertainty = nullptr;
  const LabelMap* labels = nullptr;
};

/// Per-segment-class AUC: for each class c present in the OOD corpus, the AUC
/// of its pixels' uncertainties against the shared in-distribution negatives.
/// Classes with zero pixels are omitted; the result is ranked descending by
/// AUC (ties by ascending class index).
std::vector<std::pair<int, double>> per_segment_auc(
    std::span<const ScoredSegmentMap> ood_corpus,
    const std::vector<double>& negative_scores);

struct SummaryStats {
  double mean = 0.0;
  double min = 0.0;
  double max = 0.0;
  std::size_t count = 0;
};

/// Mean/min/max uncertainty overall, per class, and over OOD-marked pixels.
struct Summary {
  SummaryStats overall;
  std::vector<std::pair<int, SummaryStats>> per_class;  // ascending class index
  std::optional<SummaryStats> ood;
};

Summary summarize(const UncertaintyMap& u, const LabelMap& labels);

/// CSV export: "fpr,tpr" rows plus a trailing "# auc=<value>" comment line.
void write_roc_csv(const RocCurve& curve, std::ostream& out);

/// CSV export: one "group,mean,min,max,count" row per summary group.
void write_summary_csv(const Summary& summary, std::ostream& out);

}  // namespace simplexseg
