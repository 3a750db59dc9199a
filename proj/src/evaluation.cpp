#include "simplexseg/evaluation.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>
#include <string>

namespace simplexseg {
namespace {

void check_scores(const std::vector<double>& scores, const char* which) {
  if (scores.empty()) {
    throw std::invalid_argument(std::string("roc_curve: ") + which +
                                " score list is empty");
  }
  for (double s : scores) {
    if (!std::isfinite(s)) {
      throw std::invalid_argument(std::string("roc_curve: ") + which +
                                  " score list holds a non-finite value");
    }
  }
}

/// Shortest round-trip decimal representation; deterministic across runs.
std::string format_double(double value) {
  char buf[32];
  const auto result = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, result.ptr);
}

SummaryStats stats_of(const std::vector<double>& values) {
  SummaryStats s;
  s.count = values.size();
  if (values.empty()) return s;
  s.min = std::numeric_limits<double>::infinity();
  s.max = -std::numeric_limits<double>::infinity();
  double sum = 0.0;
  for (double v : values) {
    sum += v;
    s.min = std::min(s.min, v);
    s.max = std::max(s.max, v);
  }
  s.mean = sum / static_cast<double>(values.size());
  return s;
}

void append_stats_row(std::ostream& out, const std::string& group,
                      const SummaryStats& s) {
  out << group << ',' << format_double(s.mean) << ',' << format_double(s.min)
      << ',' << format_double(s.max) << ',' << s.count << '\n';
}

}  // namespace

RocCurve roc_curve(const BinaryScoredSet& set) {
  check_scores(set.positive_scores, "positive");
  check_scores(set.negative_scores, "negative");

  std::vector<double> pos(set.positive_scores);
  std::vector<double> neg(set.negative_scores);
  std::sort(pos.begin(), pos.end(), std::greater<>());
  std::sort(neg.begin(), neg.end(), std::greater<>());

  const double np = static_cast<double>(pos.size());
  const double nn = static_cast<double>(neg.size());

  RocCurve curve;
  curve.points.push_back({0.0, 0.0});  // threshold above every score

  // Descending sweep over the union of distinct scores; all samples tied at
  // a threshold enter together, which makes tied pos/neg groups trace a
  // diagonal segment (0.5 credit per tied pair under the trapezoid rule).
  std::size_t ip = 0;
  std::size_t in = 0;
  while (ip < pos.size() || in < neg.size()) {
    double threshold;
    if (ip < pos.size() && in < neg.size()) {
      threshold = std::max(pos[ip], neg[in]);
    } else if (ip < pos.size()) {
      threshold = pos[ip];
    } else {
      threshold = neg[in];
    }
    while (ip < pos.size() && pos[ip] == threshold) ++ip;
    while (in < neg.size() && neg[in] == threshold) ++in;
    curve.points.push_back({static_cast<double>(in) / nn,
                            static_cast<double>(ip) / np});
  }

  double auc = 0.0;
  for (std::size_t i = 1; i < curve.points.size(); ++i) {
    const auto& a = curve.points[i - 1];
    const auto& b = curve.points[i];
    auc += (b.fpr - a.fpr) * (a.tpr + b.tpr) * 0.5;
  }
  curve.auc = auc;
  return curve;
}

std::vector<std::pair<int, double>> per_segment_auc(
    std::span<const ScoredSegmentMap> ood_corpus,
    const std::vector<double>& negative_scores) {
  if (negative_scores.empty()) {
    throw std::invalid_argument("per_segment_auc: negative scores are empty");
  }

  std::map<int, std::vector<double>> per_class;
  for (const auto& item : ood_corpus) {
    const auto& u = *item.uncertainty;
    const auto& labels = *item.labels;
    if (u.height != labels.height || u.width != labels.width) {
      throw std::invalid_argument(
          "per_segment_auc: uncertainty and label map shapes disagree");
    }
    for (std::size_t i = 0; i < u.values.size(); ++i) {
      const int label = labels.labels[i];
      if (label == kOodLabel) continue;  // untagged filler in the OOD corpus
      per_class[label].push_back(u.values[i]);
    }
  }

  std::vector<std::pair<int, double>> result;
  result.reserve(per_class.size());
  for (const auto& [label, scores] : per_class) {
    BinaryScoredSet set;
    set.positive_scores = scores;
    set.negative_scores = negative_scores;
    result.emplace_back(label, roc_curve(set).auc);
  }
  std::stable_sort(result.begin(), result.end(),
                   [](const auto& a, const auto& b) {
                     if (a.second != b.second) return a.second > b.second;
                     return a.first < b.first;
                   });
  return result;
}

Summary summarize(const UncertaintyMap& u, const LabelMap& labels) {
  if (u.height != labels.height || u.width != labels.width) {
    throw std::invalid_argument(
        "summarize: uncertainty and label map shapes disagree");
  }

  std::vector<double> all;
  all.reserve(u.values.size());
  std::map<int, std::vector<double>> per_class;
  std::vector<double> ood;
  for (std::size_t i = 0; i < u.values.size(); ++i) {
    const double v = u.values[i];
    all.push_back(v);
    const int label = labels.labels[i];
    if (label == kOodLabel) {
      ood.push_back(v);
    } else {
      per_class[label].push_back(v);
    }
  }

  Summary summary;
  summary.overall = stats_of(all);
  for (const auto& [label, values] : per_class) {
    summary.per_class.emplace_back(label, stats_of(values));
  }
  if (!ood.empty()) summary.ood = stats_of(ood);
  return summary;
}

void write_roc_csv(const RocCurve& curve, std::ostream& out) {
  out << "fpr,tpr\n";
  for (const auto& point : curve.points) {
    out << format_double(point.fpr) << ',' << format_double(point.tpr) << '\n';
  }
  out << "# auc=" << format_double(curve.auc) << '\n';
}

void write_summary_csv(const Summary& summary, std::ostream& out) {
  out << "group,mean,min,max,count\n";
  append_stats_row(out, "overall", summary.overall);
  for (const auto& [label, stats] : summary.per_class) {
    append_stats_row(out, "class_" + std::to_string(label), stats);
  }
  if (summary.ood.has_value()) {
    append_stats_row(out, "ood", *summary.ood);
  }
}

}  // namespace simplexseg
