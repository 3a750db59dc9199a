#include "simplexseg/projection.hpp"

#include <cmath>
#include <stdexcept>

namespace simplexseg {

FeatureMap project(const ProjectionHead& head, const FeatureMap& features) {
  if (features.depth != head.in_dim) {
    throw std::invalid_argument(
        "project: feature depth " + std::to_string(features.depth) +
        " does not match head in_dim " + std::to_string(head.in_dim));
  }
  const int d = head.in_dim;
  const int k = head.out_dim;
  FeatureMap out(features.height, features.width, k);
  const std::size_t pixels = features.pixel_count();
  for (std::size_t i = 0; i < pixels; ++i) {
    const double* f = features.values.data() + i * d;
    double* z = out.values.data() + i * k;
    for (int c = 0; c < k; ++c) z[c] = head.bias[c];
    for (int r = 0; r < d; ++r) {
      const double fr = f[r];
      const double* w = head.weight.data() + static_cast<std::size_t>(r) * k;
      for (int c = 0; c < k; ++c) z[c] += w[c] * fr;
    }
  }
  return out;
}

ScoreMap score(const FeatureMap& projected, const PrototypeMatrix& p) {
  if (projected.depth != p.dim()) {
    throw std::invalid_argument(
        "score: projection dimension " + std::to_string(projected.depth) +
        " does not match prototype dimension " + std::to_string(p.dim()));
  }
  const int dim = p.dim();
  const int n = p.num_classes;
  ScoreMap out(projected.height, projected.width, n);
  const std::size_t pixels = projected.pixel_count();
  for (std::size_t i = 0; i < pixels; ++i) {
    const double* z = projected.values.data() + i * dim;
    double* s = out.scores.data() + i * n;
    for (int c = 0; c < n; ++c) {
      const double* col = p.column(c);
      double dot = 0.0;
      for (int r = 0; r < dim; ++r) dot += z[r] * col[r];
      s[c] = dot;
    }
  }
  return out;
}

ScoreMap scores_from_grid(const FeatureMap& logits) {
  ScoreMap out;
  out.height = logits.height;
  out.width = logits.width;
  out.num_classes = logits.depth;
  out.scores = logits.values;
  return out;
}

UncertaintyMap uncertainty(const ScoreMap& scores) {
  const int n = scores.num_classes;
  UncertaintyMap out(scores.height, scores.width);
  const std::size_t pixels = out.values.size();
  for (std::size_t i = 0; i < pixels; ++i) {
    const double* s = scores.scores.data() + i * n;
    double max = s[0];
    for (int c = 1; c < n; ++c) max = std::max(max, s[c]);
    // max softmax probability = 1 / sum exp(s_c - max); u = 1 - that.
    double sum = 0.0;
    for (int c = 0; c < n; ++c) sum += std::exp(s[c] - max);
    out.values[i] = 1.0 - 1.0 / sum;
  }
  return out;
}

LabelMap classify(const ScoreMap& scores) {
  const int n = scores.num_classes;
  LabelMap out(scores.height, scores.width);
  const std::size_t pixels = out.labels.size();
  for (std::size_t i = 0; i < pixels; ++i) {
    const double* s = scores.scores.data() + i * n;
    int best = 0;
    for (int c = 1; c < n; ++c) {
      if (s[c] > s[best]) best = c;  // strict: ties keep the lowest index
    }
    out.labels[i] = best;
  }
  return out;
}

}  // namespace simplexseg
