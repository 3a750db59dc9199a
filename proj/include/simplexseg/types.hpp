#pragma once

#include <cstddef>
#include <vector>

namespace simplexseg {

/// Label value marking out-of-distribution / ignored pixels in a LabelMap.
inline constexpr int kOodLabel = -1;

/// H x W grid of per-pixel feature vectors, row-major with channels innermost.
/// Also used for projected grids (depth = N-1) and baseline logit grids (depth = N).
struct FeatureMap {
  int height = 0;
  int width = 0;
  int depth = 0;
  std::vector<double> values;

  FeatureMap() = default;
  FeatureMap(int h, int w, int d)
      : height(h), width(w), depth(d),
        values(static_cast<std::size_t>(h) * w * d, 0.0) {}

  std::size_t pixel_count() const {
    return static_cast<std::size_t>(height) * width;
  }
  double* pixel(int y, int x) {
    return values.data() + (static_cast<std::size_t>(y) * width + x) * depth;
  }
  const double* pixel(int y, int x) const {
    return values.data() + (static_cast<std::size_t>(y) * width + x) * depth;
  }
};

/// H x W per-pixel class labels; kOodLabel marks OOD/ignored pixels.
struct LabelMap {
  int height = 0;
  int width = 0;
  std::vector<int> labels;

  LabelMap() = default;
  LabelMap(int h, int w)
      : height(h), width(w), labels(static_cast<std::size_t>(h) * w, 0) {}

  int at(int y, int x) const {
    return labels[static_cast<std::size_t>(y) * width + x];
  }
  int& at(int y, int x) {
    return labels[static_cast<std::size_t>(y) * width + x];
  }
};

/// H x W x N prototype scores (dot products of projections with each
/// prototype column, or raw logits for the baseline head).
struct ScoreMap {
  int height = 0;
  int width = 0;
  int num_classes = 0;
  std::vector<double> scores;

  ScoreMap() = default;
  ScoreMap(int h, int w, int n)
      : height(h), width(w), num_classes(n),
        scores(static_cast<std::size_t>(h) * w * n, 0.0) {}

  double* pixel(int y, int x) {
    return scores.data() +
           (static_cast<std::size_t>(y) * width + x) * num_classes;
  }
  const double* pixel(int y, int x) const {
    return scores.data() +
           (static_cast<std::size_t>(y) * width + x) * num_classes;
  }
};

/// H x W per-pixel uncertainties, each in [0, 1 - 1/N].
struct UncertaintyMap {
  int height = 0;
  int width = 0;
  std::vector<double> values;

  UncertaintyMap() = default;
  UncertaintyMap(int h, int w)
      : height(h), width(w), values(static_cast<std::size_t>(h) * w, 0.0) {}

  double at(int y, int x) const {
    return values[static_cast<std::size_t>(y) * width + x];
  }
};

/// A feature map with its pixel labels; the unit the generator emits and the
/// trainer consumes.
struct LabeledScene {
  FeatureMap features;
  LabelMap labels;
};

}  // namespace simplexseg
