#pragma once

#include <cstddef>

#include "simplexseg/prototypes.hpp"
#include "simplexseg/types.hpp"

namespace simplexseg {

/// Learnable affine map from feature space R^D to a target space R^K; a 1x1
/// convolution applied per pixel. K is N-1 for the simplex head and N for the
/// baseline classifier head.
struct ProjectionHead {
  int in_dim = 0;               // D
  int out_dim = 0;              // K
  std::vector<double> weight;   // D x K, row-major
  std::vector<double> bias;     // K

  ProjectionHead() = default;
  ProjectionHead(int d, int k)
      : in_dim(d), out_dim(k),
        weight(static_cast<std::size_t>(d) * k, 0.0), bias(k, 0.0) {}

  std::size_t parameter_count() const {
    return static_cast<std::size_t>(in_dim) * out_dim + out_dim;
  }
};

/// Applies the head at every pixel: out = weight^T * feature + bias.
/// Throws std::invalid_argument when features.depth != head.in_dim.
FeatureMap project(const ProjectionHead& head, const FeatureMap& features);

/// Prototype scores: scores[y][x][c] = dot(projected[y][x], column c).
/// A fixed matrix multiply with no learnable parameters.
/// Throws std::invalid_argument when projected.depth != p.dim().
ScoreMap score(const FeatureMap& projected, const PrototypeMatrix& p);

/// Reinterprets an H x W x N grid (baseline logits) as a ScoreMap so the
/// same uncertainty mapping and argmax apply to both heads.
ScoreMap scores_from_grid(const FeatureMap& logits);

/// The fixed mapping m: per pixel, u = 1 - max_c softmax(scores)_c, computed
/// with max subtraction. Values lie in [0, 1 - 1/N]; the upper bound is
/// attained exactly on all-equal score vectors.
UncertaintyMap uncertainty(const ScoreMap& scores);

/// Per-pixel argmax over class scores; ties resolve to the lowest index.
LabelMap classify(const ScoreMap& scores);

}  // namespace simplexseg
