#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "simplexseg/projection.hpp"
#include "simplexseg/prototypes.hpp"
#include "simplexseg/types.hpp"

namespace simplexseg {

/// Hyper-parameters for the mini-batch SGD head trainers.
struct TrainConfig {
  double learning_rate = 1e-2;
  int epochs = 50;
  int batch_pixels = 4096;
  std::uint64_t seed = 0;
  /// Uniform init half-width; values <= 0 select the default sqrt(1/D).
  double init_scale = 0.0;
};

struct TrainReport {
  std::vector<double> loss_per_epoch;       // one entry per epoch
  double final_train_accuracy = 0.0;        // argmax-score accuracy, train pixels
};

struct HeadGradient {
  std::vector<double> weight;  // same layout as ProjectionHead::weight
  std::vector<double> bias;
};

/// Mean of -cos(z_i, P_{y_i}) over labelled pixels, z_i the pixel's
/// projection. OOD-marked pixels are skipped; pixels with ||z|| < 1e-12
/// contribute zero. Always in [-1, 1].
/// Throws std::invalid_argument when no counted pixel exists, on dimension
/// mismatch, or on a label outside 0..N-1.
double cosine_loss(const ProjectionHead& head, const PrototypeMatrix& p,
                   const FeatureMap& features, const LabelMap& labels);

/// Analytic gradient of cosine_loss w.r.t. weight and bias. Per pixel with
/// z = W^T f + b and unit prototype q:
///   d(-cos)/dz = -(q/||z|| - (z.q) z/||z||^3),
/// pushed through the affine map and averaged over counted pixels. Near-zero
/// ||z|| pixels contribute zero, matching the loss guard.
HeadGradient cosine_loss_gradient(const ProjectionHead& head,
                                  const PrototypeMatrix& p,
                                  const FeatureMap& features,
                                  const LabelMap& labels);

/// Mean softmax cross-entropy of the baseline head's logits against labels;
/// same pixel-counting rules as cosine_loss.
double cross_entropy_loss(const ProjectionHead& head,
                          const FeatureMap& features, const LabelMap& labels);

/// Analytic cross-entropy gradient: per pixel d/dlogits = softmax - onehot,
/// averaged over counted pixels.
HeadGradient cross_entropy_gradient(const ProjectionHead& head,
                                    const FeatureMap& features,
                                    const LabelMap& labels);

/// Trains the simplex projection head (D -> N-1) on the corpus with plain
/// SGD: init uniform in +-init_scale from the seed, pixel order reshuffled
/// every epoch from the same stream, batches of cfg.batch_pixels. Fully
/// deterministic: identical (corpus, cfg) give bit-identical results.
/// Throws std::invalid_argument for an empty corpus, inconsistent depths,
/// invalid labels, or a corpus with no labelled pixel.
std::pair<ProjectionHead, TrainReport> train_prototype_head(
    std::span<const LabeledScene> corpus, const PrototypeMatrix& p,
    const TrainConfig& cfg);

/// Trains the baseline classifier head (D -> N logits) by softmax
/// cross-entropy under the identical optimizer/shuffle contract. Its
/// uncertainty is obtained by applying the same mapping m to the N logits.
std::pair<ProjectionHead, TrainReport> train_baseline_head(
    std::span<const LabeledScene> corpus, int num_classes,
    const TrainConfig& cfg);

}  // namespace simplexseg
