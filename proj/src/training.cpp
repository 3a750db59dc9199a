#include "simplexseg/training.hpp"

#include <cmath>
#include <stdexcept>

#include "simplexseg/rng.hpp"

namespace simplexseg {
namespace {

constexpr double kZeroNormGuard = 1e-12;

void check_label(int label, int num_classes) {
  if (label != kOodLabel && (label < 0 || label >= num_classes)) {
    throw std::invalid_argument("labels: class index " +
                                std::to_string(label) + " is outside 0.." +
                                std::to_string(num_classes - 1));
  }
}

void check_shapes(const ProjectionHead& head, const FeatureMap& features,
                  const LabelMap& labels) {
  if (features.depth != head.in_dim) {
    throw std::invalid_argument("training: feature depth " +
                                std::to_string(features.depth) +
                                " does not match head in_dim " +
                                std::to_string(head.in_dim));
  }
  if (features.height != labels.height || features.width != labels.width) {
    throw std::invalid_argument(
        "training: feature and label map shapes disagree");
  }
}

/// Prototype columns normalized to exactly unit length, column-contiguous.
std::vector<double> unit_columns(const PrototypeMatrix& p) {
  const int dim = p.dim();
  std::vector<double> cols(p.columns);
  for (int c = 0; c < p.num_classes; ++c) {
    double* col = cols.data() + static_cast<std::size_t>(c) * dim;
    double sq = 0.0;
    for (int r = 0; r < dim; ++r) sq += col[r] * col[r];
    const double norm = std::sqrt(sq);
    for (int r = 0; r < dim; ++r) col[r] /= norm;
  }
  return cols;
}

void affine_forward(const ProjectionHead& head, const double* f, double* z) {
  const int d = head.in_dim;
  const int k = head.out_dim;
  for (int c = 0; c < k; ++c) z[c] = head.bias[c];
  for (int r = 0; r < d; ++r) {
    const double fr = f[r];
    const double* w = head.weight.data() + static_cast<std::size_t>(r) * k;
    for (int c = 0; c < k; ++c) z[c] += w[c] * fr;
  }
}

/// -cos(z, q) for a unit q, with d(-cos)/dz written to gz when non-null.
/// Pixels with ||z|| below the guard contribute zero loss and zero gradient.
double cosine_pixel(const double* z, const double* q, int k, double* gz) {
  double sq = 0.0;
  double zq = 0.0;
  for (int r = 0; r < k; ++r) {
    sq += z[r] * z[r];
    zq += z[r] * q[r];
  }
  const double norm = std::sqrt(sq);
  if (norm < kZeroNormGuard) {
    if (gz != nullptr) {
      for (int r = 0; r < k; ++r) gz[r] = 0.0;
    }
    return 0.0;
  }
  const double cosine = zq / norm;
  if (gz != nullptr) {
    const double inv = 1.0 / norm;
    const double scale = zq * inv * inv * inv;
    for (int r = 0; r < k; ++r) gz[r] = -(q[r] * inv - scale * z[r]);
  }
  return -cosine;
}

/// Softmax cross-entropy of logits z against label y, with
/// d/dz = softmax(z) - onehot(y) written to gz when non-null.
double cross_entropy_pixel(const double* z, int n, int y, double* gz) {
  double max = z[0];
  for (int c = 1; c < n; ++c) max = std::max(max, z[c]);
  double sum = 0.0;
  for (int c = 0; c < n; ++c) sum += std::exp(z[c] - max);
  const double log_z = max + std::log(sum);
  if (gz != nullptr) {
    for (int c = 0; c < n; ++c) gz[c] = std::exp(z[c] - log_z);
    gz[y] -= 1.0;
  }
  return log_z - z[y];
}

enum class Objective { kCosine, kCrossEntropy };

/// Shared loss/gradient walk over one labelled map. `unit_cols` is required
/// for the cosine objective and ignored for cross-entropy.
double accumulate(const ProjectionHead& head, const std::vector<double>* unit_cols,
                  int num_classes, Objective objective,
                  const FeatureMap& features, const LabelMap& labels,
                  HeadGradient* grad) {
  check_shapes(head, features, labels);
  const int d = head.in_dim;
  const int k = head.out_dim;

  if (grad != nullptr) {
    grad->weight.assign(static_cast<std::size_t>(d) * k, 0.0);
    grad->bias.assign(k, 0.0);
  }

  std::vector<double> z(k);
  std::vector<double> gz(k);
  double loss_sum = 0.0;
  std::size_t counted = 0;

  const std::size_t pixels = features.pixel_count();
  for (std::size_t i = 0; i < pixels; ++i) {
    const int label = labels.labels[i];
    check_label(label, num_classes);
    if (label == kOodLabel) continue;
    ++counted;

    const double* f = features.values.data() + i * d;
    affine_forward(head, f, z.data());

    double pixel_loss;
    if (objective == Objective::kCosine) {
      const double* q = unit_cols->data() + static_cast<std::size_t>(label) * k;
      pixel_loss = cosine_pixel(z.data(), q, k, grad ? gz.data() : nullptr);
    } else {
      pixel_loss =
          cross_entropy_pixel(z.data(), k, label, grad ? gz.data() : nullptr);
    }
    loss_sum += pixel_loss;

    if (grad != nullptr) {
      for (int r = 0; r < d; ++r) {
        const double fr = f[r];
        double* gw = grad->weight.data() + static_cast<std::size_t>(r) * k;
        for (int c = 0; c < k; ++c) gw[c] += fr * gz[c];
      }
      for (int c = 0; c < k; ++c) grad->bias[c] += gz[c];
    }
  }

  if (counted == 0) {
    throw std::invalid_argument("training: no labelled (non-OOD) pixel");
  }

  const double inv = 1.0 / static_cast<double>(counted);
  if (grad != nullptr) {
    for (double& g : grad->weight) g *= inv;
    for (double& g : grad->bias) g *= inv;
  }
  return loss_sum * inv;
}

struct PixelRef {
  std::uint32_t scene;
  std::uint32_t pixel;
};

std::vector<PixelRef> gather_labelled_pixels(std::span<const LabeledScene> corpus,
                                             int depth, int num_classes) {
  std::vector<PixelRef> refs;
  for (std::size_t s = 0; s < corpus.size(); ++s) {
    const auto& scene = corpus[s];
    if (scene.features.depth != depth) {
      throw std::invalid_argument(
          "training: corpus feature depths are inconsistent (" +
          std::to_string(scene.features.depth) + " vs " +
          std::to_string(depth) + ")");
    }
    if (scene.features.height != scene.labels.height ||
        scene.features.width != scene.labels.width) {
      throw std::invalid_argument(
          "training: feature and label map shapes disagree");
    }
    const std::size_t pixels = scene.features.pixel_count();
    for (std::size_t i = 0; i < pixels; ++i) {
      const int label = scene.labels.labels[i];
      check_label(label, num_classes);
      if (label == kOodLabel) continue;
      refs.push_back({static_cast<std::uint32_t>(s),
                      static_cast<std::uint32_t>(i)});
    }
  }
  if (refs.empty()) {
    throw std::invalid_argument("training: corpus has no labelled pixel");
  }
  return refs;
}

void check_config(const TrainConfig& cfg) {
  if (cfg.learning_rate <= 0.0 || cfg.epochs <= 0 || cfg.batch_pixels <= 0) {
    throw std::invalid_argument(
        "training: learning_rate, epochs and batch_pixels must be positive");
  }
}

/// Plain SGD over shuffled pixel batches. Single-threaded with a fixed
/// accumulation order, so identical inputs give bit-identical heads.
std::pair<ProjectionHead, TrainReport> run_sgd(
    std::span<const LabeledScene> corpus, int out_dim, int num_classes,
    const std::vector<double>* unit_cols, Objective objective,
    const TrainConfig& cfg) {
  check_config(cfg);
  if (corpus.empty()) {
    throw std::invalid_argument("training: corpus is empty");
  }
  const int d = corpus.front().features.depth;
  const int k = out_dim;
  auto refs = gather_labelled_pixels(corpus, d, num_classes);

  const double init_scale =
      cfg.init_scale > 0.0 ? cfg.init_scale : std::sqrt(1.0 / d);

  Splitmix64 rng(cfg.seed);
  ProjectionHead head(d, k);
  for (double& w : head.weight) w = rng.uniform_symmetric(init_scale);
  for (double& b : head.bias) b = rng.uniform_symmetric(init_scale);

  TrainReport report;
  report.loss_per_epoch.reserve(cfg.epochs);

  const std::size_t batch = static_cast<std::size_t>(cfg.batch_pixels);
  std::vector<double> z(k);
  std::vector<double> gz(k);
  HeadGradient grad;

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    deterministic_shuffle(refs, rng);
    double epoch_loss_sum = 0.0;

    for (std::size_t start = 0; start < refs.size(); start += batch) {
      const std::size_t end = std::min(start + batch, refs.size());
      const std::size_t count = end - start;
      grad.weight.assign(static_cast<std::size_t>(d) * k, 0.0);
      grad.bias.assign(k, 0.0);

      for (std::size_t i = start; i < end; ++i) {
        const auto& ref = refs[i];
        const auto& scene = corpus[ref.scene];
        const double* f = scene.features.values.data() +
                          static_cast<std::size_t>(ref.pixel) * d;
        const int label = scene.labels.labels[ref.pixel];
        affine_forward(head, f, z.data());

        double pixel_loss;
        if (objective == Objective::kCosine) {
          const double* q =
              unit_cols->data() + static_cast<std::size_t>(label) * k;
          pixel_loss = cosine_pixel(z.data(), q, k, gz.data());
        } else {
          pixel_loss = cross_entropy_pixel(z.data(), k, label, gz.data());
        }
        epoch_loss_sum += pixel_loss;

        for (int r = 0; r < d; ++r) {
          const double fr = f[r];
          double* gw = grad.weight.data() + static_cast<std::size_t>(r) * k;
          for (int c = 0; c < k; ++c) gw[c] += fr * gz[c];
        }
        for (int c = 0; c < k; ++c) grad.bias[c] += gz[c];
      }

      const double step = cfg.learning_rate / static_cast<double>(count);
      for (std::size_t i = 0; i < head.weight.size(); ++i) {
        head.weight[i] -= step * grad.weight[i];
      }
      for (int c = 0; c < k; ++c) head.bias[c] -= step * grad.bias[c];
    }

    report.loss_per_epoch.push_back(epoch_loss_sum /
                                    static_cast<double>(refs.size()));
  }

  // Argmax-score accuracy over the training pixels, in corpus order.
  std::size_t correct = 0;
  for (std::size_t s = 0; s < corpus.size(); ++s) {
    const auto& scene = corpus[s];
    const std::size_t pixels = scene.features.pixel_count();
    for (std::size_t i = 0; i < pixels; ++i) {
      const int label = scene.labels.labels[i];
      if (label == kOodLabel) continue;
      const double* f =
          scene.features.values.data() + static_cast<std::size_t>(i) * d;
      affine_forward(head, f, z.data());

      int best = 0;
      if (objective == Objective::kCosine) {
        // Scores against all prototype columns; z and columns share dim k.
        double best_score = 0.0;
        for (int c = 0; c < num_classes; ++c) {
          const double* q =
              unit_cols->data() + static_cast<std::size_t>(c) * k;
          double dot = 0.0;
          for (int r = 0; r < k; ++r) dot += z[r] * q[r];
          if (c == 0 || dot > best_score) {
            best_score = dot;
            best = c;
          }
        }
      } else {
        for (int c = 1; c < k; ++c) {
          if (z[c] > z[best]) best = c;
        }
      }
      if (best == label) ++correct;
    }
  }
  report.final_train_accuracy =
      static_cast<double>(correct) / static_cast<double>(refs.size());

  return {std::move(head), std::move(report)};
}

}  // namespace

double cosine_loss(const ProjectionHead& head, const PrototypeMatrix& p,
                   const FeatureMap& features, const LabelMap& labels) {
  if (head.out_dim != p.dim()) {
    throw std::invalid_argument("cosine_loss: head out_dim " +
                                std::to_string(head.out_dim) +
                                " does not match prototype dimension " +
                                std::to_string(p.dim()));
  }
  const auto cols = unit_columns(p);
  return accumulate(head, &cols, p.num_classes, Objective::kCosine, features,
                    labels, nullptr);
}

HeadGradient cosine_loss_gradient(const ProjectionHead& head,
                                  const PrototypeMatrix& p,
                                  const FeatureMap& features,
                                  const LabelMap& labels) {
  if (head.out_dim != p.dim()) {
    throw std::invalid_argument("cosine_loss_gradient: head out_dim " +
                                std::to_string(head.out_dim) +
                                " does not match prototype dimension " +
                                std::to_string(p.dim()));
  }
  const auto cols = unit_columns(p);
  HeadGradient grad;
  accumulate(head, &cols, p.num_classes, Objective::kCosine, features, labels,
             &grad);
  return grad;
}

double cross_entropy_loss(const ProjectionHead& head,
                          const FeatureMap& features, const LabelMap& labels) {
  return accumulate(head, nullptr, head.out_dim, Objective::kCrossEntropy,
                    features, labels, nullptr);
}

HeadGradient cross_entropy_gradient(const ProjectionHead& head,
                                    const FeatureMap& features,
                                    const LabelMap& labels) {
  HeadGradient grad;
  accumulate(head, nullptr, head.out_dim, Objective::kCrossEntropy, features,
             labels, &grad);
  return grad;
}

std::pair<ProjectionHead, TrainReport> train_prototype_head(
    std::span<const LabeledScene> corpus, const PrototypeMatrix& p,
    const TrainConfig& cfg) {
  const auto cols = unit_columns(p);
  return run_sgd(corpus, p.dim(), p.num_classes, &cols, Objective::kCosine,
                 cfg);
}

std::pair<ProjectionHead, TrainReport> train_baseline_head(
    std::span<const LabeledScene> corpus, int num_classes,
    const TrainConfig& cfg) {
  if (num_classes < 2) {
    throw std::invalid_argument("training: num_classes must be >= 2");
  }
  return run_sgd(corpus, num_classes, num_classes, nullptr,
                 Objective::kCrossEntropy, cfg);
}

}  // namespace simplexseg
