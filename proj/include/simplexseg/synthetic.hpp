#pragma once

#include <cstdint>
#include <filesystem>
#include <istream>
#include <vector>

#include "simplexseg/types.hpp"

namespace simplexseg {

/// Parameters of the synthetic feature generator that stands in for a
/// segmentation backbone's output.
struct SynthConfig {
  int num_classes = 0;            // N >= 2
  int depth = 0;                  // D >= 2
  int height = 64;
  int width = 64;
  double class_separation = 4.0;  // pairwise distance between class means
  double noise_sigma = 1.0;       // isotropic within-class std dev
  double ood_shift = 8.0;         // min distance of the OOD mean to any class mean
  std::uint64_t seed = 0;
};

/// One rectangular region of a scene layout, [x0,x1) x [y0,y1), tagged with a
/// class index or kOodLabel.
struct Region {
  int x0 = 0, y0 = 0, x1 = 0, y1 = 0;
  int label = 0;
};

using Layout = std::vector<Region>;

/// Class means: (s/sqrt(2)) times distinct standard basis vectors, giving
/// exact pairwise distance s. With include_ood, appends one extra mean at
/// -ood_shift times the normalized average of the class means (falling back
/// to an unused basis direction should that average vanish), which sits at
/// distance >= ood_shift from every class mean. Deterministic from cfg.
/// Throws std::invalid_argument when D < N (or D < N+1 with include_ood) or
/// when cfg violates its own bounds.
std::vector<std::vector<double>> make_class_means(const SynthConfig& cfg,
                                                  bool include_ood);

/// Generates a scene: each pixel's feature is its region's mean plus
/// noise_sigma times a standard normal vector from the seeded stream (pixels
/// row-major, components innermost); labels copy the region tags. The layout
/// must partition the grid exactly.
LabeledScene generate_scene(const SynthConfig& cfg, const Layout& layout);

/// Layout text format: one region per line, "x0 y0 x1 y1 label" with label a
/// class index or "ood"; blank lines and '#' comments are ignored.
Layout parse_layout(std::istream& in);
Layout load_layout(const std::filesystem::path& path);

}  // namespace simplexseg
