#include "simplexseg/synthetic.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "simplexseg/rng.hpp"

namespace simplexseg {
namespace {

void check_config(const SynthConfig& cfg, bool include_ood) {
  if (cfg.num_classes < 2) {
    throw std::invalid_argument("synthetic: num_classes must be >= 2");
  }
  if (cfg.depth < 2) {
    throw std::invalid_argument("synthetic: depth must be >= 2");
  }
  if (cfg.height <= 0 || cfg.width <= 0) {
    throw std::invalid_argument("synthetic: grid dimensions must be positive");
  }
  if (cfg.class_separation <= 0.0 || cfg.noise_sigma <= 0.0) {
    throw std::invalid_argument(
        "synthetic: class_separation and noise_sigma must be positive");
  }
  if (cfg.ood_shift <= cfg.class_separation) {
    throw std::invalid_argument(
        "synthetic: ood_shift must exceed class_separation");
  }
  if (cfg.depth < cfg.num_classes) {
    throw std::invalid_argument(
        "synthetic: depth must be >= num_classes (one basis direction per "
        "class mean)");
  }
  if (include_ood && cfg.depth < cfg.num_classes + 1) {
    throw std::invalid_argument(
        "synthetic: depth must be >= num_classes + 1 when an OOD mean is "
        "requested");
  }
}

}  // namespace

std::vector<std::vector<double>> make_class_means(const SynthConfig& cfg,
                                                  bool include_ood) {
  check_config(cfg, include_ood);
  const int n = cfg.num_classes;
  const int d = cfg.depth;

  // (s/sqrt(2)) * e_i: pairwise distance is exactly s.
  const double radius = cfg.class_separation / std::sqrt(2.0);
  std::vector<std::vector<double>> means;
  means.reserve(include_ood ? n + 1 : n);
  for (int c = 0; c < n; ++c) {
    std::vector<double> mean(d, 0.0);
    mean[c] = radius;
    means.push_back(std::move(mean));
  }

  if (include_ood) {
    std::vector<double> avg(d, 0.0);
    for (int c = 0; c < n; ++c) {
      for (int r = 0; r < d; ++r) avg[r] += means[c][r] / n;
    }
    double norm_sq = 0.0;
    for (int r = 0; r < d; ++r) norm_sq += avg[r] * avg[r];
    std::vector<double> ood(d, 0.0);
    if (norm_sq > 0.0) {
      const double scale = -cfg.ood_shift / std::sqrt(norm_sq);
      for (int r = 0; r < d; ++r) ood[r] = scale * avg[r];
    } else {
      // Unreachable with the basis construction; kept for the stated
      // contract (an unused basis direction also clears ood_shift).
      ood[n] = cfg.ood_shift;
    }
    means.push_back(std::move(ood));
  }
  return means;
}

LabeledScene generate_scene(const SynthConfig& cfg, const Layout& layout) {
  bool has_ood = false;
  for (const auto& region : layout) {
    if (region.label == kOodLabel) {
      has_ood = true;
    } else if (region.label < 0 || region.label >= cfg.num_classes) {
      throw std::invalid_argument("layout: class index " +
                                  std::to_string(region.label) +
                                  " is outside 0.." +
                                  std::to_string(cfg.num_classes - 1));
    }
  }
  check_config(cfg, has_ood);

  const int h = cfg.height;
  const int w = cfg.width;

  // The layout must cover every pixel exactly once.
  std::vector<int> region_of(static_cast<std::size_t>(h) * w, -1);
  for (std::size_t r = 0; r < layout.size(); ++r) {
    const Region& reg = layout[r];
    if (reg.x0 < 0 || reg.y0 < 0 || reg.x1 > w || reg.y1 > h ||
        reg.x0 >= reg.x1 || reg.y0 >= reg.y1) {
      throw std::invalid_argument(
          "layout: region " + std::to_string(r) + " [" +
          std::to_string(reg.x0) + "," + std::to_string(reg.y0) + "," +
          std::to_string(reg.x1) + "," + std::to_string(reg.y1) +
          ") is empty or exceeds the " + std::to_string(w) + "x" +
          std::to_string(h) + " grid");
    }
    for (int y = reg.y0; y < reg.y1; ++y) {
      for (int x = reg.x0; x < reg.x1; ++x) {
        int& slot = region_of[static_cast<std::size_t>(y) * w + x];
        if (slot != -1) {
          throw std::invalid_argument(
              "layout: regions " + std::to_string(slot) + " and " +
              std::to_string(r) + " overlap at pixel (" + std::to_string(x) +
              "," + std::to_string(y) + ")");
        }
        slot = static_cast<int>(r);
      }
    }
  }
  for (std::size_t i = 0; i < region_of.size(); ++i) {
    if (region_of[i] == -1) {
      throw std::invalid_argument(
          "layout: pixel (" + std::to_string(i % w) + "," +
          std::to_string(i / w) + ") is not covered by any region");
    }
  }

  const auto means = make_class_means(cfg, has_ood);
  const std::vector<double>& ood_mean = has_ood ? means.back() : means.front();

  LabeledScene scene;
  scene.features = FeatureMap(h, w, cfg.depth);
  scene.labels = LabelMap(h, w);

  // Pixel order (row-major) and component order define the PRNG stream.
  GaussianSampler gauss(cfg.seed);
  const int d = cfg.depth;
  for (std::size_t i = 0; i < region_of.size(); ++i) {
    const int label = layout[region_of[i]].label;
    const std::vector<double>& mean =
        label == kOodLabel ? ood_mean : means[label];
    double* f = scene.features.values.data() + i * d;
    for (int r = 0; r < d; ++r) {
      f[r] = mean[r] + cfg.noise_sigma * gauss.next();
    }
    scene.labels.labels[i] = label;
  }
  return scene;
}

Layout parse_layout(std::istream& in) {
  Layout layout;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) {
      line.erase(hash);
    }
    std::istringstream fields(line);
    std::vector<std::string> tokens;
    std::string token;
    while (fields >> token) tokens.push_back(token);
    if (tokens.empty()) continue;  // blank or comment-only line
    if (tokens.size() != 5) {
      throw std::invalid_argument("layout: line " + std::to_string(line_no) +
                                  ": expected \"x0 y0 x1 y1 label\"");
    }

    const auto parse_int = [&](const std::string& s, const char* what) {
      std::size_t used = 0;
      int value = 0;
      try {
        value = std::stoi(s, &used);
      } catch (const std::exception&) {
        used = std::string::npos;
      }
      if (used != s.size()) {
        throw std::invalid_argument("layout: line " + std::to_string(line_no) +
                                    ": " + what + " \"" + s +
                                    "\" is not an integer");
      }
      return value;
    };

    Region region;
    region.x0 = parse_int(tokens[0], "x0");
    region.y0 = parse_int(tokens[1], "y0");
    region.x1 = parse_int(tokens[2], "x1");
    region.y1 = parse_int(tokens[3], "y1");
    if (tokens[4] == "ood") {
      region.label = kOodLabel;
    } else {
      region.label = parse_int(tokens[4], "label");
      if (region.label < 0) {
        throw std::invalid_argument("layout: line " + std::to_string(line_no) +
                                    ": label must be a class index or \"ood\"");
      }
    }
    layout.push_back(region);
  }
  return layout;
}

Layout load_layout(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::invalid_argument("layout: cannot open " + path.string());
  }
  return parse_layout(in);
}

}  // namespace simplexseg
