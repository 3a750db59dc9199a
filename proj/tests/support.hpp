// Shared test helpers and independent oracles. Everything here re-derives
// expected values from first principles and stays off the library's
// implementation paths.
#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "simplexseg/rng.hpp"
#include "simplexseg/types.hpp"

namespace testsupport {

/// Brute-force Mann-Whitney statistic over all (positive, negative) pairs:
/// wins count 1, ties 0.5. The independent oracle for trapezoidal AUC.
inline double mann_whitney_auc(const std::vector<double>& pos,
                               const std::vector<double>& neg) {
  double credit = 0.0;
  for (double p : pos) {
    for (double n : neg) {
      if (p > n) {
        credit += 1.0;
      } else if (p == n) {
        credit += 0.5;
      }
    }
  }
  return credit / (static_cast<double>(pos.size()) *
                   static_cast<double>(neg.size()));
}

/// Central finite differences d loss / d theta for one parameter exposed as a
/// reference, used against the analytic gradients.
inline double central_difference(double& param, double h,
                                 const std::function<double()>& loss) {
  const double saved = param;
  param = saved + h;
  const double up = loss();
  param = saved - h;
  const double down = loss();
  param = saved;
  return (up - down) / (2.0 * h);
}

/// The spec's relative-error metric: |a-b| / max(1e-8, |a|+|b|).
inline double relative_error(double a, double b) {
  return std::abs(a - b) / std::max(1e-8, std::abs(a) + std::abs(b));
}

/// Random feature map with N(0,1)-ish entries from the deterministic stream.
inline simplexseg::FeatureMap random_features(int h, int w, int d,
                                              std::uint64_t seed) {
  simplexseg::FeatureMap features(h, w, d);
  simplexseg::GaussianSampler gauss(seed);
  for (double& v : features.values) v = gauss.next();
  return features;
}

inline simplexseg::LabelMap random_labels(int h, int w, int num_classes,
                                          std::uint64_t seed) {
  simplexseg::LabelMap labels(h, w);
  simplexseg::Splitmix64 rng(seed);
  for (int& l : labels.labels) {
    l = static_cast<int>(rng.bounded(static_cast<std::uint64_t>(num_classes)));
  }
  return labels;
}

/// Unique scratch directory removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static int counter = 0;
    path_ = std::filesystem::temp_directory_path() /
            ("simplexseg-" + tag + "-" + std::to_string(::getpid()) + "-" +
             std::to_string(counter++));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

}  // namespace testsupport
