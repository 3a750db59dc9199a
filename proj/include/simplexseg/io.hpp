#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "simplexseg/projection.hpp"
#include "simplexseg/prototypes.hpp"
#include "simplexseg/types.hpp"

namespace simplexseg {

/// Raised for missing or corrupt tensor files; the message names the file and
/// the violated invariant (magic/rank/dims/length).
class TensorIoError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// In-memory image of the on-disk tensor format:
///   magic "SIMPLXT1" (8 bytes ASCII)
///   rank  u32 little-endian, 1..4
///   dims  rank x u32 little-endian
///   payload product(dims) x IEEE-754 binary32 little-endian, row-major,
///           innermost dimension listed last.
struct Tensor {
  std::vector<std::uint32_t> dims;
  std::vector<float> data;

  std::size_t element_count() const {
    std::size_t n = 1;
    for (auto d : dims) n *= d;
    return n;
  }
};

Tensor read_tensor(const std::filesystem::path& path);

/// Atomic write: the bytes go to a temp file in the same directory which is
/// then renamed over the target. Output is deterministic byte-for-byte.
void write_tensor(const Tensor& tensor, const std::filesystem::path& path);

/// Binary PGM (P5, maxval 255) heatmap of an uncertainty map. Pixel byte =
/// round(255 * u / (1 - 1/N)): full-scale white at the maximal attainable
/// uncertainty, black at zero. Atomic, deterministic.
void write_pgm(const UncertaintyMap& u, int num_classes,
               const std::filesystem::path& path);

/// Atomic write of arbitrary text (CSV exports).
void write_text_file(const std::string& content,
                     const std::filesystem::path& path);

/// Line-based "key=value" config with '#' comments and blank lines.
/// Throws std::invalid_argument on malformed lines or duplicate keys.
std::map<std::string, std::string> parse_config_text(const std::string& text);
std::map<std::string, std::string> load_config(
    const std::filesystem::path& path);

/// Shell-style glob expansion (sorted). Empty when nothing matches.
std::vector<std::filesystem::path> expand_glob(const std::string& pattern);

// Conversions between core types and tensors. Payloads are binary32 even
// though computation is binary64; the cast halves corpus size and the
// round-trip contract is bitwise on the stored float32 values.
Tensor to_tensor(const FeatureMap& features);       // [H, W, D]
Tensor to_tensor(const LabelMap& labels);           // [H, W]
Tensor to_tensor(const ScoreMap& scores);           // [H, W, N]
Tensor to_tensor(const UncertaintyMap& u);          // [H, W]
Tensor to_tensor(const PrototypeMatrix& p);         // [N-1, N]
Tensor to_tensor(const ProjectionHead& head);       // [D+1, K]; last row bias

FeatureMap feature_map_from(const Tensor& t, const std::string& name);
LabelMap label_map_from(const Tensor& t, const std::string& name);
UncertaintyMap uncertainty_map_from(const Tensor& t, const std::string& name);
ProjectionHead head_from(const Tensor& t, const std::string& name);

}  // namespace simplexseg
