#include "simplexseg/io.hpp"

#include <glob.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

namespace simplexseg {
namespace {

constexpr char kMagic[8] = {'S', 'I', 'M', 'P', 'L', 'X', 'T', '1'};
constexpr std::uint32_t kMaxRank = 4;
// Caps a single tensor at 4 GiB of payload; anything bigger is corrupt here.
constexpr std::size_t kMaxElements = 1u << 30;

void append_u32_le(std::string& out, std::uint32_t value) {
  out.push_back(static_cast<char>(value & 0xff));
  out.push_back(static_cast<char>((value >> 8) & 0xff));
  out.push_back(static_cast<char>((value >> 16) & 0xff));
  out.push_back(static_cast<char>((value >> 24) & 0xff));
}

std::uint32_t read_u32_le(const unsigned char* bytes) {
  return static_cast<std::uint32_t>(bytes[0]) |
         (static_cast<std::uint32_t>(bytes[1]) << 8) |
         (static_cast<std::uint32_t>(bytes[2]) << 16) |
         (static_cast<std::uint32_t>(bytes[3]) << 24);
}

/// Writes bytes to path via a temp file in the same directory plus rename, so
/// a reader never observes a partial file.
void atomic_write_bytes(const std::string& bytes,
                        const std::filesystem::path& path) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) {
      throw TensorIoError(tmp.string() + ": cannot open for writing");
    }
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) {
      throw TensorIoError(tmp.string() + ": write failed");
    }
  }
  std::filesystem::rename(tmp, path);
}

void check_grid_dims(const Tensor& t, std::size_t expected_rank,
                     const std::string& name) {
  if (t.dims.size() != expected_rank) {
    throw TensorIoError(name + ": expected a rank-" +
                        std::to_string(expected_rank) + " tensor, got rank " +
                        std::to_string(t.dims.size()));
  }
}

void check_finite(const Tensor& t, const std::string& name) {
  for (float v : t.data) {
    if (!std::isfinite(v)) {
      throw TensorIoError(name + ": payload holds a non-finite value");
    }
  }
}

}  // namespace

Tensor read_tensor(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw TensorIoError(path.string() + ": cannot open");
  }
  std::string bytes((std::istreambuf_iterator<char>(in)),
                    std::istreambuf_iterator<char>());
  const auto* data = reinterpret_cast<const unsigned char*>(bytes.data());

  if (bytes.size() < sizeof(kMagic) + 4 ||
      std::memcmp(bytes.data(), kMagic, sizeof(kMagic)) != 0) {
    throw TensorIoError(path.string() + ": bad magic (not a SIMPLXT1 tensor)");
  }
  std::size_t offset = sizeof(kMagic);
  const std::uint32_t rank = read_u32_le(data + offset);
  offset += 4;
  if (rank < 1 || rank > kMaxRank) {
    throw TensorIoError(path.string() + ": bad rank " + std::to_string(rank) +
                        " (expected 1..4)");
  }
  if (bytes.size() < offset + 4u * rank) {
    throw TensorIoError(path.string() + ": bad dims (file truncated)");
  }

  Tensor t;
  std::size_t elements = 1;
  for (std::uint32_t i = 0; i < rank; ++i) {
    const std::uint32_t dim = read_u32_le(data + offset);
    offset += 4;
    if (dim == 0 || elements > kMaxElements / dim) {
      throw TensorIoError(path.string() + ": bad dims (dimension " +
                          std::to_string(i) + " = " + std::to_string(dim) +
                          ")");
    }
    elements *= dim;
    t.dims.push_back(dim);
  }

  const std::size_t expected = offset + 4 * elements;
  if (bytes.size() != expected) {
    throw TensorIoError(path.string() + ": bad length (expected " +
                        std::to_string(expected) + " bytes, got " +
                        std::to_string(bytes.size()) + ")");
  }
  t.data.resize(elements);
  for (std::size_t i = 0; i < elements; ++i) {
    const std::uint32_t bits = read_u32_le(data + offset + 4 * i);
    float value;
    std::memcpy(&value, &bits, sizeof(value));
    t.data[i] = value;
  }
  return t;
}

void write_tensor(const Tensor& tensor, const std::filesystem::path& path) {
  if (tensor.dims.empty() || tensor.dims.size() > kMaxRank) {
    throw TensorIoError(path.string() + ": bad rank " +
                        std::to_string(tensor.dims.size()) +
                        " (expected 1..4)");
  }
  std::size_t elements = 1;
  for (std::size_t i = 0; i < tensor.dims.size(); ++i) {
    const std::uint32_t dim = tensor.dims[i];
    if (dim == 0 || elements > kMaxElements / dim) {
      throw TensorIoError(path.string() + ": bad dims (dimension " +
                          std::to_string(i) + " = " + std::to_string(dim) +
                          ")");
    }
    elements *= dim;
  }
  if (tensor.data.size() != elements) {
    throw TensorIoError(path.string() + ": bad length (payload " +
                        std::to_string(tensor.data.size()) +
                        " values, dims need " + std::to_string(elements) +
                        ")");
  }

  std::string bytes;
  bytes.reserve(sizeof(kMagic) + 4 + 4 * tensor.dims.size() + 4 * elements);
  bytes.append(kMagic, sizeof(kMagic));
  append_u32_le(bytes, static_cast<std::uint32_t>(tensor.dims.size()));
  for (std::uint32_t dim : tensor.dims) append_u32_le(bytes, dim);
  for (float value : tensor.data) {
    std::uint32_t bits;
    std::memcpy(&bits, &value, sizeof(bits));
    append_u32_le(bytes, bits);
  }
  atomic_write_bytes(bytes, path);
}

void write_pgm(const UncertaintyMap& u, int num_classes,
               const std::filesystem::path& path) {
  if (num_classes < 2) {
    throw std::invalid_argument("write_pgm: num_classes must be >= 2");
  }
  const double full_scale = 1.0 - 1.0 / num_classes;
  std::string bytes = "P5\n" + std::to_string(u.width) + " " +
                      std::to_string(u.height) + "\n255\n";
  bytes.reserve(bytes.size() + u.values.size());
  for (double v : u.values) {
    long byte = std::lround(255.0 * v / full_scale);
    byte = std::clamp(byte, 0L, 255L);
    bytes.push_back(static_cast<char>(static_cast<unsigned char>(byte)));
  }
  atomic_write_bytes(bytes, path);
}

void write_text_file(const std::string& content,
                     const std::filesystem::path& path) {
  atomic_write_bytes(content, path);
}

std::map<std::string, std::string> parse_config_text(const std::string& text) {
  std::map<std::string, std::string> config;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  const auto trim = [](std::string s) {
    const auto begin = s.find_first_not_of(" \t\r");
    const auto end = s.find_last_not_of(" \t\r");
    if (begin == std::string::npos) return std::string();
    return s.substr(begin, end - begin + 1);
  };
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) {
      line.erase(hash);
    }
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument("config: line " + std::to_string(line_no) +
                                  ": expected key=value");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty()) {
      throw std::invalid_argument("config: line " + std::to_string(line_no) +
                                  ": empty key or value");
    }
    if (!config.emplace(key, value).second) {
      throw std::invalid_argument("config: line " + std::to_string(line_no) +
                                  ": duplicate key \"" + key + "\"");
    }
  }
  return config;
}

std::map<std::string, std::string> load_config(
    const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::invalid_argument("config: cannot open " + path.string());
  }
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_config_text(buffer.str());
}

std::vector<std::filesystem::path> expand_glob(const std::string& pattern) {
  glob_t results;
  const int rc = ::glob(pattern.c_str(), 0, nullptr, &results);
  std::vector<std::filesystem::path> paths;
  if (rc == 0) {
    paths.reserve(results.gl_pathc);
    for (std::size_t i = 0; i < results.gl_pathc; ++i) {
      paths.emplace_back(results.gl_pathv[i]);
    }
  }
  globfree(&results);
  if (rc != 0 && rc != GLOB_NOMATCH) {
    throw std::runtime_error("glob: failed to expand pattern \"" + pattern +
                             "\"");
  }
  return paths;  // glob sorts by default
}

Tensor to_tensor(const FeatureMap& features) {
  Tensor t;
  t.dims = {static_cast<std::uint32_t>(features.height),
            static_cast<std::uint32_t>(features.width),
            static_cast<std::uint32_t>(features.depth)};
  t.data.assign(features.values.begin(), features.values.end());
  return t;
}

Tensor to_tensor(const LabelMap& labels) {
  Tensor t;
  t.dims = {static_cast<std::uint32_t>(labels.height),
            static_cast<std::uint32_t>(labels.width)};
  t.data.reserve(labels.labels.size());
  for (int label : labels.labels) t.data.push_back(static_cast<float>(label));
  return t;
}

Tensor to_tensor(const ScoreMap& scores) {
  Tensor t;
  t.dims = {static_cast<std::uint32_t>(scores.height),
            static_cast<std::uint32_t>(scores.width),
            static_cast<std::uint32_t>(scores.num_classes)};
  t.data.assign(scores.scores.begin(), scores.scores.end());
  return t;
}

Tensor to_tensor(const UncertaintyMap& u) {
  Tensor t;
  t.dims = {static_cast<std::uint32_t>(u.height),
            static_cast<std::uint32_t>(u.width)};
  t.data.assign(u.values.begin(), u.values.end());
  return t;
}

Tensor to_tensor(const PrototypeMatrix& p) {
  Tensor t;
  t.dims = {static_cast<std::uint32_t>(p.dim()),
            static_cast<std::uint32_t>(p.num_classes)};
  t.data.resize(t.element_count());
  // Row-major [N-1, N] from the column-contiguous store.
  for (int r = 0; r < p.dim(); ++r) {
    for (int c = 0; c < p.num_classes; ++c) {
      t.data[static_cast<std::size_t>(r) * p.num_classes + c] =
          static_cast<float>(p.column(c)[r]);
    }
  }
  return t;
}

Tensor to_tensor(const ProjectionHead& head) {
  Tensor t;
  t.dims = {static_cast<std::uint32_t>(head.in_dim + 1),
            static_cast<std::uint32_t>(head.out_dim)};
  t.data.reserve(t.element_count());
  for (double w : head.weight) t.data.push_back(static_cast<float>(w));
  for (double b : head.bias) t.data.push_back(static_cast<float>(b));
  return t;
}

FeatureMap feature_map_from(const Tensor& t, const std::string& name) {
  check_grid_dims(t, 3, name);
  check_finite(t, name);
  FeatureMap features(static_cast<int>(t.dims[0]),
                      static_cast<int>(t.dims[1]),
                      static_cast<int>(t.dims[2]));
  features.values.assign(t.data.begin(), t.data.end());
  return features;
}

LabelMap label_map_from(const Tensor& t, const std::string& name) {
  check_grid_dims(t, 2, name);
  LabelMap labels(static_cast<int>(t.dims[0]), static_cast<int>(t.dims[1]));
  for (std::size_t i = 0; i < t.data.size(); ++i) {
    const float v = t.data[i];
    if (!std::isfinite(v) || v != std::floor(v) ||
        (v < 0.0f && v != static_cast<float>(kOodLabel))) {
      throw TensorIoError(name + ": label payload value " + std::to_string(v) +
                          " is not a class index or the OOD marker");
    }
    labels.labels[i] = static_cast<int>(v);
  }
  return labels;
}

UncertaintyMap uncertainty_map_from(const Tensor& t, const std::string& name) {
  check_grid_dims(t, 2, name);
  check_finite(t, name);
  UncertaintyMap u(static_cast<int>(t.dims[0]), static_cast<int>(t.dims[1]));
  u.values.assign(t.data.begin(), t.data.end());
  return u;
}

ProjectionHead head_from(const Tensor& t, const std::string& name) {
  check_grid_dims(t, 2, name);
  check_finite(t, name);
  if (t.dims[0] < 2) {
    throw TensorIoError(name + ": head tensor needs at least one weight row "
                        "plus the bias row");
  }
  ProjectionHead head(static_cast<int>(t.dims[0]) - 1,
                      static_cast<int>(t.dims[1]));
  const std::size_t weights = head.weight.size();
  for (std::size_t i = 0; i < weights; ++i) head.weight[i] = t.data[i];
  for (int c = 0; c < head.out_dim; ++c) head.bias[c] = t.data[weights + c];
  return head;
}

}  // namespace simplexseg
