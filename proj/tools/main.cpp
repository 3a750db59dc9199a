// Command-line front end chaining prototype construction, scene generation,
// head training, inference and ROC evaluation into reproducible experiments.

#include <charconv>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "simplexseg/evaluation.hpp"
#include "simplexseg/io.hpp"
#include "simplexseg/projection.hpp"
#include "simplexseg/prototypes.hpp"
#include "simplexseg/synthetic.hpp"
#include "simplexseg/training.hpp"
#include "simplexseg/types.hpp"

namespace {

using namespace simplexseg;

template <typename T>
T parse_number(const std::string& text, const std::string& key);

template <>
double parse_number<double>(const std::string& text, const std::string& key) {
  try {
    std::size_t used = 0;
    const double value = std::stod(text, &used);
    if (used == text.size()) return value;
  } catch (const std::exception&) {
  }
  throw std::invalid_argument("config: value \"" + text + "\" for key \"" +
                              key + "\" is not a number");
}

template <>
int parse_number<int>(const std::string& text, const std::string& key) {
  int value = 0;
  const auto [ptr, ec] =
      std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw std::invalid_argument("config: value \"" + text + "\" for key \"" +
                                key + "\" is not an integer");
  }
  return value;
}

template <>
std::uint64_t parse_number<std::uint64_t>(const std::string& text,
                                          const std::string& key) {
  std::uint64_t value = 0;
  const auto [ptr, ec] =
      std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw std::invalid_argument("config: value \"" + text + "\" for key \"" +
                                key + "\" is not an unsigned integer");
  }
  return value;
}

template <typename T>
bool take(std::map<std::string, std::string>& entries, const std::string& key,
          T& out) {
  const auto it = entries.find(key);
  if (it == entries.end()) return false;
  out = parse_number<T>(it->second, key);
  entries.erase(it);
  return true;
}

void reject_unknown(const std::map<std::string, std::string>& entries,
                    const std::string& what) {
  if (!entries.empty()) {
    throw std::invalid_argument("config: unknown " + what + " key \"" +
                                entries.begin()->first + "\"");
  }
}

SynthConfig synth_config_from_file(const std::filesystem::path& path,
                                   std::optional<std::uint64_t> seed_override) {
  auto entries = load_config(path);
  SynthConfig cfg;
  if (!take(entries, "num_classes", cfg.num_classes)) {
    throw std::invalid_argument("config: missing key \"num_classes\"");
  }
  if (!take(entries, "depth", cfg.depth)) {
    throw std::invalid_argument("config: missing key \"depth\"");
  }
  take(entries, "height", cfg.height);
  take(entries, "width", cfg.width);
  take(entries, "class_separation", cfg.class_separation);
  take(entries, "noise_sigma", cfg.noise_sigma);
  take(entries, "ood_shift", cfg.ood_shift);
  const bool has_seed = take(entries, "seed", cfg.seed);
  reject_unknown(entries, "scene");
  if (seed_override.has_value()) {
    cfg.seed = *seed_override;
  } else if (!has_seed) {
    throw std::invalid_argument(
        "config: missing key \"seed\" (or pass --seed)");
  }
  return cfg;
}

TrainConfig train_config_from_file(
    const std::optional<std::filesystem::path>& path,
    std::optional<std::uint64_t> seed_override) {
  TrainConfig cfg;
  if (path.has_value()) {
    auto entries = load_config(*path);
    take(entries, "learning_rate", cfg.learning_rate);
    take(entries, "epochs", cfg.epochs);
    take(entries, "batch_pixels", cfg.batch_pixels);
    take(entries, "seed", cfg.seed);
    take(entries, "init_scale", cfg.init_scale);
    reject_unknown(entries, "training");
  }
  if (seed_override.has_value()) cfg.seed = *seed_override;
  return cfg;
}

std::vector<std::filesystem::path> expand_required(const std::string& pattern,
                                                   const std::string& what) {
  auto paths = expand_glob(pattern);
  if (paths.empty()) {
    throw std::invalid_argument("no " + what + " files match \"" + pattern +
                                "\"");
  }
  return paths;
}

std::string report_csv(const TrainReport& report) {
  std::ostringstream out;
  out << "epoch,loss\n";
  for (std::size_t i = 0; i < report.loss_per_epoch.size(); ++i) {
    char buf[32];
    const auto result = std::to_chars(buf, buf + sizeof(buf),
                                      report.loss_per_epoch[i]);
    out << (i + 1) << ',' << std::string_view(buf, result.ptr - buf) << '\n';
  }
  return out.str();
}

int run_prototypes(int num_classes, const std::filesystem::path& out) {
  const auto p = build_prototypes(num_classes);
  write_tensor(to_tensor(p), out);
  return 0;
}

int run_gen(const std::filesystem::path& config_path,
            const std::filesystem::path& layout_path,
            const std::string& out_prefix,
            std::optional<std::uint64_t> seed_override) {
  const auto cfg = synth_config_from_file(config_path, seed_override);
  const auto layout = load_layout(layout_path);
  const auto scene = generate_scene(cfg, layout);
  write_tensor(to_tensor(scene.features), out_prefix + ".features.t");
  write_tensor(to_tensor(scene.labels), out_prefix + ".labels.t");
  return 0;
}

int run_train(const std::string& features_glob, const std::string& labels_glob,
              int num_classes, bool baseline,
              const std::optional<std::filesystem::path>& config_path,
              const std::filesystem::path& out,
              const std::optional<std::filesystem::path>& report_path,
              std::optional<std::uint64_t> seed_override) {
  const auto feature_paths = expand_required(features_glob, "feature");
  const auto label_paths = expand_required(labels_glob, "label");
  if (feature_paths.size() != label_paths.size()) {
    throw std::invalid_argument(
        "feature and label globs match different counts (" +
        std::to_string(feature_paths.size()) + " vs " +
        std::to_string(label_paths.size()) + ")");
  }

  std::vector<LabeledScene> corpus;
  corpus.reserve(feature_paths.size());
  for (std::size_t i = 0; i < feature_paths.size(); ++i) {
    LabeledScene scene;
    scene.features = feature_map_from(read_tensor(feature_paths[i]),
                                      feature_paths[i].string());
    scene.labels =
        label_map_from(read_tensor(label_paths[i]), label_paths[i].string());
    corpus.push_back(std::move(scene));
  }

  const auto cfg = train_config_from_file(config_path, seed_override);
  ProjectionHead head;
  TrainReport report;
  if (baseline) {
    std::tie(head, report) = train_baseline_head(corpus, num_classes, cfg);
  } else {
    const auto p = build_prototypes(num_classes);
    std::tie(head, report) = train_prototype_head(corpus, p, cfg);
  }
  write_tensor(to_tensor(head), out);
  if (report_path.has_value()) {
    write_text_file(report_csv(report), *report_path);
  }
  std::cout << "final_train_accuracy=" << report.final_train_accuracy << "\n";
  return 0;
}

int run_infer(const std::filesystem::path& head_path, int num_classes,
              const std::filesystem::path& features_path,
              const std::string& out_prefix) {
  const auto head = head_from(read_tensor(head_path), head_path.string());
  const auto features =
      feature_map_from(read_tensor(features_path), features_path.string());

  ScoreMap scores;
  if (head.out_dim == num_classes - 1) {
    const auto p = build_prototypes(num_classes);
    scores = score(project(head, features), p);
  } else if (head.out_dim == num_classes) {
    scores = scores_from_grid(project(head, features));
  } else {
    throw std::invalid_argument(
        "head out_dim " + std::to_string(head.out_dim) +
        " matches neither a prototype head (N-1) nor a baseline head (N) for "
        "--classes " +
        std::to_string(num_classes));
  }

  const auto labels = classify(scores);
  const auto u = uncertainty(scores);
  write_tensor(to_tensor(scores), out_prefix + ".scores.t");
  write_tensor(to_tensor(labels), out_prefix + ".labels.t");
  write_tensor(to_tensor(u), out_prefix + ".uncertainty.t");
  write_pgm(u, num_classes, out_prefix + ".heatmap.pgm");
  return 0;
}

int run_eval(const std::string& pos_glob, const std::string& neg_glob,
             const std::filesystem::path& roc_out) {
  BinaryScoredSet set;
  for (const auto& path : expand_required(pos_glob, "positive uncertainty")) {
    const auto u = uncertainty_map_from(read_tensor(path), path.string());
    set.positive_scores.insert(set.positive_scores.end(), u.values.begin(),
                               u.values.end());
  }
  for (const auto& path : expand_required(neg_glob, "negative uncertainty")) {
    const auto u = uncertainty_map_from(read_tensor(path), path.string());
    set.negative_scores.insert(set.negative_scores.end(), u.values.begin(),
                               u.values.end());
  }
  const auto curve = roc_curve(set);
  std::ostringstream csv;
  write_roc_csv(curve, csv);
  write_text_file(csv.str(), roc_out);

  char buf[32];
  const auto result = std::to_chars(buf, buf + sizeof(buf), curve.auc);
  std::cout << "auc=" << std::string_view(buf, result.ptr - buf) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Simplex-prototype uncertainty module for semantic "
               "segmentation feature maps"};
  app.require_subcommand(1);

  // Every subcommand accepts --seed; where a config file also carries a seed
  // the flag wins.
  std::optional<std::uint64_t> seed;

  auto* prototypes_cmd =
      app.add_subcommand("prototypes", "Write the prototype matrix tensor");
  int proto_classes = 0;
  std::string proto_out;
  prototypes_cmd->add_option("--classes", proto_classes, "Number of classes")
      ->required();
  prototypes_cmd->add_option("--out", proto_out, "Output tensor file")
      ->required();
  prototypes_cmd->add_option("--seed", seed, "Unused; accepted for symmetry");

  auto* gen_cmd =
      app.add_subcommand("gen", "Generate a synthetic labelled scene");
  std::string gen_config, gen_layout, gen_prefix;
  gen_cmd->add_option("--config", gen_config, "Scene config (key=value)")
      ->required();
  gen_cmd->add_option("--layout", gen_layout, "Region layout file")
      ->required();
  gen_cmd->add_option("--out-prefix", gen_prefix,
                      "Prefix for .features.t / .labels.t")
      ->required();
  gen_cmd->add_option("--seed", seed, "Overrides the config seed");

  auto* train_cmd = app.add_subcommand("train", "Train a head on scenes");
  std::string train_features, train_labels, train_out;
  std::string train_config, train_report;
  int train_classes = 0;
  bool train_baseline_flag = false;
  train_cmd->add_option("--features", train_features, "Feature tensor glob")
      ->required();
  train_cmd->add_option("--labels", train_labels, "Label tensor glob")
      ->required();
  train_cmd->add_option("--classes", train_classes, "Number of classes")
      ->required();
  train_cmd->add_flag("--baseline", train_baseline_flag,
                      "Train the cross-entropy baseline head instead");
  train_cmd->add_option("--config", train_config,
                        "Training config (key=value)");
  train_cmd->add_option("--out", train_out, "Output head tensor")->required();
  train_cmd->add_option("--report", train_report,
                        "Optional per-epoch loss CSV");
  train_cmd->add_option("--seed", seed, "Overrides the config seed");

  auto* infer_cmd =
      app.add_subcommand("infer", "Run a head over a feature tensor");
  std::string infer_head, infer_features, infer_prefix;
  int infer_classes = 0;
  infer_cmd->add_option("--head", infer_head, "Head tensor file")->required();
  infer_cmd->add_option("--classes", infer_classes, "Number of classes")
      ->required();
  infer_cmd->add_option("--features", infer_features, "Feature tensor file")
      ->required();
  infer_cmd
      ->add_option("--out-prefix", infer_prefix,
                   "Prefix for .scores.t / .labels.t / .uncertainty.t / "
                   ".heatmap.pgm")
      ->required();
  infer_cmd->add_option("--seed", seed, "Unused; accepted for symmetry");

  auto* eval_cmd =
      app.add_subcommand("eval", "ROC/AUC over uncertainty tensors");
  std::string eval_pos, eval_neg, eval_roc;
  eval_cmd->add_option("--pos", eval_pos, "Positive (OOD) uncertainty glob")
      ->required();
  eval_cmd->add_option("--neg", eval_neg, "Negative (ID) uncertainty glob")
      ->required();
  eval_cmd->add_option("--roc-out", eval_roc, "ROC CSV output")->required();
  eval_cmd->add_option("--seed", seed, "Unused; accepted for symmetry");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {  // --help
      return app.exit(e);
    }
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  }

  try {
    if (prototypes_cmd->parsed()) {
      return run_prototypes(proto_classes, proto_out);
    }
    if (gen_cmd->parsed()) {
      return run_gen(gen_config, gen_layout, gen_prefix, seed);
    }
    if (train_cmd->parsed()) {
      return run_train(
          train_features, train_labels, train_classes, train_baseline_flag,
          train_config.empty()
              ? std::nullopt
              : std::optional<std::filesystem::path>(train_config),
          train_out,
          train_report.empty()
              ? std::nullopt
              : std::optional<std::filesystem::path>(train_report),
          seed);
    }
    if (infer_cmd->parsed()) {
      return run_infer(infer_head, infer_classes, infer_features,
                       infer_prefix);
    }
    if (eval_cmd->parsed()) {
      return run_eval(eval_pos, eval_neg, eval_roc);
    }
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const TensorIoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
