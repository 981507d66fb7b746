// deba — SVD-based dataset poisoning toolkit, command-line front end.
//
// Exit codes: 0 success, 1 IO/format errors, 2 parameter validation.

#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "deba/colorspace.hpp"
#include "deba/dataset.hpp"
#include "deba/embed.hpp"
#include "deba/errors.hpp"
#include "deba/hash.hpp"
#include "deba/metrics.hpp"
#include "deba/mlp.hpp"
#include "deba/svd.hpp"
#include "deba/version.hpp"

namespace {

using deba::FormatError;
using deba::InvalidInput;
using deba::KTooLarge;

int run_guarded(const std::function<void()>& body) {
  try {
    body();
    return 0;
  } catch (const KTooLarge& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

bool looks_like_ppm(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw FormatError("cannot open " + path);
  char magic[2] = {0, 0};
  f.read(magic, 2);
  return f.gcount() == 2 && magic[0] == 'P' && magic[1] == '6';
}

deba::TrainSpec train_spec_from_json(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw FormatError("cannot open " + path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(f);
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(path + ": malformed JSON: " + e.what());
  }

  deba::TrainSpec spec;
  try {
    for (const auto& [key, value] : j.items()) {
      if (key == "hidden_units") spec.hidden_units = value.get<int>();
      else if (key == "epochs") spec.epochs = value.get<int>();
      else if (key == "batch_size") spec.batch_size = value.get<int>();
      else if (key == "learning_rate") spec.learning_rate = value.get<double>();
      else if (key == "momentum") spec.momentum = value.get<double>();
      else if (key == "seed") spec.seed = value.get<std::uint64_t>();
      else throw FormatError(path + ": unknown train-spec key '" + key + "'");
    }
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(path + ": mistyped train-spec field: " + e.what());
  }
  return spec;
}

deba::PoisonConfig poison_config_from_json(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw FormatError("cannot open " + path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(f);
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(path + ": malformed JSON: " + e.what());
  }

  deba::PoisonConfig cfg;
  bool have_variant = false, have_k = false, have_target = false;
  try {
    for (const auto& [key, value] : j.items()) {
      if (key == "variant") {
        cfg.variant = deba::variant_from_string(value.get<std::string>());
        have_variant = true;
      } else if (key == "k") {
        cfg.k = value.get<int>();
        have_k = true;
      } else if (key == "target_label") {
        cfg.target_label = value.get<int>();
        have_target = true;
      } else if (key == "poison_rate") {
        cfg.poison_rate = value.get<double>();
      } else if (key == "seed") {
        cfg.seed = value.get<std::uint64_t>();
      } else if (key == "trigger_source") {
        cfg.trigger_source = value.get<std::string>();
      } else {
        throw FormatError(path + ": unknown config key '" + key + "'");
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(path + ": mistyped config field: " + e.what());
  }
  if (!have_variant || !have_k || !have_target)
    throw FormatError(path + ": config requires variant, k and target_label");
  deba::validate(cfg);
  return cfg;
}

std::uint64_t file_digest(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw FormatError("cannot open " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  const std::string bytes = ss.str();
  return deba::fnv1a64(bytes.data(), bytes.size());
}

// --- poison ---------------------------------------------------------------

struct PoisonArgs {
  std::string dataset, trigger, out, manifest;
  std::string variant = "rgb";
  int k = -1;  // -1: derive from image size
  double rate = 0.1;
  int target = 0;
  std::uint64_t seed = 0;
};

void cmd_poison(const PoisonArgs& args) {
  const deba::LabeledDataset ds = deba::load_cifar10(args.dataset);
  const deba::ImageTensor trigger = deba::load_ppm(args.trigger);

  deba::PoisonConfig cfg;
  cfg.variant = deba::variant_from_string(args.variant);
  cfg.target_label = args.target;
  cfg.poison_rate = args.rate;
  cfg.seed = args.seed;
  cfg.trigger_source = args.trigger;
  if (args.k >= 0) {
    cfg.k = args.k;
  } else if (!ds.images.empty()) {
    cfg.k = deba::default_k(
        cfg.variant,
        std::min(ds.images.front().height(), ds.images.front().width()));
  }

  deba::PoisonResult result = deba::build_poisoned_set(ds, trigger, cfg);
  for (const auto& w : result.warnings) std::cerr << "warning: " << w << "\n";

  deba::save_cifar10(result.dataset, args.out);
  deba::save_manifest(result.manifest, args.manifest);

  std::cout << "samples      " << ds.size() << "\n"
            << "poisoned     " << result.manifest.poisoned_indices.size()
            << "\n"
            << "variant      " << deba::to_string(cfg.variant) << "\n"
            << "k            " << cfg.k << "\n"
            << "config-hash  " << result.manifest.config_hash << "\n";
}

// --- metrics ---------------------------------------------------------------

deba::AggregateReport dataset_metrics(const std::string& clean_path,
                                      const std::string& poisoned_path) {
  std::vector<deba::MetricReport> reports;
  if (looks_like_ppm(clean_path)) {
    const deba::ImageTensor a = deba::load_ppm(clean_path);
    const deba::ImageTensor b = deba::load_ppm(poisoned_path);
    reports.push_back(deba::compare(a, b));
  } else {
    const deba::LabeledDataset a = deba::load_cifar10(clean_path);
    const deba::LabeledDataset b = deba::load_cifar10(poisoned_path);
    if (a.size() != b.size())
      throw InvalidInput("metrics: datasets have different sample counts");
    if (a.images.empty()) throw InvalidInput("metrics: empty dataset");
    reports.reserve(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
      reports.push_back(deba::compare(a.images[i], b.images[i]));
    }
  }
  return deba::summarize(reports);
}

void cmd_metrics(const std::string& clean, const std::string& poisoned,
                 bool json) {
  const deba::AggregateReport agg = dataset_metrics(clean, poisoned);
  if (json) {
    std::cout << deba::to_json_string(agg) << "\n";
  } else {
    std::cout << deba::to_text(agg);
    std::cout << "lpips       n/a\n";  // needs a pretrained perceptual net
  }
}

// --- inspect ---------------------------------------------------------------

void cmd_inspect(const std::string& clean, const std::string& poisoned,
                 const std::string& out_residual) {
  const deba::ImageTensor a = deba::load_ppm(clean);
  const deba::ImageTensor b = deba::load_ppm(poisoned);
  const deba::ImageTensor res = deba::residual(a, b);
  deba::save_ppm(deba::quantize(res), out_residual);

  double peak = 0.0;
  for (std::size_t c = 0; c < a.planes.size(); ++c) {
    peak = std::max(peak, deba::max_abs_diff(a.planes[c], b.planes[c]));
  }
  std::cout << "peak-abs-diff  " << std::lround(peak * 255.0)
            << " levels\nresidual       " << out_residual << "\n";
}

// --- train -----------------------------------------------------------------

void cmd_train(const std::string& train_set, const std::string& spec_json,
               const std::string& out_model) {
  const deba::LabeledDataset ds = deba::load_cifar10(train_set);
  deba::TrainSpec spec;
  if (!spec_json.empty()) spec = train_spec_from_json(spec_json);

  const deba::TrainResult result = deba::train(ds, spec);
  deba::save_model(result.model, out_model);

  std::cout << "samples          " << ds.size() << "\n"
            << "epochs           " << spec.epochs << "\n";
  if (!result.epoch_loss.empty()) {
    std::printf("initial-loss     %.6f\n", result.epoch_loss.front());
    std::printf("final-loss       %.6f\n", result.epoch_loss.back());
  }
  std::cout << "checkpoint       " << out_model << "\n"
            << "checkpoint-hash  " << deba::hash_to_hex(file_digest(out_model))
            << "\n";
}

// --- eval ------------------------------------------------------------------

void cmd_eval(const std::string& model_path, const std::string& clean_test,
              const std::string& trigger_path, const std::string& config_path,
              bool json) {
  const deba::MlpModel model = deba::load_model(model_path);
  const deba::LabeledDataset clean = deba::load_cifar10(clean_test);
  const deba::ImageTensor trigger = deba::load_ppm(trigger_path);
  const deba::PoisonConfig cfg = poison_config_from_json(config_path);

  const deba::LabeledDataset poisoned =
      deba::apply_trigger_to_test_set(clean, trigger, cfg);
  const deba::EvalReport report =
      deba::make_eval_report(model, clean, poisoned, cfg.target_label);

  if (json) {
    std::cout << deba::to_json_string(report) << "\n";
    return;
  }
  std::printf("cda          %.4f  (%d clean samples)\n", report.cda,
              report.n_clean_eval);
  std::printf("asr          %.4f  (%d poisoned samples)\n", report.asr,
              report.n_poison_eval);
  std::cout << "per-class   ";
  for (double acc : report.per_class_accuracy) std::printf(" %.4f", acc);
  std::cout << "\n";
}

// --- svd-info ---------------------------------------------------------------

void print_spectrum(const deba::RealMatrix& plane, int channel) {
  const deba::SvdFactors f = deba::decompose(plane);
  double total = 0.0;
  for (double s : f.sigma) total += s * s;

  std::printf("channel %d  (%dx%d, %zu singular values)\n", channel,
              plane.rows(), plane.cols(), f.sigma.size());
  std::printf("  %4s  %-22s  %-12s  %s\n", "idx", "sigma", "energy-frac",
              "cumulative");
  double cum = 0.0;
  for (std::size_t i = 0; i < f.sigma.size(); ++i) {
    const double frac = total > 0.0 ? f.sigma[i] * f.sigma[i] / total : 0.0;
    cum += frac;
    std::printf("  %4zu  %-22.15g  %-12.6g  %.6f\n", i, f.sigma[i], frac, cum);
  }
}

void cmd_svd_info(const std::string& image_path, int channel) {
  const deba::ImageTensor img = deba::load_ppm(image_path);
  if (channel >= img.channels())
    throw InvalidInput("svd-info: image has only " +
                       std::to_string(img.channels()) + " channels");
  if (channel >= 0) {
    print_spectrum(img.planes[static_cast<std::size_t>(channel)], channel);
    return;
  }
  for (int c = 0; c < img.channels(); ++c) {
    print_spectrum(img.planes[static_cast<std::size_t>(c)], c);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"deba — SVD tail-splice dataset poisoning toolkit"};
  app.set_version_flag("--version", deba::kToolVersion);
  app.require_subcommand(1);

  PoisonArgs poison;
  CLI::App* cmd_poison_app =
      app.add_subcommand("poison", "Poison a CIFAR-10 binary training set");
  cmd_poison_app->add_option("--dataset", poison.dataset, "CIFAR-10 binary file")
      ->required();
  cmd_poison_app->add_option("--trigger", poison.trigger, "trigger image (PPM)")
      ->required();
  cmd_poison_app->add_option("--variant", poison.variant, "rgb or uv")
      ->check(CLI::IsMember({"rgb", "uv"}));
  cmd_poison_app
      ->add_option("--k", poison.k, "tail triplets to replace (default: by image size)")
      ->check(CLI::NonNegativeNumber);
  cmd_poison_app->add_option("--rate", poison.rate, "poison rate p")
      ->check(CLI::Range(0.0, 1.0));
  cmd_poison_app->add_option("--target", poison.target, "target label y_t")
      ->check(CLI::NonNegativeNumber);
  cmd_poison_app->add_option("--seed", poison.seed, "RNG seed");
  cmd_poison_app->add_option("--out", poison.out, "poisoned dataset path")
      ->required();
  cmd_poison_app->add_option("--manifest", poison.manifest, "manifest JSON path")
      ->required();

  std::string metrics_clean, metrics_poisoned;
  bool metrics_json = false;
  CLI::App* cmd_metrics_app = app.add_subcommand(
      "metrics", "Stealthiness metrics between clean and poisoned inputs");
  cmd_metrics_app->add_option("--clean", metrics_clean, "PPM image or CIFAR file")
      ->required();
  cmd_metrics_app->add_option("--poisoned", metrics_poisoned, "PPM image or CIFAR file")
      ->required();
  cmd_metrics_app->add_flag("--json", metrics_json, "machine-readable output");

  std::string inspect_clean, inspect_poisoned, inspect_out;
  CLI::App* cmd_inspect_app = app.add_subcommand(
      "inspect", "Write the max-normalized residual between two images");
  cmd_inspect_app->add_option("--clean", inspect_clean, "clean PPM")->required();
  cmd_inspect_app->add_option("--poisoned", inspect_poisoned, "poisoned PPM")
      ->required();
  cmd_inspect_app->add_option("--out-residual", inspect_out, "residual PPM path")
      ->required();

  std::string train_set, train_spec_path, train_out;
  CLI::App* cmd_train_app =
      app.add_subcommand("train", "Train the desk-scale MLP victim");
  cmd_train_app->add_option("--train-set", train_set, "CIFAR-10 binary file")
      ->required();
  cmd_train_app->add_option("--spec-json", train_spec_path,
                            "training spec JSON (defaults apply)");
  cmd_train_app->add_option("--out-model", train_out, "checkpoint path")
      ->required();

  std::string eval_model, eval_clean, eval_trigger, eval_config;
  bool eval_json = false;
  CLI::App* cmd_eval_app =
      app.add_subcommand("eval", "Report CDA and ASR for a trained model");
  cmd_eval_app->add_option("--model", eval_model, "checkpoint path")->required();
  cmd_eval_app->add_option("--clean-test", eval_clean, "clean CIFAR-10 test file")
      ->required();
  cmd_eval_app->add_option("--trigger", eval_trigger, "trigger image (PPM)")
      ->required();
  cmd_eval_app->add_option("--config", eval_config, "poison config JSON")
      ->required();
  cmd_eval_app->add_flag("--json", eval_json, "machine-readable output");

  std::string info_image;
  int info_channel = -1;
  CLI::App* cmd_info_app = app.add_subcommand(
      "svd-info", "Print the per-channel singular value spectrum");
  cmd_info_app->add_option("--image", info_image, "PPM image")->required();
  cmd_info_app->add_option("--channel", info_channel, "channel index (default all)")
      ->check(CLI::NonNegativeNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  if (cmd_poison_app->parsed())
    return run_guarded([&] { cmd_poison(poison); });
  if (cmd_metrics_app->parsed())
    return run_guarded(
        [&] { cmd_metrics(metrics_clean, metrics_poisoned, metrics_json); });
  if (cmd_inspect_app->parsed())
    return run_guarded(
        [&] { cmd_inspect(inspect_clean, inspect_poisoned, inspect_out); });
  if (cmd_train_app->parsed())
    return run_guarded([&] { cmd_train(train_set, train_spec_path, train_out); });
  if (cmd_eval_app->parsed())
    return run_guarded([&] {
      cmd_eval(eval_model, eval_clean, eval_trigger, eval_config, eval_json);
    });
  if (cmd_info_app->parsed())
    return run_guarded([&] { cmd_svd_info(info_image, info_channel); });
  return 2;
}
