/*
 * Copyright 2026 The gfcs Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *    http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

// Command-line front end. Talks to the library only through gfcs/gfcs.h.
//
// Exit codes: 0 success, 1 usage error, 2 runtime error (including a failed
// self-check).

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "gfcs/gfcs.h"

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitRuntime = 2;

struct RuntimeFailure {
  gfcs_status status;
  std::string message;
};

void check(gfcs_status s) {
  if (s != GFCS_OK) throw RuntimeFailure{s, gfcs_last_error()};
}

struct ModelDeleter {
  void operator()(gfcs_model* m) const { gfcs_model_free(m); }
};
struct DatasetDeleter {
  void operator()(gfcs_dataset* d) const { gfcs_dataset_free(d); }
};
using ModelHandle = std::unique_ptr<gfcs_model, ModelDeleter>;
using DatasetHandle = std::unique_ptr<gfcs_dataset, DatasetDeleter>;

ModelHandle load_model(const std::string& path) {
  gfcs_model* m = nullptr;
  check(gfcs_model_load(path.c_str(), &m));
  return ModelHandle(m);
}

DatasetHandle load_dataset(const std::string& path) {
  gfcs_dataset* d = nullptr;
  check(gfcs_dataset_load(path.c_str(), &d));
  return DatasetHandle(d);
}

std::string num(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

void print_summary_header() { std::printf("method,epsilon,median_queries,median_se,success_rate,n\n"); }

void print_summary_row(const gfcs_summary_row* r, void*) {
  std::printf("%s,%s,%s,%s,%s,%zu\n", r->method, num(r->epsilon).c_str(),
              r->median_defined ? num(r->median).c_str() : "inf",
              r->median_defined ? num(r->standard_error).c_str() : "inf", num(r->success_rate).c_str(), r->n);
}

std::vector<double> parse_epsilons(const std::string& text) {
  std::vector<double> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    while (used < item.size() && std::isspace(static_cast<unsigned char>(item[used]))) ++used;
    if (item.empty() || used != item.size() || !std::isfinite(v) || v <= 0.0)
      throw CLI::ValidationError("--epsilons", "'" + item + "' is not a positive number");
    out.push_back(v);
  }
  if (out.empty()) throw CLI::ValidationError("--epsilons", "empty list");
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Score-based black-box attacks guided by surrogate gradients"};
  app.require_subcommand(1);
  app.set_version_flag("--version", gfcs_version());

  // gen-data
  gfcs_generator_params gen;
  gfcs_generator_params_default(&gen);
  std::string gen_name = gen.generator;
  std::string gen_out;
  auto* gen_cmd = app.add_subcommand("gen-data", "Generate a synthetic dataset file");
  gen_cmd->add_option("--generator", gen_name, "blobs or minimages")
      ->check(CLI::IsMember({"blobs", "minimages"}))
      ->capture_default_str();
  gen_cmd->add_option("--seed", gen.seed, "Generator seed")->capture_default_str();
  gen_cmd->add_option("--out", gen_out, "Output dataset file")->required();
  gen_cmd->add_option("--height", gen.height, "Image height (minimages)")->capture_default_str();
  gen_cmd->add_option("--width", gen.width, "Image width (minimages)")->capture_default_str();
  gen_cmd->add_option("--channels", gen.channels, "Image channels (minimages)")->capture_default_str();
  gen_cmd->add_option("--dim", gen.dim, "Input dimension (blobs)")->capture_default_str();
  gen_cmd->add_option("--classes", gen.classes, "Number of classes")->capture_default_str();
  gen_cmd->add_option("--per-class", gen.per_class, "Items per class")->capture_default_str();
  gen_cmd->add_option("--spread", gen.spread, "Cluster standard deviation (blobs)")->capture_default_str();
  gen_cmd->add_option("--noise", gen.noise, "Pixel noise standard deviation (minimages)")->capture_default_str();
  gen_cmd->add_option("--contrast", gen.contrast, "Class pattern amplitude (minimages)")->capture_default_str();

  // train
  gfcs_train_params tp;
  gfcs_train_params_default(&tp);
  std::string train_data, train_out, train_arch = tp.arch;
  auto* train_cmd = app.add_subcommand("train", "Train a classifier and save it");
  train_cmd->add_option("--data", train_data, "Dataset file")->required();
  train_cmd->add_option("--arch", train_arch,
                        "Preset (linear, mlp, conv-a, conv-b, conv-c) or layer list such as "
                        "conv:8:3:1:1,relu,pool:2,flatten,affine")
      ->capture_default_str();
  train_cmd->add_option("--seed", tp.seed, "Training seed")->capture_default_str();
  train_cmd->add_option("--out", train_out, "Output model file")->required();
  train_cmd->add_option("--lr", tp.learning_rate, "Learning rate")->capture_default_str();
  train_cmd->add_option("--momentum", tp.momentum, "SGD momentum")->capture_default_str();
  train_cmd->add_option("--epochs", tp.epochs, "Epochs")->capture_default_str();
  train_cmd->add_option("--batch", tp.batch_size, "Minibatch size")->capture_default_str();
  train_cmd->add_option("--test-fraction", tp.test_fraction, "Held-out fraction")->capture_default_str();

  // attack
  gfcs_attack_params ap;
  gfcs_attack_params_default(&ap);
  std::string atk_data, atk_victim, atk_method = "gfcs", atk_trace, atk_loss = "margin", atk_box;
  std::vector<std::string> atk_surrogates;
  std::size_t atk_index = 0;
  long atk_target = -1;
  bool atk_targeted = false, atk_dct_random = false;
  auto* atk_cmd = app.add_subcommand("attack", "Attack one dataset item and print the result");
  atk_cmd->add_option("--data", atk_data, "Dataset file")->required();
  atk_cmd->add_option("--victim", atk_victim, "Victim model file")->required();
  atk_cmd->add_option("--surrogates", atk_surrogates, "Surrogate model files (comma separated)")->delimiter(',');
  atk_cmd->add_option("--method", atk_method, "gfcs, gf-only, simba-ods, simba-pixel, simba-dct, "
                                              "simba-pca-gradients, simba-pca-images")
      ->check(CLI::IsMember({"gfcs", "gf-only", "simba-ods", "simba-pixel", "simba-dct", "simba-pca-gradients",
                             "simba-pca-images"}))
      ->capture_default_str();
  atk_cmd->add_option("--example-index", atk_index, "Dataset item to attack")->capture_default_str();
  atk_cmd->add_option("--epsilon", ap.epsilon, "Step length")->capture_default_str();
  atk_cmd->add_option("--nu", ap.nu, "l2 bound (default sqrt(0.001 D))");
  atk_cmd->add_option("--budget", ap.budget, "Victim query budget")->capture_default_str();
  atk_cmd->add_flag("--targeted", atk_targeted, "Targeted attack (random target unless --target)");
  atk_cmd->add_option("--target", atk_target, "Target class (implies --targeted)");
  atk_cmd->add_option("--loss", atk_loss, "margin or targeted-log")
      ->check(CLI::IsMember({"margin", "targeted-log"}))
      ->capture_default_str();
  atk_cmd->add_option("--box", atk_box, "Clamp candidates to lo:hi");
  atk_cmd->add_option("--seed", ap.seed, "Attack seed")->capture_default_str();
  atk_cmd->add_option("--trace", atk_trace, "Write every evaluated candidate here (JSON lines)");
  atk_cmd->add_option("--dct-freq", ap.dct_freq, "DCT frequencies per axis (default min(H,W)/2)");
  atk_cmd->add_flag("--dct-random", atk_dct_random, "Shuffle the DCT basis instead of low-frequency first");
  atk_cmd->add_option("--pca-k", ap.pca_k, "PCA basis size (default min(D,100))");

  // campaign
  std::string camp_spec;
  std::size_t camp_workers = 0;
  auto* camp_cmd = app.add_subcommand("campaign", "Run a batch experiment from a spec file");
  camp_cmd->add_option("--spec", camp_spec, "Campaign spec file")->required()->check(CLI::ExistingFile);
  camp_cmd->add_option("--workers", camp_workers, "Worker threads (overrides the spec)");

  // sweep
  std::string sweep_spec, sweep_eps, sweep_out;
  std::size_t sweep_workers = 0;
  auto* sweep_cmd = app.add_subcommand("sweep", "Repeat a campaign over several step lengths");
  sweep_cmd->add_option("--spec", sweep_spec, "Campaign spec file")->required()->check(CLI::ExistingFile);
  sweep_cmd->add_option("--epsilons", sweep_eps, "Comma separated step lengths")->required();
  sweep_cmd->add_option("--out", sweep_out, "Sweep CSV (default <output>/sweep.csv)");
  sweep_cmd->add_option("--workers", sweep_workers, "Worker threads (overrides the spec)");

  // selfcheck
  std::vector<std::string> check_models;
  auto* check_cmd = app.add_subcommand("selfcheck", "Run the numeric invariant checks");
  check_cmd->add_option("--model", check_models, "Also load and gradient-check these model files");

  std::vector<double> epsilons;
  try {
    app.parse(argc, argv);
    if (sweep_cmd->parsed()) epsilons = parse_epsilons(sweep_eps);
    if (atk_cmd->parsed() && !atk_box.empty()) {
      const auto colon = atk_box.find(':');
      if (colon == std::string::npos) throw CLI::ValidationError("--box", "expected lo:hi");
      try {
        ap.box_lo = std::stod(atk_box.substr(0, colon));
        ap.box_hi = std::stod(atk_box.substr(colon + 1));
      } catch (const std::exception&) {
        throw CLI::ValidationError("--box", "expected lo:hi");
      }
      ap.box_enabled = 1;
    }
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (gen_cmd->parsed()) {
      gen.generator = gen_name.c_str();
      gfcs_dataset* raw = nullptr;
      check(gfcs_dataset_generate(&gen, &raw));
      DatasetHandle data(raw);
      check(gfcs_dataset_save(data.get(), gen_out.c_str()));
      std::size_t h = 0, w = 0, c = 0, k = 0;
      check(gfcs_dataset_shape(data.get(), &h, &w, &c, &k));
      std::printf("generator=%s seed=%llu items=%zu shape=%zux%zux%zu classes=%zu out=%s\n", gen_name.c_str(),
                  static_cast<unsigned long long>(gen.seed), gfcs_dataset_size(data.get()), h, w, c, k,
                  gen_out.c_str());
    } else if (train_cmd->parsed()) {
      DatasetHandle data = load_dataset(train_data);
      tp.arch = train_arch.c_str();
      gfcs_model* raw = nullptr;
      gfcs_train_report rep{};
      check(gfcs_train(data.get(), &tp, &raw, &rep));
      ModelHandle model(raw);
      check(gfcs_model_save(model.get(), train_out.c_str()));
      std::printf("arch=%s seed=%llu epochs=%zu train_size=%zu test_size=%zu\n", train_arch.c_str(),
                  static_cast<unsigned long long>(tp.seed), tp.epochs, rep.train_size, rep.test_size);
      std::printf("train_accuracy=%s\ntest_accuracy=%s\nfinal_loss=%s\n", num(rep.train_accuracy).c_str(),
                  num(rep.test_accuracy).c_str(), num(rep.final_loss).c_str());
    } else if (atk_cmd->parsed()) {
      DatasetHandle data = load_dataset(atk_data);
      ModelHandle victim = load_model(atk_victim);
      std::vector<ModelHandle> owned;
      std::vector<const gfcs_model*> surrogates;
      for (const auto& p : atk_surrogates) {
        owned.push_back(load_model(p));
        surrogates.push_back(owned.back().get());
      }
      check(gfcs_method_from_name(atk_method.c_str(), &ap.method));
      ap.targeted = (atk_targeted || atk_target >= 0) ? 1 : 0;
      ap.target = atk_target;
      ap.log_loss = atk_loss == "targeted-log" ? 1 : 0;
      ap.dct_random_order = atk_dct_random ? 1 : 0;
      gfcs_attack_result r{};
      check(gfcs_attack_example(victim.get(), surrogates.data(), surrogates.size(), data.get(), atk_index, &ap,
                                atk_trace.empty() ? nullptr : atk_trace.c_str(), &r));
      std::printf("# method=%s epsilon=%s nu=%s budget=%llu loss=%s seed=%llu\n", atk_method.c_str(),
                  num(r.epsilon).c_str(), num(r.nu).c_str(), static_cast<unsigned long long>(ap.budget),
                  atk_loss.c_str(), static_cast<unsigned long long>(ap.seed));
      std::printf("example_index=%zu\nlabel=%zu\n", atk_index, r.label);
      if (r.target >= 0) std::printf("target=%ld\n", r.target);
      std::printf("success=%s\nreason=%s\n", r.success ? "true" : "false", r.reason);
      std::printf("total_queries=%llu\ngradient_queries=%llu\ncoimage_queries=%llu\nbasis_queries=%llu\n",
                  static_cast<unsigned long long>(r.total_queries), static_cast<unsigned long long>(r.gradient_queries),
                  static_cast<unsigned long long>(r.coimage_queries), static_cast<unsigned long long>(r.basis_queries));
      std::printf("accepted_steps=%llu\nfinal_norm=%s\noriginal_class=%zu\nfinal_class=%zu\n",
                  static_cast<unsigned long long>(r.accepted_steps), num(r.final_norm).c_str(), r.original_class,
                  r.final_class);
    } else if (camp_cmd->parsed()) {
      print_summary_header();
      check(gfcs_campaign_run(camp_spec.c_str(), camp_workers, print_summary_row, nullptr));
    } else if (sweep_cmd->parsed()) {
      print_summary_header();
      check(gfcs_sweep_run(sweep_spec.c_str(), epsilons.data(), epsilons.size(), sweep_workers,
                           sweep_out.empty() ? nullptr : sweep_out.c_str(), print_summary_row, nullptr));
    } else if (check_cmd->parsed()) {
      std::vector<const char*> paths;
      for (const auto& p : check_models) paths.push_back(p.c_str());
      int all = 0;
      check(gfcs_selfcheck(paths.data(), paths.size(),
                           [](const char* name, int passed, const char* detail, void*) {
                             std::printf("%s %s %s\n", passed ? "PASS" : "FAIL", name, detail);
                           },
                           nullptr, &all));
      std::printf("%s\n", all ? "all checks passed" : "some checks failed");
      return all ? 0 : kExitRuntime;
    }
  } catch (const RuntimeFailure& f) {
    std::fprintf(stderr, "error (%s): %s\n", gfcs_status_name(f.status), f.message.c_str());
    return kExitRuntime;
  }
  return 0;
}
