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

#include "gfcs/gfcs.h"

#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <string>
#include <vector>

#include "gfcs/error.hpp"
#include "gfcs/harness.hpp"
#include "gfcs/selfcheck.hpp"

struct gfcs_model {
  std::shared_ptr<gfcs::Network> net;
};

struct gfcs_dataset {
  gfcs::LabeledDataset data;
};

namespace {

thread_local std::string g_last_error;

gfcs_status status_of(gfcs::ErrorCode code) { return static_cast<gfcs_status>(static_cast<int>(code)); }

template <class F>
gfcs_status guarded(F&& body) {
  try {
    body();
    return GFCS_OK;
  } catch (const gfcs::Error& e) {
    g_last_error = e.what();
    return status_of(e.code());
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return GFCS_ERR_INTERNAL;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return GFCS_ERR_INTERNAL;
  } catch (...) {
    g_last_error = "unknown error";
    return GFCS_ERR_INTERNAL;
  }
}

void need(const void* p, const char* what) { gfcs::require(p != nullptr, std::string(what) + " is null"); }

void copy_name(char (&dst)[32], const std::string& src) {
  std::strncpy(dst, src.c_str(), sizeof dst - 1);
  dst[sizeof dst - 1] = '\0';
}

gfcs_summary_row to_row(const std::string& method, double epsilon, const gfcs::MedianEstimate& m,
                        double rate, std::size_t n) {
  gfcs_summary_row row{};
  copy_name(row.method, method);
  row.epsilon = epsilon;
  row.median_defined = m.defined ? 1 : 0;
  row.median = m.median;
  row.standard_error = m.standard_error;
  row.success_rate = rate;
  row.n = n;
  return row;
}

}  // namespace

extern "C" {

const char* gfcs_version(void) { return "0.1.0"; }

const char* gfcs_last_error(void) { return g_last_error.c_str(); }

const char* gfcs_status_name(gfcs_status status) {
  if (status == GFCS_OK) return "ok";
  if (status < GFCS_ERR_INVALID_INPUT || status > GFCS_ERR_INTERNAL) return "unknown";
  return gfcs::error_code_name(static_cast<gfcs::ErrorCode>(static_cast<int>(status)));
}

double gfcs_default_nu(size_t dim) { return gfcs::default_nu(dim); }

// ---- datasets ---------------------------------------------------------------

void gfcs_generator_params_default(gfcs_generator_params* p) {
  if (!p) return;
  const gfcs::DataRecipe r;
  p->generator = "minimages";
  p->seed = r.seed;
  p->height = r.height;
  p->width = r.width;
  p->channels = r.channels;
  p->dim = r.dim;
  p->classes = r.classes;
  p->per_class = r.per_class;
  p->spread = r.spread;
  p->noise = r.image.noise;
  p->contrast = r.image.contrast;
}

gfcs_status gfcs_dataset_generate(const gfcs_generator_params* p, gfcs_dataset** out) {
  return guarded([&] {
    need(p, "params");
    need(out, "out");
    need(p->generator, "generator");
    gfcs::DataRecipe r;
    r.generator = p->generator;
    gfcs::require(r.generator == "blobs" || r.generator == "minimages",
                  "unknown generator '" + r.generator + "'");
    r.seed = p->seed;
    r.height = p->height;
    r.width = p->width;
    r.channels = p->channels;
    r.dim = p->dim;
    r.classes = p->classes;
    r.per_class = p->per_class;
    r.spread = p->spread;
    r.image.noise = p->noise;
    r.image.contrast = p->contrast;
    *out = new gfcs_dataset{r.generate()};
  });
}

gfcs_status gfcs_dataset_load(const char* path, gfcs_dataset** out) {
  return guarded([&] {
    need(path, "path");
    need(out, "out");
    *out = new gfcs_dataset{gfcs::load_dataset(path)};
  });
}

gfcs_status gfcs_dataset_save(const gfcs_dataset* data, const char* path) {
  return guarded([&] {
    need(data, "dataset");
    need(path, "path");
    gfcs::save_dataset(data->data, path);
  });
}

void gfcs_dataset_free(gfcs_dataset* data) { delete data; }

size_t gfcs_dataset_size(const gfcs_dataset* data) { return data ? data->data.size() : 0; }

gfcs_status gfcs_dataset_shape(const gfcs_dataset* data, size_t* h, size_t* w, size_t* c, size_t* classes) {
  return guarded([&] {
    need(data, "dataset");
    const auto& m = data->data.meta;
    if (h) *h = m.shape.height;
    if (w) *w = m.shape.width;
    if (c) *c = m.shape.channels;
    if (classes) *classes = m.classes;
  });
}

gfcs_status gfcs_dataset_item(const gfcs_dataset* data, size_t index, double* input, size_t len, int* label) {
  return guarded([&] {
    need(data, "dataset");
    gfcs::require(index < data->data.size(), "item index out of range");
    const auto& x = data->data.inputs[index];
    if (input) {
      gfcs::require(len == x.size(), "input buffer length does not match the item size");
      std::copy(x.begin(), x.end(), input);
    }
    if (label) *label = data->data.labels[index];
  });
}

// ---- models -----------------------------------------------------------------

gfcs_status gfcs_model_load(const char* path, gfcs_model** out) {
  return guarded([&] {
    need(path, "path");
    need(out, "out");
    *out = new gfcs_model{gfcs::load_model(path)};
  });
}

gfcs_status gfcs_model_save(const gfcs_model* model, const char* path) {
  return guarded([&] {
    need(model, "model");
    need(path, "path");
    gfcs::save_model(*model->net, path);
  });
}

void gfcs_model_free(gfcs_model* model) { delete model; }

gfcs_status gfcs_model_shape(const gfcs_model* model, size_t* h, size_t* w, size_t* c, size_t* classes) {
  return guarded([&] {
    need(model, "model");
    const gfcs::Shape s = model->net->input_shape();
    if (h) *h = s.height;
    if (w) *w = s.width;
    if (c) *c = s.channels;
    if (classes) *classes = model->net->num_classes();
  });
}

gfcs_status gfcs_model_forward(const gfcs_model* model, const double* x, size_t len, double* scores,
                               size_t classes) {
  return guarded([&] {
    need(model, "model");
    need(x, "x");
    need(scores, "scores");
    gfcs::require(classes == model->net->num_classes(), "score buffer length does not match the class count");
    const gfcs::Vector f = model->net->forward(gfcs::ConstSpan(x, len));
    std::copy(f.begin(), f.end(), scores);
  });
}

gfcs_status gfcs_model_weighted_gradient(const gfcs_model* model, const double* x, size_t len, const double* w,
                                         size_t classes, double* grad) {
  return guarded([&] {
    need(model, "model");
    need(x, "x");
    need(w, "w");
    need(grad, "grad");
    const gfcs::Vector g = model->net->weighted_input_gradient(gfcs::ConstSpan(x, len), gfcs::ConstSpan(w, classes));
    std::copy(g.begin(), g.end(), grad);
  });
}

void gfcs_train_params_default(gfcs_train_params* p) {
  if (!p) return;
  const gfcs::TrainSpec t;
  p->arch = "mlp";
  p->learning_rate = t.learning_rate;
  p->momentum = t.momentum;
  p->epochs = t.epochs;
  p->batch_size = t.batch_size;
  p->seed = t.seed;
  p->test_fraction = 0.2;
}

gfcs_status gfcs_train(const gfcs_dataset* data, const gfcs_train_params* p, gfcs_model** out,
                       gfcs_train_report* report) {
  return guarded([&] {
    need(data, "dataset");
    need(p, "params");
    need(out, "out");
    need(p->arch, "arch");
    gfcs::require(p->test_fraction >= 0.0 && p->test_fraction < 1.0, "test fraction must lie in [0, 1)");
    const auto& meta = data->data.meta;
    const gfcs::Architecture arch = gfcs::parse_architecture(p->arch, meta.shape, meta.classes);
    gfcs::TrainSpec spec;
    spec.learning_rate = p->learning_rate;
    spec.momentum = p->momentum;
    spec.epochs = p->epochs;
    spec.batch_size = p->batch_size;
    spec.seed = p->seed;
    auto [train, test] = gfcs::split_dataset(data->data, p->test_fraction, gfcs::mix_seed(p->seed, 3));
    gfcs::TrainedModel trained = gfcs::train_classifier(train, test, arch, spec);
    if (report) {
      report->train_accuracy = trained.report.train_accuracy;
      report->test_accuracy = trained.report.test_accuracy;
      report->final_loss = trained.report.final_loss;
      report->train_size = train.size();
      report->test_size = test.size();
    }
    *out = new gfcs_model{trained.model};
  });
}

// ---- attacks ----------------------------------------------------------------

gfcs_status gfcs_method_from_name(const char* name, gfcs_method* out) {
  return guarded([&] {
    need(name, "name");
    need(out, "out");
    *out = static_cast<gfcs_method>(static_cast<int>(gfcs::parse_method(name)));
  });
}

void gfcs_attack_params_default(gfcs_attack_params* p) {
  if (!p) return;
  *p = gfcs_attack_params{};
  p->method = GFCS_METHOD_GFCS;
  p->epsilon = gfcs::kDefaultEpsilon;
  p->nu = 0.0;
  p->budget = gfcs::kDefaultBudget;
  p->target = -1;
  p->box_lo = 0.0;
  p->box_hi = 1.0;
}

gfcs_status gfcs_attack_example(const gfcs_model* victim, const gfcs_model* const* surrogates, size_t n_surrogates,
                                const gfcs_dataset* data, size_t index, const gfcs_attack_params* p,
                                const char* trace_path, gfcs_attack_result* out) {
  return guarded([&] {
    need(victim, "victim");
    need(data, "dataset");
    need(p, "params");
    need(out, "out");
    gfcs::require(n_surrogates == 0 || surrogates != nullptr, "surrogate list is null");
    gfcs::require(p->method >= GFCS_METHOD_GFCS && p->method <= GFCS_METHOD_SIMBA_PCA_IMAGES, "unknown method");
    const auto method = static_cast<gfcs::Method>(static_cast<int>(p->method));
    const auto& items = data->data;
    items.validate();
    gfcs::require(index < items.size(), "example index out of range");

    const gfcs::ModelPtr model = victim->net;
    const gfcs::Shape shape = model->input_shape();
    const std::size_t classes = model->num_classes();
    gfcs::require(items.meta.shape.size() == shape.size(), "dataset does not match the victim's input size");

    gfcs::MethodResources res;
    res.dct_freq = p->dct_freq;
    res.dct_order = p->dct_random_order ? gfcs::BasisOrder::Random : gfcs::BasisOrder::LowFrequencyFirst;
    for (std::size_t i = 0; i < n_surrogates; ++i) {
      need(surrogates[i], "surrogate");
      auto adapted = gfcs::adapt_domain(surrogates[i]->net, shape);
      gfcs::require(adapted->num_classes() == classes, "surrogate class count differs from the victim's");
      res.surrogates.push_back(std::move(adapted));
    }
    if (gfcs::method_needs_surrogates(method))
      gfcs::require(!res.surrogates.empty(), std::string(gfcs::method_name(method)) + " needs surrogates");

    gfcs::AttackConfig cfg;
    cfg.epsilon = p->epsilon;
    cfg.nu = p->nu > 0.0 ? p->nu : gfcs::default_nu(shape.size());
    cfg.budget = p->budget;
    cfg.loss = p->log_loss ? gfcs::LossKind::TargetedLog : gfcs::LossKind::Margin;
    cfg.box = {p->box_enabled != 0, p->box_lo, p->box_hi};
    cfg.record_trace = trace_path != nullptr;

    const gfcs::Vector& x = items.inputs[index];
    const int label = items.labels[index];
    const gfcs::Vector scores = model->forward(x);
    if (gfcs::argmax(scores) != static_cast<std::size_t>(label))
      gfcs::fail(gfcs::ErrorCode::EmptySelection, "the victim misclassifies item " + std::to_string(index));

    const gfcs::RandomStream base(gfcs::mix_seed(p->seed, index));
    if (p->targeted) {
      if (p->target >= 0) {
        gfcs::require(static_cast<std::size_t>(p->target) < classes, "target class out of range");
        gfcs::require(p->target != label, "target class equals the true label");
        cfg.target = static_cast<std::size_t>(p->target);
      } else {
        gfcs::RandomStream ts = base.child(1);
        cfg.target = gfcs::pick_target_class(ts, static_cast<std::size_t>(label), classes);
      }
    }
    cfg.validate();

    std::optional<gfcs::FixedBasisSource> basis;
    const std::size_t pca_k = p->pca_k ? p->pca_k : std::min<std::size_t>(shape.size(), 100);
    if (method == gfcs::Method::SimbaPcaGradients) {
      std::vector<gfcs::Vector> samples;
      for (std::size_t i = 0; i < items.size(); ++i)
        if (i != index) samples.push_back(items.inputs[i]);
      gfcs::RandomStream ps(gfcs::mix_seed(p->seed, 0xfca));
      basis = gfcs::pca_gradient_basis(*res.surrogates.front(), samples, pca_k, ps);
    } else if (method == gfcs::Method::SimbaPcaImages) {
      basis = gfcs::image_pca_basis(items, std::min(pca_k, items.size()));
    }
    res.shared_basis = basis ? &*basis : nullptr;

    gfcs::RandomStream stream = base.child(2);
    gfcs::QueryOracle oracle(model, cfg.budget);
    const gfcs::AttackResult r = gfcs::run_method(method, res, oracle, x, scores, cfg, stream);

    if (trace_path) {
      std::ofstream f(trace_path, std::ios::trunc);
      if (!f) gfcs::fail(gfcs::ErrorCode::Io, std::string("cannot write '") + trace_path + "'");
      gfcs::write_trace(f, r.trace);
    }

    *out = gfcs_attack_result{};
    out->success = r.success ? 1 : 0;
    copy_name(out->reason, gfcs::failure_reason_name(r.reason));
    out->total_queries = r.total_queries;
    out->gradient_queries = r.gradient_queries;
    out->coimage_queries = r.coimage_queries;
    out->basis_queries = r.basis_queries;
    out->accepted_steps = r.accepted_steps;
    out->final_norm = r.final_norm;
    out->epsilon = cfg.epsilon;
    out->nu = cfg.nu;
    out->label = static_cast<size_t>(label);
    out->original_class = r.original_class;
    out->final_class = r.final_class;
    out->target = cfg.target ? static_cast<long>(*cfg.target) : -1;
  });
}

// ---- campaigns --------------------------------------------------------------

gfcs_status gfcs_campaign_run(const char* spec_path, size_t workers, gfcs_summary_callback callback, void* user) {
  return guarded([&] {
    need(spec_path, "spec path");
    gfcs::CampaignSpec spec = gfcs::load_campaign_spec(spec_path);
    if (workers > 0) spec.workers = workers;
    const auto runs = gfcs::run_campaign(spec);
    if (!callback) return;
    for (const auto& run : runs) {
      const auto s = gfcs::summarize(gfcs::method_name(run.method), run.records, spec.bootstrap);
      const gfcs_summary_row row = to_row(s.method, spec.attack.epsilon, s.median, s.success_rate, s.n);
      callback(&row, user);
    }
  });
}

gfcs_status gfcs_sweep_run(const char* spec_path, const double* epsilons, size_t count, size_t workers,
                           const char* out_csv, gfcs_summary_callback callback, void* user) {
  return guarded([&] {
    need(spec_path, "spec path");
    gfcs::require(count > 0 && epsilons != nullptr, "sweep needs at least one step length");
    gfcs::CampaignSpec spec = gfcs::load_campaign_spec(spec_path);
    if (workers > 0) spec.workers = workers;
    const auto inputs = gfcs::load_campaign_inputs(spec);
    const auto rows = gfcs::epsilon_sweep(spec, inputs, std::vector<double>(epsilons, epsilons + count));
    if (out_csv) gfcs::write_sweep_csv(out_csv, rows);
    if (!callback) return;
    for (const auto& r : rows) {
      const gfcs_summary_row row = to_row(r.method, r.epsilon, r.median, r.success_rate, r.n);
      callback(&row, user);
    }
  });
}

// ---- self-check -------------------------------------------------------------

gfcs_status gfcs_selfcheck(const char* const* model_paths, size_t count, gfcs_check_callback callback, void* user,
                           int* all_passed) {
  return guarded([&] {
    gfcs::require(count == 0 || model_paths != nullptr, "model path list is null");
    std::vector<std::string> paths;
    for (std::size_t i = 0; i < count; ++i) {
      need(model_paths[i], "model path");
      paths.emplace_back(model_paths[i]);
    }
    bool ok = true;
    for (const auto& c : gfcs::run_selfcheck(paths)) {
      ok = ok && c.passed;
      if (callback) callback(c.name.c_str(), c.passed ? 1 : 0, c.detail.c_str(), user);
    }
    if (all_passed) *all_passed = ok ? 1 : 0;
  });
}

}  // extern "C"
