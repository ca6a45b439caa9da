#include "grouporder.h"

#include <cstdlib>
#include <cstring>
#include <string>

#include "bench.hpp"
#include "ordering.hpp"
#include "synthgen.hpp"

struct gco_dataset {
  gco::GroupedDataMatrix data;
};

struct gco_model {
  gco::ModelSpec spec;
};

struct gco_trace {
  gco::OrderingTrace trace;
};

namespace {

thread_local std::string g_last_error;

gco_status status_of(gco::ErrorCode code) {
  using gco::ErrorCode;
  switch (code) {
    case ErrorCode::invalid_argument:
      return GCO_ERR_INVALID_ARGUMENT;
    case ErrorCode::singular_regressors:
      return GCO_ERR_SINGULAR;
    case ErrorCode::degenerate_variable:
      return GCO_ERR_DEGENERATE;
    case ErrorCode::sample_too_small:
      return GCO_ERR_SAMPLE_TOO_SMALL;
    case ErrorCode::no_effect:
      return GCO_ERR_NO_EFFECT;
    case ErrorCode::parse_error:
      return GCO_ERR_PARSE;
    case ErrorCode::internal:
      return GCO_ERR_INTERNAL;
  }
  return GCO_ERR_INTERNAL;
}

template <typename Fn>
gco_status guarded(Fn&& fn) {
  try {
    fn();
    g_last_error.clear();
    return GCO_OK;
  } catch (const gco::Error& e) {
    g_last_error = e.what();
    return status_of(e.code());
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return GCO_ERR_INTERNAL;
  } catch (...) {
    g_last_error = "unknown error";
    return GCO_ERR_INTERNAL;
  }
}

gco_status invalid(const char* message) {
  g_last_error = message;
  return GCO_ERR_INVALID_ARGUMENT;
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out) std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

gco::OrderingOptions convert_options(const gco_order_options& o) {
  gco::OrderingOptions opts;
  switch (o.method) {
    case GCO_METHOD_GDL_HSIC:
      opts.method = gco::Method::gdl_hsic;
      break;
    case GCO_METHOD_GDL_NLCORR:
      opts.method = gco::Method::gdl_nlcorr;
      break;
    case GCO_METHOD_PAIRWISE:
      opts.method = gco::Method::pairwise;
      break;
    case GCO_METHOD_NAIVE_PAIRWISE:
      opts.method = gco::Method::naive_pairwise;
      break;
    case GCO_METHOD_TRACE:
      opts.method = gco::Method::trace;
      break;
    default:
      gco::fail(gco::ErrorCode::invalid_argument,
                "unknown method code " + std::to_string(o.method));
  }
  gco::require(o.lambda >= 0.0, gco::ErrorCode::invalid_argument,
               "lambda must be >= 0");
  gco::require(o.subgroup_size >= 0 && o.subset_count >= 0,
               gco::ErrorCode::invalid_argument,
               "subgroup_size and subset_count must be >= 0");
  opts.lambda = o.lambda;
  opts.cv_lambda = o.cv_lambda != 0;
  if (o.subgroup_size > 0) opts.subgroup_size = o.subgroup_size;
  if (o.subset_count > 0) opts.subset_count = o.subset_count;
  opts.seed = o.seed;
  return opts;
}

}  // namespace

extern "C" {

const char* gco_last_error(void) { return g_last_error.c_str(); }

const char* gco_status_name(gco_status status) {
  switch (status) {
    case GCO_OK:
      return "ok";
    case GCO_ERR_INVALID_ARGUMENT:
      return "invalid argument";
    case GCO_ERR_SINGULAR:
      return "singular regressors";
    case GCO_ERR_DEGENERATE:
      return "degenerate variable";
    case GCO_ERR_SAMPLE_TOO_SMALL:
      return "sample too small";
    case GCO_ERR_NO_EFFECT:
      return "no effect";
    case GCO_ERR_PARSE:
      return "parse error";
    case GCO_ERR_INTERNAL:
      return "internal error";
  }
  return "?";
}

gco_status gco_dataset_create(const double* values, int32_t total_rows,
                              int64_t samples, const int32_t* group_sizes,
                              int32_t group_count, gco_dataset** out) {
  if (!values || !group_sizes || !out) return invalid("null argument");
  *out = nullptr;
  return guarded([&]() {
    gco::require(total_rows >= 1 && samples >= 1 && group_count >= 1,
                 gco::ErrorCode::invalid_argument,
                 "dimensions must be positive");
    std::vector<int> sizes(group_sizes, group_sizes + group_count);
    gco::Matrix m(total_rows, static_cast<int>(samples));
    for (int r = 0; r < total_rows; ++r) {
      for (int64_t c = 0; c < samples; ++c) {
        m(r, static_cast<int>(c)) = values[static_cast<std::size_t>(r) *
                                               static_cast<std::size_t>(samples) +
                                           static_cast<std::size_t>(c)];
      }
    }
    *out = new gco_dataset{
        gco::GroupedDataMatrix(std::move(m), gco::GroupLayout::of_sizes(sizes))};
  });
}

void gco_dataset_destroy(gco_dataset* dataset) { delete dataset; }

int32_t gco_dataset_group_count(const gco_dataset* dataset) {
  return dataset ? dataset->data.group_count() : 0;
}

int32_t gco_dataset_total_rows(const gco_dataset* dataset) {
  return dataset ? static_cast<int32_t>(dataset->data.values().rows()) : 0;
}

int64_t gco_dataset_sample_count(const gco_dataset* dataset) {
  return dataset ? dataset->data.sample_count() : 0;
}

gco_status gco_dataset_group_sizes(const gco_dataset* dataset, int32_t* out) {
  if (!dataset || !out) return invalid("null argument");
  const auto& sizes = dataset->data.layout().sizes;
  for (std::size_t g = 0; g < sizes.size(); ++g) {
    out[g] = sizes[g];
  }
  return GCO_OK;
}

gco_status gco_dataset_values(const gco_dataset* dataset, double* out) {
  if (!dataset || !out) return invalid("null argument");
  const gco::Matrix& m = dataset->data.values();
  for (int r = 0; r < m.rows(); ++r) {
    for (int c = 0; c < m.cols(); ++c) {
      out[static_cast<std::size_t>(r) * static_cast<std::size_t>(m.cols()) +
          static_cast<std::size_t>(c)] = m(r, c);
    }
  }
  return GCO_OK;
}

void gco_order_options_init(gco_order_options* options) {
  if (!options) return;
  options->method = GCO_METHOD_PAIRWISE;
  options->lambda = 0.0;
  options->cv_lambda = 0;
  options->subgroup_size = 0;
  options->subset_count = 0;
  options->seed = 0;
}

gco_status gco_estimate_order(const gco_dataset* const* datasets,
                              int32_t dataset_count,
                              const gco_order_options* options,
                              gco_trace** out) {
  if (!datasets || !options || !out) return invalid("null argument");
  if (dataset_count < 1) return invalid("need at least one dataset");
  *out = nullptr;
  return guarded([&]() {
    std::vector<gco::GroupedDataMatrix> inputs;
    inputs.reserve(static_cast<std::size_t>(dataset_count));
    for (int32_t d = 0; d < dataset_count; ++d) {
      gco::require(datasets[d] != nullptr, gco::ErrorCode::invalid_argument,
                   "null dataset handle");
      inputs.push_back(datasets[d]->data);
    }
    *out = new gco_trace{
        gco::estimate_order(inputs, convert_options(*options))};
  });
}

int32_t gco_trace_group_count(const gco_trace* trace) {
  return trace ? static_cast<int32_t>(trace->trace.order.order.size()) : 0;
}

int32_t gco_trace_iteration_count(const gco_trace* trace) {
  return trace ? static_cast<int32_t>(trace->trace.iterations.size()) : 0;
}

gco_status gco_trace_order(const gco_trace* trace, int32_t* out) {
  if (!trace || !out) return invalid("null argument");
  for (std::size_t i = 0; i < trace->trace.order.order.size(); ++i) {
    out[i] = trace->trace.order.order[i];
  }
  return GCO_OK;
}

gco_status gco_trace_iteration(const gco_trace* trace, int32_t iteration,
                               int32_t* candidate_ids, double* scores,
                               int32_t* out_count, int32_t* out_chosen) {
  if (!trace || !candidate_ids || !scores || !out_count || !out_chosen) {
    return invalid("null argument");
  }
  if (iteration < 0 ||
      iteration >= static_cast<int32_t>(trace->trace.iterations.size())) {
    return invalid("iteration index out of range");
  }
  const gco::ExogeneityScores& s =
      trace->trace.iterations[static_cast<std::size_t>(iteration)];
  int32_t n = 0;
  for (const auto& [id, mu] : s.scores) {
    candidate_ids[n] = id;
    scores[n] = mu;
    ++n;
  }
  *out_count = n;
  *out_chosen = s.chosen;
  return GCO_OK;
}

void gco_trace_destroy(gco_trace* trace) { delete trace; }

gco_status gco_model_generate(const char* gen_config_json, gco_model** out) {
  if (!gen_config_json || !out) return invalid("null argument");
  *out = nullptr;
  return guarded([&]() {
    *out = new gco_model{
        gco::generate_model(gco::gen_config_from_json(gen_config_json))};
  });
}

gco_status gco_model_parse(const char* model_json, gco_model** out) {
  if (!model_json || !out) return invalid("null argument");
  *out = nullptr;
  return guarded([&]() {
    *out = new gco_model{gco::model_from_json(model_json)};
  });
}

gco_status gco_model_to_json(const gco_model* model, char** out_json) {
  if (!model || !out_json) return invalid("null argument");
  *out_json = nullptr;
  return guarded([&]() {
    *out_json = dup_string(gco::model_to_json(model->spec));
    gco::require(*out_json != nullptr, gco::ErrorCode::internal,
                 "out of memory");
  });
}

int32_t gco_model_group_count(const gco_model* model) {
  return model ? model->spec.layout.group_count() : 0;
}

int32_t gco_model_total_rows(const gco_model* model) {
  return model ? model->spec.layout.total_variables() : 0;
}

gco_status gco_model_group_sizes(const gco_model* model, int32_t* out) {
  if (!model || !out) return invalid("null argument");
  const auto& sizes = model->spec.layout.sizes;
  for (std::size_t g = 0; g < sizes.size(); ++g) out[g] = sizes[g];
  return GCO_OK;
}

gco_status gco_model_sample(const gco_model* model, int64_t samples,
                            uint64_t seed, gco_dataset** out_data,
                            int32_t* out_truth_order) {
  if (!model || !out_data || !out_truth_order) return invalid("null argument");
  *out_data = nullptr;
  return guarded([&]() {
    gco::require(samples <= (1LL << 31) - 1, gco::ErrorCode::invalid_argument,
                 "sample count too large");
    gco::SampleResult r =
        gco::sample_data(model->spec, static_cast<int>(samples), seed);
    for (std::size_t i = 0; i < r.truth.order.size(); ++i) {
      out_truth_order[i] = r.truth.order[i];
    }
    *out_data = new gco_dataset{std::move(r.data)};
  });
}

void gco_model_destroy(gco_model* model) { delete model; }

gco_status gco_bench_run(const char* bench_config_json, char** out_csv,
                         char** out_json) {
  if (!bench_config_json || !out_csv) return invalid("null argument");
  *out_csv = nullptr;
  if (out_json) *out_json = nullptr;
  return guarded([&]() {
    const gco::BenchReport report =
        gco::run_bench_from_json(bench_config_json);
    *out_csv = dup_string(gco::report_to_csv(report));
    gco::require(*out_csv != nullptr, gco::ErrorCode::internal,
                 "out of memory");
    if (out_json) {
      *out_json = dup_string(gco::report_to_json(report));
      gco::require(*out_json != nullptr, gco::ErrorCode::internal,
                   "out of memory");
    }
  });
}

void gco_string_free(char* text) { std::free(text); }

}  // extern "C"
