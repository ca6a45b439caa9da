// grouporder CLI: estimate causal orders among groups of variables, sample
// synthetic models, and run Monte-Carlo benchmarks. Thin shell over the
// grouporder C API; all file parsing stays on this side.

#include <cstdint>
#include <cstdio>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "csv_io.hpp"
#include "grouporder.h"
#include "json.hpp"

namespace {

using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitInput = 2;
constexpr int kExitNumerical = 3;

// Input-phase API failures (building datasets, parsing configs) are input
// errors; estimation-phase failures are numerical errors.
int exit_code_for(gco_status status, bool estimating) {
  if (status == GCO_OK) return kExitOk;
  if (!estimating) return kExitInput;
  switch (status) {
    case GCO_ERR_INVALID_ARGUMENT:
    case GCO_ERR_PARSE:
      return kExitInput;
    default:
      return kExitNumerical;
  }
}

[[noreturn]] void die(int code, const std::string& message) {
  std::cerr << "error: " << message << "\n";
  std::exit(code);
}

void check(gco_status status, bool estimating) {
  if (status == GCO_OK) return;
  die(exit_code_for(status, estimating),
      std::string(gco_status_name(status)) + ": " + gco_last_error());
}

struct DatasetHandle {
  gco_dataset* ptr = nullptr;
  ~DatasetHandle() { gco_dataset_destroy(ptr); }
};

struct ModelHandle {
  gco_model* ptr = nullptr;
  ~ModelHandle() { gco_model_destroy(ptr); }
};

struct TraceHandle {
  gco_trace* ptr = nullptr;
  ~TraceHandle() { gco_trace_destroy(ptr); }
};

struct ApiString {
  char* ptr = nullptr;
  ~ApiString() { gco_string_free(ptr); }
};

gco_method method_code(const std::string& name) {
  if (name == "gdl-hsic") return GCO_METHOD_GDL_HSIC;
  if (name == "gdl-nlcorr") return GCO_METHOD_GDL_NLCORR;
  if (name == "pairwise") return GCO_METHOD_PAIRWISE;
  if (name == "naive-pairwise") return GCO_METHOD_NAIVE_PAIRWISE;
  if (name == "trace") return GCO_METHOD_TRACE;
  die(kExitInput, "unknown method '" + name +
                      "' (expected gdl-hsic|gdl-nlcorr|pairwise|"
                      "naive-pairwise|trace)");
}

int cmd_order(const std::vector<std::string>& data_paths,
              const std::string& groups_path, const std::string& method,
              double lambda, bool cv_lambda, int subgroup_size, int subsets,
              std::uint64_t seed, const std::string& json_path,
              bool multiset) {
  if (data_paths.size() > 1 && !multiset) {
    die(kExitInput, "multiple data files require --multiset");
  }

  gco_cli::GroupSpec spec = gco_cli::read_group_spec(groups_path);
  std::vector<std::unique_ptr<DatasetHandle>> handles;
  for (const std::string& path : data_paths) {
    const gco_cli::CsvTable table = gco_cli::read_csv(path);
    const gco_cli::GroupedInput input = gco_cli::arrange_by_groups(table, spec);
    auto handle = std::make_unique<DatasetHandle>();
    check(gco_dataset_create(input.values.data(),
                             static_cast<int32_t>(input.row_names.size()),
                             input.samples, input.group_sizes.data(),
                             static_cast<int32_t>(input.group_sizes.size()),
                             &handle->ptr),
          /*estimating=*/false);
    handles.push_back(std::move(handle));
  }

  gco_order_options options;
  gco_order_options_init(&options);
  options.method = method_code(method);
  options.lambda = lambda;
  options.cv_lambda = cv_lambda ? 1 : 0;
  options.subgroup_size = subgroup_size;
  options.subset_count = subsets;
  options.seed = seed;

  std::vector<const gco_dataset*> raw;
  for (const auto& h : handles) raw.push_back(h->ptr);
  TraceHandle trace;
  check(gco_estimate_order(raw.data(), static_cast<int32_t>(raw.size()),
                           &options, &trace.ptr),
        /*estimating=*/true);

  const int32_t num_groups = gco_trace_group_count(trace.ptr);
  std::vector<int32_t> order(static_cast<std::size_t>(num_groups));
  check(gco_trace_order(trace.ptr, order.data()), true);
  auto label_of = [&](int32_t id) { return spec.labels[static_cast<std::size_t>(id - 1)]; };

  std::cout << "estimated causal order (most exogenous first):";
  for (int32_t id : order) std::cout << ' ' << label_of(id);
  std::cout << "\n";

  json trace_json;
  trace_json["schema_version"] = 1;
  trace_json["method"] = method;
  trace_json["options"] = {{"lambda", lambda},
                           {"cv_lambda", cv_lambda},
                           {"subgroup_size", subgroup_size},
                           {"subsets", subsets},
                           {"seed", seed},
                           {"multiset", multiset}};
  json order_ids = json::array();
  json order_labels = json::array();
  for (int32_t id : order) {
    order_ids.push_back(id);
    order_labels.push_back(label_of(id));
  }
  trace_json["order_ids"] = std::move(order_ids);
  trace_json["order_labels"] = std::move(order_labels);
  json iterations = json::array();

  const int32_t iteration_count = gco_trace_iteration_count(trace.ptr);
  std::vector<int32_t> ids(static_cast<std::size_t>(num_groups));
  std::vector<double> scores(static_cast<std::size_t>(num_groups));
  for (int32_t it = 0; it < iteration_count; ++it) {
    int32_t count = 0;
    int32_t chosen = 0;
    check(gco_trace_iteration(trace.ptr, it, ids.data(), scores.data(),
                              &count, &chosen),
          true);
    std::cout << "iteration " << it + 1 << ": chose " << label_of(chosen)
              << "; scores:";
    json candidates = json::array();
    for (int32_t c = 0; c < count; ++c) {
      std::cout << ' ' << label_of(ids[static_cast<std::size_t>(c)]) << '='
                << scores[static_cast<std::size_t>(c)];
      candidates.push_back({{"id", ids[static_cast<std::size_t>(c)]},
                            {"label", label_of(ids[static_cast<std::size_t>(c)])},
                            {"score", scores[static_cast<std::size_t>(c)]}});
    }
    std::cout << "\n";
    iterations.push_back({{"iteration", it + 1},
                          {"chosen_id", chosen},
                          {"chosen_label", label_of(chosen)},
                          {"scores", std::move(candidates)}});
  }
  trace_json["iterations"] = std::move(iterations);

  if (!json_path.empty()) {
    gco_cli::write_text_file(json_path, trace_json.dump(2) + "\n");
  }
  return kExitOk;
}

int cmd_simulate(const std::string& config_path, std::int64_t samples,
                 std::uint64_t seed, const std::string& prefix) {
  const std::string config_text = gco_cli::read_text_file(config_path);

  ModelHandle model;
  check(gco_model_generate(config_text.c_str(), &model.ptr), false);

  ApiString spec_json;
  check(gco_model_to_json(model.ptr, &spec_json.ptr), false);
  gco_cli::write_text_file(prefix + "spec.json",
                           std::string(spec_json.ptr) + "\n");

  const int32_t num_groups = gco_model_group_count(model.ptr);
  std::vector<int32_t> truth(static_cast<std::size_t>(num_groups));
  DatasetHandle data;
  check(gco_model_sample(model.ptr, samples, seed, &data.ptr, truth.data()),
        false);

  std::vector<int32_t> sizes(static_cast<std::size_t>(num_groups));
  check(gco_dataset_group_sizes(data.ptr, sizes.data()), false);
  const int32_t total_rows = gco_dataset_total_rows(data.ptr);
  std::vector<double> values(static_cast<std::size_t>(total_rows) *
                             static_cast<std::size_t>(samples));
  check(gco_dataset_values(data.ptr, values.data()), false);

  // Variable names g<group>_v<k>; groups file mirrors the layout.
  std::vector<std::string> names;
  std::string groups_text;
  {
    int row = 0;
    for (int32_t g = 0; g < num_groups; ++g) {
      groups_text += "group g" + std::to_string(g + 1) + ":";
      for (int32_t k = 0; k < sizes[static_cast<std::size_t>(g)]; ++k) {
        const std::string name =
            "g" + std::to_string(g + 1) + "_v" + std::to_string(k + 1);
        names.push_back(name);
        groups_text += " " + name;
        ++row;
      }
      groups_text += "\n";
    }
    (void)row;
  }
  std::vector<std::vector<double>> rows(
      static_cast<std::size_t>(total_rows),
      std::vector<double>(static_cast<std::size_t>(samples)));
  for (int32_t r = 0; r < total_rows; ++r) {
    for (std::int64_t s = 0; s < samples; ++s) {
      rows[static_cast<std::size_t>(r)][static_cast<std::size_t>(s)] =
          values[static_cast<std::size_t>(r) * static_cast<std::size_t>(samples) +
                 static_cast<std::size_t>(s)];
    }
  }
  gco_cli::write_csv(prefix + "data.csv", names, rows);
  gco_cli::write_text_file(prefix + "groups.spec", groups_text);

  json truth_json;
  truth_json["schema_version"] = 1;
  json order_ids = json::array();
  json order_labels = json::array();
  for (int32_t id : truth) {
    order_ids.push_back(id);
    order_labels.push_back("g" + std::to_string(id));
  }
  truth_json["order_ids"] = std::move(order_ids);
  truth_json["order_labels"] = std::move(order_labels);
  truth_json["samples"] = samples;
  truth_json["sample_seed"] = seed;
  gco_cli::write_text_file(prefix + "truth.json", truth_json.dump(2) + "\n");

  std::cout << "wrote " << prefix << "data.csv, " << prefix << "truth.json, "
            << prefix << "spec.json, " << prefix << "groups.spec\n";
  return kExitOk;
}

int cmd_bench(const std::string& config_path, const std::string& out_path,
              const std::string& json_path) {
  const std::string config_text = gco_cli::read_text_file(config_path);
  ApiString csv, report_json;
  check(gco_bench_run(config_text.c_str(), &csv.ptr,
                      json_path.empty() ? nullptr : &report_json.ptr),
        false);
  gco_cli::write_text_file(out_path, csv.ptr);
  if (!json_path.empty()) {
    gco_cli::write_text_file(json_path, std::string(report_json.ptr) + "\n");
  }
  std::cout << "wrote " << out_path << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "grouporder: causal ordering among groups of variables in linear "
      "models"};
  app.require_subcommand(1);

  // order
  auto* order = app.add_subcommand(
      "order", "Estimate a causal order from grouped CSV data");
  std::vector<std::string> data_paths;
  std::string groups_path, method = "pairwise", json_path;
  double lambda = 0.0;
  bool cv_lambda = false, multiset = false;
  int subgroup_size = 0, subsets = 0;
  std::uint64_t seed = 0;
  order->add_option("data", data_paths, "CSV data file(s), samples as rows")
      ->required();
  order->add_option("--groups", groups_path, "group spec file")->required();
  order->add_option("--method", method,
                    "gdl-hsic|gdl-nlcorr|pairwise|naive-pairwise|trace");
  order->add_option("--lambda", lambda, "ridge regularization (0 = OLS)");
  order->add_flag("--cv-lambda", cv_lambda,
                  "pick lambda by 10-fold cross validation");
  order->add_option("--subgroup-size", subgroup_size,
                    "score on random variable subsets of this size");
  order->add_option("--subsets", subsets, "number of pooled subsets N");
  order->add_option("--seed", seed, "random seed");
  order->add_option("--json", json_path, "write a JSON trace to this path");
  order->add_flag("--multiset", multiset,
                  "pool scores across multiple data files");

  // simulate
  auto* simulate = app.add_subcommand(
      "simulate", "Generate a random model and sample a dataset");
  std::string gen_config, prefix;
  std::int64_t samples = 0;
  std::uint64_t sim_seed = 0;
  simulate->add_option("config", gen_config, "generator config JSON")
      ->required();
  simulate->add_option("--samples", samples, "number of observations")
      ->required();
  simulate->add_option("--seed", sim_seed, "sampling seed");
  simulate->add_option("--out", prefix, "output path prefix")->required();

  // bench
  auto* bench = app.add_subcommand(
      "bench", "Run the Monte-Carlo benchmark from a config file");
  std::string bench_config, bench_out, bench_json;
  bench->add_option("config", bench_config, "benchmark config JSON")
      ->required();
  bench->add_option("--out", bench_out, "CSV report path")->required();
  bench->add_option("--json", bench_json, "JSON report path (per-trial detail)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  }

  try {
    if (order->parsed()) {
      return cmd_order(data_paths, groups_path, method, lambda, cv_lambda,
                       subgroup_size, subsets, seed, json_path, multiset);
    }
    if (simulate->parsed()) {
      return cmd_simulate(gen_config, samples, sim_seed, prefix);
    }
    if (bench->parsed()) {
      return cmd_bench(bench_config, bench_out, bench_json);
    }
  } catch (const gco_cli::InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  }
  return kExitOk;
}
