#pragma once

#include <string>
#include <vector>

#include "ordering.hpp"
#include "synthgen.hpp"

namespace gco {

// One benchmarked method: ordering options plus an optional
// mean-aggregation preprocessing step (the DirectLiNGAM-on-means baseline).
// `oracle` is a test seam bypassing estimation entirely.
struct MethodConfig {
  std::string label;
  OrderingOptions opts;
  bool mean_aggregate = false;
  enum class Oracle { none, truth, reversed } oracle = Oracle::none;
};

struct BenchConfig {
  GenConfig family;  // family.seed is ignored; per-trial seeds are derived
  std::vector<int> sample_sizes;
  int trials = 1;
  std::vector<MethodConfig> methods;
  std::uint64_t seed = 0;
  int threads = 0;   // 0 = hardware concurrency
  bool timing = true;  // false: report 0 seconds (bit-reproducible output)

  void validate() const;
};

struct BenchCell {
  std::string method;
  int sample_size = 0;
  int subgroup_size = 0;  // 0 = full groups
  double error_rate = 0.0;
  int trials = 0;
  double seconds = 0.0;  // wall clock, summed over trials
  std::vector<double> per_trial_error;
  std::vector<std::string> per_trial_diagnostic;  // empty string = ok
};

struct BenchReport {
  std::vector<BenchCell> cells;
  double guess_baseline = 0.5;  // error rate of a uniformly random order
};

// Fraction of unordered group pairs {i, j} whose relative order disagrees
// between the two orders (normalized Kendall-tau distance).
double pairwise_order_error(const CausalOrder& estimated,
                            const CausalOrder& truth);

// Monte-Carlo benchmark: per trial, generate a model, sample it at every
// sample size, run every method, score against the ground truth. A failing
// method counts as a 0.5 guess for that trial with a recorded diagnostic.
// Results are deterministic for a given seed regardless of scheduling.
BenchReport run_bench(const BenchConfig& cfg);

// Runs the benchmark once per subgroup size (single subset, N = 1); cells
// are keyed by the subgroup_size column.
BenchReport subgroup_size_sweep(const BenchConfig& cfg,
                                const std::vector<int>& sizes);

// CSV: method,sample_size,subgroup_size,error_rate,trials,seconds.
std::string report_to_csv(const BenchReport& report);
std::string report_to_json(const BenchReport& report);

// Parses the benchmark config schema (schema_version 1); also honors an
// optional "subgroup_sweep_sizes" array through run_bench_from_json.
BenchConfig bench_config_from_json(const std::string& text,
                                   std::vector<int>* sweep_sizes = nullptr);
BenchReport run_bench_from_json(const std::string& text);

}  // namespace gco
