#include "bench.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <thread>

#include "json.hpp"
#include "rng.hpp"

namespace gco {

namespace {

using nlohmann::json;

std::string default_label(const MethodConfig& mc) {
  std::string label = method_name(mc.opts.method);
  if (mc.mean_aggregate) label += "+mean";
  if (mc.opts.subgroup_size) {
    label += "+sub" + std::to_string(*mc.opts.subgroup_size) + "x" +
             std::to_string(mc.opts.subset_count.value_or(1));
  }
  if (mc.opts.cv_lambda)
    label += "+l2cv";
  else if (mc.opts.lambda > 0.0)
    label += "+l2";
  return label;
}

struct TrialOutcome {
  double error = 0.5;
  double seconds = 0.0;
  std::string diagnostic;
};

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

}  // namespace

void BenchConfig::validate() const {
  family.validate();
  require(trials >= 1, ErrorCode::invalid_argument, "trials must be >= 1");
  require(!sample_sizes.empty(), ErrorCode::invalid_argument,
          "need at least one sample size");
  for (int m : sample_sizes) {
    require(m >= 2, ErrorCode::invalid_argument,
            "sample sizes must be >= 2");
  }
  require(!methods.empty(), ErrorCode::invalid_argument,
          "need at least one method");
}

double pairwise_order_error(const CausalOrder& estimated,
                            const CausalOrder& truth) {
  validate_order(estimated, truth.order);
  require(truth.order.size() >= 2, ErrorCode::invalid_argument,
          "need at least 2 groups");
  // Ids need not be contiguous, so map them to positions.
  std::map<int, int> pe;
  for (std::size_t p = 0; p < estimated.order.size(); ++p) {
    pe[estimated.order[p]] = static_cast<int>(p);
  }
  int mistakes = 0;
  int pairs = 0;
  for (std::size_t a = 0; a < truth.order.size(); ++a) {
    for (std::size_t b = a + 1; b < truth.order.size(); ++b) {
      ++pairs;
      // truth says order[a] is prior to order[b].
      if (pe.at(truth.order[a]) > pe.at(truth.order[b])) ++mistakes;
    }
  }
  return static_cast<double>(mistakes) / static_cast<double>(pairs);
}

BenchReport run_bench(const BenchConfig& cfg) {
  cfg.validate();
  const int n_sizes = static_cast<int>(cfg.sample_sizes.size());
  const int n_methods = static_cast<int>(cfg.methods.size());

  // outcomes[trial][size][method]
  std::vector<std::vector<std::vector<TrialOutcome>>> outcomes(
      static_cast<std::size_t>(cfg.trials),
      std::vector<std::vector<TrialOutcome>>(
          static_cast<std::size_t>(n_sizes),
          std::vector<TrialOutcome>(static_cast<std::size_t>(n_methods))));

  auto run_trial = [&](int trial) {
    GenConfig family = cfg.family;
    family.seed = derive_seed(cfg.seed, {0xda7aULL,
                                         static_cast<std::uint64_t>(trial)});
    const ModelSpec model = generate_model(family);
    for (int si = 0; si < n_sizes; ++si) {
      const SampleResult sample = sample_data(
          model, cfg.sample_sizes[static_cast<std::size_t>(si)],
          derive_seed(cfg.seed, {0xda7aULL, static_cast<std::uint64_t>(trial),
                                 static_cast<std::uint64_t>(si)}));
      for (int mi = 0; mi < n_methods; ++mi) {
        const MethodConfig& mc = cfg.methods[static_cast<std::size_t>(mi)];
        TrialOutcome& out =
            outcomes[static_cast<std::size_t>(trial)]
                    [static_cast<std::size_t>(si)]
                    [static_cast<std::size_t>(mi)];
        const auto start = std::chrono::steady_clock::now();
        try {
          CausalOrder estimated;
          if (mc.oracle == MethodConfig::Oracle::truth) {
            estimated = sample.truth;
          } else if (mc.oracle == MethodConfig::Oracle::reversed) {
            estimated = sample.truth;
            std::reverse(estimated.order.begin(), estimated.order.end());
          } else {
            OrderingOptions opts = mc.opts;
            opts.seed = derive_seed(
                cfg.seed, {0x3e740dULL, static_cast<std::uint64_t>(trial),
                           static_cast<std::uint64_t>(si),
                           static_cast<std::uint64_t>(mi)});
            const OrderingTrace trace =
                mc.mean_aggregate
                    ? estimate_order(mean_aggregate(sample.data), opts)
                    : estimate_order(sample.data, opts);
            estimated = trace.order;
          }
          out.error = pairwise_order_error(estimated, sample.truth);
        } catch (const std::exception& e) {
          out.error = 0.5;
          out.diagnostic = e.what();
        }
        out.seconds = std::chrono::duration<double>(
                          std::chrono::steady_clock::now() - start)
                          .count();
      }
    }
  };

  int workers = cfg.threads > 0
                    ? cfg.threads
                    : static_cast<int>(std::thread::hardware_concurrency());
  workers = std::max(1, std::min(workers, cfg.trials));
  if (workers == 1) {
    for (int t = 0; t < cfg.trials; ++t) run_trial(t);
  } else {
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&]() {
        for (int t = next.fetch_add(1); t < cfg.trials;
             t = next.fetch_add(1)) {
          run_trial(t);
        }
      });
    }
    for (auto& th : pool) th.join();
  }

  // Deterministic reduce in (size, method, trial) order.
  BenchReport report;
  for (int si = 0; si < n_sizes; ++si) {
    for (int mi = 0; mi < n_methods; ++mi) {
      const MethodConfig& mc = cfg.methods[static_cast<std::size_t>(mi)];
      BenchCell cell;
      cell.method = mc.label.empty() ? default_label(mc) : mc.label;
      cell.sample_size = cfg.sample_sizes[static_cast<std::size_t>(si)];
      cell.subgroup_size = mc.opts.subgroup_size.value_or(0);
      cell.trials = cfg.trials;
      double sum = 0.0;
      for (int t = 0; t < cfg.trials; ++t) {
        const TrialOutcome& out = outcomes[static_cast<std::size_t>(t)]
                                          [static_cast<std::size_t>(si)]
                                          [static_cast<std::size_t>(mi)];
        sum += out.error;
        if (cfg.timing) cell.seconds += out.seconds;
        cell.per_trial_error.push_back(out.error);
        cell.per_trial_diagnostic.push_back(out.diagnostic);
      }
      cell.error_rate = sum / static_cast<double>(cfg.trials);
      report.cells.push_back(std::move(cell));
    }
  }
  return report;
}

BenchReport subgroup_size_sweep(const BenchConfig& cfg,
                                const std::vector<int>& sizes) {
  require(!sizes.empty(), ErrorCode::invalid_argument,
          "subgroup sweep needs at least one size");
  const int min_size = *std::min_element(cfg.family.group_sizes.begin(),
                                         cfg.family.group_sizes.end());
  for (int s : sizes) {
    require(s >= 1 && s <= min_size, ErrorCode::invalid_argument,
            "sweep size " + std::to_string(s) + " not in [1, " +
                std::to_string(min_size) + "]");
  }
  BenchReport merged;
  for (int s : sizes) {
    BenchConfig sized = cfg;
    for (MethodConfig& mc : sized.methods) {
      mc.opts.subgroup_size = s;
      mc.opts.subset_count = 1;
      if (mc.label.empty()) mc.label = default_label(mc);
    }
    BenchReport part = run_bench(sized);
    for (BenchCell& cell : part.cells) {
      merged.cells.push_back(std::move(cell));
    }
  }
  return merged;
}

std::string report_to_csv(const BenchReport& report) {
  std::string out = "method,sample_size,subgroup_size,error_rate,trials,seconds\n";
  for (const BenchCell& cell : report.cells) {
    out += cell.method;
    out += ',' + std::to_string(cell.sample_size);
    out += ',' + std::to_string(cell.subgroup_size);
    out += ',' + format_double(cell.error_rate);
    out += ',' + std::to_string(cell.trials);
    out += ',' + format_double(cell.seconds);
    out += '\n';
  }
  return out;
}

std::string report_to_json(const BenchReport& report) {
  json j;
  j["schema_version"] = 1;
  j["guess_baseline"] = report.guess_baseline;
  json cells = json::array();
  for (const BenchCell& cell : report.cells) {
    json c;
    c["method"] = cell.method;
    c["sample_size"] = cell.sample_size;
    c["subgroup_size"] = cell.subgroup_size;
    c["error_rate"] = cell.error_rate;
    c["trials"] = cell.trials;
    c["seconds"] = cell.seconds;
    json per_trial = json::array();
    for (std::size_t t = 0; t < cell.per_trial_error.size(); ++t) {
      json entry;
      entry["trial"] = t;
      entry["error"] = cell.per_trial_error[t];
      if (!cell.per_trial_diagnostic[t].empty()) {
        entry["diagnostic"] = cell.per_trial_diagnostic[t];
      }
      per_trial.push_back(std::move(entry));
    }
    c["per_trial"] = std::move(per_trial);
    cells.push_back(std::move(c));
  }
  j["cells"] = std::move(cells);
  return j.dump(2);
}

BenchConfig bench_config_from_json(const std::string& text,
                                   std::vector<int>* sweep_sizes) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    fail(ErrorCode::parse_error,
         std::string("invalid bench config: ") + e.what());
  }
  try {
    require(!j.contains("schema_version") ||
                j.at("schema_version").get<int>() == 1,
            ErrorCode::parse_error, "unsupported schema_version");
    BenchConfig cfg;
    const json& family = j.at("family");
    cfg.family.group_sizes = family.at("group_sizes").get<std::vector<int>>();
    cfg.family.sparsity = family.at("sparsity").get<double>();
    if (family.contains("coef_range")) {
      cfg.family.coef_range =
          family.at("coef_range").get<std::array<double, 2>>();
    }
    if (family.contains("q_ranges")) {
      cfg.family.q_ranges =
          family.at("q_ranges").get<std::vector<std::array<double, 2>>>();
    }
    if (family.contains("mixer_nonzeros")) {
      cfg.family.mixer_nonzeros = family.at("mixer_nonzeros").get<int>();
    }
    cfg.sample_sizes = j.at("sample_sizes").get<std::vector<int>>();
    cfg.trials = j.at("trials").get<int>();
    if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("threads")) cfg.threads = j.at("threads").get<int>();
    if (j.contains("timing")) cfg.timing = j.at("timing").get<bool>();
    for (const json& mj : j.at("methods")) {
      MethodConfig mc;
      mc.opts.method = method_from_name(mj.at("name").get<std::string>());
      if (mj.contains("lambda")) mc.opts.lambda = mj.at("lambda").get<double>();
      if (mj.contains("cv_lambda"))
        mc.opts.cv_lambda = mj.at("cv_lambda").get<bool>();
      if (mj.contains("subgroup_size"))
        mc.opts.subgroup_size = mj.at("subgroup_size").get<int>();
      if (mj.contains("subsets"))
        mc.opts.subset_count = mj.at("subsets").get<int>();
      if (mj.contains("mean_aggregate"))
        mc.mean_aggregate = mj.at("mean_aggregate").get<bool>();
      if (mj.contains("label")) mc.label = mj.at("label").get<std::string>();
      for (const auto& [key, value] : mj.items()) {
        require(key == "name" || key == "lambda" || key == "cv_lambda" ||
                    key == "subgroup_size" || key == "subsets" ||
                    key == "mean_aggregate" || key == "label",
                ErrorCode::parse_error,
                "unknown method option '" + key + "'");
        (void)value;
      }
      cfg.methods.push_back(std::move(mc));
    }
    if (sweep_sizes && j.contains("subgroup_sweep_sizes")) {
      *sweep_sizes = j.at("subgroup_sweep_sizes").get<std::vector<int>>();
    }
    cfg.validate();
    return cfg;
  } catch (const json::exception& e) {
    fail(ErrorCode::parse_error,
         std::string("invalid bench config: ") + e.what());
  }
}

BenchReport run_bench_from_json(const std::string& text) {
  std::vector<int> sweep_sizes;
  const BenchConfig cfg = bench_config_from_json(text, &sweep_sizes);
  if (!sweep_sizes.empty()) return subgroup_size_sweep(cfg, sweep_sizes);
  return run_bench(cfg);
}

}  // namespace gco
