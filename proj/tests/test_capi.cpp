// Exercises the shared-library surface through the public C header only.
#include "grouporder.h"

#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <string>
#include <vector>

namespace {

struct Dataset {
  gco_dataset* ptr = nullptr;
  ~Dataset() { gco_dataset_destroy(ptr); }
};

struct Model {
  gco_model* ptr = nullptr;
  ~Model() { gco_model_destroy(ptr); }
};

struct Trace {
  gco_trace* ptr = nullptr;
  ~Trace() { gco_trace_destroy(ptr); }
};

// Noise-free two-group chain: group 1 (2 vars) drives group 2 (1 var).
std::vector<double> chain_values(int64_t m) {
  std::mt19937_64 gen(99);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  std::vector<double> values(static_cast<std::size_t>(3 * m));
  for (int64_t c = 0; c < m; ++c) {
    const double a = unif(gen);
    const double e = unif(gen);
    const double b = 0.8 * a + 0.5 * e;
    values[static_cast<std::size_t>(c)] = a;
    values[static_cast<std::size_t>(m + c)] = e;
    values[static_cast<std::size_t>(2 * m + c)] = b;
  }
  return values;
}

TEST(CapiDataset, CreateQueryRoundTrip) {
  const int64_t m = 50;
  const std::vector<double> values = chain_values(m);
  const int32_t sizes[2] = {2, 1};
  Dataset d;
  ASSERT_EQ(gco_dataset_create(values.data(), 3, m, sizes, 2, &d.ptr), GCO_OK);
  EXPECT_EQ(gco_dataset_group_count(d.ptr), 2);
  EXPECT_EQ(gco_dataset_total_rows(d.ptr), 3);
  EXPECT_EQ(gco_dataset_sample_count(d.ptr), m);
  int32_t got_sizes[2] = {0, 0};
  ASSERT_EQ(gco_dataset_group_sizes(d.ptr, got_sizes), GCO_OK);
  EXPECT_EQ(got_sizes[0], 2);
  EXPECT_EQ(got_sizes[1], 1);
  std::vector<double> out(values.size());
  ASSERT_EQ(gco_dataset_values(d.ptr, out.data()), GCO_OK);
  EXPECT_EQ(out, values);
}

TEST(CapiDataset, ErrorsSetMessageAndStatus) {
  const int32_t sizes[2] = {2, 1};
  const double values[3] = {1.0, 2.0, 3.0};
  gco_dataset* out = nullptr;
  // One sample only: below the floor.
  EXPECT_EQ(gco_dataset_create(values, 3, 1, sizes, 2, &out),
            GCO_ERR_INVALID_ARGUMENT);
  EXPECT_EQ(out, nullptr);
  EXPECT_GT(std::string(gco_last_error()).size(), 0u);
  EXPECT_EQ(gco_dataset_create(nullptr, 3, 1, sizes, 2, &out),
            GCO_ERR_INVALID_ARGUMENT);
  EXPECT_STREQ(gco_status_name(GCO_ERR_SINGULAR), "singular regressors");
}

TEST(CapiOrder, NoiseFreeChainAndTraceAccessors) {
  const int64_t m = 400;
  const std::vector<double> values = chain_values(m);
  const int32_t sizes[2] = {2, 1};
  Dataset d;
  ASSERT_EQ(gco_dataset_create(values.data(), 3, m, sizes, 2, &d.ptr), GCO_OK);

  gco_order_options options;
  gco_order_options_init(&options);
  options.method = GCO_METHOD_GDL_NLCORR;
  const gco_dataset* list[1] = {d.ptr};
  Trace trace;
  ASSERT_EQ(gco_estimate_order(list, 1, &options, &trace.ptr), GCO_OK);
  EXPECT_EQ(gco_trace_group_count(trace.ptr), 2);
  EXPECT_EQ(gco_trace_iteration_count(trace.ptr), 1);
  int32_t order[2] = {0, 0};
  ASSERT_EQ(gco_trace_order(trace.ptr, order), GCO_OK);
  EXPECT_EQ(order[0], 1);
  EXPECT_EQ(order[1], 2);

  int32_t ids[2];
  double scores[2];
  int32_t count = 0, chosen = 0;
  ASSERT_EQ(gco_trace_iteration(trace.ptr, 0, ids, scores, &count, &chosen),
            GCO_OK);
  EXPECT_EQ(count, 2);
  EXPECT_EQ(chosen, 1);
  EXPECT_EQ(gco_trace_iteration(trace.ptr, 1, ids, scores, &count, &chosen),
            GCO_ERR_INVALID_ARGUMENT);
}

TEST(CapiOrder, MultisetPoolsDatasets) {
  const int64_t m = 300;
  const std::vector<double> values = chain_values(m);
  const int32_t sizes[2] = {2, 1};
  Dataset d;
  ASSERT_EQ(gco_dataset_create(values.data(), 3, m, sizes, 2, &d.ptr), GCO_OK);
  gco_order_options options;
  gco_order_options_init(&options);
  options.method = GCO_METHOD_GDL_NLCORR;

  const gco_dataset* single[1] = {d.ptr};
  const gco_dataset* doubled[2] = {d.ptr, d.ptr};
  Trace one, two;
  ASSERT_EQ(gco_estimate_order(single, 1, &options, &one.ptr), GCO_OK);
  ASSERT_EQ(gco_estimate_order(doubled, 2, &options, &two.ptr), GCO_OK);
  int32_t ids[2];
  double s1[2], s2[2];
  int32_t count = 0, chosen = 0;
  ASSERT_EQ(gco_trace_iteration(one.ptr, 0, ids, s1, &count, &chosen), GCO_OK);
  ASSERT_EQ(gco_trace_iteration(two.ptr, 0, ids, s2, &count, &chosen), GCO_OK);
  EXPECT_EQ(s2[0], 2.0 * s1[0]);
  EXPECT_EQ(s2[1], 2.0 * s1[1]);
}

TEST(CapiModel, GenerateSerializeSample) {
  const char* config = R"({"group_sizes": [2, 2, 2], "sparsity": 0.8,
                           "q_ranges": [[1.2, 2.0]], "seed": 17})";
  Model model;
  ASSERT_EQ(gco_model_generate(config, &model.ptr), GCO_OK);
  EXPECT_EQ(gco_model_group_count(model.ptr), 3);
  EXPECT_EQ(gco_model_total_rows(model.ptr), 6);

  char* json = nullptr;
  ASSERT_EQ(gco_model_to_json(model.ptr, &json), GCO_OK);
  ASSERT_NE(json, nullptr);
  Model parsed;
  ASSERT_EQ(gco_model_parse(json, &parsed.ptr), GCO_OK);
  char* json2 = nullptr;
  ASSERT_EQ(gco_model_to_json(parsed.ptr, &json2), GCO_OK);
  EXPECT_STREQ(json, json2);
  gco_string_free(json);
  gco_string_free(json2);

  int32_t truth[3];
  Dataset data;
  ASSERT_EQ(gco_model_sample(model.ptr, 200, 3, &data.ptr, truth), GCO_OK);
  EXPECT_EQ(gco_dataset_sample_count(data.ptr), 200);
  // Truth is a permutation of 1..3.
  int32_t seen[3] = {0, 0, 0};
  for (int32_t id : truth) {
    ASSERT_GE(id, 1);
    ASSERT_LE(id, 3);
    seen[id - 1]++;
  }
  EXPECT_EQ(seen[0] + seen[1] + seen[2], 3);

  // Determinism under the sampling seed.
  int32_t truth2[3];
  Dataset again;
  ASSERT_EQ(gco_model_sample(model.ptr, 200, 3, &again.ptr, truth2), GCO_OK);
  std::vector<double> a(6 * 200), b(6 * 200);
  ASSERT_EQ(gco_dataset_values(data.ptr, a.data()), GCO_OK);
  ASSERT_EQ(gco_dataset_values(again.ptr, b.data()), GCO_OK);
  EXPECT_EQ(a, b);

  EXPECT_EQ(gco_model_generate("not json", &parsed.ptr), GCO_ERR_PARSE);
  EXPECT_EQ(gco_model_sample(model.ptr, 1, 0, &data.ptr, truth),
            GCO_ERR_INVALID_ARGUMENT);
}

TEST(CapiBench, RunsFromJsonConfig) {
  const char* config = R"({
    "family": {"group_sizes": [2, 2], "sparsity": 1.0, "q_ranges": [[1.2, 2.0]]},
    "sample_sizes": [60, 90],
    "trials": 2,
    "seed": 9,
    "methods": [{"name": "pairwise"}]
  })";
  char* csv = nullptr;
  char* json = nullptr;
  ASSERT_EQ(gco_bench_run(config, &csv, &json), GCO_OK);
  ASSERT_NE(csv, nullptr);
  ASSERT_NE(json, nullptr);
  const std::string text(csv);
  EXPECT_EQ(text.find("method,sample_size,subgroup_size,error_rate,trials,seconds"),
            0u);
  EXPECT_NE(text.find("pairwise,60,"), std::string::npos);
  EXPECT_NE(text.find("pairwise,90,"), std::string::npos);
  gco_string_free(csv);
  gco_string_free(json);

  EXPECT_EQ(gco_bench_run("{", &csv, nullptr), GCO_ERR_PARSE);
}

}  // namespace
