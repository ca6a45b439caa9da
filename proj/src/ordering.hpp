#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "exo_scoring.hpp"

namespace gco {

struct OrderingOptions {
  Method method = Method::pairwise;
  double lambda = 0.0;  // > 0 enables ridge in regressions that take it
  bool cv_lambda = false;
  std::optional<int> subgroup_size;  // score on random variable subsets
  std::optional<int> subset_count;   // N pooled subsets (default 1)
  std::uint64_t seed = 0;

  RidgePolicy ridge_policy() const;
};

// Per-iteration scores plus the final order (original group ids, most
// exogenous first). G groups yield exactly G-1 scoring iterations.
struct OrderingTrace {
  std::vector<ExogeneityScores> iterations;
  CausalOrder order;
};

// Residual dataset after regressing every other group on group j: block i
// becomes Xi - C_{i,j} Xj. Relative group order, sizes, and original ids
// are preserved; group j is removed.
GroupedDataMatrix regress_out(const GroupedDataMatrix& data, int j,
                              const RidgePolicy& ridge = {});

// Sum of the per-dataset scores, Eq.-(6) style. All datasets must share the
// same group ids (sizes may differ).
ExogeneityScores pooled_scores(const std::vector<GroupedDataMatrix>& datasets,
                               const OrderingOptions& opts);

// N datasets, each keeping `subgroup_size` distinct variables per group
// (uniform, independent across datasets and groups, ascending row order
// within a group). Deterministic under `seed`.
std::vector<GroupedDataMatrix> draw_subgroups(const GroupedDataMatrix& data,
                                              int subgroup_size, int n_sets,
                                              std::uint64_t seed);

// Replaces each group by the per-sample mean of its variables: G singleton
// groups, ids preserved. With the GDL scorer this reproduces the
// DirectLiNGAM-on-means baseline.
GroupedDataMatrix mean_aggregate(const GroupedDataMatrix& data);

// The full iterative procedure: find an exogenous group, record it, regress
// it out, repeat. Subgroup pooling affects scoring only; regressions always
// use the full groups. Subsets are re-drawn each round.
OrderingTrace estimate_order(const GroupedDataMatrix& data,
                             const OrderingOptions& opts);

// Multi-dataset variant: scores are pooled across datasets each round and
// the chosen group is regressed out of every dataset.
OrderingTrace estimate_order(const std::vector<GroupedDataMatrix>& datasets,
                             const OrderingOptions& opts);

}  // namespace gco
