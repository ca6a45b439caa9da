#include "ordering.hpp"

#include <algorithm>
#include <sstream>

#include "rng.hpp"

namespace gco {

RidgePolicy OrderingOptions::ridge_policy() const {
  RidgePolicy policy;
  policy.lambda = lambda;
  policy.cv = cv_lambda;
  policy.seed = seed;
  return policy;
}

GroupedDataMatrix regress_out(const GroupedDataMatrix& data, int j,
                              const RidgePolicy& ridge) {
  const GroupLayout& layout = data.layout();
  require(layout.group_count() >= 2, ErrorCode::invalid_argument,
          "regress_out needs at least 2 groups");
  const Matrix xj = data.group(j);  // validates j
  RidgePolicy local = ridge;
  local.lambda = ridge.effective_lambda(xj);
  local.cv = false;

  GroupLayout out_layout;
  Matrix out(layout.total_variables() -
                 layout.sizes[static_cast<std::size_t>(layout.block_index(j))],
             data.sample_count());
  int offset = 0;
  for (std::size_t g = 0; g < layout.ids.size(); ++g) {
    const int id = layout.ids[g];
    if (id == j) continue;
    const RegressionFit fit = fit_groups(data.group(id), xj, local);
    out.middleRows(offset, layout.sizes[g]) = fit.residuals;
    offset += layout.sizes[g];
    out_layout.sizes.push_back(layout.sizes[g]);
    out_layout.ids.push_back(id);
  }
  return GroupedDataMatrix(std::move(out), std::move(out_layout));
}

std::vector<GroupedDataMatrix> draw_subgroups(const GroupedDataMatrix& data,
                                              int subgroup_size, int n_sets,
                                              std::uint64_t seed) {
  const GroupLayout& layout = data.layout();
  const int min_size =
      *std::min_element(layout.sizes.begin(), layout.sizes.end());
  require(subgroup_size >= 1 && subgroup_size <= min_size,
          ErrorCode::invalid_argument,
          "subgroup size " + std::to_string(subgroup_size) +
              " must be in [1, min group size " + std::to_string(min_size) +
              "]");
  require(n_sets >= 1, ErrorCode::invalid_argument,
          "subset count must be >= 1");

  Rng rng(derive_seed(seed, {0x5ab6ULL}));
  std::vector<GroupedDataMatrix> out;
  out.reserve(static_cast<std::size_t>(n_sets));
  for (int n = 0; n < n_sets; ++n) {
    Matrix values(subgroup_size * layout.group_count(), data.sample_count());
    GroupLayout sub_layout;
    int offset = 0;
    for (std::size_t g = 0; g < layout.ids.size(); ++g) {
      std::vector<int> pick =
          rng.sample_without_replacement(layout.sizes[g], subgroup_size);
      std::sort(pick.begin(), pick.end());
      const auto block = data.group(layout.ids[g]);
      for (int r = 0; r < subgroup_size; ++r) {
        values.row(offset + r) = block.row(pick[static_cast<std::size_t>(r)]);
      }
      offset += subgroup_size;
      sub_layout.sizes.push_back(subgroup_size);
      sub_layout.ids.push_back(layout.ids[g]);
    }
    out.emplace_back(std::move(values), std::move(sub_layout));
  }
  return out;
}

GroupedDataMatrix mean_aggregate(const GroupedDataMatrix& data) {
  const GroupLayout& layout = data.layout();
  Matrix out(layout.group_count(), data.sample_count());
  GroupLayout out_layout;
  for (std::size_t g = 0; g < layout.ids.size(); ++g) {
    out.row(static_cast<int>(g)) =
        data.group(layout.ids[g]).colwise().mean();
    out_layout.sizes.push_back(1);
    out_layout.ids.push_back(layout.ids[g]);
  }
  return GroupedDataMatrix(std::move(out), std::move(out_layout));
}

namespace {

void add_scores(ExogeneityScores& into, const ExogeneityScores& from) {
  if (into.scores.empty()) {
    into = from;
    return;
  }
  require(into.scores.size() == from.scores.size(), ErrorCode::invalid_argument,
          "datasets disagree on the number of groups");
  for (const auto& [id, mu] : from.scores) {
    auto it = into.scores.find(id);
    require(it != into.scores.end(), ErrorCode::invalid_argument,
            "datasets disagree on group ids");
    it->second += mu;
  }
}

// One round of scoring over the (possibly subgroup-expanded) datasets.
ExogeneityScores round_scores(const std::vector<GroupedDataMatrix>& datasets,
                              const OrderingOptions& opts, int round) {
  ExogeneityScores total;
  const RidgePolicy ridge = opts.ridge_policy();
  std::size_t d_index = 0;
  for (const auto& dataset : datasets) {
    if (opts.subgroup_size) {
      const int n_sets = opts.subset_count.value_or(1);
      const auto subs = draw_subgroups(
          dataset, *opts.subgroup_size, n_sets,
          derive_seed(opts.seed, {0xd4a3ULL, static_cast<std::uint64_t>(round),
                                  static_cast<std::uint64_t>(d_index)}));
      for (const auto& sub : subs) {
        add_scores(total, score_with_method(sub, opts.method, ridge));
      }
    } else {
      add_scores(total, score_with_method(dataset, opts.method, ridge));
    }
    ++d_index;
  }
  finalize_scores(total);
  total.method = opts.method;
  return total;
}

}  // namespace

ExogeneityScores pooled_scores(const std::vector<GroupedDataMatrix>& datasets,
                               const OrderingOptions& opts) {
  require(!datasets.empty(), ErrorCode::invalid_argument, "no datasets");
  ExogeneityScores total;
  const RidgePolicy ridge = opts.ridge_policy();
  for (const auto& dataset : datasets) {
    add_scores(total, score_with_method(dataset, opts.method, ridge));
  }
  finalize_scores(total);
  total.method = opts.method;
  return total;
}

OrderingTrace estimate_order(const GroupedDataMatrix& data,
                             const OrderingOptions& opts) {
  return estimate_order(std::vector<GroupedDataMatrix>{data}, opts);
}

OrderingTrace estimate_order(const std::vector<GroupedDataMatrix>& datasets,
                             const OrderingOptions& opts) {
  require(!datasets.empty(), ErrorCode::invalid_argument, "no datasets");
  const auto& ids0 = datasets.front().layout().ids;
  for (const auto& d : datasets) {
    require(d.layout().ids == ids0, ErrorCode::invalid_argument,
            "datasets must share the same groups");
  }
  require(static_cast<int>(ids0.size()) >= 2, ErrorCode::invalid_argument,
          "need at least 2 groups to order");
  if (opts.subgroup_size) {
    for (const auto& d : datasets) {
      const auto& sizes = d.layout().sizes;
      require(*opts.subgroup_size <=
                  *std::min_element(sizes.begin(), sizes.end()),
              ErrorCode::invalid_argument,
              "subgroup size exceeds the smallest group");
    }
  }
  require(opts.subset_count.value_or(1) >= 1, ErrorCode::invalid_argument,
          "subset count must be >= 1");
  require(!opts.subset_count || opts.subgroup_size,
          ErrorCode::invalid_argument,
          "subset count requires a subgroup size");

  const int num_groups = static_cast<int>(ids0.size());
  std::vector<GroupedDataMatrix> current = datasets;
  OrderingTrace trace;
  for (int round = 0; round < num_groups - 1; ++round) {
    ExogeneityScores scores;
    try {
      scores = round_scores(current, opts, round);
    } catch (const Error& e) {
      std::ostringstream msg;
      msg << "iteration " << round + 1 << ": " << e.what();
      fail(e.code(), msg.str());
    }
    const int chosen = scores.chosen;
    trace.iterations.push_back(std::move(scores));
    trace.order.order.push_back(chosen);
    if (round < num_groups - 2) {
      const RidgePolicy ridge = opts.ridge_policy();
      for (auto& d : current) {
        try {
          d = regress_out(d, chosen, ridge);
        } catch (const Error& e) {
          std::ostringstream msg;
          msg << "iteration " << round + 1 << ": " << e.what();
          fail(e.code(), msg.str());
        }
      }
    }
  }
  // The remaining id after the last scored round.
  for (int id : ids0) {
    if (std::find(trace.order.order.begin(), trace.order.order.end(), id) ==
        trace.order.order.end()) {
      trace.order.order.push_back(id);
    }
  }
  validate_order(trace.order, ids0);
  return trace;
}

}  // namespace gco
