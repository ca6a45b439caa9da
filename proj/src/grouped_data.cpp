#include "grouped_data.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <sstream>

namespace gco {

GroupLayout GroupLayout::of_sizes(std::vector<int> group_sizes) {
  GroupLayout layout;
  layout.sizes = std::move(group_sizes);
  layout.ids.resize(layout.sizes.size());
  std::iota(layout.ids.begin(), layout.ids.end(), 1);
  layout.validate();
  return layout;
}

int GroupLayout::total_variables() const {
  return std::accumulate(sizes.begin(), sizes.end(), 0);
}

bool GroupLayout::has_default_ids() const {
  for (std::size_t g = 0; g < ids.size(); ++g) {
    if (ids[g] != static_cast<int>(g) + 1) return false;
  }
  return true;
}

int GroupLayout::block_index(int id) const {
  for (std::size_t g = 0; g < ids.size(); ++g) {
    if (ids[g] == id) return static_cast<int>(g);
  }
  fail(ErrorCode::invalid_argument,
       "unknown group id " + std::to_string(id));
}

int GroupLayout::block_offset(int block) const {
  int offset = 0;
  for (int g = 0; g < block; ++g) offset += sizes[static_cast<std::size_t>(g)];
  return offset;
}

int GroupLayout::row_of(int id, int within) const {
  const int block = block_index(id);
  require(within >= 0 && within < sizes[static_cast<std::size_t>(block)],
          ErrorCode::invalid_argument,
          "within-group index " + std::to_string(within) +
              " out of range for group " + std::to_string(id));
  return block_offset(block) + within;
}

std::pair<int, int> GroupLayout::locate(int row) const {
  require(row >= 0 && row < total_variables(), ErrorCode::invalid_argument,
          "row index " + std::to_string(row) + " out of range");
  int offset = 0;
  for (std::size_t g = 0; g < sizes.size(); ++g) {
    if (row < offset + sizes[g]) return {ids[g], row - offset};
    offset += sizes[g];
  }
  fail(ErrorCode::internal, "locate: unreachable");
}

void GroupLayout::validate() const {
  require(!sizes.empty(), ErrorCode::invalid_argument, "layout has no groups");
  require(sizes.size() == ids.size(), ErrorCode::invalid_argument,
          "layout sizes/ids length mismatch");
  for (int n : sizes) {
    require(n >= 1, ErrorCode::invalid_argument,
            "group size must be >= 1, got " + std::to_string(n));
  }
  std::set<int> seen;
  for (int id : ids) {
    require(id >= 1, ErrorCode::invalid_argument,
            "group id must be >= 1, got " + std::to_string(id));
    require(seen.insert(id).second, ErrorCode::invalid_argument,
            "duplicate group id " + std::to_string(id));
  }
}

GroupedDataMatrix::GroupedDataMatrix(Matrix values, GroupLayout layout)
    : values_(std::move(values)), layout_(std::move(layout)) {
  layout_.validate();
  require(values_.rows() == layout_.total_variables(),
          ErrorCode::invalid_argument,
          "row count " + std::to_string(values_.rows()) +
              " does not match layout total " +
              std::to_string(layout_.total_variables()));
  require(values_.cols() >= 2, ErrorCode::invalid_argument,
          "need at least 2 samples, got " + std::to_string(values_.cols()));
  require(values_.allFinite(), ErrorCode::invalid_argument,
          "data matrix contains non-finite entries");
}

Eigen::Block<const Matrix> GroupedDataMatrix::group(int id) const {
  const int block = layout_.block_index(id);
  return values_.middleRows(layout_.block_offset(block),
                            layout_.sizes[static_cast<std::size_t>(block)]);
}

Matrix extract_group(const GroupedDataMatrix& data, int g) {
  return data.group(g);
}

GroupedDataMatrix block_permute(const GroupedDataMatrix& data,
                                const std::vector<int>& perm) {
  const GroupLayout& layout = data.layout();
  const int num_groups = layout.group_count();
  require(layout.has_default_ids(), ErrorCode::invalid_argument,
          "block_permute expects a fresh dataset with group ids 1..G");
  require(static_cast<int>(perm.size()) == num_groups,
          ErrorCode::invalid_argument,
          "permutation length " + std::to_string(perm.size()) +
              " does not match group count " + std::to_string(num_groups));
  std::vector<bool> seen(static_cast<std::size_t>(num_groups), false);
  for (int id : perm) {
    require(id >= 1 && id <= num_groups, ErrorCode::invalid_argument,
            "permutation entry " + std::to_string(id) + " out of range");
    require(!seen[static_cast<std::size_t>(id - 1)],
            ErrorCode::invalid_argument,
            "permutation repeats group " + std::to_string(id));
    seen[static_cast<std::size_t>(id - 1)] = true;
  }

  std::vector<int> new_sizes(static_cast<std::size_t>(num_groups));
  for (int t = 0; t < num_groups; ++t) {
    new_sizes[static_cast<std::size_t>(t)] =
        layout.sizes[static_cast<std::size_t>(perm[static_cast<std::size_t>(t)] - 1)];
  }
  Matrix out(data.values().rows(), data.values().cols());
  int offset = 0;
  for (int t = 0; t < num_groups; ++t) {
    const auto block = data.group(perm[static_cast<std::size_t>(t)]);
    out.middleRows(offset, block.rows()) = block;
    offset += static_cast<int>(block.rows());
  }
  return GroupedDataMatrix(std::move(out), GroupLayout::of_sizes(new_sizes));
}

void validate_order(const CausalOrder& order, const std::vector<int>& ids) {
  require(order.order.size() == ids.size(), ErrorCode::invalid_argument,
          "order length does not match group count");
  std::set<int> want(ids.begin(), ids.end());
  std::set<int> got(order.order.begin(), order.order.end());
  require(want == got, ErrorCode::invalid_argument,
          "order is not a permutation of the group ids");
}

const char* method_name(Method m) {
  switch (m) {
    case Method::gdl_hsic:
      return "gdl-hsic";
    case Method::gdl_nlcorr:
      return "gdl-nlcorr";
    case Method::pairwise:
      return "pairwise";
    case Method::naive_pairwise:
      return "naive-pairwise";
    case Method::trace:
      return "trace";
  }
  return "?";
}

Method method_from_name(const std::string& name) {
  if (name == "gdl-hsic") return Method::gdl_hsic;
  if (name == "gdl-nlcorr") return Method::gdl_nlcorr;
  if (name == "pairwise") return Method::pairwise;
  if (name == "naive-pairwise") return Method::naive_pairwise;
  if (name == "trace") return Method::trace;
  fail(ErrorCode::invalid_argument, "unknown method '" + name + "'");
}

void finalize_scores(ExogeneityScores& s) {
  require(!s.scores.empty(), ErrorCode::internal, "no scores to choose from");
  int best_id = 0;
  double best = std::numeric_limits<double>::infinity();
  for (const auto& [id, mu] : s.scores) {
    require(std::isfinite(mu) && mu >= 0.0, ErrorCode::internal,
            "score for group " + std::to_string(id) +
                " is not finite and nonnegative");
    if (mu < best) {  // map is id-ordered, so strict < breaks ties low
      best = mu;
      best_id = id;
    }
  }
  s.chosen = best_id;
}

}  // namespace gco
