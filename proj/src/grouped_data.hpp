#pragma once

#include <Eigen/Dense>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "errors.hpp"

namespace gco {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Block structure of a variables-by-samples matrix: block g holds the
// contiguous rows of group ids[g] and has sizes[g] rows. Group ids are
// 1-based. Fresh datasets use ids 1..G; residual datasets produced during
// ordering keep the surviving original ids so reported orders always refer
// to input groups.
struct GroupLayout {
  std::vector<int> sizes;
  std::vector<int> ids;

  static GroupLayout of_sizes(std::vector<int> group_sizes);

  int group_count() const { return static_cast<int>(sizes.size()); }
  int total_variables() const;
  bool has_default_ids() const;

  int block_index(int id) const;  // throws on unknown id
  int block_offset(int block) const;

  // Bijection between (group id, within-group index) and global row index.
  int row_of(int id, int within) const;
  std::pair<int, int> locate(int row) const;

  void validate() const;
};

// Immutable observations for all variables: rows = variables, columns =
// samples. Entries must be finite and m >= 2.
class GroupedDataMatrix {
 public:
  GroupedDataMatrix(Matrix values, GroupLayout layout);

  const Matrix& values() const { return values_; }
  const GroupLayout& layout() const { return layout_; }
  int sample_count() const { return static_cast<int>(values_.cols()); }
  int group_count() const { return layout_.group_count(); }
  int group_size(int id) const {
    return layout_.sizes[static_cast<std::size_t>(layout_.block_index(id))];
  }

  // Contiguous row block of group `id` (a view, no copy).
  Eigen::Block<const Matrix> group(int id) const;

 private:
  Matrix values_;
  GroupLayout layout_;
};

// Row block of group g as a matrix.
Matrix extract_group(const GroupedDataMatrix& data, int g);

// Reorders whole group blocks: output block t is input group perm[t];
// within-group row order is preserved. Requires default ids 1..G on input
// and a permutation of 1..G; the output is a fresh dataset with ids 1..G.
GroupedDataMatrix block_permute(const GroupedDataMatrix& data,
                                const std::vector<int>& perm);

// A causal order over groups: permutation of the group ids, most exogenous
// first.
struct CausalOrder {
  std::vector<int> order;

  bool operator==(const CausalOrder&) const = default;
};

// Checks `order` is a permutation of `ids` (as sets).
void validate_order(const CausalOrder& order, const std::vector<int>& ids);

enum class Method {
  gdl_hsic,
  gdl_nlcorr,
  pairwise,
  naive_pairwise,
  trace,
};

const char* method_name(Method m);
Method method_from_name(const std::string& name);

// Per-candidate exogeneity scores mu^(j) for one method on one dataset.
// `chosen` attains the minimum; ties break toward the lowest group id.
struct ExogeneityScores {
  Method method = Method::gdl_nlcorr;
  std::map<int, double> scores;
  int chosen = 0;
};

// Fills `chosen` from `scores` (lowest-id tie break) and validates the
// scores are finite and nonnegative.
void finalize_scores(ExogeneityScores& s);

}  // namespace gco
