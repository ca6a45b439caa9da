#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "grouped_data.hpp"

namespace gco {

struct GenConfig {
  std::vector<int> group_sizes;
  double sparsity = 0.1;  // expected fraction of nonzero block entries
  std::array<double, 2> coef_range{0.2, 1.0};  // nonzero magnitudes
  // Non-Gaussianity exponents q for sign(u)|u|^q sources; an interval is
  // picked uniformly, then q uniformly within it. q != 1 on both defaults.
  std::vector<std::array<double, 2>> q_ranges{{0.5, 0.8}, {1.2, 2.0}};
  // Nonzeros per noise-mixer row (diagonal always included); 0 = dense.
  // Wide groups need sparse mixing: a dense mix of n_g independent sources
  // is near-Gaussian by the CLT, which erases the identifiability the
  // non-Gaussian methods rely on.
  int mixer_nonzeros = 0;
  std::uint64_t seed = 0;

  void validate() const;
};

// Generative ground truth: connection blocks for pairs consistent with the
// order (lower block triangular), invertible per-group noise mixers, and
// per-variable source exponents.
struct ModelSpec {
  GroupLayout layout;
  CausalOrder order;  // ground truth, most exogenous first
  std::map<std::pair<int, int>, Matrix> blocks;  // (target, source) -> B
  std::vector<Matrix> noise_mixers;              // indexed by group id - 1
  std::vector<double> source_q;                  // per global variable row
  std::uint64_t gen_seed = 0;

  void validate() const;
};

ModelSpec generate_model(const GenConfig& cfg);

struct SampleResult {
  GroupedDataMatrix data;  // block-permuted to hide the generating order
  CausalOrder truth;       // in the permuted dataset's group ids
};

// Draws m samples from the model: unit-variance non-Gaussian sources, mixed
// within each group, propagated through the blocks in causal order, then
// block-permuted by a seeded random permutation.
SampleResult sample_data(const ModelSpec& spec, int m, std::uint64_t seed);

// JSON schema (schema_version 1) for reproducibility.
std::string model_to_json(const ModelSpec& spec);
ModelSpec model_from_json(const std::string& text);
GenConfig gen_config_from_json(const std::string& text);

// Standard deviation of sign(u)|u|^q for u ~ N(0,1); used to standardize
// sources analytically.
double power_source_sd(double q);

}  // namespace gco
