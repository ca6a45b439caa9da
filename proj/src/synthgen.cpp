#include "synthgen.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <numeric>

#include "json.hpp"
#include "rng.hpp"

namespace gco {

namespace {

using nlohmann::json;

constexpr double kMixerConditionLimit = 1e6;
constexpr int kMixerAttempts = 100;

json matrix_to_json(const Matrix& m) {
  json rows = json::array();
  for (int r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (int c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

Matrix matrix_from_json(const json& j) {
  require(j.is_array() && !j.empty(), ErrorCode::parse_error,
          "matrix must be a nonempty array of rows");
  const std::size_t cols = j.at(0).size();
  Matrix m(static_cast<int>(j.size()), static_cast<int>(cols));
  for (std::size_t r = 0; r < j.size(); ++r) {
    const json& row = j.at(r);
    require(row.is_array() && row.size() == cols, ErrorCode::parse_error,
            "ragged matrix rows");
    for (std::size_t c = 0; c < cols; ++c) {
      m(static_cast<int>(r), static_cast<int>(c)) = row.at(c).get<double>();
    }
  }
  return m;
}

double mixer_condition(const Matrix& m) {
  Eigen::BDCSVD<Matrix> svd(m);
  const double hi = svd.singularValues().maxCoeff();
  const double lo = svd.singularValues().minCoeff();
  if (lo <= 0.0) return std::numeric_limits<double>::infinity();
  return hi / lo;
}

}  // namespace

void GenConfig::validate() const {
  require(group_sizes.size() >= 2, ErrorCode::invalid_argument,
          "need at least 2 groups");
  for (int n : group_sizes) {
    require(n >= 1, ErrorCode::invalid_argument, "group sizes must be >= 1");
  }
  require(sparsity > 0.0 && sparsity <= 1.0, ErrorCode::invalid_argument,
          "sparsity must be in (0, 1]");
  require(coef_range[0] > 0.0 && coef_range[0] <= coef_range[1],
          ErrorCode::invalid_argument,
          "coefficient magnitude range must satisfy 0 < lo <= hi");
  require(!q_ranges.empty(), ErrorCode::invalid_argument,
          "need at least one q range");
  for (const auto& r : q_ranges) {
    require(r[0] > 0.0 && r[0] <= r[1], ErrorCode::invalid_argument,
            "q ranges must satisfy 0 < lo <= hi");
  }
  require(mixer_nonzeros >= 0, ErrorCode::invalid_argument,
          "mixer_nonzeros must be >= 0 (0 = dense)");
}

void ModelSpec::validate() const {
  layout.validate();
  const int num_groups = layout.group_count();
  require(num_groups >= 2, ErrorCode::invalid_argument,
          "need at least 2 groups");
  require(layout.has_default_ids(), ErrorCode::invalid_argument,
          "model layout must use group ids 1..G");
  validate_order(order, layout.ids);

  // position of each id in the causal order
  std::vector<int> pos(static_cast<std::size_t>(num_groups), -1);
  for (std::size_t p = 0; p < order.order.size(); ++p) {
    pos[static_cast<std::size_t>(order.order[p] - 1)] = static_cast<int>(p);
  }
  std::size_t expected = 0;
  for (int t = 1; t <= num_groups; ++t) {
    for (int s = 1; s <= num_groups; ++s) {
      if (s == t) continue;
      if (pos[static_cast<std::size_t>(s - 1)] <
          pos[static_cast<std::size_t>(t - 1)])
        ++expected;
    }
  }
  require(blocks.size() == expected, ErrorCode::invalid_argument,
          "blocks must exist exactly for source-before-target pairs");
  for (const auto& [key, b] : blocks) {
    const auto [target, source] = key;
    require(target >= 1 && target <= num_groups && source >= 1 &&
                source <= num_groups && target != source,
            ErrorCode::invalid_argument, "block with invalid group ids");
    require(pos[static_cast<std::size_t>(source - 1)] <
                pos[static_cast<std::size_t>(target - 1)],
            ErrorCode::invalid_argument,
            "block source must precede target in the causal order");
    require(b.rows() == layout.sizes[static_cast<std::size_t>(target - 1)] &&
                b.cols() == layout.sizes[static_cast<std::size_t>(source - 1)],
            ErrorCode::invalid_argument, "block dimensions mismatch");
    require(b.cwiseAbs().maxCoeff() > 0.0, ErrorCode::invalid_argument,
            "every block needs at least one nonzero entry");
  }
  require(static_cast<int>(noise_mixers.size()) == num_groups,
          ErrorCode::invalid_argument, "need one noise mixer per group");
  for (int g = 0; g < num_groups; ++g) {
    const Matrix& mix = noise_mixers[static_cast<std::size_t>(g)];
    const int n = layout.sizes[static_cast<std::size_t>(g)];
    require(mix.rows() == n && mix.cols() == n, ErrorCode::invalid_argument,
            "noise mixer must be square of the group size");
    require(mixer_condition(mix) <= kMixerConditionLimit,
            ErrorCode::invalid_argument,
            "noise mixer for group " + std::to_string(g + 1) +
                " is not invertible (condition > 1e6)");
  }
  require(static_cast<int>(source_q.size()) == layout.total_variables(),
          ErrorCode::invalid_argument, "need one q exponent per variable");
  for (double q : source_q) {
    require(q > 0.0, ErrorCode::invalid_argument, "q exponents must be > 0");
  }
}

double power_source_sd(double q) {
  // E[|u|^(2q)] = 2^q Gamma(q + 1/2) / sqrt(pi) for u ~ N(0,1).
  return std::sqrt(std::pow(2.0, q) * std::tgamma(q + 0.5) /
                   std::sqrt(M_PI));
}

ModelSpec generate_model(const GenConfig& cfg) {
  cfg.validate();
  const int num_groups = static_cast<int>(cfg.group_sizes.size());

  ModelSpec spec;
  spec.gen_seed = cfg.seed;
  spec.layout = GroupLayout::of_sizes(cfg.group_sizes);

  Rng order_rng(derive_seed(cfg.seed, {1}));
  spec.order.order = order_rng.permutation_1based(num_groups);

  Rng block_rng(derive_seed(cfg.seed, {2}));
  auto draw_coef = [&]() {
    const double magnitude =
        block_rng.uniform(cfg.coef_range[0], cfg.coef_range[1]);
    return block_rng.bernoulli(0.5) ? magnitude : -magnitude;
  };
  for (std::size_t t = 1; t < spec.order.order.size(); ++t) {
    for (std::size_t s = 0; s < t; ++s) {
      const int target = spec.order.order[t];
      const int source = spec.order.order[s];
      const int nt = cfg.group_sizes[static_cast<std::size_t>(target - 1)];
      const int ns = cfg.group_sizes[static_cast<std::size_t>(source - 1)];
      Matrix block = Matrix::Zero(nt, ns);
      for (int r = 0; r < nt; ++r) {
        for (int c = 0; c < ns; ++c) {
          if (block_rng.bernoulli(cfg.sparsity)) block(r, c) = draw_coef();
        }
      }
      if (block.cwiseAbs().maxCoeff() == 0.0) {
        const int r = block_rng.uniform_int(0, nt - 1);
        const int c = block_rng.uniform_int(0, ns - 1);
        block(r, c) = draw_coef();
      }
      spec.blocks[{target, source}] = std::move(block);
    }
  }

  Rng mixer_rng(derive_seed(cfg.seed, {3}));
  for (int g = 0; g < num_groups; ++g) {
    const int n = cfg.group_sizes[static_cast<std::size_t>(g)];
    const int per_row = cfg.mixer_nonzeros == 0
                            ? n
                            : std::min(cfg.mixer_nonzeros, n);
    Matrix mix;
    bool ok = false;
    for (int attempt = 0; attempt < kMixerAttempts && !ok; ++attempt) {
      mix = Matrix::Zero(n, n);
      for (int r = 0; r < n; ++r) {
        if (per_row == n) {
          for (int c = 0; c < n; ++c) mix(r, c) = mixer_rng.uniform(-1.0, 1.0);
        } else {
          // Diagonal plus per_row-1 random off-diagonal sources.
          mix(r, r) = mixer_rng.uniform(-1.0, 1.0);
          std::vector<int> offs =
              mixer_rng.sample_without_replacement(n - 1, per_row - 1);
          for (int o : offs) {
            const int c = o >= r ? o + 1 : o;
            mix(r, c) = mixer_rng.uniform(-1.0, 1.0);
          }
        }
      }
      // Unit row norms: per-variable noise variance 1, within-group
      // dependence from the shared sources.
      bool normed = true;
      for (int r = 0; r < n; ++r) {
        const double norm = mix.row(r).norm();
        if (norm < 1e-9) {
          normed = false;
          break;
        }
        mix.row(r) /= norm;
      }
      ok = normed && mixer_condition(mix) <= kMixerConditionLimit;
    }
    require(ok, ErrorCode::internal,
            "could not draw an invertible noise mixer in 100 attempts");
    spec.noise_mixers.push_back(std::move(mix));
  }

  Rng q_rng(derive_seed(cfg.seed, {4}));
  spec.source_q.resize(static_cast<std::size_t>(spec.layout.total_variables()));
  for (double& q : spec.source_q) {
    const auto& range = cfg.q_ranges[static_cast<std::size_t>(
        q_rng.uniform_int(0, static_cast<int>(cfg.q_ranges.size()) - 1))];
    q = q_rng.uniform(range[0], range[1]);
  }

  spec.validate();
  return spec;
}

SampleResult sample_data(const ModelSpec& spec, int m, std::uint64_t seed) {
  spec.validate();
  require(m >= 2, ErrorCode::invalid_argument,
          "need at least 2 samples, got " + std::to_string(m));
  const GroupLayout& layout = spec.layout;
  const int num_groups = layout.group_count();
  const int total = layout.total_variables();

  Rng source_rng(derive_seed(seed, {11}));
  Matrix sources(total, m);
  for (int r = 0; r < total; ++r) {
    const double q = spec.source_q[static_cast<std::size_t>(r)];
    const double sd = power_source_sd(q);
    for (int s = 0; s < m; ++s) {
      const double u = source_rng.normal();
      const double v = std::copysign(std::pow(std::abs(u), q), u);
      sources(r, s) = v / sd;
    }
  }

  // Dependent within-group errors, then propagate in causal order.
  Matrix x(total, m);
  for (int g = 1; g <= num_groups; ++g) {
    const int off = layout.block_offset(layout.block_index(g));
    const int n = layout.sizes[static_cast<std::size_t>(g - 1)];
    x.middleRows(off, n) = spec.noise_mixers[static_cast<std::size_t>(g - 1)] *
                           sources.middleRows(off, n);
  }
  for (std::size_t t = 1; t < spec.order.order.size(); ++t) {
    const int target = spec.order.order[t];
    const int t_off = layout.block_offset(layout.block_index(target));
    const int t_n = layout.sizes[static_cast<std::size_t>(target - 1)];
    for (std::size_t s = 0; s < t; ++s) {
      const int source = spec.order.order[s];
      const int s_off = layout.block_offset(layout.block_index(source));
      const int s_n = layout.sizes[static_cast<std::size_t>(source - 1)];
      x.middleRows(t_off, t_n) += spec.blocks.at({target, source}) *
                                  x.middleRows(s_off, s_n);
    }
  }

  GroupedDataMatrix ordered(std::move(x), layout);
  Rng perm_rng(derive_seed(seed, {12}));
  const std::vector<int> perm = perm_rng.permutation_1based(num_groups);
  GroupedDataMatrix permuted = block_permute(ordered, perm);

  // New id of original group g: position of g in perm.
  std::vector<int> new_id(static_cast<std::size_t>(num_groups), 0);
  for (int t = 0; t < num_groups; ++t) {
    new_id[static_cast<std::size_t>(perm[static_cast<std::size_t>(t)] - 1)] =
        t + 1;
  }
  CausalOrder truth;
  for (int g : spec.order.order) {
    truth.order.push_back(new_id[static_cast<std::size_t>(g - 1)]);
  }
  return SampleResult{std::move(permuted), std::move(truth)};
}

std::string model_to_json(const ModelSpec& spec) {
  json j;
  j["schema_version"] = 1;
  j["group_sizes"] = spec.layout.sizes;
  j["order"] = spec.order.order;
  json blocks = json::array();
  for (const auto& [key, b] : spec.blocks) {
    json entry;
    entry["target"] = key.first;
    entry["source"] = key.second;
    entry["values"] = matrix_to_json(b);
    blocks.push_back(std::move(entry));
  }
  j["blocks"] = std::move(blocks);
  json mixers = json::array();
  for (const Matrix& m : spec.noise_mixers) mixers.push_back(matrix_to_json(m));
  j["noise_mixers"] = std::move(mixers);
  j["source_q"] = spec.source_q;
  j["gen_seed"] = spec.gen_seed;
  return j.dump(2);
}

ModelSpec model_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    fail(ErrorCode::parse_error, std::string("invalid model JSON: ") + e.what());
  }
  try {
    require(!j.contains("schema_version") ||
                j.at("schema_version").get<int>() == 1,
            ErrorCode::parse_error, "unsupported schema_version");
    ModelSpec spec;
    spec.layout =
        GroupLayout::of_sizes(j.at("group_sizes").get<std::vector<int>>());
    spec.order.order = j.at("order").get<std::vector<int>>();
    for (const json& entry : j.at("blocks")) {
      spec.blocks[{entry.at("target").get<int>(),
                   entry.at("source").get<int>()}] =
          matrix_from_json(entry.at("values"));
    }
    for (const json& m : j.at("noise_mixers")) {
      spec.noise_mixers.push_back(matrix_from_json(m));
    }
    spec.source_q = j.at("source_q").get<std::vector<double>>();
    if (j.contains("gen_seed"))
      spec.gen_seed = j.at("gen_seed").get<std::uint64_t>();
    spec.validate();
    return spec;
  } catch (const json::exception& e) {
    fail(ErrorCode::parse_error, std::string("invalid model JSON: ") + e.what());
  }
}

GenConfig gen_config_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    fail(ErrorCode::parse_error,
         std::string("invalid generator config: ") + e.what());
  }
  try {
    require(!j.contains("schema_version") ||
                j.at("schema_version").get<int>() == 1,
            ErrorCode::parse_error, "unsupported schema_version");
    GenConfig cfg;
    cfg.group_sizes = j.at("group_sizes").get<std::vector<int>>();
    cfg.sparsity = j.at("sparsity").get<double>();
    if (j.contains("coef_range"))
      cfg.coef_range = j.at("coef_range").get<std::array<double, 2>>();
    if (j.contains("q_ranges")) {
      cfg.q_ranges =
          j.at("q_ranges").get<std::vector<std::array<double, 2>>>();
    }
    if (j.contains("mixer_nonzeros"))
      cfg.mixer_nonzeros = j.at("mixer_nonzeros").get<int>();
    if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();
    cfg.validate();
    return cfg;
  } catch (const json::exception& e) {
    fail(ErrorCode::parse_error,
         std::string("invalid generator config: ") + e.what());
  }
}

}  // namespace gco
