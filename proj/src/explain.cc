#include "nlidb/explain.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include <Eigen/Dense>

#include "nlidb/error.h"
#include "nlidb/text.h"

namespace nlidb {

std::vector<Mask> GeneratePerturbations(size_t n, size_t samples, uint64_t seed,
                                        SamplingMode mode) {
  constexpr char kStage[] = "generate_perturbations";
  if (n == 0) throw Error(kStage, "token count must be at least 1");

  if (mode == SamplingMode::kExhaustive) {
    if (n > kMaxExhaustiveTokens) {
      throw Error(kStage, "exhaustive sampling supports at most " +
                              std::to_string(kMaxExhaustiveTokens) + " tokens, got " +
                              std::to_string(n));
    }
    const uint64_t total = uint64_t{1} << n;
    std::vector<Mask> masks;
    masks.reserve(total);
    for (uint64_t code = total; code-- > 0;) {
      Mask mask(n);
      for (size_t i = 0; i < n; ++i) mask[i] = static_cast<uint8_t>((code >> i) & 1U);
      masks.push_back(std::move(mask));
    }
    return masks;
  }

  if (samples == 0) throw Error(kStage, "sample count must be at least 1");
  std::mt19937_64 rng(seed);
  std::vector<Mask> masks;
  masks.reserve(samples);
  masks.emplace_back(n, uint8_t{1});
  std::vector<size_t> order(n);
  for (size_t s = 1; s < samples; ++s) {
    const size_t removed = std::uniform_int_distribution<size_t>(0, n - 1)(rng);
    std::iota(order.begin(), order.end(), size_t{0});
    Mask mask(n, uint8_t{1});
    for (size_t k = 0; k < removed; ++k) {
      size_t pick = std::uniform_int_distribution<size_t>(k, n - 1)(rng);
      std::swap(order[k], order[pick]);
      mask[order[k]] = 0;
    }
    masks.push_back(std::move(mask));
  }
  return masks;
}

double KernelWeight(const Mask &mask, double kernel_width) {
  const double zeros = static_cast<double>(std::count(mask.begin(), mask.end(), uint8_t{0}));
  const double d = zeros / static_cast<double>(mask.size());
  return std::exp(-(d * d) / (kernel_width * kernel_width));
}

std::optional<SurrogateFit> FitSurrogate(const std::vector<Mask> &masks,
                                         const std::vector<double> &targets,
                                         const std::vector<double> &weights, double ridge) {
  const size_t m = masks.size();
  if (m == 0 || targets.size() != m || weights.size() != m) return std::nullopt;
  const size_t n = masks.front().size();

  auto [lo, hi] = std::minmax_element(targets.begin(), targets.end());
  if (*hi - *lo <= 0.0) return std::nullopt;

  // Rows scaled by sqrt(w); ridge rows append sqrt(lambda) * I on the
  // feature columns so the intercept stays unpenalized.
  const size_t ridge_rows = ridge > 0.0 ? n : 0;
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(m + ridge_rows),
                                            static_cast<Eigen::Index>(n + 1));
  Eigen::VectorXd b = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(m + ridge_rows));
  for (size_t r = 0; r < m; ++r) {
    const double s = std::sqrt(weights[r]);
    const auto row = static_cast<Eigen::Index>(r);
    a(row, 0) = s;
    for (size_t j = 0; j < n; ++j) {
      a(row, static_cast<Eigen::Index>(j + 1)) = s * masks[r][j];
    }
    b(row) = s * targets[r];
  }
  const double root_ridge = std::sqrt(ridge);
  for (size_t j = 0; j < ridge_rows; ++j) {
    a(static_cast<Eigen::Index>(m + j), static_cast<Eigen::Index>(j + 1)) = root_ridge;
  }

  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(a);
  qr.setThreshold(1e-10);
  if (qr.rank() < static_cast<Eigen::Index>(n + 1)) return std::nullopt;
  Eigen::VectorXd theta = qr.solve(b);
  if (!theta.allFinite()) return std::nullopt;

  SurrogateFit fit;
  fit.intercept = theta(0);
  fit.coefficients.resize(n);
  for (size_t j = 0; j < n; ++j) fit.coefficients[j] = theta(static_cast<Eigen::Index>(j + 1));
  return fit;
}

Explanation ExplainToken(const BlackBox &black_box, const TaggedQuery &query,
                         size_t token_index, const LimeConfig &config, bool allow_other) {
  constexpr char kStage[] = "explain";
  const size_t n = query.tokens.size();
  if (token_index >= n) {
    throw Error(kStage, "token index " + std::to_string(token_index) + " out of range");
  }
  if (query.schema_tags.size() != n || query.type_tags.size() != n) {
    throw Error(kStage, "query tags do not match its tokens");
  }
  if (query.type_tags[token_index] == TypeTag::kOther && !allow_other) {
    throw Error(kStage, "token \"" + query.tokens[token_index] + "\" is tagged O");
  }
  if (config.kernel_width <= 0.0) throw Error(kStage, "kernel width must be positive");
  if (config.ridge < 0.0) throw Error(kStage, "ridge must be non-negative");

  const std::string &target = query.schema_tags[token_index];
  const auto masks = GeneratePerturbations(n, config.samples, config.seed, config.mode);

  std::vector<double> targets;
  std::vector<double> weights;
  targets.reserve(masks.size());
  weights.reserve(masks.size());
  std::vector<std::string> perturbed(n);
  for (const auto &mask : masks) {
    for (size_t i = 0; i < n; ++i) {
      perturbed[i] = mask[i] != 0 ? query.tokens[i] : std::string(kMaskToken);
    }
    const auto output = black_box(perturbed);
    if (output.size() != n) {
      throw Error(kStage, "black box returned " + std::to_string(output.size()) +
                              " distributions for " + std::to_string(n) + " tokens");
    }
    const auto &dist = output[token_index];
    auto it = dist.find(target);
    targets.push_back(it == dist.end() ? 0.0 : it->second);
    weights.push_back(KernelWeight(mask, config.kernel_width));
  }

  Explanation out;
  out.token_index = token_index;
  out.target_tag = target;
  out.samples = masks.size();
  out.seed = config.seed;
  auto fit = FitSurrogate(masks, targets, weights, config.ridge);
  if (fit) {
    out.intercept = fit->intercept;
  } else {
    out.status = FitStatus::kDegenerate;
    out.intercept = targets.front();
  }
  for (size_t i = 0; i < n; ++i) {
    out.contributions.push_back(
        Contribution{i, query.tokens[i], fit ? fit->coefficients[i] : 0.0});
  }
  return out;
}

std::vector<TokenExplanation> ExplainQuery(const BlackBox &black_box, const TaggedQuery &query,
                                           const LimeConfig &config) {
  std::vector<TokenExplanation> out;
  for (size_t i = 0; i < query.type_tags.size(); ++i) {
    if (query.type_tags[i] == TypeTag::kOther) continue;
    LimeConfig token_config = config;
    token_config.seed = config.seed ^ static_cast<uint64_t>(i);
    TokenExplanation entry;
    entry.token_index = i;
    try {
      entry.explanation = ExplainToken(black_box, query, i, token_config);
    } catch (const Error &e) {
      entry.error = e.what();
    }
    out.push_back(std::move(entry));
  }
  return out;
}

nlohmann::json Explanation::ToJson() const {
  nlohmann::json list = nlohmann::json::array();
  for (const auto &c : contributions) {
    list.push_back({{"index", c.index}, {"token", c.token}, {"score", c.score}});
  }
  return {{"token_index", token_index},
          {"target_tag", target_tag},
          {"contributions", list},
          {"intercept", intercept},
          {"samples", samples},
          {"seed", seed},
          {"status", status == FitStatus::kOk ? "ok" : "degenerate"}};
}

}  // namespace nlidb
