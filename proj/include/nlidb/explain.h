#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "nlidb/tags.h"

namespace nlidb {

// Token list in, one schema-tag distribution per token out. Masked tokens
// arrive as kMaskToken in their original position.
using BlackBox =
    std::function<std::vector<Distribution>(const std::vector<std::string> &)>;

using Mask = std::vector<uint8_t>;  // 1 = token present

enum class SamplingMode { kSampled, kExhaustive };

inline constexpr size_t kMaxExhaustiveTokens = 16;

// Sampled: the all-ones mask first, then masks built by drawing a removal
// count uniformly from [0, n-1] and a uniform subset of that size.
// Exhaustive: all 2^n masks, starting from all-ones.
std::vector<Mask> GeneratePerturbations(size_t n, size_t samples, uint64_t seed,
                                        SamplingMode mode);

struct LimeConfig {
  size_t samples = 1000;
  uint64_t seed = 42;
  double kernel_width = 0.25;
  double ridge = 1e-3;
  SamplingMode mode = SamplingMode::kSampled;
};

// exp(-d^2 / width^2) with d the masked fraction.
double KernelWeight(const Mask &mask, double kernel_width);

struct Contribution {
  size_t index = 0;
  std::string token;
  double score = 0.0;
};

enum class FitStatus { kOk, kDegenerate };

struct Explanation {
  size_t token_index = 0;
  std::string target_tag;
  std::vector<Contribution> contributions;
  double intercept = 0.0;
  size_t samples = 0;
  uint64_t seed = 0;
  FitStatus status = FitStatus::kOk;

  nlohmann::json ToJson() const;
};

// Weighted ridge fit of y on mask features with an unpenalized intercept.
// Returns nullopt when the system is singular or y is constant.
struct SurrogateFit {
  double intercept = 0.0;
  std::vector<double> coefficients;
};
std::optional<SurrogateFit> FitSurrogate(const std::vector<Mask> &masks,
                                         const std::vector<double> &targets,
                                         const std::vector<double> &weights,
                                         double ridge);

// Explains the schema tag `query` assigns to `token_index`. The target
// probability of each perturbed sample is read at that same position.
// Throws nlidb::Error for a bad index, an O-tagged token (unless
// allow_other), or a black box returning the wrong number of distributions.
Explanation ExplainToken(const BlackBox &black_box, const TaggedQuery &query,
                         size_t token_index, const LimeConfig &config,
                         bool allow_other = false);

struct TokenExplanation {
  size_t token_index = 0;
  std::optional<Explanation> explanation;
  std::string error;  // set when explanation is empty
};

// One explanation per non-O token, in token order, with seed_i = seed ^ i.
std::vector<TokenExplanation> ExplainQuery(const BlackBox &black_box,
                                           const TaggedQuery &query,
                                           const LimeConfig &config);

}  // namespace nlidb
