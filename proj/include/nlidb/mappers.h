#pragma once

#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "nlidb/embedding_store.h"
#include "nlidb/schema.h"
#include "nlidb/tags.h"
#include "nlidb/value_index.h"

namespace nlidb {

// Lowercase word set.
using Lexicon = std::set<std::string, std::less<>>;

Lexicon DefaultStopwords();
Lexicon DefaultCondLexicon();

// Exact value lookup over token n-grams, longest first, left to right,
// without overlap. Spans made only of stopwords are never looked up. The
// column with the largest tf wins; the distribution is tf-normalized.
TaggedQuery MapValuesTfidf(const ValueIndex &index,
                           const std::vector<std::string> &tokens,
                           const Lexicon &stopwords = {});

// Fixed token-to-schema mapping taken from configuration, matched before
// edit distance (e.g. "produced" -> TABLEREF copyright).
struct Synonym {
  TypeTag type = TypeTag::kTable;
  std::string schema_tag;
};
using SynonymTable = std::map<std::string, Synonym, std::less<>>;

// Edit-distance match of single tokens against table names and non-key
// column names. Similarity is 1 - distance / max_len on lowercased text.
TaggedQuery MapRelationsLexical(const Schema &schema,
                                const std::vector<std::string> &tokens,
                                double threshold,
                                const SynonymTable &synonyms = {},
                                const Lexicon &stopwords = {});

// Cosine matching in embedding space. Table and column names are embedded as
// the mean of their '_'-separated words, values as the mean of their words.
// Windows containing an out-of-vocabulary word are skipped.
class EmbeddingMatcher {
 public:
  EmbeddingMatcher(const EmbeddingStore &store, const Schema &schema,
                   const ValueIndex &index);

  TaggedQuery Map(const std::vector<std::string> &tokens, double threshold,
                  const Lexicon &stopwords = {}) const;

 private:
  struct Target {
    TypeTag type;
    std::string tag;
    size_t words;  // 1 for schema names, word count for values
    Vector vector;
  };

  const EmbeddingStore &store_;
  std::vector<Target> targets_;
};

TaggedQuery MapWithEmbeddings(const EmbeddingStore &store, const Schema &schema,
                              const ValueIndex &index,
                              const std::vector<std::string> &tokens,
                              double threshold, const Lexicon &stopwords = {});

// Per token, the first layer with a non-O tag wins; remaining O tokens found
// in `cond_lexicon` become COND. Layers must share one token list.
TaggedQuery ComposeTagSequence(const std::vector<TaggedQuery> &layers,
                               const Lexicon &cond_lexicon);

struct GoldQuery {
  TaggedQuery tags;
  std::optional<std::string> sql;
  size_t line = 0;  // line of the first token
};

// Reads "token\ttype_tag\tschema_tag" blocks separated by blank lines, each
// optionally preceded by "# sql: <gold SQL>". Distributions are point masses.
std::vector<GoldQuery> LoadGoldTags(std::string_view text);
std::vector<GoldQuery> LoadGoldTagsFile(const std::string &path);
std::string FormatGoldTags(const std::vector<GoldQuery> &queries);

struct TaggerConfig {
  double lexical_threshold = 0.8;
  double embedding_threshold = 0.6;
  // Weight applied to VALUE candidates whose table is named elsewhere in
  // the query. 1 disables the reweighting.
  double context_boost = 2.0;
  Lexicon stopwords = DefaultStopwords();
  Lexicon cond_lexicon = DefaultCondLexicon();
  SynonymTable synonyms;
};

// Stacks value-index, lexical and (when available) embedding layers, then
// reweights ambiguous values toward tables the query mentions. Stateless
// after construction; safe for concurrent use.
class AutoTagger {
 public:
  AutoTagger(const Schema &schema, const ValueIndex &index,
             const EmbeddingStore *store, TaggerConfig config);

  TaggedQuery Tag(const std::vector<std::string> &tokens) const;
  std::vector<Distribution> Distributions(const std::vector<std::string> &tokens) const;

  const TaggerConfig &config() const { return config_; }

 private:
  const Schema &schema_;
  const ValueIndex &index_;
  std::optional<EmbeddingMatcher> embeddings_;
  TaggerConfig config_;
};

}  // namespace nlidb
