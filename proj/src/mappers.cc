#include "nlidb/mappers.h"

#include <algorithm>
#include <sstream>

#include "nlidb/error.h"
#include "nlidb/text.h"

namespace nlidb {

Lexicon DefaultStopwords() {
  return {"a",    "an",   "and",   "any",  "are", "as",    "at",   "be",
          "by",   "did",  "do",    "does", "for", "from",  "has",  "have",
          "how",  "in",   "is",    "it",   "its", "not",   "of",   "on",
          "or",   "that", "the",   "their", "to", "was",   "were", "what",
          "when", "where", "which", "who",  "whom", "whose", "with"};
}

Lexicon DefaultCondLexicon() {
  return {"more", "less", "than", "greater", "fewer", "least", "most", "after", "before"};
}

namespace {

bool AllStopwords(const std::vector<std::string> &words, const Lexicon &stopwords) {
  return std::all_of(words.begin(), words.end(), [&](const std::string &w) {
    return stopwords.count(ToLower(w)) != 0;
  });
}

bool HasMask(const std::vector<std::string> &words) {
  return std::any_of(words.begin(), words.end(),
                     [](const std::string &w) { return IsMaskToken(w); });
}

// Normalizes positive scores into a distribution.
Distribution Normalize(const std::map<std::string, double> &scores) {
  double total = 0.0;
  for (const auto &[tag, s] : scores) total += s;
  Distribution out;
  for (const auto &[tag, s] : scores) out[tag] = s / total;
  return out;
}

std::vector<std::string> SplitIdentifier(const std::string &name) {
  std::vector<std::string> words;
  for (auto &part : SplitList(name, '_')) words.push_back(std::move(part));
  return words;
}

}  // namespace

TaggedQuery MapValuesTfidf(const ValueIndex &index,
                           const std::vector<std::string> &tokens,
                           const Lexicon &stopwords) {
  TaggedQuery out = TaggedQuery::AllOther(tokens);
  size_t i = 0;
  while (i < tokens.size()) {
    size_t matched = 0;
    for (size_t n = std::min(kMaxNgram, tokens.size() - i); n >= 1; --n) {
      std::vector<std::string> span(tokens.begin() + i, tokens.begin() + i + n);
      if (HasMask(span) || AllStopwords(span, stopwords)) continue;
      const auto *postings = index.Lookup(NormalizeNgram(span));
      if (postings == nullptr || postings->empty()) continue;
      std::map<std::string, double> scores;
      for (const auto &p : *postings) scores[p.Tag()] = static_cast<double>(p.tf);
      Distribution dist = Normalize(scores);
      const std::string winner = postings->front().Tag();
      for (size_t k = i; k < i + n; ++k) out.Set(k, TypeTag::kValue, winner, dist);
      matched = n;
      break;
    }
    i += matched == 0 ? 1 : matched;
  }
  return out;
}

TaggedQuery MapRelationsLexical(const Schema &schema,
                                const std::vector<std::string> &tokens,
                                double threshold, const SynonymTable &synonyms,
                                const Lexicon &stopwords) {
  if (threshold < 0.0 || threshold > 1.0) {
    throw Error("map_relations_lexical", "threshold must lie in [0, 1]");
  }
  TaggedQuery out = TaggedQuery::AllOther(tokens);
  for (size_t i = 0; i < tokens.size(); ++i) {
    const std::string &token = tokens[i];
    if (IsMaskToken(token) || token.empty()) continue;
    const std::string lower = ToLower(token);
    if (stopwords.count(lower) != 0) continue;

    if (auto syn = synonyms.find(lower); syn != synonyms.end()) {
      out.Set(i, syn->second.type, syn->second.schema_tag, PointMass(syn->second.schema_tag));
      continue;
    }

    std::map<std::string, double> scores;
    std::map<std::string, TypeTag> types;
    auto consider = [&](const std::string &name, const std::string &tag, TypeTag type) {
      double sim = LexicalSimilarity(lower, name);
      if (sim < threshold || sim <= 0.0) return;
      if (sim > scores[tag]) {
        scores[tag] = sim;
        types[tag] = type;
      }
    };
    for (const auto &table : schema.tables()) {
      consider(table.name, table.name, TypeTag::kTable);
      for (const auto &column : table.columns) {
        if (schema.IsKeyColumn(table.name, column.name)) continue;
        consider(column.name, table.name + "." + column.name, TypeTag::kAttr);
      }
    }
    if (scores.empty()) continue;

    // Highest similarity, then the lexicographically smallest tag.
    std::string best;
    double best_sim = -1.0;
    for (const auto &[tag, sim] : scores) {
      if (sim > best_sim) {
        best = tag;
        best_sim = sim;
      }
    }
    out.Set(i, types[best], best, Normalize(scores));
  }
  return out;
}

EmbeddingMatcher::EmbeddingMatcher(const EmbeddingStore &store, const Schema &schema,
                                   const ValueIndex &index)
    : store_(store) {
  auto add = [&](TypeTag type, const std::string &tag, const std::vector<std::string> &words,
                 size_t width) {
    if (words.empty()) return;
    for (const auto &w : words) {
      if (store_.Find(w) == nullptr) return;
    }
    auto v = store_.Phrase(words);
    if (v) targets_.push_back(Target{type, tag, width, std::move(*v)});
  };
  for (const auto &table : schema.tables()) {
    add(TypeTag::kTable, table.name, SplitIdentifier(table.name), 1);
    for (const auto &column : table.columns) {
      if (schema.IsKeyColumn(table.name, column.name)) continue;
      add(TypeTag::kAttr, table.name + "." + column.name, SplitIdentifier(column.name), 1);
    }
  }
  for (const auto &[column, values] : index.values()) {
    if (!schema.IsTaggableColumn(column)) continue;
    for (const auto &value : values) {
      auto words = TokenTexts(value);
      if (words.empty() || words.size() > kMaxNgram) continue;
      add(TypeTag::kValue, column, words, words.size());
    }
  }
}

TaggedQuery EmbeddingMatcher::Map(const std::vector<std::string> &tokens, double threshold,
                                  const Lexicon &stopwords) const {
  if (threshold <= 0.0 || threshold > 1.0) {
    throw Error("map_with_embeddings", "threshold must lie in (0, 1]");
  }
  TaggedQuery out = TaggedQuery::AllOther(tokens);
  size_t i = 0;
  while (i < tokens.size()) {
    size_t matched = 0;
    for (size_t n = std::min(kMaxNgram, tokens.size() - i); n >= 1; --n) {
      std::vector<std::string> span(tokens.begin() + i, tokens.begin() + i + n);
      if (HasMask(span) || AllStopwords(span, stopwords)) continue;
      bool oov = std::any_of(span.begin(), span.end(),
                             [&](const std::string &w) { return store_.Find(w) == nullptr; });
      if (oov) continue;
      Vector query = *store_.Phrase(span);

      std::map<std::string, double> scores;
      std::map<std::string, TypeTag> types;
      for (const auto &target : targets_) {
        if (target.words != n) continue;
        double sim = Cosine(query, target.vector);
        if (sim < threshold) continue;
        if (sim > scores[target.tag]) {
          scores[target.tag] = sim;
          types[target.tag] = target.type;
        }
      }
      if (scores.empty()) continue;
      std::string best;
      double best_sim = -1.0;
      for (const auto &[tag, sim] : scores) {
        if (sim > best_sim) {
          best = tag;
          best_sim = sim;
        }
      }
      Distribution dist = Normalize(scores);
      for (size_t k = i; k < i + n; ++k) out.Set(k, types[best], best, dist);
      matched = n;
      break;
    }
    i += matched == 0 ? 1 : matched;
  }
  return out;
}

TaggedQuery MapWithEmbeddings(const EmbeddingStore &store, const Schema &schema,
                              const ValueIndex &index, const std::vector<std::string> &tokens,
                              double threshold, const Lexicon &stopwords) {
  return EmbeddingMatcher(store, schema, index).Map(tokens, threshold, stopwords);
}

TaggedQuery ComposeTagSequence(const std::vector<TaggedQuery> &layers,
                               const Lexicon &cond_lexicon) {
  if (layers.empty()) return {};
  const auto &tokens = layers.front().tokens;
  for (const auto &layer : layers) {
    if (layer.tokens != tokens || layer.type_tags.size() != tokens.size() ||
        layer.schema_tags.size() != tokens.size()) {
      throw Error("compose_tag_sequence", "layers disagree on the token list");
    }
  }
  TaggedQuery out = TaggedQuery::AllOther(tokens);
  for (size_t i = 0; i < tokens.size(); ++i) {
    bool taken = false;
    for (const auto &layer : layers) {
      if (layer.type_tags[i] == TypeTag::kOther) continue;
      Distribution dist = layer.distributions.size() == tokens.size()
                              ? layer.distributions[i]
                              : PointMass(layer.schema_tags[i]);
      out.Set(i, layer.type_tags[i], layer.schema_tags[i], std::move(dist));
      taken = true;
      break;
    }
    if (!taken && !IsMaskToken(tokens[i]) && cond_lexicon.count(ToLower(tokens[i])) != 0) {
      out.Set(i, TypeTag::kCond, std::string(kCondTag), PointMass(std::string(kCondTag)));
    }
  }
  return out;
}

std::vector<GoldQuery> LoadGoldTags(std::string_view text) {
  constexpr char kStage[] = "load_gold_tags";
  std::vector<GoldQuery> out;
  GoldQuery current;
  bool open = false;
  std::optional<std::string> pending_sql;

  auto close = [&]() {
    if (!open) return;
    current.tags.distributions.clear();
    for (const auto &tag : current.tags.schema_tags) {
      current.tags.distributions.push_back(PointMass(tag));
    }
    out.push_back(std::move(current));
    current = GoldQuery{};
    open = false;
  };

  size_t line_no = 0;
  size_t start = 0;
  while (start < text.size()) {
    size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    start = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);

    if (Trim(line).empty()) {
      close();
      continue;
    }
    if (line.front() == '#') {
      if (open) throw ParseError(kStage, "comment inside a tag block", line_no);
      std::string body = Trim(line.substr(1));
      if (body.rfind("sql:", 0) == 0) pending_sql = Trim(std::string_view(body).substr(4));
      continue;
    }

    std::vector<std::string> fields;
    size_t pos = 0;
    while (true) {
      size_t tab = line.find('\t', pos);
      if (tab == std::string_view::npos) {
        fields.emplace_back(line.substr(pos));
        break;
      }
      fields.emplace_back(line.substr(pos, tab - pos));
      pos = tab + 1;
    }
    if (fields.size() != 3) {
      throw ParseError(kStage, "ragged block: expected token, type tag and schema tag",
                       line_no);
    }
    auto type = ParseTypeTag(fields[1]);
    if (!type) throw ParseError(kStage, "unknown type tag \"" + fields[1] + "\"", line_no);
    if (auto problem = CheckTagPair(*type, fields[2])) {
      throw ParseError(kStage, *problem, line_no);
    }
    if (!open) {
      open = true;
      current.line = line_no;
      current.sql = std::move(pending_sql);
      pending_sql.reset();
    }
    current.tags.tokens.push_back(fields[0]);
    current.tags.type_tags.push_back(*type);
    current.tags.schema_tags.push_back(fields[2]);
  }
  close();
  return out;
}

std::vector<GoldQuery> LoadGoldTagsFile(const std::string &path) {
  return LoadGoldTags(ReadFile(path));
}

std::string FormatGoldTags(const std::vector<GoldQuery> &queries) {
  std::ostringstream out;
  for (size_t q = 0; q < queries.size(); ++q) {
    if (q > 0) out << '\n';
    const auto &query = queries[q];
    if (query.sql) out << "# sql: " << *query.sql << '\n';
    for (size_t i = 0; i < query.tags.size(); ++i) {
      out << query.tags.tokens[i] << '\t' << TypeTagName(query.tags.type_tags[i]) << '\t'
          << query.tags.schema_tags[i] << '\n';
    }
  }
  return out.str();
}

AutoTagger::AutoTagger(const Schema &schema, const ValueIndex &index,
                       const EmbeddingStore *store, TaggerConfig config)
    : schema_(schema), index_(index), config_(std::move(config)) {
  if (store != nullptr) embeddings_.emplace(*store, schema, index);
}

TaggedQuery AutoTagger::Tag(const std::vector<std::string> &tokens) const {
  std::vector<TaggedQuery> layers;
  layers.push_back(MapValuesTfidf(index_, tokens, config_.stopwords));
  layers.push_back(MapRelationsLexical(schema_, tokens, config_.lexical_threshold,
                                       config_.synonyms, config_.stopwords));
  if (embeddings_) {
    layers.push_back(embeddings_->Map(tokens, config_.embedding_threshold, config_.stopwords));
  }
  TaggedQuery out = ComposeTagSequence(layers, config_.cond_lexicon);

  if (config_.context_boost == 1.0) return out;
  std::set<std::string> mentioned;
  for (size_t i = 0; i < out.size(); ++i) {
    if (out.type_tags[i] == TypeTag::kTable || out.type_tags[i] == TypeTag::kTableRef) {
      mentioned.insert(out.schema_tags[i]);
    }
  }
  if (mentioned.empty()) return out;
  for (size_t i = 0; i < out.size(); ++i) {
    if (out.type_tags[i] != TypeTag::kValue) continue;
    std::map<std::string, double> scores;
    for (const auto &[tag, p] : out.distributions[i]) {
      scores[tag] = p * (mentioned.count(TableOfTag(tag)) != 0 ? config_.context_boost : 1.0);
    }
    Distribution dist = Normalize(scores);
    std::string winner = ArgMax(dist);
    out.Set(i, TypeTag::kValue, winner, std::move(dist));
  }
  return out;
}

std::vector<Distribution> AutoTagger::Distributions(
    const std::vector<std::string> &tokens) const {
  return Tag(tokens).distributions;
}

}  // namespace nlidb
