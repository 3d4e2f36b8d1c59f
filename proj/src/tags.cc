#include "nlidb/tags.h"

#include <cmath>

#include "nlidb/error.h"

namespace nlidb {

std::string_view TypeTagName(TypeTag tag) {
  switch (tag) {
    case TypeTag::kTable:
      return "TABLE";
    case TypeTag::kTableRef:
      return "TABLEREF";
    case TypeTag::kAttr:
      return "ATTR";
    case TypeTag::kAttrRef:
      return "ATTRREF";
    case TypeTag::kValue:
      return "VALUE";
    case TypeTag::kCond:
      return "COND";
    case TypeTag::kOther:
      return "O";
  }
  return "O";
}

std::optional<TypeTag> ParseTypeTag(std::string_view name) {
  for (TypeTag tag : kAllTypeTags) {
    if (TypeTagName(tag) == name) return tag;
  }
  return std::nullopt;
}

bool IsRelationTag(TypeTag tag) {
  return tag == TypeTag::kTable || tag == TypeTag::kTableRef ||
         tag == TypeTag::kAttr || tag == TypeTag::kAttrRef;
}

Distribution PointMass(const std::string &tag) { return Distribution{{tag, 1.0}}; }

TaggedQuery TaggedQuery::AllOther(std::vector<std::string> tokens) {
  TaggedQuery query;
  const size_t n = tokens.size();
  query.tokens = std::move(tokens);
  query.type_tags.assign(n, TypeTag::kOther);
  query.schema_tags.assign(n, std::string(kOtherTag));
  query.distributions.assign(n, PointMass(std::string(kOtherTag)));
  return query;
}

void TaggedQuery::Set(size_t index, TypeTag type, std::string schema_tag,
                      Distribution distribution) {
  type_tags.at(index) = type;
  schema_tags.at(index) = std::move(schema_tag);
  if (distributions.size() != tokens.size()) {
    distributions.resize(tokens.size());
  }
  distributions[index] = std::move(distribution);
}

std::optional<std::string> CheckTagPair(TypeTag type, std::string_view schema_tag) {
  const bool dotted = schema_tag.find('.') != std::string_view::npos;
  const std::string shown = std::string(TypeTagName(type)) + "/" + std::string(schema_tag);
  switch (type) {
    case TypeTag::kValue:
    case TypeTag::kAttr:
    case TypeTag::kAttrRef:
      if (!SplitDotted(schema_tag)) return shown + ": expected a table.column schema tag";
      return std::nullopt;
    case TypeTag::kTable:
    case TypeTag::kTableRef:
      if (dotted || schema_tag.empty() || schema_tag == kCondTag || schema_tag == kOtherTag) {
        return shown + ": expected a table schema tag";
      }
      return std::nullopt;
    case TypeTag::kCond:
      if (schema_tag != kCondTag) return shown + ": COND pairs only with COND";
      return std::nullopt;
    case TypeTag::kOther:
      if (schema_tag != kOtherTag) return shown + ": O pairs only with O";
      return std::nullopt;
  }
  return std::nullopt;
}

void ValidateTaggedQuery(const TaggedQuery &query, std::string_view stage) {
  const std::string s(stage);
  const size_t n = query.tokens.size();
  if (query.type_tags.size() != n || query.schema_tags.size() != n) {
    throw Error(s, "tag arrays do not match the token count");
  }
  if (!query.distributions.empty() && query.distributions.size() != n) {
    throw Error(s, "distribution array does not match the token count");
  }
  for (size_t i = 0; i < n; ++i) {
    if (auto problem = CheckTagPair(query.type_tags[i], query.schema_tags[i])) {
      throw Error(s, "token " + std::to_string(i) + " \"" + query.tokens[i] + "\": " + *problem);
    }
    if (query.distributions.empty()) continue;
    const auto &dist = query.distributions[i];
    double total = 0.0;
    double best = 0.0;
    for (const auto &[tag, p] : dist) {
      if (!std::isfinite(p) || p < 0.0) {
        throw Error(s, "token " + std::to_string(i) + ": invalid probability");
      }
      total += p;
      best = std::max(best, p);
    }
    if (std::abs(total - 1.0) > 1e-9) {
      throw Error(s, "token " + std::to_string(i) + ": distribution sums to " +
                         std::to_string(total));
    }
    auto it = dist.find(query.schema_tags[i]);
    if (it == dist.end() || it->second + 1e-12 < best) {
      throw Error(s, "token " + std::to_string(i) + ": emitted tag is not the distribution argmax");
    }
  }
}

void ValidateAgainstSchema(const TaggedQuery &query, const Schema &schema,
                           std::string_view stage) {
  ValidateTaggedQuery(query, stage);
  for (size_t i = 0; i < query.size(); ++i) {
    const std::string &tag = query.schema_tags[i];
    switch (query.type_tags[i]) {
      case TypeTag::kTable:
      case TypeTag::kTableRef:
        if (schema.FindTable(tag) == nullptr) {
          throw Error(std::string(stage), "token \"" + query.tokens[i] +
                                              "\": unknown table \"" + tag + "\"");
        }
        break;
      case TypeTag::kAttr:
      case TypeTag::kAttrRef:
      case TypeTag::kValue:
        if (!schema.IsTaggableColumn(tag)) {
          throw Error(std::string(stage), "token \"" + query.tokens[i] +
                                              "\": \"" + tag +
                                              "\" is not a taggable column");
        }
        break;
      default:
        break;
    }
  }
}

std::string ArgMax(const Distribution &distribution) {
  std::string best;
  double best_p = -1.0;
  // std::map iterates in tag order, so strict > keeps the smallest tag on ties.
  for (const auto &[tag, p] : distribution) {
    if (p > best_p) {
      best = tag;
      best_p = p;
    }
  }
  return best;
}

std::string TableOfTag(std::string_view schema_tag) {
  if (schema_tag == kCondTag || schema_tag == kOtherTag) return {};
  size_t dot = schema_tag.find('.');
  return std::string(dot == std::string_view::npos ? schema_tag : schema_tag.substr(0, dot));
}

}  // namespace nlidb
