#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "nlidb/schema.h"

namespace nlidb {

enum class TypeTag { kTable, kTableRef, kAttr, kAttrRef, kValue, kCond, kOther };

inline constexpr TypeTag kAllTypeTags[] = {
    TypeTag::kTable, TypeTag::kTableRef, TypeTag::kAttr, TypeTag::kAttrRef,
    TypeTag::kValue, TypeTag::kCond,     TypeTag::kOther};

std::string_view TypeTagName(TypeTag tag);
std::optional<TypeTag> ParseTypeTag(std::string_view name);

// TABLE, TABLEREF, ATTR, ATTRREF: tokens that name schema elements.
bool IsRelationTag(TypeTag tag);

inline constexpr std::string_view kCondTag = "COND";
inline constexpr std::string_view kOtherTag = "O";

// Probability over schema tags for one token.
using Distribution = std::map<std::string, double>;

Distribution PointMass(const std::string &tag);

// Token sequence with parallel type tags, schema tags and (optionally)
// per-token distributions.
struct TaggedQuery {
  std::vector<std::string> tokens;
  std::vector<TypeTag> type_tags;
  std::vector<std::string> schema_tags;
  std::vector<Distribution> distributions;  // empty or one per token

  size_t size() const { return tokens.size(); }

  // All tokens tagged O with point-mass distributions.
  static TaggedQuery AllOther(std::vector<std::string> tokens);

  void Set(size_t index, TypeTag type, std::string schema_tag,
           Distribution distribution);
};

// Form check between a type tag and a schema tag, without a schema:
// VALUE/ATTR/ATTRREF need "table.column", TABLE/TABLEREF a bare name,
// COND and O pair with themselves. Returns an error message or nullopt.
std::optional<std::string> CheckTagPair(TypeTag type, std::string_view schema_tag);

// Structural invariants: parallel lengths, pairwise consistency,
// distributions summing to one with the emitted tag as argmax. Throws
// nlidb::Error with the given stage.
void ValidateTaggedQuery(const TaggedQuery &query, std::string_view stage);

// Additionally checks that every schema tag references the schema: table tags
// name tables, dotted tags name non-key columns.
void ValidateAgainstSchema(const TaggedQuery &query, const Schema &schema,
                           std::string_view stage);

// Argmax with deterministic tie-breaking on the tag string.
std::string ArgMax(const Distribution &distribution);

// Table part of a schema tag: the tag itself for table tags, the prefix for
// dotted tags, empty for COND/O.
std::string TableOfTag(std::string_view schema_tag);

}  // namespace nlidb
