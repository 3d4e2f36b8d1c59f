#pragma once

#include <string>
#include <string_view>

namespace nlidb {

// Canonical form of SQL in the subset the translator emits:
//
//   SELECT * | FUNC(*) | FUNC(col) | col, ... FROM t, ...
//     [WHERE cond AND cond ...]
//
// where each cond is "operand op operand", optionally parenthesized.
// Keywords are uppercased, identifiers lowercased, FROM tables sorted,
// literals (numbers included) double-quoted, column operands ordered, and
// conjuncts sorted. Text outside the subset comes back with `canonical`
// false and whitespace-collapsed text.
struct CanonicalSql {
  std::string text;
  bool canonical = false;
};

CanonicalSql CanonicalizeSql(std::string_view sql);

// Exact-match verdict: canonical equality when both sides canonicalize,
// otherwise equality of the whitespace-collapsed texts.
bool SqlMatches(std::string_view predicted, std::string_view gold);

enum class Category { kSingleTable, kMultiTable, kAggregate, kNested };

std::string_view CategoryName(Category category);

// NESTED when a SELECT appears inside parentheses; else AGGREGATE when the
// outer select list calls SUM/COUNT/AVG/MIN/MAX; else by FROM table count.
// Throws nlidb::Error (stage "categorize") on text that is not a query.
Category CategorizeGoldSql(std::string_view sql);

}  // namespace nlidb
