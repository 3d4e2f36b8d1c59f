#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "nlidb/schema.h"

namespace nlidb {

inline constexpr size_t kMaxNgram = 3;

struct Posting {
  std::string table;
  std::string column;
  size_t tf = 0;  // rows of this column containing the n-gram

  std::string Tag() const { return table + "." + column; }
};

// Inverted index from normalized value n-grams (n <= 3) to the columns that
// hold them.
class ValueIndex {
 public:
  // Postings sorted by descending tf, then by column tag. nullptr on a miss.
  const std::vector<Posting> *Lookup(std::string_view ngram) const;

  // Number of columns containing the n-gram.
  size_t DocumentFrequency(std::string_view ngram) const;

  size_t ngram_count() const { return postings_.size(); }
  size_t row_count() const { return row_count_; }

  // Distinct values per "table.column", in first-seen order and original case.
  const std::map<std::string, std::vector<std::string>> &values() const {
    return values_;
  }

  void AddValue(const std::string &table, const std::string &column,
                const std::string &value);
  void Finalize();

 private:
  std::map<std::string, std::vector<Posting>, std::less<>> postings_;
  std::map<std::string, std::vector<std::string>> values_;
  size_t row_count_ = 0;
};

// Lowercased tokens of a value or query span, joined by single spaces.
std::string NormalizeNgram(const std::vector<std::string> &tokens);

// Parses the value-corpus TSV (header "table\tcolumn\tvalue"). Throws
// nlidb::ParseError with the 1-based line on wrong arity.
ValueIndex BuildValueIndex(std::string_view tsv);
ValueIndex BuildValueIndexFile(const std::string &path);

// Every indexed column must be a taggable column of `schema`.
void ValidateIndexAgainstSchema(const ValueIndex &index, const Schema &schema);

}  // namespace nlidb
