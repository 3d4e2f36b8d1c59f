#include "nlidb/value_index.h"

#include <algorithm>
#include <set>

#include "nlidb/error.h"
#include "nlidb/text.h"

namespace nlidb {

namespace {
constexpr char kStage[] = "build_value_index";
}  // namespace

std::string NormalizeNgram(const std::vector<std::string> &tokens) {
  std::string out;
  for (size_t i = 0; i < tokens.size(); ++i) {
    if (i > 0) out.push_back(' ');
    out += ToLower(tokens[i]);
  }
  return out;
}

const std::vector<Posting> *ValueIndex::Lookup(std::string_view ngram) const {
  auto it = postings_.find(ngram);
  return it == postings_.end() ? nullptr : &it->second;
}

size_t ValueIndex::DocumentFrequency(std::string_view ngram) const {
  const auto *postings = Lookup(ngram);
  return postings == nullptr ? 0 : postings->size();
}

void ValueIndex::AddValue(const std::string &table, const std::string &column,
                          const std::string &value) {
  ++row_count_;
  auto &distinct = values_[table + "." + column];
  if (std::find(distinct.begin(), distinct.end(), value) == distinct.end()) {
    distinct.push_back(value);
  }

  std::vector<std::string> words = TokenTexts(value);
  // A row contributes at most once to each n-gram's tf.
  std::set<std::string> seen;
  for (size_t n = 1; n <= kMaxNgram; ++n) {
    for (size_t i = 0; i + n <= words.size(); ++i) {
      std::vector<std::string> span(words.begin() + i, words.begin() + i + n);
      seen.insert(NormalizeNgram(span));
    }
  }
  for (const auto &gram : seen) {
    auto &postings = postings_[gram];
    auto it = std::find_if(postings.begin(), postings.end(), [&](const Posting &p) {
      return p.table == table && p.column == column;
    });
    if (it == postings.end()) {
      postings.push_back(Posting{table, column, 1});
    } else {
      ++it->tf;
    }
  }
}

void ValueIndex::Finalize() {
  for (auto &[gram, postings] : postings_) {
    std::sort(postings.begin(), postings.end(), [](const Posting &a, const Posting &b) {
      if (a.tf != b.tf) return a.tf > b.tf;
      return a.Tag() < b.Tag();
    });
  }
}

ValueIndex BuildValueIndex(std::string_view tsv) {
  ValueIndex index;
  size_t line_no = 0;
  size_t start = 0;
  bool header_seen = false;
  while (start < tsv.size()) {
    size_t end = tsv.find('\n', start);
    if (end == std::string_view::npos) end = tsv.size();
    std::string_view line = tsv.substr(start, end - start);
    start = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;

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
      throw ParseError(kStage, "expected 3 tab-separated fields, found " +
                                   std::to_string(fields.size()), line_no);
    }
    if (!header_seen) {
      header_seen = true;
      if (fields[0] != "table" || fields[1] != "column" || fields[2] != "value") {
        throw ParseError(kStage, "header must be \"table\\tcolumn\\tvalue\"", line_no);
      }
      continue;
    }
    if (fields[0].empty() || fields[1].empty()) {
      throw ParseError(kStage, "empty table or column name", line_no);
    }
    if (fields[2].empty()) continue;
    index.AddValue(fields[0], fields[1], fields[2]);
  }
  index.Finalize();
  return index;
}

ValueIndex BuildValueIndexFile(const std::string &path) {
  return BuildValueIndex(ReadFile(path));
}

void ValidateIndexAgainstSchema(const ValueIndex &index, const Schema &schema) {
  for (const auto &[column, values] : index.values()) {
    if (!schema.IsTaggableColumn(column)) {
      throw Error(kStage, "value corpus column \"" + column +
                              "\" is not a non-key column of schema \"" +
                              schema.name() + "\"");
    }
  }
}

}  // namespace nlidb
