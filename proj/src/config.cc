#include "nlidb/config.h"

#include <charconv>
#include <limits>

#include "nlidb/error.h"
#include "nlidb/text.h"

namespace nlidb {
namespace {

constexpr char kStage[] = "load_config";

std::string Unquote(const std::string &v) {
  if (v.size() >= 2 && (v.front() == '"' || v.front() == '\'') && v.back() == v.front()) {
    return v.substr(1, v.size() - 2);
  }
  return v;
}

double ParseDouble(const std::string &v, size_t line) {
  double out = 0.0;
  auto [end, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || end != v.data() + v.size()) {
    throw ParseError(kStage, "expected a number, got \"" + v + "\"", line);
  }
  return out;
}

uint64_t ParseUnsigned(const std::string &v, size_t line) {
  uint64_t out = 0;
  auto [end, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || end != v.data() + v.size()) {
    throw ParseError(kStage, "expected a non-negative integer, got \"" + v + "\"", line);
  }
  return out;
}

bool ParseBool(const std::string &v, size_t line) {
  if (v == "true") return true;
  if (v == "false") return false;
  throw ParseError(kStage, "expected true or false, got \"" + v + "\"", line);
}

Lexicon ParseLexicon(const std::string &v) {
  Lexicon out;
  for (const auto &word : SplitList(v, ',')) out.insert(ToLower(word));
  return out;
}

void Apply(ServiceConfig &c, const std::string &key, const std::string &v, size_t line) {
  if (key == "lexical_threshold") {
    c.tagger.lexical_threshold = ParseDouble(v, line);
  } else if (key == "embedding_threshold") {
    c.tagger.embedding_threshold = ParseDouble(v, line);
  } else if (key == "context_boost") {
    c.tagger.context_boost = ParseDouble(v, line);
    if (c.tagger.context_boost <= 0.0) throw ParseError(kStage, "context_boost must be positive", line);
  } else if (key == "prev_window") {
    c.translate.prev_window = ParseUnsigned(v, line);
  } else if (key == "cond_operators") {
    c.translate.where.cond_operators = ParseBool(v, line);
  } else if (key == "stopwords") {
    c.tagger.stopwords = ParseLexicon(v);
  } else if (key == "cond_lexicon") {
    c.tagger.cond_lexicon = ParseLexicon(v);
  } else if (key == "lexicon.count") {
    c.translate.lexicons.count = ParseLexicon(v);
  } else if (key == "lexicon.sum") {
    c.translate.lexicons.sum = ParseLexicon(v);
  } else if (key == "lexicon.avg") {
    c.translate.lexicons.avg = ParseLexicon(v);
  } else if (key == "lime.samples") {
    c.lime.samples = ParseUnsigned(v, line);
    if (c.lime.samples == 0) throw ParseError(kStage, "lime.samples must be at least 1", line);
  } else if (key == "lime.seed") {
    c.lime.seed = ParseUnsigned(v, line);
  } else if (key == "lime.kernel_width") {
    c.lime.kernel_width = ParseDouble(v, line);
    if (c.lime.kernel_width <= 0.0) throw ParseError(kStage, "lime.kernel_width must be positive", line);
  } else if (key == "lime.ridge") {
    c.lime.ridge = ParseDouble(v, line);
    if (c.lime.ridge < 0.0) throw ParseError(kStage, "lime.ridge must be non-negative", line);
  } else if (key == "lime.mode") {
    if (v == "sampled") {
      c.lime.mode = SamplingMode::kSampled;
    } else if (v == "exhaustive") {
      c.lime.mode = SamplingMode::kExhaustive;
    } else {
      throw ParseError(kStage, "lime.mode must be sampled or exhaustive", line);
    }
  } else if (key.rfind("synonym.", 0) == 0 && key.size() > 8) {
    const auto colon = v.find(':');
    if (colon == std::string::npos) throw ParseError(kStage, "synonym needs TYPE:tag", line);
    auto type = ParseTypeTag(v.substr(0, colon));
    std::string tag = v.substr(colon + 1);
    if (!type || !IsRelationTag(*type)) {
      throw ParseError(kStage, "synonym type must be TABLE, TABLEREF, ATTR or ATTRREF", line);
    }
    if (auto err = CheckTagPair(*type, tag)) throw ParseError(kStage, *err, line);
    c.tagger.synonyms[ToLower(key.substr(8))] = Synonym{*type, tag};
  } else {
    throw ParseError(kStage, "unknown key \"" + key + "\"", line);
  }
}

}  // namespace

ServiceConfig ParseConfig(std::string_view text) {
  ServiceConfig config;
  std::string section;
  size_t line_no = 0;
  size_t start = 0;
  while (start <= text.size()) {
    size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    ++line_no;
    std::string line = Trim(text.substr(start, end - start));
    start = end + 1;
    if (line.empty() || line.front() == '#') continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ParseError(kStage, "unterminated section header", line_no);
      section = Trim(std::string_view(line).substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ParseError(kStage, "expected key = value", line_no);
    std::string key = Trim(std::string_view(line).substr(0, eq));
    std::string value = Unquote(Trim(std::string_view(line).substr(eq + 1)));
    if (key.empty()) throw ParseError(kStage, "empty key", line_no);
    if (!section.empty()) key = section + "." + key;
    Apply(config, key, value, line_no);
  }
  return config;
}

}  // namespace nlidb
