#include "nlidb/text.h"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

#include "nlidb/error.h"

namespace nlidb {

namespace {

bool IsStripped(char c) {
  switch (c) {
    case ',':
    case '\'':
    case '"':
    case '?':
    case '.':
    case '!':
    case ';':
    case ':':
    case '(':
    case ')':
      return true;
    default:
      return false;
  }
}

bool IsSpace(char c) {
  return std::isspace(static_cast<unsigned char>(c)) != 0;
}

}  // namespace

std::vector<Token> Tokenize(std::string_view raw) {
  std::vector<Token> tokens;
  Token current;
  bool open = false;
  for (size_t i = 0; i < raw.size(); ++i) {
    char c = raw[i];
    if (IsSpace(c)) {
      if (open) tokens.push_back(std::move(current));
      current = Token{};
      open = false;
      continue;
    }
    if (IsStripped(c)) continue;
    if (!open) {
      current.offset = i;
      open = true;
    }
    current.text.push_back(c);
  }
  if (open) tokens.push_back(std::move(current));
  return tokens;
}

std::vector<std::string> TokenTexts(std::string_view raw) {
  std::vector<std::string> out;
  for (auto &token : Tokenize(raw)) out.push_back(std::move(token.text));
  return out;
}

std::string ToLower(std::string_view text) {
  std::string out(text);
  for (char &c : out) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return out;
}

std::string Join(const std::vector<std::string> &parts, std::string_view sep) {
  std::string out;
  for (size_t i = 0; i < parts.size(); ++i) {
    if (i > 0) out += sep;
    out += parts[i];
  }
  return out;
}

std::vector<std::string> SplitList(std::string_view text, char sep) {
  std::vector<std::string> out;
  size_t start = 0;
  while (start <= text.size()) {
    size_t end = text.find(sep, start);
    if (end == std::string_view::npos) end = text.size();
    std::string item = Trim(text.substr(start, end - start));
    if (!item.empty()) out.push_back(std::move(item));
    start = end + 1;
  }
  return out;
}

std::string Trim(std::string_view text) {
  size_t begin = 0;
  size_t end = text.size();
  while (begin < end && IsSpace(text[begin])) ++begin;
  while (end > begin && IsSpace(text[end - 1])) --end;
  return std::string(text.substr(begin, end - begin));
}

size_t EditDistance(std::string_view a, std::string_view b) {
  std::vector<size_t> prev(b.size() + 1);
  std::vector<size_t> cur(b.size() + 1);
  for (size_t j = 0; j <= b.size(); ++j) prev[j] = j;
  for (size_t i = 1; i <= a.size(); ++i) {
    cur[0] = i;
    for (size_t j = 1; j <= b.size(); ++j) {
      size_t substitute = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, substitute});
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

double LexicalSimilarity(std::string_view a, std::string_view b) {
  std::string la = ToLower(a);
  std::string lb = ToLower(b);
  size_t longest = std::max(la.size(), lb.size());
  if (longest == 0) return 1.0;
  return 1.0 - static_cast<double>(EditDistance(la, lb)) /
                   static_cast<double>(longest);
}

std::string ReadFile(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("io", "cannot open " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

}  // namespace nlidb
