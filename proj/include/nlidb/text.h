#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace nlidb {

// Stand-in for a removed token. Every mapper treats it as a guaranteed miss,
// so perturbed queries keep their positions.
inline constexpr std::string_view kMaskToken = "␀";

inline bool IsMaskToken(std::string_view token) { return token == kMaskToken; }

struct Token {
  std::string text;
  size_t offset = 0;  // byte offset of the first kept character in the input
};

// Drops , ' " ? . ! ; : ( ) and splits on whitespace runs. Case is kept.
std::vector<Token> Tokenize(std::string_view raw);
std::vector<std::string> TokenTexts(std::string_view raw);

// ASCII lowercase; multi-byte sequences pass through untouched.
std::string ToLower(std::string_view text);

std::string Join(const std::vector<std::string> &parts, std::string_view sep);
std::vector<std::string> SplitList(std::string_view text, char sep);
std::string Trim(std::string_view text);

// Byte-level Levenshtein distance.
size_t EditDistance(std::string_view a, std::string_view b);

// 1 - distance / max_len, computed on lowercased input; 1 for two empty
// strings.
double LexicalSimilarity(std::string_view a, std::string_view b);

std::string ReadFile(const std::string &path);

}  // namespace nlidb
