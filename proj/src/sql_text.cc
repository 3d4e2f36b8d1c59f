#include "nlidb/sql_text.h"

#include <algorithm>
#include <cctype>
#include <optional>
#include <vector>

#include "nlidb/error.h"
#include "nlidb/text.h"
#include "nlidb/translate.h"

namespace nlidb {
namespace {

enum class Kind { kWord, kNumber, kString, kSymbol };

struct Lexeme {
  Kind kind;
  std::string text;  // words keep their case; strings are unescaped
};

bool IsWordChar(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.';
}

std::string Upper(std::string_view s) {
  std::string out(s);
  for (char &c : out) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return out;
}

// nullopt on an unterminated string or an unknown character.
std::optional<std::vector<Lexeme>> Lex(std::string_view sql) {
  std::vector<Lexeme> out;
  size_t i = 0;
  while (i < sql.size()) {
    const char c = sql[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
    } else if (c == '"' || c == '\'') {
      std::string text;
      size_t j = i + 1;
      bool closed = false;
      while (j < sql.size()) {
        if (sql[j] == '\\' && j + 1 < sql.size()) {
          text.push_back(sql[j + 1]);
          j += 2;
        } else if (sql[j] == c) {
          if (j + 1 < sql.size() && sql[j + 1] == c) {  // doubled quote
            text.push_back(c);
            j += 2;
          } else {
            closed = true;
            ++j;
            break;
          }
        } else {
          text.push_back(sql[j++]);
        }
      }
      if (!closed) return std::nullopt;
      out.push_back({Kind::kString, std::move(text)});
      i = j;
    } else if (std::isdigit(static_cast<unsigned char>(c))) {
      size_t j = i;
      while (j < sql.size() && (std::isdigit(static_cast<unsigned char>(sql[j])) || sql[j] == '.')) ++j;
      if (j < sql.size() && IsWordChar(sql[j])) {
        while (j < sql.size() && IsWordChar(sql[j])) ++j;
        out.push_back({Kind::kWord, std::string(sql.substr(i, j - i))});
      } else {
        out.push_back({Kind::kNumber, std::string(sql.substr(i, j - i))});
      }
      i = j;
    } else if (IsWordChar(c)) {
      size_t j = i;
      while (j < sql.size() && IsWordChar(sql[j])) ++j;
      out.push_back({Kind::kWord, std::string(sql.substr(i, j - i))});
      i = j;
    } else if ((c == '<' || c == '>' || c == '!') && i + 1 < sql.size() &&
               (sql[i + 1] == '=' || (c == '<' && sql[i + 1] == '>'))) {
      out.push_back({Kind::kSymbol, std::string(sql.substr(i, 2))});
      i += 2;
    } else if (std::string_view("(),=<>*;").find(c) != std::string_view::npos) {
      out.push_back({Kind::kSymbol, std::string(1, c)});
      ++i;
    } else {
      return std::nullopt;
    }
  }
  return out;
}

bool IsKeyword(const Lexeme &l, std::string_view upper) {
  return l.kind == Kind::kWord && Upper(l.text) == upper;
}

bool IsSymbol(const Lexeme &l, std::string_view s) {
  return l.kind == Kind::kSymbol && l.text == s;
}

bool IsAggregateName(const Lexeme &l) {
  if (l.kind != Kind::kWord) return false;
  const std::string u = Upper(l.text);
  return u == "SUM" || u == "COUNT" || u == "AVG" || u == "MIN" || u == "MAX";
}

bool IsReserved(const Lexeme &l) {
  static const char *kReserved[] = {"SELECT", "FROM", "WHERE", "AND",   "OR",   "NOT",
                                    "IN",     "LIKE", "GROUP", "ORDER", "BY",   "HAVING",
                                    "LIMIT",  "JOIN", "ON",    "AS",    "DISTINCT", "UNION",
                                    "EXISTS", "BETWEEN", "IS", "NULL"};
  if (l.kind != Kind::kWord) return false;
  const std::string u = Upper(l.text);
  for (const char *r : kReserved) {
    if (u == r) return true;
  }
  return false;
}

bool IsIdentifier(const Lexeme &l) {
  return l.kind == Kind::kWord && !IsReserved(l) && l.text.front() != '.' &&
         l.text.back() != '.';
}

struct Operand {
  bool column = false;
  std::string text;  // lowercased column or rendered literal
};

std::string Flip(const std::string &op) {
  if (op == "<") return ">";
  if (op == ">") return "<";
  if (op == "<=") return ">=";
  if (op == ">=") return "<=";
  return op;
}

class Parser {
 public:
  explicit Parser(std::vector<Lexeme> lexemes) : l_(std::move(lexemes)) {
    if (!l_.empty() && IsSymbol(l_.back(), ";")) l_.pop_back();
  }

  std::optional<std::string> Canonical() {
    if (!Keyword("SELECT")) return std::nullopt;
    auto select = SelectList();
    if (!select || !Keyword("FROM")) return std::nullopt;
    std::vector<std::string> tables;
    do {
      if (!More() || !IsIdentifier(Peek())) return std::nullopt;
      tables.push_back(ToLower(Next().text));
    } while (Symbol(","));
    std::sort(tables.begin(), tables.end());

    std::vector<std::string> conjuncts;
    if (Keyword("WHERE")) {
      do {
        auto c = Conjunct();
        if (!c) return std::nullopt;
        conjuncts.push_back("(" + *c + ")");
      } while (Keyword("AND"));
    }
    if (More()) return std::nullopt;
    std::sort(conjuncts.begin(), conjuncts.end());

    std::string out = "SELECT " + *select + " FROM " + Join(tables, ", ");
    if (!conjuncts.empty()) out += " WHERE " + Join(conjuncts, " AND ");
    return out;
  }

 private:
  bool More() const { return pos_ < l_.size(); }
  const Lexeme &Peek() const { return l_[pos_]; }
  const Lexeme &Next() { return l_[pos_++]; }
  bool Keyword(std::string_view k) {
    if (More() && IsKeyword(Peek(), k)) {
      ++pos_;
      return true;
    }
    return false;
  }
  bool Symbol(std::string_view s) {
    if (More() && IsSymbol(Peek(), s)) {
      ++pos_;
      return true;
    }
    return false;
  }

  std::optional<std::string> SelectList() {
    if (Symbol("*")) return "*";
    if (More() && IsAggregateName(Peek())) {
      std::string func = Upper(Next().text);
      if (!Symbol("(")) return std::nullopt;
      std::string arg;
      if (Symbol("*")) {
        arg = "*";
      } else if (More() && IsIdentifier(Peek())) {
        arg = ToLower(Next().text);
      } else {
        return std::nullopt;
      }
      if (!Symbol(")")) return std::nullopt;
      return func + "(" + arg + ")";
    }
    std::vector<std::string> columns;
    do {
      if (!More() || !IsIdentifier(Peek())) return std::nullopt;
      columns.push_back(ToLower(Next().text));
    } while (Symbol(","));
    return Join(columns, ", ");
  }

  std::optional<Operand> ParseOperand() {
    if (!More()) return std::nullopt;
    const Lexeme &l = Next();
    if (l.kind == Kind::kString || l.kind == Kind::kNumber) return Operand{false, QuoteLiteral(l.text)};
    if (IsIdentifier(l)) return Operand{true, ToLower(l.text)};
    return std::nullopt;
  }

  std::optional<std::string> Conjunct() {
    size_t open = 0;
    while (Symbol("(")) ++open;
    auto left = ParseOperand();
    if (!left || !More() || Peek().kind != Kind::kSymbol) return std::nullopt;
    std::string op = Next().text;
    if (op == "<>") op = "!=";
    if (op != "=" && op != "!=" && op != "<" && op != ">" && op != "<=" && op != ">=") {
      return std::nullopt;
    }
    auto right = ParseOperand();
    if (!right) return std::nullopt;
    for (size_t k = 0; k < open; ++k) {
      if (!Symbol(")")) return std::nullopt;
    }
    // Columns go left; two columns go in lexicographic order.
    const bool swap = (!left->column && right->column) ||
                      (left->column == right->column && right->text < left->text);
    if (swap) {
      std::swap(left, right);
      op = Flip(op);
    }
    return left->text + " " + op + " " + right->text;
  }

  std::vector<Lexeme> l_;
  size_t pos_ = 0;
};

std::string Collapse(std::string_view sql) {
  std::string out;
  bool space = false;
  for (char c : sql) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      space = !out.empty();
    } else {
      if (space) out.push_back(' ');
      space = false;
      out.push_back(c);
    }
  }
  return out;
}

}  // namespace

CanonicalSql CanonicalizeSql(std::string_view sql) {
  if (auto lexemes = Lex(sql)) {
    if (auto text = Parser(std::move(*lexemes)).Canonical()) return {*text, true};
  }
  return {Collapse(sql), false};
}

bool SqlMatches(std::string_view predicted, std::string_view gold) {
  const CanonicalSql p = CanonicalizeSql(predicted);
  const CanonicalSql g = CanonicalizeSql(gold);
  if (p.canonical && g.canonical) return p.text == g.text;
  return Collapse(predicted) == Collapse(gold);
}

std::string_view CategoryName(Category category) {
  switch (category) {
    case Category::kSingleTable:
      return "SINGLE_TABLE";
    case Category::kMultiTable:
      return "MULTI_TABLE";
    case Category::kAggregate:
      return "AGGREGATE";
    case Category::kNested:
      return "NESTED";
  }
  return "SINGLE_TABLE";
}

Category CategorizeGoldSql(std::string_view sql) {
  constexpr char kStage[] = "categorize";
  auto lexemes = Lex(sql);
  if (!lexemes) throw Error(kStage, "cannot tokenize SQL text");
  const auto &l = *lexemes;
  if (l.empty() || !IsKeyword(l.front(), "SELECT")) {
    throw Error(kStage, "SQL text does not start with SELECT");
  }

  int depth = 0;
  std::optional<size_t> from;
  for (size_t i = 0; i < l.size(); ++i) {
    if (IsSymbol(l[i], "(")) ++depth;
    if (IsSymbol(l[i], ")")) --depth;
    if (depth < 0) throw Error(kStage, "unbalanced parentheses");
    if (depth > 0 && IsKeyword(l[i], "SELECT")) return Category::kNested;
    if (depth == 0 && !from && IsKeyword(l[i], "FROM")) from = i;
  }
  if (depth != 0) throw Error(kStage, "unbalanced parentheses");
  if (!from) throw Error(kStage, "SQL text has no FROM clause");

  for (size_t i = 1; i + 1 < *from; ++i) {
    if (IsAggregateName(l[i]) && IsSymbol(l[i + 1], "(")) return Category::kAggregate;
  }

  size_t tables = 0;
  bool expect_table = true;
  for (size_t i = *from + 1; i < l.size(); ++i) {
    const Lexeme &x = l[i];
    if (IsKeyword(x, "WHERE") || IsKeyword(x, "GROUP") || IsKeyword(x, "ORDER") ||
        IsKeyword(x, "HAVING") || IsKeyword(x, "LIMIT") || IsSymbol(x, ";")) {
      break;
    }
    if (IsSymbol(x, ",") || IsKeyword(x, "JOIN")) {
      expect_table = true;
    } else if (expect_table && x.kind == Kind::kWord && !IsReserved(x)) {
      ++tables;
      expect_table = false;
    }
  }
  if (tables == 0) throw Error(kStage, "FROM clause names no table");
  return tables == 1 ? Category::kSingleTable : Category::kMultiTable;
}

}  // namespace nlidb
