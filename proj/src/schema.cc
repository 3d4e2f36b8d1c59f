#include "nlidb/schema.h"

#include <set>

#include "json.hpp"
#include "nlidb/error.h"
#include "nlidb/text.h"

namespace nlidb {

using json = nlohmann::json;

namespace {

constexpr char kStage[] = "load_schema";

std::pair<size_t, size_t> LineColumn(std::string_view source, size_t byte) {
  size_t line = 1;
  size_t column = 1;
  for (size_t i = 0; i < byte && i < source.size(); ++i) {
    if (source[i] == '\n') {
      ++line;
      column = 1;
    } else {
      ++column;
    }
  }
  return {line, column};
}

const json &Require(const json &node, const char *key, const std::string &where) {
  auto it = node.find(key);
  if (it == node.end()) {
    throw Error(kStage, where + ": missing field \"" + key + "\"");
  }
  return *it;
}

std::string RequireString(const json &node, const char *key,
                          const std::string &where) {
  const json &value = Require(node, key, where);
  if (!value.is_string()) {
    throw Error(kStage, where + ": field \"" + key + "\" must be a string");
  }
  return value.get<std::string>();
}

DataType ParseType(const std::string &type, const std::string &where) {
  if (type == "text") return DataType::kText;
  if (type == "integer") return DataType::kInteger;
  if (type == "real") return DataType::kReal;
  throw Error(kStage, where + ": unknown column type \"" + type + "\"");
}

}  // namespace

std::string_view DataTypeName(DataType type) {
  switch (type) {
    case DataType::kText:
      return "text";
    case DataType::kInteger:
      return "integer";
    case DataType::kReal:
      return "real";
  }
  return "text";
}

const Column *Table::FindColumn(std::string_view column) const {
  for (const auto &c : columns) {
    if (c.name == column) return &c;
  }
  return nullptr;
}

Schema::Schema(std::string name, std::vector<Table> tables,
               std::vector<ForeignKey> foreign_keys)
    : name_(std::move(name)),
      tables_(std::move(tables)),
      foreign_keys_(std::move(foreign_keys)) {}

const Table *Schema::FindTable(std::string_view table) const {
  for (const auto &t : tables_) {
    if (t.name == table) return &t;
  }
  return nullptr;
}

const Column *Schema::FindColumn(std::string_view table,
                                 std::string_view column) const {
  const Table *t = FindTable(table);
  return t == nullptr ? nullptr : t->FindColumn(column);
}

bool Schema::IsKeyColumn(std::string_view table,
                         std::string_view column) const {
  const Column *c = FindColumn(table, column);
  if (c == nullptr) return false;
  if (c->is_primary_key) return true;
  for (const auto &fk : foreign_keys_) {
    if (fk.table == table && fk.column == column) return true;
    if (fk.ref_table == table && fk.ref_column == column) return true;
  }
  for (const auto &t : tables_) {
    const Column *other = t.FindColumn(column);
    if (other != nullptr && other->is_primary_key) return true;
  }
  return false;
}

bool Schema::IsTaggableColumn(std::string_view dotted) const {
  auto parts = SplitDotted(dotted);
  if (!parts) return false;
  if (FindColumn(parts->first, parts->second) == nullptr) return false;
  return !IsKeyColumn(parts->first, parts->second);
}

void Schema::Validate() const {
  std::set<std::string> table_names;
  for (const auto &table : tables_) {
    if (table.name.empty()) throw Error(kStage, "table with empty name");
    if (!table_names.insert(table.name).second) {
      throw Error(kStage, "duplicate table \"" + table.name + "\"");
    }
    if (table.name.find('.') != std::string::npos) {
      throw Error(kStage, "identifier contains '.': " + table.name);
    }
    std::set<std::string> column_names;
    for (const auto &column : table.columns) {
      if (column.name.empty()) {
        throw Error(kStage, "column with empty name in \"" + table.name + "\"");
      }
      if (column.name.find('.') != std::string::npos) {
        throw Error(kStage, "identifier contains '.': " + table.name + "." +
                                column.name);
      }
      if (!column_names.insert(column.name).second) {
        throw Error(kStage, "duplicate column \"" + table.name + "." +
                                column.name + "\"");
      }
    }
  }
  for (const auto &fk : foreign_keys_) {
    if (FindColumn(fk.table, fk.column) == nullptr) {
      throw Error(kStage, "dangling foreign key: " + fk.table + "." +
                              fk.column + " does not exist");
    }
    if (FindColumn(fk.ref_table, fk.ref_column) == nullptr) {
      throw Error(kStage, "dangling foreign key: " + fk.table + "." +
                              fk.column + " references missing " +
                              fk.ref_table + "." + fk.ref_column);
    }
  }
}

Schema LoadSchema(std::string_view source) {
  json doc;
  try {
    doc = json::parse(source);
  } catch (const json::parse_error &e) {
    auto [line, column] = LineColumn(source, e.byte == 0 ? 0 : e.byte - 1);
    throw ParseError(kStage, e.what(), line, column);
  }
  if (!doc.is_object()) throw ParseError(kStage, "schema must be an object", 1, 1);

  std::string name = RequireString(doc, "name", "schema");
  std::vector<Table> tables;
  const json &table_list = Require(doc, "tables", "schema");
  if (!table_list.is_array()) throw Error(kStage, "\"tables\" must be an array");
  for (size_t i = 0; i < table_list.size(); ++i) {
    const json &t = table_list[i];
    std::string where = "tables[" + std::to_string(i) + "]";
    Table table;
    table.name = RequireString(t, "name", where);
    const json &columns = Require(t, "columns", where);
    if (!columns.is_array()) throw Error(kStage, where + ": \"columns\" must be an array");
    for (size_t j = 0; j < columns.size(); ++j) {
      const json &c = columns[j];
      std::string cwhere = where + ".columns[" + std::to_string(j) + "]";
      Column column;
      column.name = RequireString(c, "name", cwhere);
      column.type = ParseType(RequireString(c, "type", cwhere), cwhere);
      if (auto pk = c.find("pk"); pk != c.end()) {
        if (!pk->is_boolean()) throw Error(kStage, cwhere + ": \"pk\" must be a boolean");
        column.is_primary_key = pk->get<bool>();
      }
      table.columns.push_back(std::move(column));
    }
    tables.push_back(std::move(table));
  }

  std::vector<ForeignKey> foreign_keys;
  if (auto fks = doc.find("foreign_keys"); fks != doc.end()) {
    if (!fks->is_array()) throw Error(kStage, "\"foreign_keys\" must be an array");
    for (size_t i = 0; i < fks->size(); ++i) {
      const json &f = (*fks)[i];
      std::string where = "foreign_keys[" + std::to_string(i) + "]";
      foreign_keys.push_back(ForeignKey{
          RequireString(f, "table", where), RequireString(f, "column", where),
          RequireString(f, "ref_table", where),
          RequireString(f, "ref_column", where)});
    }
  }

  Schema schema(std::move(name), std::move(tables), std::move(foreign_keys));
  schema.Validate();
  return schema;
}

Schema LoadSchemaFile(const std::string &path) {
  return LoadSchema(ReadFile(path));
}

std::optional<std::pair<std::string, std::string>> SplitDotted(
    std::string_view dotted) {
  size_t dot = dotted.find('.');
  if (dot == std::string_view::npos || dot == 0 || dot + 1 >= dotted.size()) {
    return std::nullopt;
  }
  return std::make_pair(std::string(dotted.substr(0, dot)),
                        std::string(dotted.substr(dot + 1)));
}

}  // namespace nlidb
