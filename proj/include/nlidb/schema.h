#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace nlidb {

enum class DataType { kText, kInteger, kReal };

std::string_view DataTypeName(DataType type);

struct Column {
  std::string name;
  DataType type = DataType::kText;
  bool is_primary_key = false;
};

struct Table {
  std::string name;
  std::vector<Column> columns;

  const Column *FindColumn(std::string_view column) const;
};

struct ForeignKey {
  std::string table;
  std::string column;
  std::string ref_table;
  std::string ref_column;
};

// Relational metadata for one database. Immutable once validated.
class Schema {
 public:
  Schema() = default;
  Schema(std::string name, std::vector<Table> tables,
         std::vector<ForeignKey> foreign_keys);

  const std::string &name() const { return name_; }
  const std::vector<Table> &tables() const { return tables_; }
  const std::vector<ForeignKey> &foreign_keys() const { return foreign_keys_; }

  const Table *FindTable(std::string_view table) const;
  const Column *FindColumn(std::string_view table,
                           std::string_view column) const;

  // Key columns are primary keys, columns taking part in a declared foreign
  // key, and columns sharing their name with some primary key (the implicit
  // same-name join). Everything else carries semantics and can be tagged.
  bool IsKeyColumn(std::string_view table, std::string_view column) const;

  // True when "table.column" names an existing non-key column.
  bool IsTaggableColumn(std::string_view dotted) const;

  // Throws nlidb::Error (stage "load_schema") on duplicate names or dangling
  // foreign keys.
  void Validate() const;

 private:
  std::string name_;
  std::vector<Table> tables_;
  std::vector<ForeignKey> foreign_keys_;
};

// Parses the JSON schema description. Errors carry line/column for syntax
// problems and the offending names for semantic ones.
Schema LoadSchema(std::string_view source);
Schema LoadSchemaFile(const std::string &path);

// Splits "table.column"; nullopt when there is no dot.
std::optional<std::pair<std::string, std::string>> SplitDotted(
    std::string_view dotted);

}  // namespace nlidb
