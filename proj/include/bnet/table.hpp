#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace bnet {

inline constexpr int kMissing = -1;
inline constexpr std::string_view kMissingStateLabel = "(missing)";

// A categorical variable. `ordered` marks ordinal scales, whose state order is
// meaningful for interpolation and distances.
struct VariableSpec {
  std::string name;
  std::vector<std::string> states;
  bool ordered = false;

  int cardinality() const noexcept { return static_cast<int>(states.size()); }
  // -1 when absent.
  int state_index(std::string_view label) const noexcept;

  friend bool operator==(const VariableSpec&, const VariableSpec&) = default;
};

// Throws InvalidArgument on empty name, too few states or duplicate labels.
void validate_variable(const VariableSpec& spec, int min_states);

// Row-major categorical table; each cell is a state index or kMissing.
class DatasetTable {
 public:
  DatasetTable() = default;
  explicit DatasetTable(std::vector<VariableSpec> columns);

  std::size_t rows() const noexcept { return row_ids_.size(); }
  std::size_t cols() const noexcept { return columns_.size(); }
  bool empty() const noexcept { return row_ids_.empty(); }

  const std::vector<VariableSpec>& columns() const noexcept { return columns_; }
  const VariableSpec& column(std::size_t c) const { return columns_.at(c); }
  std::optional<std::size_t> find_column(std::string_view name) const noexcept;
  // Throws MissingColumn.
  std::size_t column_index(std::string_view name) const;

  int at(std::size_t r, std::size_t c) const noexcept { return cells_[r * columns_.size() + c]; }
  std::span<const int> row(std::size_t r) const noexcept {
    return {cells_.data() + r * columns_.size(), columns_.size()};
  }
  std::int64_t row_id(std::size_t r) const noexcept { return row_ids_[r]; }
  const std::vector<std::int64_t>& row_ids() const noexcept { return row_ids_; }
  std::vector<int> column_values(std::size_t c) const;
  bool has_missing() const noexcept;

  // Validates every cell against its column.
  void add_row(std::span<const int> cells, std::int64_t id);
  void add_row(std::span<const int> cells) { add_row(cells, next_row_id()); }
  void set(std::size_t r, std::size_t c, int state);
  void append_column(VariableSpec spec, std::span<const int> values);

  DatasetTable select_rows(std::span<const std::size_t> indices) const;
  std::int64_t next_row_id() const noexcept;

  friend bool operator==(const DatasetTable&, const DatasetTable&) = default;

 private:
  std::vector<VariableSpec> columns_;
  std::vector<int> cells_;
  std::vector<std::int64_t> row_ids_;
};

// CSV with a header row of variable names. Empty cells and "NA" are missing.
// Without a schema, states are the distinct labels of each column: integers
// sort numerically and mark the column ordered, other labels sort
// lexicographically. Throws RaggedRow, UnknownStateLabel, EmptyTable, Parse.
DatasetTable read_csv(std::istream& in,
                      const std::optional<std::vector<VariableSpec>>& schema = std::nullopt);
DatasetTable read_csv_file(const std::string& path,
                           const std::optional<std::vector<VariableSpec>>& schema = std::nullopt);
// Missing cells are written as "NA".
void write_csv(std::ostream& out, const DatasetTable& table);
void write_csv_file(const std::string& path, const DatasetTable& table);

}  // namespace bnet
