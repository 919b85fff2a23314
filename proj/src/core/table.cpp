#include "bnet/table.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

#include "bnet/error.hpp"

namespace bnet {

int VariableSpec::state_index(std::string_view label) const noexcept {
  for (std::size_t i = 0; i < states.size(); ++i) {
    if (states[i] == label) return static_cast<int>(i);
  }
  return -1;
}

void validate_variable(const VariableSpec& spec, int min_states) {
  if (spec.name.empty()) fail(ErrorKind::InvalidArgument, "variable with empty name");
  if (spec.cardinality() < min_states) {
    fail(ErrorKind::InvalidArgument, "variable '" + spec.name + "' needs at least " +
                                         std::to_string(min_states) + " states");
  }
  std::set<std::string_view> seen;
  for (const auto& s : spec.states) {
    if (!seen.insert(s).second) {
      fail(ErrorKind::InvalidArgument,
           "variable '" + spec.name + "' has duplicate state '" + s + "'");
    }
  }
}

DatasetTable::DatasetTable(std::vector<VariableSpec> columns) : columns_(std::move(columns)) {
  std::set<std::string_view> names;
  for (const auto& c : columns_) {
    validate_variable(c, 1);
    if (!names.insert(c.name).second) {
      fail(ErrorKind::InvalidArgument, "duplicate column name '" + c.name + "'");
    }
  }
}

std::optional<std::size_t> DatasetTable::find_column(std::string_view name) const noexcept {
  for (std::size_t c = 0; c < columns_.size(); ++c) {
    if (columns_[c].name == name) return c;
  }
  return std::nullopt;
}

std::size_t DatasetTable::column_index(std::string_view name) const {
  if (auto c = find_column(name)) return *c;
  fail(ErrorKind::MissingColumn, "no column named '" + std::string(name) + "'");
}

std::vector<int> DatasetTable::column_values(std::size_t c) const {
  std::vector<int> out(rows());
  for (std::size_t r = 0; r < rows(); ++r) out[r] = at(r, c);
  return out;
}

bool DatasetTable::has_missing() const noexcept {
  return std::find(cells_.begin(), cells_.end(), kMissing) != cells_.end();
}

void DatasetTable::add_row(std::span<const int> cells, std::int64_t id) {
  if (cells.size() != columns_.size()) {
    fail(ErrorKind::RaggedRow, "row has " + std::to_string(cells.size()) + " cells, expected " +
                                   std::to_string(columns_.size()));
  }
  for (std::size_t c = 0; c < cells.size(); ++c) {
    if (cells[c] != kMissing && (cells[c] < 0 || cells[c] >= columns_[c].cardinality())) {
      fail(ErrorKind::InvalidArgument, "state index " + std::to_string(cells[c]) +
                                           " invalid for column '" + columns_[c].name + "'");
    }
  }
  cells_.insert(cells_.end(), cells.begin(), cells.end());
  row_ids_.push_back(id);
}

void DatasetTable::set(std::size_t r, std::size_t c, int state) {
  if (r >= rows() || c >= cols()) fail(ErrorKind::InvalidArgument, "cell out of range");
  if (state != kMissing && (state < 0 || state >= columns_[c].cardinality())) {
    fail(ErrorKind::InvalidArgument, "state index out of range for '" + columns_[c].name + "'");
  }
  cells_[r * cols() + c] = state;
}

void DatasetTable::append_column(VariableSpec spec, std::span<const int> values) {
  validate_variable(spec, 1);
  if (find_column(spec.name)) {
    fail(ErrorKind::InvalidArgument, "duplicate column name '" + spec.name + "'");
  }
  if (values.size() != rows()) {
    fail(ErrorKind::InvalidArgument, "appended column length does not match row count");
  }
  for (int v : values) {
    if (v != kMissing && (v < 0 || v >= spec.cardinality())) {
      fail(ErrorKind::InvalidArgument, "state index out of range for '" + spec.name + "'");
    }
  }
  const std::size_t old_cols = cols();
  std::vector<int> cells;
  cells.reserve(rows() * (old_cols + 1));
  for (std::size_t r = 0; r < rows(); ++r) {
    auto existing = row(r);
    cells.insert(cells.end(), existing.begin(), existing.end());
    cells.push_back(values[r]);
  }
  cells_ = std::move(cells);
  columns_.push_back(std::move(spec));
}

DatasetTable DatasetTable::select_rows(std::span<const std::size_t> indices) const {
  DatasetTable out(columns_);
  out.cells_.reserve(indices.size() * cols());
  out.row_ids_.reserve(indices.size());
  for (std::size_t r : indices) {
    if (r >= rows()) fail(ErrorKind::InvalidArgument, "row index out of range");
    auto cells = row(r);
    out.cells_.insert(out.cells_.end(), cells.begin(), cells.end());
    out.row_ids_.push_back(row_ids_[r]);
  }
  return out;
}

std::int64_t DatasetTable::next_row_id() const noexcept {
  if (row_ids_.empty()) return 0;
  return *std::max_element(row_ids_.begin(), row_ids_.end()) + 1;
}

namespace {

// Splits one CSV record; handles quoted fields with doubled quotes and
// embedded newlines. Returns false at end of input.
bool read_record(std::istream& in, std::vector<std::string>& fields) {
  fields.clear();
  if (in.peek() == std::char_traits<char>::eof()) return false;
  std::string field;
  bool quoted = false;
  bool any = false;
  char ch;
  while (in.get(ch)) {
    any = true;
    if (quoted) {
      if (ch == '"') {
        if (in.peek() == '"') {
          in.get(ch);
          field.push_back('"');
        } else {
          quoted = false;
        }
      } else {
        field.push_back(ch);
      }
      continue;
    }
    if (ch == '"') {
      quoted = true;
    } else if (ch == ',') {
      fields.push_back(std::move(field));
      field.clear();
    } else if (ch == '\n') {
      break;
    } else if (ch == '\r') {
      if (in.peek() == '\n') in.get(ch);
      break;
    } else {
      field.push_back(ch);
    }
  }
  if (quoted) fail(ErrorKind::Parse, "unterminated quoted field");
  if (!any) return false;
  fields.push_back(std::move(field));
  return true;
}

bool is_missing_token(std::string_view cell) { return cell.empty() || cell == "NA"; }

std::optional<long long> parse_integer(std::string_view text) {
  long long value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) return std::nullopt;
  return value;
}

VariableSpec infer_variable(const std::string& name, const std::set<std::string>& labels) {
  VariableSpec spec{name, {}, false};
  bool all_integers = !labels.empty();
  std::vector<std::pair<long long, std::string>> numeric;
  for (const auto& label : labels) {
    auto value = parse_integer(label);
    if (!value) {
      all_integers = false;
      break;
    }
    numeric.emplace_back(*value, label);
  }
  if (all_integers) {
    std::sort(numeric.begin(), numeric.end());
    for (auto& [value, label] : numeric) spec.states.push_back(label);
    spec.ordered = true;
  } else {
    spec.states.assign(labels.begin(), labels.end());
  }
  return spec;
}

bool needs_quotes(std::string_view s) {
  return s.find_first_of(",\"\r\n") != std::string_view::npos;
}

void write_field(std::ostream& out, std::string_view s) {
  if (!needs_quotes(s)) {
    out << s;
    return;
  }
  out << '"';
  for (char ch : s) {
    if (ch == '"') out << '"';
    out << ch;
  }
  out << '"';
}

}  // namespace

DatasetTable read_csv(std::istream& in, const std::optional<std::vector<VariableSpec>>& schema) {
  std::vector<std::string> header;
  if (!read_record(in, header)) fail(ErrorKind::EmptyTable, "input has no header row");
  std::vector<std::vector<std::string>> records;
  std::vector<std::string> fields;
  std::size_t line = 1;
  while (read_record(in, fields)) {
    ++line;
    if (fields.size() == 1 && fields[0].empty() && header.size() != 1) continue;
    if (fields.size() != header.size()) {
      fail(ErrorKind::RaggedRow, "line " + std::to_string(line) + " has " +
                                     std::to_string(fields.size()) + " fields, header has " +
                                     std::to_string(header.size()));
    }
    records.push_back(fields);
  }
  if (records.empty()) fail(ErrorKind::EmptyTable, "input has no data rows");

  std::vector<VariableSpec> columns;
  if (schema) {
    for (const auto& name : header) {
      auto it = std::find_if(schema->begin(), schema->end(),
                             [&](const VariableSpec& v) { return v.name == name; });
      if (it == schema->end()) {
        fail(ErrorKind::MissingColumn, "column '" + name + "' not in schema");
      }
      columns.push_back(*it);
    }
  } else {
    for (std::size_t c = 0; c < header.size(); ++c) {
      std::set<std::string> labels;
      for (const auto& rec : records) {
        if (!is_missing_token(rec[c])) labels.insert(rec[c]);
      }
      if (labels.empty()) {
        fail(ErrorKind::InvalidArgument, "column '" + header[c] + "' has no observed values");
      }
      columns.push_back(infer_variable(header[c], labels));
    }
  }

  DatasetTable table(columns);
  std::vector<std::map<std::string, int, std::less<>>> lookup(columns.size());
  for (std::size_t c = 0; c < columns.size(); ++c) {
    for (int s = 0; s < columns[c].cardinality(); ++s) lookup[c].emplace(columns[c].states[s], s);
  }
  std::vector<int> cells(columns.size());
  for (std::size_t r = 0; r < records.size(); ++r) {
    for (std::size_t c = 0; c < columns.size(); ++c) {
      const auto& cell = records[r][c];
      if (is_missing_token(cell)) {
        cells[c] = kMissing;
        continue;
      }
      auto it = lookup[c].find(cell);
      if (it == lookup[c].end()) {
        fail(ErrorKind::UnknownStateLabel, "line " + std::to_string(r + 2) + ": label '" + cell +
                                               "' not a state of '" + columns[c].name + "'");
      }
      cells[c] = it->second;
    }
    table.add_row(cells, static_cast<std::int64_t>(r));
  }
  return table;
}

DatasetTable read_csv_file(const std::string& path,
                           const std::optional<std::vector<VariableSpec>>& schema) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::Io, "cannot open '" + path + "'");
  return read_csv(in, schema);
}

void write_csv(std::ostream& out, const DatasetTable& table) {
  for (std::size_t c = 0; c < table.cols(); ++c) {
    if (c) out << ',';
    write_field(out, table.column(c).name);
  }
  out << '\n';
  for (std::size_t r = 0; r < table.rows(); ++r) {
    for (std::size_t c = 0; c < table.cols(); ++c) {
      if (c) out << ',';
      int s = table.at(r, c);
      if (s == kMissing) {
        out << "NA";
      } else {
        write_field(out, table.column(c).states[s]);
      }
    }
    out << '\n';
  }
}

void write_csv_file(const std::string& path, const DatasetTable& table) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorKind::Io, "cannot write '" + path + "'");
  write_csv(out, table);
  if (!out) fail(ErrorKind::Io, "write to '" + path + "' failed");
}

}  // namespace bnet
