#include <doctest.h>

#include <sstream>

#include "../expect.hpp"
#include "bnet/error.hpp"
#include "bnet/table.hpp"

using namespace bnet;

namespace {

DatasetTable parse(const std::string& text) {
  std::istringstream in(text);
  return read_csv(in);
}

}  // namespace

TEST_CASE("csv state inference") {
  const auto t = parse("grade,city,flag\n10,\"Pune, MH\",yes\n2,Delhi,NA\n10,,no\n");
  REQUIRE(t.rows() == 3);
  CHECK(t.column(0).states == std::vector<std::string>{"2", "10"});
  CHECK(t.column(0).ordered);
  CHECK(t.column(1).states == std::vector<std::string>{"Delhi", "Pune, MH"});
  CHECK_FALSE(t.column(1).ordered);
  CHECK(t.at(0, 1) == 1);
  CHECK(t.at(2, 1) == kMissing);
  CHECK(t.at(1, 2) == kMissing);
  CHECK(t.has_missing());
}

TEST_CASE("csv round trip is byte-stable") {
  const std::string text = "a,b\n1,\"x,y\"\nNA,\"say \"\"hi\"\"\"\n0,z\n";
  const auto t = parse(text);
  std::ostringstream out;
  write_csv(out, t);
  const auto again = parse(out.str());
  CHECK(again == t);
  std::ostringstream out2;
  write_csv(out2, again);
  CHECK(out2.str() == out.str());
  CHECK(t.at(1, 1) == t.column(1).state_index("say \"hi\""));
}

TEST_CASE("csv errors") {
  CHECK(kind_of([] { parse("a,b\n1,2\n3\n"); }) == ErrorKind::RaggedRow);
  CHECK(kind_of([] { parse(""); }) == ErrorKind::EmptyTable);
  CHECK(kind_of([] { parse("a,b\n"); }) == ErrorKind::EmptyTable);
  std::vector<VariableSpec> schema{{"a", {"x", "y"}, false}};
  std::istringstream bad("a\nz\n");
  CHECK(kind_of([&] { read_csv(bad, schema); }) == ErrorKind::UnknownStateLabel);
  std::istringstream extra("a,b\nx,1\n");
  CHECK(kind_of([&] { read_csv(extra, schema); }) == ErrorKind::MissingColumn);
  CHECK(kind_of([] { read_csv_file("/nonexistent/file.csv"); }) == ErrorKind::Io);
}

TEST_CASE("schema keeps declared state order") {
  std::vector<VariableSpec> schema{{"lvl", {"low", "mid", "high"}, true}};
  std::istringstream in("lvl\nhigh\nlow\n");
  const auto t = read_csv(in, schema);
  CHECK(t.column(0).states == schema[0].states);
  CHECK(t.at(0, 0) == 2);
}

TEST_CASE("table mutation and selection") {
  DatasetTable t({{"a", {"0", "1"}, false}, {"b", {"p", "q", "r"}, false}});
  t.add_row(std::vector<int>{0, 2});
  t.add_row(std::vector<int>{1, 1});
  t.add_row(std::vector<int>{1, kMissing});
  CHECK(kind_of([&] { t.add_row(std::vector<int>{0}); }) == ErrorKind::RaggedRow);
  CHECK_THROWS_AS(t.add_row(std::vector<int>{0, 3}), Error);
  CHECK(t.column_index("b") == 1);
  CHECK(kind_of([&] { t.column_index("zz"); }) == ErrorKind::MissingColumn);
  const std::vector<std::size_t> pick{2, 0};
  const auto s = t.select_rows(pick);
  CHECK(s.rows() == 2);
  CHECK(s.row_id(0) == t.row_id(2));
  CHECK(s.at(1, 1) == 2);
  CHECK(t.next_row_id() == 3);
  const std::vector<int> extra{0, 0, 1};
  t.append_column({"c", {"n", "y"}, false}, extra);
  CHECK(t.cols() == 3);
  CHECK(t.at(2, 2) == 1);
}

TEST_CASE("variable validation") {
  CHECK_THROWS_AS(validate_variable({"", {"a", "b"}, false}, 2), Error);
  CHECK_THROWS_AS(validate_variable({"v", {"a"}, false}, 2), Error);
  CHECK_THROWS_AS(validate_variable({"v", {"a", "a"}, false}, 1), Error);
  CHECK_NOTHROW(validate_variable({"v", {"a"}, false}, 1));
}
