#include "revint/tsv.hpp"

#include <charconv>
#include <fstream>

#include "revint/error.hpp"
#include "revint/text.hpp"

namespace revint {

TsvTable TsvTable::read(std::istream& in, std::string_view source_name,
                        std::span<const std::string_view> required_columns) {
  TsvTable t;
  t.source_ = std::string(source_name);
  std::string line;
  if (!std::getline(in, line)) fail(ErrorCode::InputFormat, t.source_ + ": missing header line");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const auto header = text::split(line, '\t');
  for (std::size_t i = 0; i < header.size(); ++i)
    t.columns_.emplace(std::string(text::trim(header[i])), i);
  for (auto c : required_columns)
    if (!t.has_column(c))
      fail(ErrorCode::InputFormat, t.source_ + ":1: header lacks column '" + std::string(c) + "'");

  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (text::is_blank(line)) continue;
    Row row{line_no, {}};
    for (auto f : text::split(line, '\t')) row.fields.emplace_back(f);
    if (row.fields.size() != header.size())
      fail(ErrorCode::InputFormat, t.where(row) + ": expected " + std::to_string(header.size()) +
                                       " tab-separated fields, found " +
                                       std::to_string(row.fields.size()));
    t.rows_.push_back(std::move(row));
  }
  return t;
}

TsvTable TsvTable::read_file(const std::filesystem::path& path,
                             std::span<const std::string_view> required_columns) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::InputFormat, "cannot open " + path.string());
  return read(in, path.string(), required_columns);
}

bool TsvTable::has_column(std::string_view name) const { return columns_.find(name) != columns_.end(); }

std::string_view TsvTable::get(const Row& row, std::string_view column) const {
  auto it = columns_.find(column);
  if (it == columns_.end())
    fail(ErrorCode::InputFormat, source_ + ": no column '" + std::string(column) + "'");
  return row.fields[it->second];
}

std::string TsvTable::where(const Row& row) const {
  return source_ + ":" + std::to_string(row.line);
}

namespace {
template <typename Int>
Int parse_integer(std::string_view field, std::string_view column, const std::string& where) {
  field = text::trim(field);
  Int value{};
  auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (field.empty() || ec != std::errc() || ptr != field.data() + field.size())
    fail(ErrorCode::InputFormat, where + ": " + std::string(column) + " '" + std::string(field) +
                                     "' is not an integer");
  return value;
}
}  // namespace

int TsvTable::get_int(const Row& row, std::string_view column) const {
  return parse_integer<int>(get(row, column), column, where(row));
}

long long TsvTable::get_int64(const Row& row, std::string_view column) const {
  return parse_integer<long long>(get(row, column), column, where(row));
}

}  // namespace revint
