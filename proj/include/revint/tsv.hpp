#pragma once

#include <filesystem>
#include <istream>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace revint {

/// Header-addressed tab-separated table. Fields are not quoted; blank lines
/// are skipped. Errors carry "<source>:<line>" positions.
class TsvTable {
 public:
  struct Row {
    std::size_t line = 0;
    std::vector<std::string> fields;
  };

  static TsvTable read(std::istream& in, std::string_view source_name,
                       std::span<const std::string_view> required_columns);
  static TsvTable read_file(const std::filesystem::path& path,
                            std::span<const std::string_view> required_columns);

  const std::vector<Row>& rows() const noexcept { return rows_; }
  bool has_column(std::string_view name) const;
  std::string_view get(const Row& row, std::string_view column) const;
  std::string where(const Row& row) const;

  int get_int(const Row& row, std::string_view column) const;
  long long get_int64(const Row& row, std::string_view column) const;

 private:
  std::string source_;
  std::map<std::string, std::size_t, std::less<>> columns_;
  std::vector<Row> rows_;
};

}  // namespace revint
