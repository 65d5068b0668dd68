#pragma once

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace revint::testing {

inline std::filesystem::path source_path(const std::string& relative) {
  return std::filesystem::path(REVINT_SOURCE_DIR) / relative;
}

inline std::string read_fixture(const std::string& relative) {
  std::ifstream in(source_path(relative), std::ios::binary);
  if (!in) throw std::runtime_error("missing fixture " + relative);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace revint::testing
