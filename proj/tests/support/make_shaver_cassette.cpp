// Regenerates tests/fixtures/shaver_cassette.jsonl from the script.
// Usage: make_shaver_cassette <script.json> <exemplars.json> <out.jsonl>

#include <iostream>

#include "shaver_script.hpp"

int main(int argc, char** argv) {
  if (argc != 4) {
    std::cerr << "usage: make_shaver_cassette <script.json> <exemplars.json> <out.jsonl>\n";
    return 2;
  }
  try {
    revint::testing::record_shaver_cassette(revint::testing::load_shaver_script(argv[1]), argv[2], argv[3]);
  } catch (const std::exception& e) {
    std::cerr << e.what() << "\n";
    return 1;
  }
  return 0;
}
