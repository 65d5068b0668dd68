#pragma once

#include <cstddef>
#include <filesystem>
#include <istream>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace revint {

struct ReviewRecord {
  std::string record_id;
  std::string category;
  int rating = 0;
  long long helpful_votes = 0;
  std::string product_title;
  std::string body;

  bool operator==(const ReviewRecord&) const = default;
};

using TokenSeq = std::vector<std::string>;

/// Lowercase, split on whitespace, strip leading/trailing ASCII punctuation
/// from each token, drop tokens that become empty.
TokenSeq tokenize(std::string_view text);

/// Two-row dynamic program, O(|a|·|b|) time and O(min(|a|,|b|)) space.
std::size_t lcs_length(std::span<const std::string> a, std::span<const std::string> b);

struct RougeScore {
  double precision = 0.0;
  double recall = 0.0;
  double f_measure = 0.0;
};

inline constexpr double kRougeBeta = 1.0;

/// ROUGE-L over token sequences. Either side empty gives all zeros.
RougeScore rouge_l(std::span<const std::string> candidate, std::span<const std::string> reference,
                   double beta = kRougeBeta);

enum class CutoffMode {
  within_filtered,  // top share computed among category/rating survivors
  global,           // top share computed over the whole corpus, then filtered
};

struct SelectionOptions {
  double top_percent = 5.0;
  CutoffMode cutoff = CutoffMode::within_filtered;
  double beta = kRougeBeta;
};

/// Number of records kept from a pool of `pool_size`: ceil(pool·pct/100),
/// at least 1 for a non-empty pool.
std::size_t top_share_count(std::size_t pool_size, double top_percent);

/// Records of `pool` whose helpful_votes reach the vote count of the
/// top_share_count-th best record (ties at the cutoff kept). Corpus order is
/// preserved.
std::vector<const ReviewRecord*> top_helpfulness_tier(std::span<const ReviewRecord* const> pool,
                                                      double top_percent);

/// Category/rating filter, top-share helpfulness tier, then ROUGE-L argmax
/// of product titles against `target_title`. Ties: more helpful votes, then
/// smaller record_id, then earlier corpus position. Absent when any stage is
/// empty.
std::optional<ReviewRecord> select_comparison_review(std::string_view target_title,
                                                     std::string_view target_category,
                                                     int target_rating,
                                                     std::span<const ReviewRecord> corpus,
                                                     const SelectionOptions& options = {});

/// Tab-separated corpus with header
/// record_id, category, rating, helpful_votes, product_title, body
/// (columns in any order). Errors name the offending line.
std::vector<ReviewRecord> load_corpus(std::istream& in, std::string_view source_name = "corpus");
std::vector<ReviewRecord> load_corpus(const std::filesystem::path& path);

}  // namespace revint
