#include "revint/corpus_matching.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <fstream>

#include "revint/error.hpp"
#include "revint/text.hpp"
#include "revint/tsv.hpp"

namespace revint {

TokenSeq tokenize(std::string_view input) {
  TokenSeq tokens;
  std::size_t i = 0;
  const auto is_space = [](char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; };
  const auto is_punct = [](char c) { return std::ispunct(static_cast<unsigned char>(c)) != 0; };
  while (i < input.size()) {
    while (i < input.size() && is_space(input[i])) ++i;
    std::size_t j = i;
    while (j < input.size() && !is_space(input[j])) ++j;
    std::string_view word = input.substr(i, j - i);
    while (!word.empty() && is_punct(word.front())) word.remove_prefix(1);
    while (!word.empty() && is_punct(word.back())) word.remove_suffix(1);
    if (!word.empty()) tokens.push_back(text::to_lower_ascii(word));
    i = j;
  }
  return tokens;
}

std::size_t lcs_length(std::span<const std::string> a, std::span<const std::string> b) {
  if (a.size() < b.size()) std::swap(a, b);
  if (b.empty()) return 0;
  std::vector<std::size_t> prev(b.size() + 1, 0), curr(b.size() + 1, 0);
  for (const auto& x : a) {
    for (std::size_t j = 1; j <= b.size(); ++j) {
      curr[j] = x == b[j - 1] ? prev[j - 1] + 1 : std::max(prev[j], curr[j - 1]);
    }
    std::swap(prev, curr);
  }
  return prev[b.size()];
}

RougeScore rouge_l(std::span<const std::string> candidate, std::span<const std::string> reference,
                   double beta) {
  if (candidate.empty() || reference.empty()) return {};
  const auto lcs = static_cast<double>(lcs_length(candidate, reference));
  if (lcs == 0.0) return {};
  const auto c = static_cast<double>(candidate.size());
  const auto r = static_cast<double>(reference.size());
  const double b2 = beta * beta;
  // (1+b²)PR/(R+b²P) with P = L/c, R = L/r, reduced to one division so that
  // equal ratios round to the same double.
  return {lcs / c, lcs / r, (1.0 + b2) * lcs / (c + b2 * r)};
}

std::size_t top_share_count(std::size_t pool_size, double top_percent) {
  if (pool_size == 0) return 0;
  const auto k = static_cast<std::size_t>(
      std::ceil(static_cast<double>(pool_size) * top_percent / 100.0));
  return std::clamp<std::size_t>(k, 1, pool_size);
}

std::vector<const ReviewRecord*> top_helpfulness_tier(std::span<const ReviewRecord* const> pool,
                                                      double top_percent) {
  const auto k = top_share_count(pool.size(), top_percent);
  if (k == 0) return {};
  std::vector<long long> votes;
  votes.reserve(pool.size());
  for (const auto* r : pool) votes.push_back(r->helpful_votes);
  std::nth_element(votes.begin(), votes.begin() + static_cast<std::ptrdiff_t>(k - 1), votes.end(),
                   std::greater<>());
  const long long cutoff = votes[k - 1];
  std::vector<const ReviewRecord*> tier;
  for (const auto* r : pool)
    if (r->helpful_votes >= cutoff) tier.push_back(r);
  return tier;
}

std::optional<ReviewRecord> select_comparison_review(std::string_view target_title,
                                                     std::string_view target_category,
                                                     int target_rating,
                                                     std::span<const ReviewRecord> corpus,
                                                     const SelectionOptions& options) {
  if (target_rating < 1 || target_rating > 5)
    fail(ErrorCode::PreconditionViolated, "target rating must lie in 1..5");

  const auto matches = [&](const ReviewRecord& r) {
    return r.category == target_category && r.rating == target_rating;
  };

  std::vector<const ReviewRecord*> candidates;
  if (options.cutoff == CutoffMode::within_filtered) {
    std::vector<const ReviewRecord*> pool;
    for (const auto& r : corpus)
      if (matches(r)) pool.push_back(&r);
    candidates = top_helpfulness_tier(pool, options.top_percent);
  } else {
    std::vector<const ReviewRecord*> pool;
    for (const auto& r : corpus) pool.push_back(&r);
    for (const auto* r : top_helpfulness_tier(pool, options.top_percent))
      if (matches(*r)) candidates.push_back(r);
  }
  if (candidates.empty()) return std::nullopt;

  const auto target = tokenize(target_title);
  const ReviewRecord* best = nullptr;
  double best_f = -1.0;
  for (const auto* r : candidates) {
    const double f = rouge_l(tokenize(r->product_title), target, options.beta).f_measure;
    const bool better =
        !best || f > best_f ||
        (f == best_f &&
         (r->helpful_votes > best->helpful_votes ||
          (r->helpful_votes == best->helpful_votes && r->record_id < best->record_id)));
    if (better) {
      best = r;
      best_f = f;
    }
  }
  return *best;
}

// --- loading -----------------------------------------------------------------

std::vector<ReviewRecord> load_corpus(std::istream& in, std::string_view source_name) {
  constexpr std::array<std::string_view, 6> kColumns = {
      "record_id", "category", "rating", "helpful_votes", "product_title", "body"};
  const auto table = TsvTable::read(in, source_name, kColumns);
  std::vector<ReviewRecord> records;
  records.reserve(table.rows().size());
  for (const auto& row : table.rows()) {
    const auto where = table.where(row);
    ReviewRecord r;
    r.record_id = std::string(text::trim(table.get(row, "record_id")));
    r.category = std::string(text::trim(table.get(row, "category")));
    r.rating = table.get_int(row, "rating");
    r.helpful_votes = table.get_int64(row, "helpful_votes");
    r.product_title = std::string(table.get(row, "product_title"));
    r.body = std::string(table.get(row, "body"));
    if (r.record_id.empty()) fail(ErrorCode::InputFormat, where + ": empty record_id");
    if (r.rating < 1 || r.rating > 5)
      fail(ErrorCode::InputFormat,
           where + ": rating " + std::to_string(r.rating) + " outside 1..5");
    if (r.helpful_votes < 0)
      fail(ErrorCode::InputFormat, where + ": helpful_votes must be non-negative");
    records.push_back(std::move(r));
  }
  return records;
}

std::vector<ReviewRecord> load_corpus(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::InputFormat, "cannot open corpus " + path.string());
  return load_corpus(in, path.string());
}

}  // namespace revint
