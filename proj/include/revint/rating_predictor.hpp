#pragma once

#include <array>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "revint/gateway.hpp"

namespace revint {

struct RatingExemplar {
  std::string product_title;
  std::string review_body;
  int rating = 0;
  std::string reasoning_path;

  bool operator==(const RatingExemplar&) const = default;
};

/// Exactly five exemplars whose ratings are 1..5, stored in rating order.
class ExemplarSet {
 public:
  /// Throws InvalidExemplarSet unless the ratings are exactly {1,2,3,4,5}
  /// and every field is non-empty.
  explicit ExemplarSet(std::vector<RatingExemplar> exemplars);

  /// JSON file: {"exemplars": [{product_title, review_body, rating,
  /// reasoning_path}, ...]}.
  static ExemplarSet load(const std::filesystem::path& path);
  static ExemplarSet parse(std::string_view json_text);

  const std::array<RatingExemplar, 5>& items() const noexcept { return items_; }

 private:
  std::array<RatingExemplar, 5> items_;
};

struct RatingPrediction {
  int rating = 0;
  std::string reasoning;
  std::string raw_completion;

  bool operator==(const RatingPrediction&) const = default;
};

inline constexpr std::string_view kRatingInstruction =
    "Predict the rating the reviewer gave the product, as an integer from 1 to 5, from the "
    "product title and the review text. First write the reasoning that leads to the rating, "
    "then give the answer on its own line in the form \"Rating: <n>\".";

inline constexpr std::string_view kRatingTargetCue =
    "Now predict the rating for the following review. Write the reasoning first, then the "
    "answer in the form \"Rating: <n>\".";

std::string build_rating_prompt(std::string_view product_title, std::string_view review_body,
                                const ExemplarSet& exemplars);

/// Last "Rating:" marker wins (case-insensitive). Without a marker, the last
/// standalone integer 1-5 of the final sentence is taken; integers used as a
/// scale ("out of 5", "/5") are skipped.
RatingPrediction parse_rating(std::string_view completion);

RatingPrediction predict_rating(std::string_view product_title, std::string_view review_body,
                                const ExemplarSet& exemplars, const Gateway& gateway,
                                GenerationParams params = {kPredictorTemperature,
                                                           kDefaultMaxOutputTokens});

}  // namespace revint
