#include "revint/rating_predictor.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <regex>
#include <sstream>

#include <nlohmann/json.hpp>

#include "revint/error.hpp"
#include "revint/text.hpp"

namespace revint {

using nlohmann::json;

ExemplarSet::ExemplarSet(std::vector<RatingExemplar> exemplars) {
  if (exemplars.size() != items_.size())
    fail(ErrorCode::InvalidExemplarSet,
         "expected 5 exemplars, got " + std::to_string(exemplars.size()));
  std::array<bool, 5> seen{};
  for (auto& e : exemplars) {
    if (e.rating < 1 || e.rating > 5)
      fail(ErrorCode::InvalidExemplarSet, "exemplar rating " + std::to_string(e.rating) +
                                              " outside 1..5");
    const auto slot = static_cast<std::size_t>(e.rating - 1);
    if (seen[slot])
      fail(ErrorCode::InvalidExemplarSet,
           "ratings must be exactly {1,2,3,4,5}; duplicate " + std::to_string(e.rating));
    if (text::is_blank(e.product_title) || text::is_blank(e.review_body) ||
        text::is_blank(e.reasoning_path))
      fail(ErrorCode::InvalidExemplarSet,
           "exemplar for rating " + std::to_string(e.rating) + " has an empty field");
    seen[slot] = true;
    items_[slot] = std::move(e);
  }
}

ExemplarSet ExemplarSet::parse(std::string_view json_text) {
  std::vector<RatingExemplar> out;
  try {
    auto doc = json::parse(json_text);
    for (const auto& rec : doc.at("exemplars")) {
      out.push_back({rec.at("product_title").get<std::string>(),
                     rec.at("review_body").get<std::string>(), rec.at("rating").get<int>(),
                     rec.at("reasoning_path").get<std::string>()});
    }
  } catch (const json::exception& e) {
    fail(ErrorCode::InvalidExemplarSet, std::string("malformed exemplar file: ") + e.what());
  }
  return ExemplarSet(std::move(out));
}

ExemplarSet ExemplarSet::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::InvalidExemplarSet, "cannot open exemplar file " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

std::string build_rating_prompt(std::string_view product_title, std::string_view review_body,
                                const ExemplarSet& exemplars) {
  if (text::is_blank(product_title))
    fail(ErrorCode::PreconditionViolated, "product title is empty");
  if (text::is_blank(review_body)) fail(ErrorCode::PreconditionViolated, "review body is empty");

  std::string prompt(kRatingInstruction);
  prompt += "\n\n";
  for (const auto& e : exemplars.items()) {
    prompt += "Product title: " + e.product_title + "\n";
    prompt += "Review: " + e.review_body + "\n";
    prompt += "Reasoning: " + e.reasoning_path + "\n";
    prompt += "Rating: " + std::to_string(e.rating) + "\n\n";
  }
  prompt += kRatingTargetCue;
  prompt += "\nProduct title: ";
  prompt += product_title;
  prompt += "\nReview: ";
  prompt += review_body;
  return prompt;
}

namespace {

bool is_word(char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0 || c == '_'; }
bool is_digit(char c) { return c >= '0' && c <= '9'; }

std::string reasoning_before(std::string_view completion, std::size_t pos) {
  auto head = text::trim(completion.substr(0, pos));
  if (text::starts_with_ci(head, "reasoning:")) head = text::trim(head.substr(10));
  return std::string(head);
}

RatingPrediction finish(std::string_view completion, std::size_t pos, int rating) {
  return {rating, reasoning_before(completion, pos), std::string(completion)};
}

// Start of the final sentence: the text after the last [.!?] that is followed
// by whitespace, ignoring terminal punctuation at the very end.
std::size_t final_sentence_start(std::string_view s) {
  auto end = s.size();
  while (end > 0 && (std::isspace(static_cast<unsigned char>(s[end - 1])) ||
                     s[end - 1] == '.' || s[end - 1] == '!' || s[end - 1] == '?'))
    --end;
  for (std::size_t i = end; i-- > 0;) {
    if ((s[i] == '.' || s[i] == '!' || s[i] == '?' || s[i] == '\n') && i + 1 < s.size() &&
        std::isspace(static_cast<unsigned char>(s[i + 1])))
      return i + 1;
    if (s[i] == '\n') return i + 1;
  }
  return 0;
}

bool preceded_by_scale(std::string_view s, std::size_t pos) {
  std::size_t i = pos;
  while (i > 0 && s[i - 1] == ' ') --i;
  if (i > 0 && s[i - 1] == '/') return true;
  auto head = text::to_lower_ascii(s.substr(0, i));
  return head.ends_with("out of");
}

}  // namespace

RatingPrediction parse_rating(std::string_view completion) {
  if (text::is_blank(completion)) fail(ErrorCode::NoRatingFound, "completion is empty");

  static const std::regex marker(R"(rating\s*\**\s*[:=][\s*"'\[(]*(-?\d+(?:\.\d+)?))",
                                 std::regex::icase);
  const std::string owned(completion);
  std::smatch last;
  bool found = false;
  for (auto it = std::sregex_iterator(owned.begin(), owned.end(), marker);
       it != std::sregex_iterator(); ++it) {
    last = *it;
    found = true;
  }
  if (found) {
    const auto value_text = last[1].str();
    const double value = std::stod(value_text);
    const int rating = value >= 1.0 && value <= 5.0 ? static_cast<int>(value) : 0;
    if (rating == 0 || static_cast<double>(rating) != value)
      fail(ErrorCode::RatingOutOfRange, "rating " + value_text + " is not an integer in 1..5");
    return finish(completion, static_cast<std::size_t>(last.position(0)), rating);
  }

  // Fallback: standalone integers 1-5 in the final sentence.
  const auto start = final_sentence_start(completion);
  std::size_t best_pos = std::string_view::npos;
  int best = 0;
  for (std::size_t i = start; i < completion.size();) {
    if (!is_digit(completion[i])) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < completion.size() && is_digit(completion[j])) ++j;
    // reject digits that belong to words, decimals, negatives or ranges
    const bool left_ok =
        i == 0 || (!is_word(completion[i - 1]) && completion[i - 1] != '-' &&
                   !(completion[i - 1] == '.' && i >= 2 && is_digit(completion[i - 2])));
    const bool right_ok =
        j == completion.size() ||
        (!is_word(completion[j]) && completion[j] != '-' &&
         !(completion[j] == '.' && j + 1 < completion.size() && is_digit(completion[j + 1])));
    if (left_ok && right_ok && j - i == 1 && completion[i] >= '1' && completion[i] <= '5' &&
        !preceded_by_scale(completion, i)) {
      best_pos = i;
      best = completion[i] - '0';
    }
    i = j;
  }
  if (best_pos == std::string_view::npos)
    fail(ErrorCode::NoRatingFound, "no rating marker or standalone 1-5 integer in completion");
  return finish(completion, best_pos, best);
}

RatingPrediction predict_rating(std::string_view product_title, std::string_view review_body,
                                const ExemplarSet& exemplars, const Gateway& gateway,
                                GenerationParams params) {
  const std::vector<ChatMessage> messages{
      {Role::user, build_rating_prompt(product_title, review_body, exemplars)}};
  return parse_rating(gateway.complete_chat(messages, params));
}

}  // namespace revint
