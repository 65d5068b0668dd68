#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <istream>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace revint {

// --- Mann–Whitney U -----------------------------------------------------------

struct MannWhitneyResult {
  double u_statistic = 0.0;  // U of sample a
  double u_b = 0.0;          // n_a·n_b − U_a
  double p_two_sided = 1.0;
  bool exact = false;
};

/// Largest combined sample size for which the exact null distribution is
/// used (tie-free samples only).
inline constexpr std::size_t kExactMaxTotal = 14;

/// Midranks for ties. Exact p for tie-free samples with n_a + n_b <= 14,
/// otherwise the normal approximation with tie and continuity correction.
MannWhitneyResult mann_whitney_u(std::span<const double> a, std::span<const double> b);

/// Two-sided exact p-value of an observed U for tie-free samples of the given
/// sizes, from the counting recurrence of the null distribution.
double mann_whitney_exact_p(std::size_t n_a, std::size_t n_b, double u);

/// Two-sided normal-approximation p with continuity correction.
/// `tie_term` = Σ(t³ − t) over tie groups of the pooled sample.
double mann_whitney_normal_p(std::size_t n_a, std::size_t n_b, double u, double tie_term = 0.0);

// --- pairwise judgments -------------------------------------------------------

enum class Dimension { Helpfulness, Fluency, Conciseness, Experience, Balance, Depth, Coverage, Overall };
inline constexpr std::array<Dimension, 8> kDimensions = {
    Dimension::Helpfulness, Dimension::Fluency, Dimension::Conciseness, Dimension::Experience,
    Dimension::Balance,     Dimension::Depth,   Dimension::Coverage,    Dimension::Overall};
std::string_view to_string(Dimension d) noexcept;
std::optional<Dimension> dimension_from_string(std::string_view s);

enum class Choice { A, B, tie };
std::string_view to_string(Choice c) noexcept;
std::optional<Choice> choice_from_string(std::string_view s);

struct PairwiseJudgment {
  std::string item_id;
  Dimension dimension = Dimension::Overall;
  Choice choice = Choice::tie;
  std::string arm_a_label;
  std::string arm_b_label;
};

struct Tally {
  std::size_t count_a = 0;
  std::size_t count_tie = 0;
  std::size_t count_b = 0;
  double pct_a = 0.0;  // rounded half-up to one decimal
  double pct_tie = 0.0;
  double pct_b = 0.0;

  std::size_t total() const noexcept { return count_a + count_tie + count_b; }
};

/// Percentage of `count` in `total`, rounded half-up to one decimal using
/// integer arithmetic.
double percent_one_decimal(std::size_t count, std::size_t total);
double round_half_up(double value, int decimals);

Tally tally_pairwise(std::span<const PairwiseJudgment> judgments, Dimension dimension);

// --- Likert ---------------------------------------------------------------------

enum class LikertItem { Enjoyable, Skillful, InDepth, Faithful, Concise, Quality, BurdenedI, BurdenedR };
inline constexpr std::array<LikertItem, 8> kLikertItems = {
    LikertItem::Enjoyable, LikertItem::Skillful, LikertItem::InDepth,   LikertItem::Faithful,
    LikertItem::Concise,   LikertItem::Quality,  LikertItem::BurdenedI, LikertItem::BurdenedR};
std::string_view to_string(LikertItem item) noexcept;
std::optional<LikertItem> likert_item_from_string(std::string_view s);

enum class Arm { ours, baseline };
std::string_view to_string(Arm arm) noexcept;
std::optional<Arm> arm_from_string(std::string_view s);

struct LikertResponse {
  std::string respondent_id;
  LikertItem item = LikertItem::Quality;
  int value = 3;
  Arm arm = Arm::ours;
  bool never_reviewed = false;

  bool operator==(const LikertResponse&) const = default;
};

struct LikertDistribution {
  std::array<std::size_t, 5> counts{};  // counts[v-1] for value v
  std::size_t n = 0;
  double pct_agree = 0.0;     // values 4-5
  double pct_neutral = 0.0;   // value 3
  double pct_disagree = 0.0;  // values 1-2
};

struct LikertFilter {
  /// Drop respondents who have never written a review (intended for Burdened(R)).
  bool exclude_never_reviewed = false;
};

LikertDistribution likert_distribution(std::span<const LikertResponse> responses, LikertItem item,
                                       Arm arm, LikertFilter filter = {});

struct SignificanceReport {
  MannWhitneyResult test;
  double p = 1.0;
  bool significant = false;  // p < 0.05
};

inline constexpr double kSignificanceLevel = 0.05;

/// Mann–Whitney U between the `item` values of two response lists.
SignificanceReport significance_report(std::span<const LikertResponse> arm_a,
                                       std::span<const LikertResponse> arm_b, LikertItem item,
                                       LikertFilter filter = {});

// --- rating differences -----------------------------------------------------------

enum class RatingSource { human_written, system_generated };
enum class Annotator { turker, participant };
std::string_view to_string(RatingSource s) noexcept;
std::string_view to_string(Annotator a) noexcept;
std::optional<RatingSource> rating_source_from_string(std::string_view s);
std::optional<Annotator> annotator_from_string(std::string_view s);

struct RatingPair {
  int rating_x = 0;
  int rating_y = 0;
  RatingSource source = RatingSource::system_generated;
  Annotator annotator = Annotator::turker;
};

double mean_abs_rating_diff(std::span<const RatingPair> pairs, RatingSource source,
                            Annotator annotator);

// --- input files ------------------------------------------------------------------

std::vector<PairwiseJudgment> load_judgments(std::istream& in, std::string_view source_name);
std::vector<PairwiseJudgment> load_judgments(const std::filesystem::path& path);
std::vector<LikertResponse> load_likert(std::istream& in, std::string_view source_name);
std::vector<LikertResponse> load_likert(const std::filesystem::path& path);
std::vector<RatingPair> load_rating_pairs(std::istream& in, std::string_view source_name);
std::vector<RatingPair> load_rating_pairs(const std::filesystem::path& path);

/// Header line plus one line per response, readable by load_likert.
std::string likert_to_tsv(std::span<const LikertResponse> responses);

// --- reports -------------------------------------------------------------------------

/// One block per (arm_a_label, arm_b_label) pair: rows arm A / Tie / arm B,
/// columns the eight dimensions; "-" where a dimension has no ballots.
std::string format_pairwise_table(std::span<const PairwiseJudgment> judgments);
nlohmann::json pairwise_report_json(std::span<const PairwiseJudgment> judgments);

/// Annotator rows × source columns, two decimals, "-" for empty cells.
std::string format_rating_table(std::span<const RatingPair> pairs);
nlohmann::json rating_report_json(std::span<const RatingPair> pairs);

/// Per item: distribution for each arm, percent agree, Mann–Whitney p.
/// The never-reviewed filter is applied to Burdened(R) when requested.
std::string format_likert_table(std::span<const LikertResponse> responses, LikertFilter filter);
nlohmann::json likert_report_json(std::span<const LikertResponse> responses, LikertFilter filter);

}  // namespace revint
