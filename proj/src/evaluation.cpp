#include "revint/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <numeric>
#include <sstream>

#include <nlohmann/json.hpp>

#include "revint/error.hpp"
#include "revint/text.hpp"
#include "revint/tsv.hpp"

namespace revint {

using nlohmann::json;

// --- Mann–Whitney U -----------------------------------------------------------

double mann_whitney_exact_p(std::size_t n_a, std::size_t n_b, double u) {
  if (n_a == 0 || n_b == 0) fail(ErrorCode::EmptySample, "exact test needs non-empty samples");
  const std::size_t max_u = n_a * n_b;
  // counts[i][j][k]: arrangements of i a-values and j b-values with U_a = k.
  // Placing the largest pooled value in a adds j to U_a.
  std::vector<std::vector<std::vector<double>>> counts(
      n_a + 1, std::vector<std::vector<double>>(n_b + 1));
  for (std::size_t i = 0; i <= n_a; ++i) {
    for (std::size_t j = 0; j <= n_b; ++j) {
      auto& cell = counts[i][j];
      cell.assign(i * j + 1, 0.0);
      if (i == 0 || j == 0) {
        cell[0] = 1.0;
        continue;
      }
      const auto& from_a = counts[i - 1][j];
      const auto& from_b = counts[i][j - 1];
      for (std::size_t k = 0; k < from_a.size(); ++k) cell[k + j] += from_a[k];
      for (std::size_t k = 0; k < from_b.size(); ++k) cell[k] += from_b[k];
    }
  }
  const auto& dist = counts[n_a][n_b];
  const double total = std::accumulate(dist.begin(), dist.end(), 0.0);
  const double tail_u = std::min(u, static_cast<double>(max_u) - u);
  double tail = 0.0;
  for (std::size_t k = 0; k <= max_u && static_cast<double>(k) <= tail_u + 1e-9; ++k)
    tail += dist[k];
  return std::clamp(2.0 * tail / total, 0.0, 1.0);
}

double mann_whitney_normal_p(std::size_t n_a, std::size_t n_b, double u, double tie_term) {
  const double na = static_cast<double>(n_a);
  const double nb = static_cast<double>(n_b);
  const double n = na + nb;
  if (n < 2.0) return 1.0;
  const double mean = na * nb / 2.0;
  const double var = na * nb / 12.0 * ((n + 1.0) - tie_term / (n * (n - 1.0)));
  if (var <= 0.0) return 1.0;
  const double z = std::max(0.0, std::abs(u - mean) - 0.5) / std::sqrt(var);
  return std::clamp(std::erfc(z / std::sqrt(2.0)), 0.0, 1.0);
}

MannWhitneyResult mann_whitney_u(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) fail(ErrorCode::EmptySample, "Mann-Whitney U needs two non-empty samples");

  struct Obs {
    double value;
    bool from_a;
  };
  std::vector<Obs> pooled;
  pooled.reserve(a.size() + b.size());
  for (double v : a) pooled.push_back({v, true});
  for (double v : b) pooled.push_back({v, false});
  std::sort(pooled.begin(), pooled.end(), [](const Obs& x, const Obs& y) { return x.value < y.value; });

  double rank_sum_a = 0.0;
  double tie_term = 0.0;
  bool ties = false;
  for (std::size_t i = 0; i < pooled.size();) {
    std::size_t j = i;
    while (j < pooled.size() && pooled[j].value == pooled[i].value) ++j;
    const double t = static_cast<double>(j - i);
    const double midrank = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
    for (std::size_t k = i; k < j; ++k)
      if (pooled[k].from_a) rank_sum_a += midrank;
    if (t > 1.0) {
      ties = true;
      tie_term += t * t * t - t;
    }
    i = j;
  }

  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  MannWhitneyResult r;
  r.u_statistic = rank_sum_a - na * (na + 1.0) / 2.0;
  r.u_b = na * nb - r.u_statistic;
  r.exact = !ties && a.size() + b.size() <= kExactMaxTotal;
  r.p_two_sided = r.exact ? mann_whitney_exact_p(a.size(), b.size(), r.u_statistic)
                          : mann_whitney_normal_p(a.size(), b.size(), r.u_statistic, tie_term);
  return r;
}

// --- enums ----------------------------------------------------------------------

namespace {

template <typename E, std::size_t N>
std::optional<E> lookup(std::string_view s, const std::array<E, N>& values) {
  for (auto v : values)
    if (to_string(v) == s) return v;
  return std::nullopt;
}

}  // namespace

std::string_view to_string(Dimension d) noexcept {
  switch (d) {
    case Dimension::Helpfulness: return "Helpfulness";
    case Dimension::Fluency: return "Fluency";
    case Dimension::Conciseness: return "Conciseness";
    case Dimension::Experience: return "Experience";
    case Dimension::Balance: return "Balance";
    case Dimension::Depth: return "Depth";
    case Dimension::Coverage: return "Coverage";
    case Dimension::Overall: return "Overall";
  }
  return "Overall";
}

std::optional<Dimension> dimension_from_string(std::string_view s) { return lookup(s, kDimensions); }

std::string_view to_string(Choice c) noexcept {
  switch (c) {
    case Choice::A: return "A";
    case Choice::B: return "B";
    case Choice::tie: return "tie";
  }
  return "tie";
}

std::optional<Choice> choice_from_string(std::string_view s) {
  return lookup(s, std::array{Choice::A, Choice::B, Choice::tie});
}

std::string_view to_string(LikertItem item) noexcept {
  switch (item) {
    case LikertItem::Enjoyable: return "Enjoyable";
    case LikertItem::Skillful: return "Skillful";
    case LikertItem::InDepth: return "In-depth";
    case LikertItem::Faithful: return "Faithful";
    case LikertItem::Concise: return "Concise";
    case LikertItem::Quality: return "Quality";
    case LikertItem::BurdenedI: return "Burdened(I)";
    case LikertItem::BurdenedR: return "Burdened(R)";
  }
  return "Quality";
}

std::optional<LikertItem> likert_item_from_string(std::string_view s) {
  return lookup(s, kLikertItems);
}

std::string_view to_string(Arm arm) noexcept { return arm == Arm::ours ? "ours" : "baseline"; }
std::optional<Arm> arm_from_string(std::string_view s) {
  return lookup(s, std::array{Arm::ours, Arm::baseline});
}

std::string_view to_string(RatingSource s) noexcept {
  return s == RatingSource::human_written ? "human_written" : "system_generated";
}
std::string_view to_string(Annotator a) noexcept {
  return a == Annotator::turker ? "turker" : "participant";
}
std::optional<RatingSource> rating_source_from_string(std::string_view s) {
  return lookup(s, std::array{RatingSource::human_written, RatingSource::system_generated});
}
std::optional<Annotator> annotator_from_string(std::string_view s) {
  return lookup(s, std::array{Annotator::turker, Annotator::participant});
}

// --- tallies -------------------------------------------------------------------------

double percent_one_decimal(std::size_t count, std::size_t total) {
  if (total == 0) return 0.0;
  // tenths = floor(1000·count/total + 1/2), exact in integers
  const std::uint64_t tenths = (2000ULL * count + total) / (2ULL * total);
  return static_cast<double>(tenths) / 10.0;
}

double round_half_up(double value, int decimals) {
  const double scale = std::pow(10.0, decimals);
  return std::floor(value * scale + 0.5 + 1e-9) / scale;
}

Tally tally_pairwise(std::span<const PairwiseJudgment> judgments, Dimension dimension) {
  Tally t;
  for (const auto& j : judgments) {
    if (j.dimension != dimension) continue;
    switch (j.choice) {
      case Choice::A: ++t.count_a; break;
      case Choice::B: ++t.count_b; break;
      case Choice::tie: ++t.count_tie; break;
    }
  }
  if (t.total() == 0)
    fail(ErrorCode::NoJudgments, "no judgments for dimension " + std::string(to_string(dimension)));
  t.pct_a = percent_one_decimal(t.count_a, t.total());
  t.pct_tie = percent_one_decimal(t.count_tie, t.total());
  t.pct_b = percent_one_decimal(t.count_b, t.total());
  return t;
}

// --- Likert ------------------------------------------------------------------------------

namespace {

bool keep(const LikertResponse& r, LikertItem item, LikertFilter filter) {
  return r.item == item && !(filter.exclude_never_reviewed && r.never_reviewed);
}

}  // namespace

LikertDistribution likert_distribution(std::span<const LikertResponse> responses, LikertItem item,
                                       Arm arm, LikertFilter filter) {
  LikertDistribution d;
  for (const auto& r : responses) {
    if (r.arm != arm || !keep(r, item, filter)) continue;
    if (r.value < 1 || r.value > 5)
      fail(ErrorCode::PreconditionViolated, "Likert value " + std::to_string(r.value) +
                                                " outside 1..5");
    ++d.counts[static_cast<std::size_t>(r.value - 1)];
    ++d.n;
  }
  if (d.n == 0)
    fail(ErrorCode::NoResponses, "no responses for " + std::string(to_string(item)) + " / " +
                                     std::string(to_string(arm)));
  const double n = static_cast<double>(d.n);
  d.pct_disagree = 100.0 * static_cast<double>(d.counts[0] + d.counts[1]) / n;
  d.pct_neutral = 100.0 * static_cast<double>(d.counts[2]) / n;
  d.pct_agree = 100.0 * static_cast<double>(d.counts[3] + d.counts[4]) / n;
  return d;
}

SignificanceReport significance_report(std::span<const LikertResponse> arm_a,
                                       std::span<const LikertResponse> arm_b, LikertItem item,
                                       LikertFilter filter) {
  std::vector<double> a, b;
  for (const auto& r : arm_a)
    if (keep(r, item, filter)) a.push_back(r.value);
  for (const auto& r : arm_b)
    if (keep(r, item, filter)) b.push_back(r.value);
  SignificanceReport rep;
  rep.test = mann_whitney_u(a, b);
  rep.p = rep.test.p_two_sided;
  rep.significant = rep.p < kSignificanceLevel;
  return rep;
}

// --- ratings --------------------------------------------------------------------------------

double mean_abs_rating_diff(std::span<const RatingPair> pairs, RatingSource source,
                            Annotator annotator) {
  long long sum = 0;
  std::size_t n = 0;
  for (const auto& p : pairs) {
    if (p.source != source || p.annotator != annotator) continue;
    if (p.rating_x < 1 || p.rating_x > 5 || p.rating_y < 1 || p.rating_y > 5)
      fail(ErrorCode::PreconditionViolated, "rating pair outside 1..5");
    sum += std::abs(p.rating_x - p.rating_y);
    ++n;
  }
  if (n == 0)
    fail(ErrorCode::EmptyCell, "no rating pairs for " + std::string(to_string(source)) + " / " +
                                   std::string(to_string(annotator)));
  return static_cast<double>(sum) / static_cast<double>(n);
}

// --- loaders ----------------------------------------------------------------------------------

std::vector<PairwiseJudgment> load_judgments(std::istream& in, std::string_view source_name) {
  constexpr std::array<std::string_view, 5> kColumns = {"item_id", "dimension", "choice",
                                                        "arm_a_label", "arm_b_label"};
  const auto table = TsvTable::read(in, source_name, kColumns);
  std::vector<PairwiseJudgment> out;
  for (const auto& row : table.rows()) {
    PairwiseJudgment j;
    j.item_id = std::string(text::trim(table.get(row, "item_id")));
    const auto dim = text::trim(table.get(row, "dimension"));
    const auto choice = text::trim(table.get(row, "choice"));
    auto d = dimension_from_string(dim);
    if (!d)
      fail(ErrorCode::InputFormat, table.where(row) + ": unknown dimension '" + std::string(dim) + "'");
    auto c = choice_from_string(choice);
    if (!c)
      fail(ErrorCode::InputFormat,
           table.where(row) + ": choice must be A, B or tie, got '" + std::string(choice) + "'");
    j.dimension = *d;
    j.choice = *c;
    j.arm_a_label = std::string(text::trim(table.get(row, "arm_a_label")));
    j.arm_b_label = std::string(text::trim(table.get(row, "arm_b_label")));
    out.push_back(std::move(j));
  }
  return out;
}

std::vector<PairwiseJudgment> load_judgments(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::InputFormat, "cannot open " + path.string());
  return load_judgments(in, path.string());
}

std::vector<LikertResponse> load_likert(std::istream& in, std::string_view source_name) {
  constexpr std::array<std::string_view, 4> kColumns = {"respondent_id", "item_label", "value",
                                                        "arm"};
  const auto table = TsvTable::read(in, source_name, kColumns);
  const bool has_never = table.has_column("never_reviewed");
  std::vector<LikertResponse> out;
  for (const auto& row : table.rows()) {
    LikertResponse r;
    r.respondent_id = std::string(text::trim(table.get(row, "respondent_id")));
    const auto label = text::trim(table.get(row, "item_label"));
    auto item = likert_item_from_string(label);
    if (!item)
      fail(ErrorCode::InvalidLikertLabel,
           table.where(row) + ": unknown Likert item '" + std::string(label) + "'");
    r.item = *item;
    r.value = table.get_int(row, "value");
    if (r.value < 1 || r.value > 5)
      fail(ErrorCode::InputFormat, table.where(row) + ": value outside 1..5");
    const auto arm_text = text::trim(table.get(row, "arm"));
    auto arm = arm_from_string(arm_text);
    if (!arm)
      fail(ErrorCode::InputFormat,
           table.where(row) + ": arm must be ours or baseline, got '" + std::string(arm_text) + "'");
    r.arm = *arm;
    if (has_never) {
      const auto flag = text::trim(table.get(row, "never_reviewed"));
      r.never_reviewed = flag == "1" || flag == "true" || flag == "yes";
    }
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<LikertResponse> load_likert(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::InputFormat, "cannot open " + path.string());
  return load_likert(in, path.string());
}

std::vector<RatingPair> load_rating_pairs(std::istream& in, std::string_view source_name) {
  constexpr std::array<std::string_view, 4> kColumns = {"rating_x", "rating_y", "source",
                                                        "annotator"};
  const auto table = TsvTable::read(in, source_name, kColumns);
  std::vector<RatingPair> out;
  for (const auto& row : table.rows()) {
    RatingPair p;
    p.rating_x = table.get_int(row, "rating_x");
    p.rating_y = table.get_int(row, "rating_y");
    if (p.rating_x < 1 || p.rating_x > 5 || p.rating_y < 1 || p.rating_y > 5)
      fail(ErrorCode::InputFormat, table.where(row) + ": ratings must lie in 1..5");
    const auto src = text::trim(table.get(row, "source"));
    const auto ann = text::trim(table.get(row, "annotator"));
    auto s = rating_source_from_string(src);
    auto a = annotator_from_string(ann);
    if (!s)
      fail(ErrorCode::InputFormat, table.where(row) + ": unknown source '" + std::string(src) + "'");
    if (!a)
      fail(ErrorCode::InputFormat,
           table.where(row) + ": unknown annotator '" + std::string(ann) + "'");
    p.source = *s;
    p.annotator = *a;
    out.push_back(p);
  }
  return out;
}

std::vector<RatingPair> load_rating_pairs(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::InputFormat, "cannot open " + path.string());
  return load_rating_pairs(in, path.string());
}

std::string likert_to_tsv(std::span<const LikertResponse> responses) {
  std::string out = "respondent_id\titem_label\tvalue\tarm\tnever_reviewed\n";
  for (const auto& r : responses) {
    out += r.respondent_id + "\t" + std::string(to_string(r.item)) + "\t" +
           std::to_string(r.value) + "\t" + std::string(to_string(r.arm)) + "\t" +
           (r.never_reviewed ? "1" : "0") + "\n";
  }
  return out;
}

// --- reports --------------------------------------------------------------------------------------

namespace {

using ArmPair = std::pair<std::string, std::string>;

std::vector<ArmPair> arm_pairs(std::span<const PairwiseJudgment> judgments) {
  std::vector<ArmPair> pairs;
  for (const auto& j : judgments) {
    ArmPair p{j.arm_a_label, j.arm_b_label};
    if (std::find(pairs.begin(), pairs.end(), p) == pairs.end()) pairs.push_back(p);
  }
  return pairs;
}

std::vector<PairwiseJudgment> judgments_for(std::span<const PairwiseJudgment> judgments,
                                            const ArmPair& arms) {
  std::vector<PairwiseJudgment> out;
  for (const auto& j : judgments)
    if (j.arm_a_label == arms.first && j.arm_b_label == arms.second) out.push_back(j);
  return out;
}

std::string fixed(double v, int decimals) {
  std::ostringstream out;
  out << std::fixed << std::setprecision(decimals) << round_half_up(v, decimals);
  return out.str();
}

std::string pad(std::string s, std::size_t width) {
  if (s.size() < width) s.insert(0, width - s.size(), ' ');
  return s;
}

std::string pad_right(std::string s, std::size_t width) {
  if (s.size() < width) s.append(width - s.size(), ' ');
  return s;
}

}  // namespace

std::string format_pairwise_table(std::span<const PairwiseJudgment> judgments) {
  std::ostringstream out;
  constexpr std::size_t kLabelWidth = 10;
  constexpr std::size_t kCol = 12;
  std::string header = pad_right("Reviews", kLabelWidth);
  for (auto d : kDimensions) header += pad(std::string(to_string(d)), kCol);
  out << header << "\n";
  for (const auto& arms : arm_pairs(judgments)) {
    const auto subset = judgments_for(judgments, arms);
    std::array<std::string, 3> rows = {pad_right(arms.first, kLabelWidth),
                                       pad_right("Tie", kLabelWidth),
                                       pad_right(arms.second, kLabelWidth)};
    for (auto d : kDimensions) {
      std::array<std::string, 3> cells = {"-", "-", "-"};
      const bool any = std::any_of(subset.begin(), subset.end(),
                                   [d](const PairwiseJudgment& j) { return j.dimension == d; });
      if (any) {
        auto t = tally_pairwise(subset, d);
        cells = {fixed(t.pct_a, 1), fixed(t.pct_tie, 1), fixed(t.pct_b, 1)};
      }
      for (std::size_t i = 0; i < 3; ++i) rows[i] += pad(cells[i], kCol);
    }
    out << std::string(header.size(), '-') << "\n";
    for (const auto& row : rows) out << row << "\n";
  }
  return out.str();
}

json pairwise_report_json(std::span<const PairwiseJudgment> judgments) {
  json blocks = json::array();
  for (const auto& arms : arm_pairs(judgments)) {
    const auto subset = judgments_for(judgments, arms);
    json dims = json::object();
    for (auto d : kDimensions) {
      const bool any = std::any_of(subset.begin(), subset.end(),
                                   [d](const PairwiseJudgment& j) { return j.dimension == d; });
      if (!any) continue;
      auto t = tally_pairwise(subset, d);
      dims[std::string(to_string(d))] = {{"count_a", t.count_a}, {"count_tie", t.count_tie},
                                         {"count_b", t.count_b}, {"pct_a", t.pct_a},
                                         {"pct_tie", t.pct_tie}, {"pct_b", t.pct_b}};
    }
    blocks.push_back({{"arm_a", arms.first}, {"arm_b", arms.second}, {"dimensions", dims}});
  }
  return blocks;
}

std::string format_rating_table(std::span<const RatingPair> pairs) {
  std::ostringstream out;
  constexpr std::size_t kLabel = 14;
  constexpr std::size_t kCol = 18;
  out << pad_right("Annotator", kLabel) << pad("Human-written", kCol)
      << pad("System-generated", kCol) << "\n";
  for (auto ann : {Annotator::turker, Annotator::participant}) {
    std::string row = pad_right(ann == Annotator::turker ? "Turkers" : "Participants", kLabel);
    for (auto src : {RatingSource::human_written, RatingSource::system_generated}) {
      const bool any = std::any_of(pairs.begin(), pairs.end(), [&](const RatingPair& p) {
        return p.source == src && p.annotator == ann;
      });
      row += pad(any ? fixed(mean_abs_rating_diff(pairs, src, ann), 2) : "-", kCol);
    }
    out << row << "\n";
  }
  return out.str();
}

json rating_report_json(std::span<const RatingPair> pairs) {
  json cells = json::array();
  for (auto ann : {Annotator::turker, Annotator::participant}) {
    for (auto src : {RatingSource::human_written, RatingSource::system_generated}) {
      std::size_t n = 0;
      for (const auto& p : pairs)
        if (p.source == src && p.annotator == ann) ++n;
      if (n == 0) continue;
      cells.push_back({{"annotator", std::string(to_string(ann))},
                       {"source", std::string(to_string(src))},
                       {"n", n},
                       {"mean_abs_diff", mean_abs_rating_diff(pairs, src, ann)}});
    }
  }
  return cells;
}

namespace {

LikertFilter filter_for(LikertItem item, LikertFilter requested) {
  return item == LikertItem::BurdenedR ? requested : LikertFilter{};
}

std::vector<LikertResponse> arm_subset(std::span<const LikertResponse> responses, Arm arm) {
  std::vector<LikertResponse> out;
  for (const auto& r : responses)
    if (r.arm == arm) out.push_back(r);
  return out;
}

bool has_item(std::span<const LikertResponse> rs, LikertItem item, LikertFilter f) {
  return std::any_of(rs.begin(), rs.end(), [&](const LikertResponse& r) {
    return r.item == item && !(f.exclude_never_reviewed && r.never_reviewed);
  });
}

}  // namespace

std::string format_likert_table(std::span<const LikertResponse> responses, LikertFilter filter) {
  const auto ours = arm_subset(responses, Arm::ours);
  const auto base = arm_subset(responses, Arm::baseline);
  std::ostringstream out;
  out << pad_right("Item", 13) << pad_right("Arm", 10) << pad("n", 5);
  for (int v = 1; v <= 5; ++v) out << pad(std::to_string(v), 5);
  out << pad("agree%", 9) << pad("disagree%", 11) << pad("p", 9) << "\n";
  for (auto item : kLikertItems) {
    const auto f = filter_for(item, filter);
    for (const auto* arm_rs : {&ours, &base}) {
      if (!has_item(*arm_rs, item, f)) continue;
      const Arm arm = arm_rs == &ours ? Arm::ours : Arm::baseline;
      const auto d = likert_distribution(*arm_rs, item, arm, f);
      out << pad_right(std::string(to_string(item)), 13) << pad_right(std::string(to_string(arm)), 10)
          << pad(std::to_string(d.n), 5);
      for (auto c : d.counts) out << pad(std::to_string(c), 5);
      out << pad(fixed(d.pct_agree, 1), 9) << pad(fixed(d.pct_disagree, 1), 11);
      if (arm == Arm::ours && has_item(base, item, f)) {
        const auto rep = significance_report(ours, base, item, f);
        out << pad(fixed(rep.p, 4) + (rep.significant ? "*" : " "), 9);
      }
      out << "\n";
    }
  }
  return out.str();
}

json likert_report_json(std::span<const LikertResponse> responses, LikertFilter filter) {
  const auto ours = arm_subset(responses, Arm::ours);
  const auto base = arm_subset(responses, Arm::baseline);
  json items = json::array();
  for (auto item : kLikertItems) {
    const auto f = filter_for(item, filter);
    json rec = {{"item", std::string(to_string(item))}};
    for (const auto* arm_rs : {&ours, &base}) {
      if (!has_item(*arm_rs, item, f)) continue;
      const Arm arm = arm_rs == &ours ? Arm::ours : Arm::baseline;
      const auto d = likert_distribution(*arm_rs, item, arm, f);
      rec[std::string(to_string(arm))] = {{"n", d.n},
                                          {"counts", d.counts},
                                          {"pct_agree", d.pct_agree},
                                          {"pct_neutral", d.pct_neutral},
                                          {"pct_disagree", d.pct_disagree}};
    }
    if (has_item(ours, item, f) && has_item(base, item, f)) {
      const auto rep = significance_report(ours, base, item, f);
      rec["mann_whitney"] = {{"u", rep.test.u_statistic},
                             {"p", rep.p},
                             {"exact", rep.test.exact},
                             {"significant", rep.significant}};
    }
    if (rec.size() > 1) items.push_back(std::move(rec));
  }
  return items;
}

}  // namespace revint
