// Acceptance run: one PASS/FAIL line per criterion, with the measured time
// and the tolerance each check is held to. Exit status is nonzero if any
// line fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>

#include <nlohmann/json.hpp>

#include "fixtures.hpp"
#include "log_capture.hpp"
#include "oracles.hpp"
#include "revint/corpus_matching.hpp"
#include "revint/error.hpp"
#include "revint/evaluation.hpp"
#include "revint/interviewer.hpp"
#include "revint/rating_predictor.hpp"
#include "revint/review_generator.hpp"
#include "revint/service.hpp"
#include "shaver_script.hpp"
#include "temp_dir.hpp"

using namespace revint;
using namespace revint::testing;

namespace {

struct Outcome {
  bool ok = true;
  std::string detail;
};

struct Criterion {
  std::string name;
  std::string tolerance;
  double limit_s;
  std::function<Outcome()> run;
};

/// Collects failure descriptions, keeping only the first few for the report.
class Failures {
 public:
  void add(const std::string& what) {
    if (count_++ < 3) text_ += (text_.empty() ? "" : "; ") + what;
  }
  Outcome outcome(const std::string& success) const {
    if (count_ == 0) return {true, success};
    return {false, std::to_string(count_) + " failure(s): " + text_};
  }

 private:
  std::size_t count_ = 0;
  std::string text_;
};

// --- template fidelity ----------------------------------------------------------------

Outcome template_fidelity() {
  Failures f;
  InterviewConfig cfg;
  cfg.min_questions = 8;
  cfg.max_turns = 15;
  if (build_interview_prompt({"Braun Series 9 9370cc Electric Shaver", "", ""}, cfg) !=
      read_fixture("tests/fixtures/interview_prompt_braun.txt"))
    f.add("interview prompt differs from fixture");

  InterviewSession s;
  s.id = "x";
  s.product = {"BrewMaster Kettle", "", ""};
  s.config.min_questions = 1;
  s.config.max_turns = 1;
  s.turns = {{0, Speaker::interviewer, "What do you think of the kettle?", true, false,
              "Interviewer: What do you think of the kettle? [Wait_for_Response]", ""},
             {1, Speaker::interviewee, "It boils fast.", false, false, "", ""}};
  s.question_count = 1;
  s.status = SessionStatus::hard_stopped;
  if (build_review_prompt(s) != read_fixture("tests/fixtures/review_prompt_kettle.txt"))
    f.add("review prompt differs from fixture");
  return f.outcome("interview and review prompts byte-equal");
}

// --- turn control ------------------------------------------------------------------------

Outcome turn_control() {
  LogCapture quiet;
  std::mt19937 rng(20240601);
  Failures f;
  constexpr int kRuns = 1000;
  int hard = 0, completed = 0, baseline_runs = 0;
  for (int run = 0; run < kRuns; ++run) {
    InterviewConfig cfg;
    cfg.min_questions = 8;
    cfg.max_turns = 15;
    const bool baseline = run % 4 == 3;
    if (baseline) cfg.policy = Policy::baseline;

    // Random script: each utterance waits, ends, carries both or neither
    // token, with or without the speaker prefix.
    std::vector<std::string> script;
    std::optional<int> first_end;
    for (int i = 1; i <= 20; ++i) {
      const auto roll = rng() % 20;
      std::string u = (rng() % 5 ? "Interviewer: " : "") + std::string("Question ") + std::to_string(i) + "?";
      bool ends = false;
      if (roll == 0) {
        u += " [End_of_Interview]";
        ends = true;
      } else if (roll == 1) {
        u += " [Wait_for_Response] [End_of_Interview]";
        ends = true;
      } else if (roll != 2) {
        u += " [Wait_for_Response]";
      }
      if (ends && !first_end) first_end = i;
      script.push_back(u);
    }
    Gateway gw(std::make_shared<ScriptedBackend>(script));
    auto session = start_interview({"Kettle", "", ""}, cfg, gw).session;
    int answers = 0;
    while (session.status == SessionStatus::active && answers < 100) {
      advance_interview(session, "answer " + std::to_string(answers), gw);
      ++answers;
    }
    const std::string tag = "run " + std::to_string(run) + ": ";
    if (session.question_count > 15) f.add(tag + "more than 15 interviewer turns");
    if (auto v = check_invariants(session)) f.add(tag + *v);

    if (baseline) {
      ++baseline_runs;
      std::vector<std::string> asked;
      for (const auto& t : session.turns)
        if (t.speaker == Speaker::interviewer) asked.push_back(t.text);
      bool in_order = asked.size() == kBaselineQuestionCount;
      for (std::size_t i = 0; in_order && i < asked.size(); ++i)
        in_order = asked[i] == baseline_question(static_cast<int>(i));
      if (!in_order) f.add(tag + "baseline did not ask the nine questions in order");
      if (session.status != SessionStatus::completed) f.add(tag + "baseline did not complete");
      if (gw.calls() != 0) f.add(tag + "baseline called the backend");
      continue;
    }

    const bool end_by_15 = first_end && *first_end <= 15;
    const bool stopped = session.status == SessionStatus::hard_stopped;
    if (stopped != !end_by_15) f.add(tag + "hard_stopped does not match absence of an end token");
    if (end_by_15) {
      ++completed;
      if (session.status != SessionStatus::completed || session.question_count != *first_end)
        f.add(tag + "did not complete at the first end token");
      if (session.protocol_violation != (*first_end < 8)) f.add(tag + "protocol_violation flag wrong");
    } else {
      ++hard;
      if (session.question_count != 15 || answers != 15) f.add(tag + "hard stop not after the 15th answer");
    }
  }
  std::ostringstream ok;
  ok << kRuns << " runs (" << completed << " completed, " << hard << " hard-stopped, " << baseline_runs
     << " baseline)";
  return f.outcome(ok.str());
}

// --- ROUGE-L ----------------------------------------------------------------------------------

Outcome rouge_oracle() {
  std::mt19937 rng(7);
  Failures f;
  const auto random_tokens = [&] {
    TokenSeq out(rng() % 13);
    for (auto& t : out) t = std::string(1, static_cast<char>('a' + rng() % 5));
    return out;
  };
  for (int i = 0; i < 1000; ++i) {
    const auto a = random_tokens();
    const auto b = random_tokens();
    const auto want = oracle::rouge_l_f1(a, b);
    const auto got = rouge_l(a, b);
    if (lcs_length(a, b) != oracle::lcs_bruteforce(a, b)) f.add("lcs mismatch at instance " + std::to_string(i));
    if (got.precision != want.p || got.recall != want.r || got.f_measure != want.f)
      f.add("rouge mismatch at instance " + std::to_string(i));
  }
  return f.outcome("1000 instances, exact equality");
}

// --- Mann–Whitney --------------------------------------------------------------------------------

Outcome mw_exact() {
  Failures f;
  double worst = 0.0;
  for (std::size_t na = 1; na <= 5; ++na)
    for (std::size_t nb = 1; nb <= 5; ++nb)
      for (std::size_t u = 0; u <= na * nb; ++u) {
        const double got = mann_whitney_exact_p(na, nb, static_cast<double>(u));
        const double want = oracle::exact_p_enumerated(na, nb, static_cast<double>(u));
        const double gap = std::abs(got - want);
        worst = std::max(worst, gap);
        if (gap > 4 * std::numeric_limits<double>::epsilon())
          f.add("(" + std::to_string(na) + "," + std::to_string(nb) + ") U=" + std::to_string(u));
      }
  std::ostringstream ok;
  ok << "all sizes n_a, n_b <= 5 and every U; max |diff| " << worst;
  return f.outcome(ok.str());
}

Outcome mw_approximation() {
  std::vector<std::string> bad;
  double worst = 0.0;
  std::string worst_at;
  for (std::size_t na = 1; na <= 5; ++na)
    for (std::size_t nb = 1; nb <= 5; ++nb) {
      double pair_worst = 0.0;
      for (std::size_t u = 0; u <= na * nb; ++u) {
        const double gap = std::abs(mann_whitney_normal_p(na, nb, static_cast<double>(u)) -
                                    mann_whitney_exact_p(na, nb, static_cast<double>(u)));
        pair_worst = std::max(pair_worst, gap);
      }
      if (pair_worst > 0.05) bad.push_back("(" + std::to_string(na) + "," + std::to_string(nb) + ")");
      if (pair_worst > worst) {
        worst = pair_worst;
        worst_at = "(" + std::to_string(na) + "," + std::to_string(nb) + ")";
      }
    }
  std::ostringstream msg;
  msg << bad.size() << " of 25 size pairs exceed 0.05; worst gap " << worst << " at " << worst_at;
  return {bad.empty(), msg.str()};
}

Outcome mw_example() {
  const std::vector<double> a = {1, 2, 3};
  const std::vector<double> b = {4, 5, 6};
  const auto r = mann_whitney_u(a, b);
  std::ostringstream msg;
  msg << "U=" << r.u_statistic << " p=" << r.p_two_sided << (r.exact ? " (exact)" : " (normal)");
  return {r.exact && r.u_statistic == 0.0 && std::abs(r.p_two_sided - 0.1) < 1e-12, msg.str()};
}

// --- selection ------------------------------------------------------------------------------------

Outcome selection_oracle() {
  std::mt19937 rng(99);
  Failures f;
  const std::vector<std::string> cats = {"Electronics", "Kitchen", "Toys"};
  const std::vector<std::string> words = {"braun", "series", "shaver", "kettle", "pro", "max", "9"};
  const auto title = [&] {
    std::string t;
    for (int k = 1 + static_cast<int>(rng() % 5); k > 0; --k) t += words[rng() % words.size()] + " ";
    return t;
  };
  int absent = 0;
  for (int c = 0; c < 200; ++c) {
    std::vector<ReviewRecord> corpus;
    const std::size_t n = c % 25 == 0 ? 0 : rng() % 201;
    for (std::size_t i = 0; i < n; ++i)
      corpus.push_back({"R" + std::to_string(rng() % 400), cats[rng() % 2], 1 + static_cast<int>(rng() % 5),
                        static_cast<long long>(rng() % 30), title(), "body"});
    // Every tenth corpus asks for a category nobody has.
    const std::string cat = c % 10 == 5 ? cats[2] : cats[rng() % 2];
    const int rating = 1 + static_cast<int>(rng() % 5);
    const std::string target = title();
    for (bool global : {false, true}) {
      SelectionOptions opt;
      opt.cutoff = global ? CutoffMode::global : CutoffMode::within_filtered;
      const auto got = select_comparison_review(target, cat, rating, corpus, opt);
      const auto want = oracle::select_index(corpus, tokenize(target), cat, rating, 5, global);
      if (!want) ++absent;
      if (got.has_value() != want.has_value() || (got && !(*got == corpus[*want])))
        f.add("corpus " + std::to_string(c) + (global ? " (global cutoff)" : ""));
    }
  }
  return f.outcome("200 corpora x 2 cutoff modes, " + std::to_string(absent) + " absent results");
}

// --- rating parser -----------------------------------------------------------------------------------

Outcome rating_parser() {
  Failures f;
  const auto doc = nlohmann::json::parse(read_fixture("tests/fixtures/rating_completions.json"));
  std::size_t n = 0;
  for (const auto& c : doc.at("cases")) {
    ++n;
    const auto completion = c.at("completion").get<std::string>();
    std::string got;
    try {
      got = std::to_string(parse_rating(completion).rating);
    } catch (const Error& e) {
      got = std::string(to_string(e.code()));
    }
    const auto want = c.at("expect").is_number() ? std::to_string(c.at("expect").get<int>())
                                                 : c.at("expect").get<std::string>();
    if (got != want) f.add(c.at("note").get<std::string>() + ": got " + got + ", want " + want);
  }
  if (n != 20) f.add("expected 20 fixtures, found " + std::to_string(n));
  const auto shaver = load_shaver_script(source_path("tests/fixtures/shaver_script.json"));
  if (parse_rating(shaver.rating_completion).rating != 4) f.add("shaver completion did not parse as 4");
  return f.outcome(std::to_string(n) + " fixtures plus the shaver completion");
}

// --- tallies ------------------------------------------------------------------------------------------

Outcome tally_fidelity() {
  Failures f;
  struct Row {
    std::size_t a, tie, b;
    double pa, ptie, pb;  // published one-decimal figures
  };
  for (const Row& row : {Row{38, 6, 56, 38.0, 6.0, 56.0}, Row{37, 12, 47, 38.5, 12.5, 49.0}}) {
    std::vector<PairwiseJudgment> js;
    const auto add = [&](std::size_t k, Choice c) {
      for (std::size_t i = 0; i < k; ++i) js.push_back({std::to_string(js.size()), Dimension::Helpfulness, c, "Ours", "Other"});
    };
    add(row.a, Choice::A);
    add(row.tie, Choice::tie);
    add(row.b, Choice::B);
    const auto t = tally_pairwise(js, Dimension::Helpfulness);
    const auto total = row.a + row.tie + row.b;
    if (t.pct_a != row.pa || t.pct_tie != row.ptie || t.pct_b != row.pb)
      f.add(std::to_string(total) + " ballots gave " + std::to_string(t.pct_a) + "/" + std::to_string(t.pct_tie) +
            "/" + std::to_string(t.pct_b));
    if (t.pct_a != oracle::percent_half_up(row.a, total) || t.pct_tie != oracle::percent_half_up(row.tie, total) ||
        t.pct_b != oracle::percent_half_up(row.b, total))
      f.add(std::to_string(total) + " ballots disagree with the rounding oracle");
  }
  return f.outcome("38.0/6.0/56.0 and 38.5/12.5/49.0");
}

// --- end-to-end replay ------------------------------------------------------------------------------------

Outcome end_to_end_replay() {
  Failures f;
  const auto script = load_shaver_script(source_path("tests/fixtures/shaver_script.json"));
  const auto cassette_path = source_path("tests/fixtures/shaver_cassette.jsonl");
  const auto exemplars = source_path("data/rating_exemplars.json");
  TempDir dir;
  const auto store_path = dir / "store.jsonl";
  const auto make_service = [&] {
    auto backend = std::make_shared<ReplayBackend>(Cassette::load(cassette_path));
    return std::make_unique<ReviewService>(std::make_shared<SessionStore>(store_path),
                                           std::make_shared<Gateway>(backend), ExemplarSet::load(exemplars));
  };

  std::string id;
  const std::size_t split = script.answers.size() / 2;
  {
    auto first = make_service();
    id = first->create_session({script.product_title, "Beauty & Personal Care", ""}, Policy::adaptive).session_id;
    for (std::size_t i = 0; i < split; ++i) first->post_message(id, script.answers[i]);
  }  // process "restart": every in-memory object is dropped here

  auto second = make_service();
  const auto resumed = second->get(id).session;
  if (resumed.question_count != static_cast<int>(split) + 1 || resumed.status != SessionStatus::active)
    f.add("restart did not restore the interview in progress");
  MessageResult last;
  for (std::size_t i = split; i < script.answers.size(); ++i) last = second->post_message(id, script.answers[i]);
  const auto session = second->get(id).session;
  if (!last.terminal || session.status != SessionStatus::completed) f.add("interview did not complete");
  if (session.question_count < 8) f.add("fewer than 8 questions");
  std::size_t exchanges = 0;
  for (const auto& t : session.turns)
    if (t.speaker == Speaker::interviewee) ++exchanges;
  if (exchanges < 8) f.add("fewer than 8 exchanges");

  const auto result = second->finalize(id);
  if (result.review.body != script.review_completion) f.add("review body differs from the fixture");
  if (result.rating.rating != 4) f.add("rating " + std::to_string(result.rating.rating) + " instead of 4");
  if (!SessionStore(store_path).get(id).finalized()) f.add("finalization not persisted");
  std::ostringstream ok;
  ok << exchanges << " exchanges, restart after " << split << ", rating " << result.rating.rating
     << ", replay only";
  return f.outcome(ok.str());
}

// --- statistics bounds ---------------------------------------------------------------------------------------

Outcome statistics_bounds() {
  Failures f;
  const std::vector<RatingPair> fixture = {{5, 4, RatingSource::system_generated, Annotator::turker},
                                           {3, 3, RatingSource::system_generated, Annotator::turker},
                                           {2, 4, RatingSource::system_generated, Annotator::turker}};
  const double m = mean_abs_rating_diff(fixture, RatingSource::system_generated, Annotator::turker);
  if (m != 1.0) f.add("fixture mean " + std::to_string(m));
  std::mt19937 rng(3);
  for (int trial = 0; trial < 1000; ++trial) {
    std::vector<RatingPair> pairs(1 + rng() % 30);
    long long sum = 0;
    for (auto& p : pairs) {
      p = {1 + static_cast<int>(rng() % 5), 1 + static_cast<int>(rng() % 5), RatingSource::human_written,
           Annotator::participant};
      sum += std::abs(p.rating_x - p.rating_y);
    }
    const double got = mean_abs_rating_diff(pairs, RatingSource::human_written, Annotator::participant);
    if (got < 0.0 || got > 4.0) f.add("mean outside [0,4]");
    if (got != static_cast<double>(sum) / static_cast<double>(pairs.size())) f.add("mean differs from recount");
  }
  return f.outcome("fixture 1.0; 1000 random sets within [0,4]");
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {"template-fidelity", "byte-exact", 1, template_fidelity},
      {"turn-control", "100% of 1000 runs", 10, turn_control},
      {"rouge-l-oracle", "exact, 1000 instances", 10, rouge_oracle},
      {"mann-whitney-exact", "|diff| <= 4 ulp", 30, mw_exact},
      {"mann-whitney-normal-approx", "|normal - exact| <= 0.05", 30, mw_approximation},
      {"mann-whitney-example", "U=0, p=0.1 +/- 1e-12", 30, mw_example},
      {"selection-oracle", "identical, 200 corpora", 20, selection_oracle},
      {"rating-parser", "20/20", 1, rating_parser},
      {"tally-fidelity", "exact", 1, tally_fidelity},
      {"end-to-end-replay", "body and rating exact", 5, end_to_end_replay},
      {"statistics-bounds", "exact", 1, statistics_bounds},
  };

  int failed = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (secs > c.limit_s) {
      o.ok = false;
      o.detail += "; over time limit";
    }
    if (!o.ok) ++failed;
    std::printf("%s %-27s %8.3fs (limit %gs, %s)  %s\n", o.ok ? "PASS" : "FAIL", c.name.c_str(), secs, c.limit_s,
                c.tolerance.c_str(), o.detail.c_str());
  }
  std::printf("%d of %zu criteria failed\n", failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
