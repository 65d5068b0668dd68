// revint: command-line front end for the interview, review and evaluation
// pipeline. Exit status 0 on success, 1 on operational errors, 2 on usage
// errors.

#include <httplib.h>

#include <CLI11.hpp>
#include <csignal>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <sstream>

#include "revint/config.hpp"
#include "revint/corpus_matching.hpp"
#include "revint/error.hpp"
#include "revint/evaluation.hpp"
#include "revint/http_api.hpp"
#include "revint/serialization.hpp"
#include "revint/service.hpp"
#include "revint/text.hpp"

namespace {

using namespace revint;
using nlohmann::json;

constexpr int kExitOperational = 1;
constexpr int kExitUsage = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::InputFormat, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_output(const std::string& path, const std::string& content) {
  if (path.empty() || path == "-") {
    std::cout << content;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out || !(out << content)) fail(ErrorCode::StorageFailure, "cannot write " + path);
}

std::shared_ptr<Gateway> make_gateway(const Config& config) {
  return std::make_shared<Gateway>(make_backend(config), config.retry_policy());
}

std::unique_ptr<ReviewService> make_service(const Config& config) {
  ServiceOptions options{config.interview_config(Policy::adaptive), config.generator_params(),
                         config.predictor_params()};
  return std::make_unique<ReviewService>(std::make_shared<SessionStore>(config.store),
                                         make_gateway(config), ExemplarSet::load(config.exemplars),
                                         options);
}

void print_finalization(const FinalizeResult& result) {
  std::cout << "\n--- Review ---\n" << result.review.body << "\n\n";
  std::cout << "Predicted rating: " << result.rating.rating << "\n";
}

// --- run-interview ------------------------------------------------------------------------

struct InterviewArgs {
  std::string product;
  std::string category;
  std::string policy = "adaptive";
  std::string resume;
  bool no_finalize = false;
};

int run_interview(const Config& config, const InterviewArgs& args) {
  auto service = make_service(config);
  std::string id;
  if (!args.resume.empty()) {
    const auto stored = service->get(args.resume);
    id = stored.session.id;
    for (const auto& turn : stored.session.turns)
      std::cout << (turn.speaker == Speaker::interviewer ? kInterviewerPrefix : kIntervieweePrefix) << " "
                << turn.text << "\n";
  } else {
    if (text::is_blank(args.product)) throw UsageError("--product is required");
    const auto created = service->create_session({args.product, args.category, ""},
                                                 policy_from_string(args.policy));
    id = created.session_id;
    std::cerr << "session " << id << "\n";
    std::cout << kInterviewerPrefix << " " << created.first.turn.text << "\n";
  }

  auto session = service->get(id).session;
  while (!session.terminal()) {
    std::cout << kIntervieweePrefix << " " << std::flush;
    std::string line;
    if (!std::getline(std::cin, line)) {
      std::cerr << "\ninput closed; session " << id << " left active (resume with --resume " << id << ")\n";
      return kExitOperational;
    }
    if (text::is_blank(line)) continue;
    const auto result = service->post_message(id, line);
    if (result.next) std::cout << kInterviewerPrefix << " " << result.next->turn.text << "\n";
    session = service->get(id).session;
  }
  std::cerr << "interview " << to_string(session.status) << " after " << session.question_count
            << " questions\n";
  if (!args.no_finalize) print_finalization(service->finalize(id));
  return 0;
}

// --- generate-review / predict-rating ---------------------------------------------------

int generate_review_cmd(const Config& config, const std::string& session_id, const std::string& session_file) {
  InterviewSession session;
  if (!session_file.empty()) {
    try {
      session = json::parse(read_file(session_file)).get<InterviewSession>();
    } catch (const json::exception& e) {
      fail(ErrorCode::InputFormat, session_file + ": " + e.what());
    }
  } else if (!session_id.empty()) {
    session = SessionStore(config.store).get(session_id).session;
  } else {
    throw UsageError("give --session or --session-file");
  }
  const auto gateway = make_gateway(config);
  std::cout << generate_review(session, *gateway, config.generator_params()).body << "\n";
  return 0;
}

int predict_rating_cmd(const Config& config, const std::string& title, std::string review,
                       const std::string& review_file, bool show_reasoning) {
  if (!review_file.empty()) review = read_file(review_file);
  if (text::is_blank(title) || text::is_blank(review))
    throw UsageError("--title and one of --review/--review-file are required");
  const auto exemplars = ExemplarSet::load(config.exemplars);
  const auto gateway = make_gateway(config);
  const auto prediction = predict_rating(title, text::trim(review), exemplars, *gateway, config.predictor_params());
  if (show_reasoning) std::cout << prediction.reasoning << "\n";
  std::cout << "Rating: " << prediction.rating << "\n";
  return 0;
}

// --- match-reviews -------------------------------------------------------------------------

int match_reviews_cmd(const Config& config, const std::string& corpus_path, const std::string& title,
                      const std::string& category, int rating) {
  const auto corpus = load_corpus(corpus_path);
  const auto match = select_comparison_review(title, category, rating, corpus, config.selection_options());
  if (!match) {
    std::cout << "no match\n";
    return 0;
  }
  std::cout << match->record_id << "\n";
  return 0;
}

// --- evaluate ------------------------------------------------------------------------------

struct EvaluateArgs {
  std::string judgments;
  std::string dimension;
  std::string likert;
  bool exclude_never_reviewed = false;
  std::string ratings;
  bool as_json = false;
};

std::string pct(double v) {
  std::ostringstream ss;
  ss << std::fixed << std::setprecision(1) << v << "%";
  return ss.str();
}

int evaluate_cmd(const EvaluateArgs& args) {
  if (args.judgments.empty() && args.likert.empty() && args.ratings.empty())
    throw UsageError("give at least one of --judgments, --likert, --ratings");
  json report = json::object();

  if (!args.judgments.empty()) {
    const auto judgments = load_judgments(args.judgments);
    if (!args.dimension.empty()) {
      const auto dim = dimension_from_string(args.dimension);
      if (!dim) throw UsageError("unknown dimension '" + args.dimension + "'");
      // One triple per compared pair of systems.
      std::map<std::pair<std::string, std::string>, std::vector<PairwiseJudgment>> groups;
      std::vector<std::pair<std::string, std::string>> order;
      for (const auto& j : judgments) {
        auto key = std::make_pair(j.arm_a_label, j.arm_b_label);
        if (!groups.count(key)) order.push_back(key);
        groups[key].push_back(j);
      }
      json triples = json::array();
      for (const auto& key : order) {
        const auto t = tally_pairwise(groups[key], *dim);
        triples.push_back({{"arm_a", key.first}, {"arm_b", key.second},
                           {"pct_a", t.pct_a}, {"pct_tie", t.pct_tie}, {"pct_b", t.pct_b},
                           {"n", t.total()}});
        if (!args.as_json)
          std::cout << args.dimension << ": " << key.first << " " << pct(t.pct_a) << "  Tie "
                    << pct(t.pct_tie) << "  " << key.second << " " << pct(t.pct_b) << "  (n=" << t.total()
                    << ")\n";
      }
      report["pairwise"] = triples;
    } else {
      report["pairwise"] = pairwise_report_json(judgments);
      if (!args.as_json) std::cout << format_pairwise_table(judgments) << "\n";
    }
  }

  if (!args.likert.empty()) {
    const auto responses = load_likert(args.likert);
    const LikertFilter filter{args.exclude_never_reviewed};
    report["likert"] = likert_report_json(responses, filter);
    if (!args.as_json) std::cout << format_likert_table(responses, filter) << "\n";
  }

  if (!args.ratings.empty()) {
    const auto pairs = load_rating_pairs(args.ratings);
    report["ratings"] = rating_report_json(pairs);
    if (!args.as_json) std::cout << format_rating_table(pairs) << "\n";
  }

  if (args.as_json) std::cout << report.dump(2) << "\n";
  return 0;
}

// --- export / serve ------------------------------------------------------------------------

int export_cmd(const Config& config, const std::string& what, const std::string& out) {
  const SessionStore store(config.store);
  if (what == "sessions") write_output(out, export_sessions(store).dump(2) + "\n");
  else if (what == "reviews") write_output(out, export_reviews(store).dump(2) + "\n");
  else if (what == "feedback") write_output(out, export_feedback(store).dump(2) + "\n");
  else if (what == "likert") write_output(out, export_likert_tsv(store));
  else throw UsageError("export target must be sessions, reviews, feedback or likert");
  return 0;
}

httplib::Server* g_server = nullptr;

int serve_cmd(const Config& config) {
  auto service = make_service(config);
  httplib::Server server;
  register_routes(server, *service);
  g_server = &server;
  std::signal(SIGINT, [](int) {
    if (g_server) g_server->stop();
  });
  std::signal(SIGTERM, [](int) {
    if (g_server) g_server->stop();
  });
  std::cerr << "listening on http://" << config.host << ":" << config.port << " (store " << config.store
            << ", backend " << config.backend << ")\n";
  if (!server.listen(config.host, config.port))
    fail(ErrorCode::BackendUnavailable, "cannot listen on " + config.host + ":" + std::to_string(config.port));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Interview-based product review generation"};
  app.require_subcommand(1);

  std::string config_file;
  app.add_option("--config", config_file, "JSON configuration file");
  // Every configuration key is also a flag; values are validated by Config::set.
  std::map<std::string, std::string> overrides;
  for (const auto& key : Config::keys())
    app.add_option("--" + Config::flag_name(key), overrides[key], "config key " + key)
        ->group("Configuration");

  InterviewArgs interview;
  auto* run = app.add_subcommand("run-interview", "Interactive interview in the terminal");
  run->add_option("--product", interview.product, "Product title");
  run->add_option("--category", interview.category, "Product category");
  run->add_option("--policy", interview.policy, "adaptive or baseline")
      ->check(CLI::IsMember({"adaptive", "baseline"}));
  run->add_option("--resume", interview.resume, "Continue a stored active session");
  run->add_flag("--no-finalize", interview.no_finalize, "Stop after the interview");

  std::string session_id, session_file;
  auto* gen = app.add_subcommand("generate-review", "Write a review from a finished interview");
  gen->add_option("--session", session_id, "Session id in the store");
  gen->add_option("--session-file", session_file, "Session JSON file");

  std::string title, review, review_file;
  bool show_reasoning = false;
  auto* pred = app.add_subcommand("predict-rating", "Predict a 1-5 rating for a review");
  pred->add_option("--title", title, "Product title")->required();
  pred->add_option("--review", review, "Review text");
  pred->add_option("--review-file", review_file, "File holding the review text");
  pred->add_flag("--reasoning", show_reasoning, "Print the reasoning too");

  std::string corpus, category;
  int rating = 0;
  auto* match = app.add_subcommand("match-reviews", "Pick the comparison review from a corpus");
  match->add_option("--corpus", corpus, "Corpus TSV")->required();
  match->add_option("--title", title, "Target product title")->required();
  match->add_option("--category", category, "Target category")->required();
  match->add_option("--rating", rating, "Target rating")->required()->check(CLI::Range(1, 5));

  EvaluateArgs eval;
  auto* evaluate = app.add_subcommand("evaluate", "Tally judgments, Likert answers or rating gaps");
  evaluate->add_option("--judgments", eval.judgments, "Pairwise judgments TSV");
  evaluate->add_option("--dimension", eval.dimension, "Restrict to one dimension (percentage triple)");
  evaluate->add_option("--likert", eval.likert, "Likert responses TSV");
  evaluate->add_flag("--exclude-never-reviewed", eval.exclude_never_reviewed,
                     "Drop never-reviewed respondents from Burdened(R)");
  evaluate->add_option("--ratings", eval.ratings, "Rating pairs TSV");
  evaluate->add_flag("--json", eval.as_json, "JSON output");

  std::string what, out;
  auto* exp = app.add_subcommand("export", "Dump stored sessions, reviews or feedback");
  exp->add_option("what", what, "sessions, reviews, feedback or likert")->required();
  exp->add_option("--out,-o", out, "Output file (default stdout)");

  auto* serve = app.add_subcommand("serve", "Run the HTTP API");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    Config config;
    if (!config_file.empty()) config.merge_file(config_file);
    config.merge_env();
    for (const auto& [key, value] : overrides)
      if (app.count("--" + Config::flag_name(key)) > 0) config.set(key, value);
    config.validate();

    if (*run) return run_interview(config, interview);
    if (*gen) return generate_review_cmd(config, session_id, session_file);
    if (*pred) return predict_rating_cmd(config, title, review, review_file, show_reasoning);
    if (*match) return match_reviews_cmd(config, corpus, title, category, rating);
    if (*evaluate) return evaluate_cmd(eval);
    if (*exp) return export_cmd(config, what, out);
    if (*serve) return serve_cmd(config);
  } catch (const UsageError& e) {
    std::cerr << "revint: " << e.what() << "\n";
    return kExitUsage;
  } catch (const Error& e) {
    std::cerr << "revint: " << e.what() << "\n";
    return e.code() == ErrorCode::InvalidConfig ? kExitUsage : kExitOperational;
  } catch (const std::exception& e) {
    std::cerr << "revint: " << e.what() << "\n";
    return kExitOperational;
  }
  return kExitUsage;
}
