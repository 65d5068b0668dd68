#pragma once

// The electric-shaver interview as a scripted exchange: interviewer
// completions, interviewee answers, the review completion and the rating
// completion. The cassette fixture is recorded from this script.

#include <filesystem>
#include <string>
#include <vector>

namespace revint::testing {

struct ShaverScript {
  std::string product_title;
  std::vector<std::string> interviewer;  // raw completions, in order
  std::vector<std::string> answers;
  std::string review_completion;
  std::string rating_completion;

  /// Backend responses in call order: interviewer turns, review, rating.
  std::vector<std::string> responses() const;
};

ShaverScript load_shaver_script(const std::filesystem::path& path);

/// Runs create → answers → finalize against a recording scripted backend
/// and writes the resulting cassette to `cassette_path` (replacing it).
void record_shaver_cassette(const ShaverScript& script, const std::filesystem::path& exemplars_path,
                            const std::filesystem::path& cassette_path);

}  // namespace revint::testing
