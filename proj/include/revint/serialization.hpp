#pragma once

#include <nlohmann/json.hpp>

#include "revint/evaluation.hpp"
#include "revint/interviewer.hpp"
#include "revint/rating_predictor.hpp"
#include "revint/review_generator.hpp"

// JSON mappings for the domain types. Enum values are written with their
// to_string spellings.

namespace revint {

void to_json(nlohmann::json& j, const ProductRef& p);
void from_json(const nlohmann::json& j, ProductRef& p);
void to_json(nlohmann::json& j, const InterviewConfig& c);
void from_json(const nlohmann::json& j, InterviewConfig& c);
void to_json(nlohmann::json& j, const DialogueTurn& t);
void from_json(const nlohmann::json& j, DialogueTurn& t);
void to_json(nlohmann::json& j, const InterviewSession& s);
void from_json(const nlohmann::json& j, InterviewSession& s);
void to_json(nlohmann::json& j, const GeneratedReview& r);
void from_json(const nlohmann::json& j, GeneratedReview& r);
void to_json(nlohmann::json& j, const RatingPrediction& r);
void from_json(const nlohmann::json& j, RatingPrediction& r);

}  // namespace revint
