#include "etran/scores.hpp"

#include <algorithm>
#include <array>
#include <sstream>

#include "etran/energy.hpp"
#include "etran/lda.hpp"
#include "etran/logme.hpp"
#include "etran/svd_regression.hpp"

namespace etran {

namespace {
constexpr std::array<std::pair<ScoreKind, std::string_view>, 5> kScoreNames{{{ScoreKind::energy, "energy"},
                                                                            {ScoreKind::cls, "cls"},
                                                                            {ScoreKind::reg, "reg"},
                                                                            {ScoreKind::logme, "logme"},
                                                                            {ScoreKind::lmr, "lmr"}}};
}  // namespace

std::string_view score_name(ScoreKind kind) {
  for (const auto& [k, name] : kScoreNames)
    if (k == kind) return name;
  return "unknown";
}

std::optional<ScoreKind> parse_score_kind(std::string_view name) {
  for (const auto& [k, n] : kScoreNames)
    if (n == name) return k;
  return std::nullopt;
}

std::vector<ScoreKind> parse_score_list(std::string_view comma_list) {
  std::vector<ScoreKind> out;
  std::istringstream in{std::string(comma_list)};
  std::string item;
  while (std::getline(in, item, ',')) {
    if (item.empty()) continue;
    const auto kind = parse_score_kind(item);
    if (!kind) throw ConfigError("unknown score '" + item + "' (expected energy, cls, reg, logme or lmr)");
    if (std::find(out.begin(), out.end(), *kind) != out.end()) throw ConfigError("score '" + item + "' listed twice");
    out.push_back(*kind);
  }
  if (out.empty()) throw ConfigError("score list is empty");
  return out;
}

std::string_view task_name(Task task) { return task == Task::classification ? "classification" : "detection"; }

std::optional<Task> parse_task(std::string_view name) {
  if (name == "classification") return Task::classification;
  if (name == "detection") return Task::detection;
  return std::nullopt;
}

std::vector<ScoreKind> default_scores(Task task) {
  if (task == Task::classification) return {ScoreKind::energy, ScoreKind::cls};
  return {ScoreKind::energy, ScoreKind::cls, ScoreKind::reg};
}

bool needs_boxes(ScoreKind kind) { return kind == ScoreKind::reg || kind == ScoreKind::lmr; }

void check_score_config(Task task, const std::vector<ScoreKind>& scores) {
  if (task != Task::classification) return;
  for (auto s : scores)
    if (needs_boxes(s))
      throw ConfigError("score '" + std::string(score_name(s)) + "' needs box targets and is not available for the "
                        "classification task");
}

std::map<std::string, double> compute_scores(const FeatureSet& set, const std::vector<ScoreKind>& scores,
                                             bool holdout) {
  std::map<std::string, double> out;
  for (auto kind : scores) {
    if (needs_boxes(kind) && !set.has_boxes())
      throw ConfigError("score '" + std::string(score_name(kind)) + "' needs box targets but feature set '" +
                        set.model_id + "' has none");
    double value = 0.0;
    switch (kind) {
      case ScoreKind::energy:
        value = energy_score(set).score;
        break;
      case ScoreKind::cls:
        value = classification_score(set).score;
        break;
      case ScoreKind::reg:
        value = regression_score(set, holdout).score;
        break;
      case ScoreKind::logme:
        value = logme_classification_score(set);
        break;
      case ScoreKind::lmr:
        value = logme_regression_score(set);
        break;
    }
    out[std::string(score_name(kind))] = value;
  }
  return out;
}

}  // namespace etran
