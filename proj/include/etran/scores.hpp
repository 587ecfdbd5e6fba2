#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "etran/feature_set.hpp"

namespace etran {

enum class ScoreKind { energy, cls, reg, logme, lmr };
enum class Task { classification, detection };

std::string_view score_name(ScoreKind kind);
std::optional<ScoreKind> parse_score_kind(std::string_view name);
std::vector<ScoreKind> parse_score_list(std::string_view comma_list);

std::string_view task_name(Task task);
std::optional<Task> parse_task(std::string_view name);

/// {energy, cls} for classification, {energy, cls, reg} for detection.
std::vector<ScoreKind> default_scores(Task task);

/// Box-based scores: reg and lmr.
bool needs_boxes(ScoreKind kind);

/// Throws ConfigError when the score list is incompatible with the task.
void check_score_config(Task task, const std::vector<ScoreKind>& scores);

/// Raw value of each requested score, keyed by score name.
std::map<std::string, double> compute_scores(const FeatureSet& set, const std::vector<ScoreKind>& scores,
                                             bool holdout = false);

}  // namespace etran
