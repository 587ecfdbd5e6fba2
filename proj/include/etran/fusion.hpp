#pragma once

#include <map>
#include <span>
#include <string>
#include <vector>

namespace etran {

/// Min-max normalization to [0, 1]; a constant column maps to all zeros.
std::vector<double> normalize_across_models(std::span<const double> raw);

struct ModelScores {
  std::string model_id;
  std::map<std::string, double> scores;  // score name -> raw value
};

struct ScoreReport {
  std::string model_id;
  std::map<std::string, double> raw_scores;
  std::map<std::string, double> normalized_scores;
  double fused = 0.0;  // sum of the normalized scores
  int rank = 0;        // 1-based position in the ranking
};

struct RankedModel {
  std::string model_id;
  double fused = 0.0;
};

/// Descending by fused score; exact ties ordered by model id.
struct Ranking {
  std::vector<RankedModel> entries;
  std::vector<std::vector<std::string>> tie_groups;  // groups of two or more equal scores

  std::vector<std::string> model_order() const;
};

/// Sorts entries and fills tie_groups.
Ranking make_ranking(std::vector<RankedModel> entries);

struct FusionResult {
  std::vector<ScoreReport> reports;  // input order
  Ranking ranking;
};

/// Normalizes every enabled score column across models and sums per model.
/// Throws InputError if a model lacks an enabled score.
FusionResult fuse_and_rank(const std::vector<ModelScores>& models, const std::vector<std::string>& enabled_scores);

}  // namespace etran
