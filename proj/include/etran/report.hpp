#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "etran/fusion.hpp"
#include "etran/metrics.hpp"
#include "etran/scores.hpp"

namespace etran {

struct RankReport {
  Task task = Task::classification;
  std::vector<std::string> scores;  // enabled score names, flag order
  bool holdout = false;
  FusionResult fusion;
};

/// Tab-separated, one record per model in rank order:
/// rank, model_id, fused, raw_<score>..., norm_<score>...
/// Numbers use 17 significant digits so the text round-trips exactly.
std::string format_report_text(const RankReport& report);
std::string format_report_json(const RankReport& report);

/// Reads the ranking (model ids and fused scores) back from a text report.
Ranking parse_report_text(std::istream& in);
Ranking read_report(const std::filesystem::path& file);

std::string format_evaluation_text(const RankingEvaluation& eval);
std::string format_evaluation_json(const RankingEvaluation& eval);

/// printf("%.17g") without locale surprises.
std::string format_number(double value);

}  // namespace etran
