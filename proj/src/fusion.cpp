#include "etran/fusion.hpp"

#include <algorithm>

#include "etran/feature_set.hpp"

namespace etran {

std::vector<double> normalize_across_models(std::span<const double> raw) {
  std::vector<double> out(raw.size(), 0.0);
  if (raw.empty()) return out;
  const auto [lo, hi] = std::minmax_element(raw.begin(), raw.end());
  const double range = *hi - *lo;
  if (!(range > 0.0)) return out;
  for (std::size_t i = 0; i < raw.size(); ++i) out[i] = std::clamp((raw[i] - *lo) / range, 0.0, 1.0);
  return out;
}

std::vector<std::string> Ranking::model_order() const {
  std::vector<std::string> ids;
  ids.reserve(entries.size());
  for (const auto& e : entries) ids.push_back(e.model_id);
  return ids;
}

Ranking make_ranking(std::vector<RankedModel> entries) {
  std::sort(entries.begin(), entries.end(), [](const RankedModel& a, const RankedModel& b) {
    if (a.fused != b.fused) return a.fused > b.fused;
    return a.model_id < b.model_id;
  });
  Ranking ranking;
  for (std::size_t i = 0; i < entries.size();) {
    auto j = i + 1;
    while (j < entries.size() && entries[j].fused == entries[i].fused) ++j;
    if (j - i > 1) {
      std::vector<std::string> group;
      for (auto t = i; t < j; ++t) group.push_back(entries[t].model_id);
      ranking.tie_groups.push_back(std::move(group));
    }
    i = j;
  }
  ranking.entries = std::move(entries);
  return ranking;
}

FusionResult fuse_and_rank(const std::vector<ModelScores>& models, const std::vector<std::string>& enabled_scores) {
  for (std::size_t m = 0; m < models.size(); ++m)
    for (std::size_t n = m + 1; n < models.size(); ++n)
      if (models[m].model_id == models[n].model_id)
        throw InputError("model id '" + models[m].model_id + "' appears twice");

  FusionResult result;
  result.reports.resize(models.size());
  for (std::size_t m = 0; m < models.size(); ++m) result.reports[m].model_id = models[m].model_id;

  for (const auto& name : enabled_scores) {
    std::vector<double> column;
    column.reserve(models.size());
    for (const auto& model : models) {
      const auto it = model.scores.find(name);
      if (it == model.scores.end()) throw InputError("model '" + model.model_id + "' has no '" + name + "' score");
      column.push_back(it->second);
    }
    const auto normalized = normalize_across_models(column);
    for (std::size_t m = 0; m < models.size(); ++m) {
      result.reports[m].raw_scores[name] = column[m];
      result.reports[m].normalized_scores[name] = normalized[m];
    }
  }

  std::vector<RankedModel> entries;
  for (auto& report : result.reports) {
    // enabled order, not map order, so the sum is reproducible from the flag order
    double fused = 0.0;
    for (const auto& name : enabled_scores) fused += report.normalized_scores[name];
    report.fused = fused;
    entries.push_back({report.model_id, fused});
  }
  result.ranking = make_ranking(std::move(entries));
  for (std::size_t pos = 0; pos < result.ranking.entries.size(); ++pos)
    for (auto& report : result.reports)
      if (report.model_id == result.ranking.entries[pos].model_id) report.rank = static_cast<int>(pos) + 1;
  return result;
}

}  // namespace etran
