#include "etran/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

#include "etran/feature_set.hpp"

namespace etran {

namespace {

int sgn(double x) { return (x > 0.0) - (x < 0.0); }

void check_pair(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw InputError("rank vectors differ in length");
  if (a.size() < 2) throw InputError("rank correlation needs at least two items");
  for (std::size_t i = 0; i < a.size(); ++i)
    if (std::isnan(a[i]) || std::isnan(b[i])) throw InputError("rank vectors contain NaN");
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) {
    const auto first = cell.find_first_not_of(" \t\r");
    const auto last = cell.find_last_not_of(" \t\r");
    cells.push_back(first == std::string::npos ? std::string{} : cell.substr(first, last - first + 1));
  }
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

}  // namespace

double kendall_tau(std::span<const double> ground_truth, std::span<const double> predicted) {
  check_pair(ground_truth, predicted);
  const auto M = ground_truth.size();
  long long signed_sum = 0;
  for (std::size_t i = 0; i < M; ++i)
    for (std::size_t j = i + 1; j < M; ++j)
      signed_sum += sgn(ground_truth[i] - ground_truth[j]) * sgn(predicted[i] - predicted[j]);
  return 2.0 * static_cast<double>(signed_sum) / (static_cast<double>(M) * static_cast<double>(M - 1));
}

std::vector<double> hyperbolic_rank_weights(std::span<const double> ground_truth) {
  const auto M = ground_truth.size();
  std::vector<std::size_t> order(M);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return ground_truth[a] > ground_truth[b]; });
  std::vector<double> weight(M, 0.0);
  for (std::size_t p = 0; p < M;) {
    auto q = p + 1;
    while (q < M && ground_truth[order[q]] == ground_truth[order[p]]) ++q;
    double mean = 0.0;
    for (auto t = p; t < q; ++t) mean += 1.0 / static_cast<double>(t + 1);
    mean /= static_cast<double>(q - p);
    for (auto t = p; t < q; ++t) weight[order[t]] = mean;
    p = q;
  }
  return weight;
}

double weighted_kendall_tau(std::span<const double> ground_truth, std::span<const double> predicted) {
  check_pair(ground_truth, predicted);
  const auto w = hyperbolic_rank_weights(ground_truth);
  const auto M = ground_truth.size();
  double signed_sum = 0.0, gt_total = 0.0, pred_total = 0.0;
  for (std::size_t i = 0; i < M; ++i) {
    for (std::size_t j = i + 1; j < M; ++j) {
      const double wij = w[i] + w[j];
      const int sg = sgn(ground_truth[i] - ground_truth[j]);
      const int sp = sgn(predicted[i] - predicted[j]);
      signed_sum += wij * sg * sp;
      gt_total += wij * std::abs(sg);
      pred_total += wij * std::abs(sp);
    }
  }
  if (gt_total == 0.0 || pred_total == 0.0) return 0.0;
  if (gt_total == pred_total) return signed_sum / gt_total;
  return signed_sum / std::sqrt(gt_total * pred_total);
}

std::vector<double> BenchmarkTable::column(std::size_t dataset) const {
  std::vector<double> out(model_ids.size());
  for (std::size_t m = 0; m < model_ids.size(); ++m) out[m] = accuracy(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(dataset));
  return out;
}

std::size_t BenchmarkTable::model_index(const std::string& id) const {
  const auto it = std::find(model_ids.begin(), model_ids.end(), id);
  if (it == model_ids.end()) throw InputError("model '" + id + "' is not in the benchmark table");
  return static_cast<std::size_t>(it - model_ids.begin());
}

BenchmarkTable parse_benchmark_table(std::istream& in) {
  BenchmarkTable table;
  std::string line;
  std::vector<std::vector<double>> rows;
  bool header = true;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto cells = split_csv(line);
    if (header) {
      if (cells.size() < 2 || cells[0] != "model_id")
        throw InputError("benchmark header must start with 'model_id' followed by dataset ids");
      table.dataset_ids.assign(cells.begin() + 1, cells.end());
      header = false;
      continue;
    }
    if (cells.size() != table.dataset_ids.size() + 1)
      throw InputError("benchmark line " + std::to_string(line_no) + " has " + std::to_string(cells.size()) +
                       " fields, expected " + std::to_string(table.dataset_ids.size() + 1));
    table.model_ids.push_back(cells[0]);
    std::vector<double> row;
    for (std::size_t d = 1; d < cells.size(); ++d) {
      std::size_t used = 0;
      double v = 0.0;
      try {
        v = std::stod(cells[d], &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used == 0 || used != cells[d].size() || !std::isfinite(v))
        throw InputError("benchmark line " + std::to_string(line_no) + " has a missing or invalid accuracy");
      row.push_back(v);
    }
    rows.push_back(std::move(row));
  }
  if (header) throw InputError("benchmark table is empty");
  if (rows.size() < 2) throw InputError("benchmark table needs at least two models");
  if (std::set<std::string>(table.model_ids.begin(), table.model_ids.end()).size() != table.model_ids.size())
    throw InputError("benchmark table repeats a model id");
  table.accuracy.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(table.dataset_ids.size()));
  for (std::size_t m = 0; m < rows.size(); ++m)
    for (std::size_t d = 0; d < rows[m].size(); ++d)
      table.accuracy(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(d)) = rows[m][d];
  return table;
}

BenchmarkTable read_benchmark_table(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw InputError("cannot open benchmark table " + file.string());
  return parse_benchmark_table(in);
}

double pr_topk(const BenchmarkTable& table, const std::vector<std::vector<std::string>>& predicted_orders, int k) {
  const auto M = static_cast<int>(table.model_ids.size());
  if (k < 1 || k > M) throw InputError("k must lie in [1, " + std::to_string(M) + "]");
  if (predicted_orders.size() != table.dataset_ids.size())
    throw InputError("need one predicted ranking per dataset");
  int hits = 0;
  for (std::size_t d = 0; d < table.dataset_ids.size(); ++d) {
    const auto& order = predicted_orders[d];
    if (static_cast<int>(order.size()) != M)
      throw InputError("predicted ranking for '" + table.dataset_ids[d] + "' does not list every model");
    const auto truth = table.column(d);
    const double best = *std::max_element(truth.begin(), truth.end());
    for (int pos = 0; pos < k; ++pos) {
      if (truth[table.model_index(order[static_cast<std::size_t>(pos)])] == best) {
        ++hits;
        break;
      }
    }
  }
  return static_cast<double>(hits) / static_cast<double>(table.dataset_ids.size());
}

RankingEvaluation evaluate_benchmark(const BenchmarkTable& table, const std::map<std::string, Ranking>& rankings,
                                     const std::vector<int>& ks) {
  RankingEvaluation eval;
  std::vector<std::vector<std::string>> orders;
  const auto M = table.model_ids.size();
  for (std::size_t d = 0; d < table.dataset_ids.size(); ++d) {
    const auto& id = table.dataset_ids[d];
    const auto it = rankings.find(id);
    if (it == rankings.end()) throw InputError("no ranking for dataset '" + id + "'");
    const auto& entries = it->second.entries;

    std::vector<double> predicted(M, 0.0);
    std::vector<bool> seen(M, false);
    for (const auto& e : entries) {
      const auto m = table.model_index(e.model_id);
      if (seen[m]) throw InputError("ranking for '" + id + "' lists model '" + e.model_id + "' twice");
      seen[m] = true;
      predicted[m] = e.fused;
    }
    for (std::size_t m = 0; m < M; ++m)
      if (!seen[m]) throw InputError("ranking for '" + id + "' is missing model '" + table.model_ids[m] + "'");

    const auto truth = table.column(d);
    eval.dataset_ids.push_back(id);
    eval.tau.push_back(kendall_tau(truth, predicted));
    eval.tau_weighted.push_back(weighted_kendall_tau(truth, predicted));
    orders.push_back(it->second.model_order());
  }
  for (int k : ks) eval.pr_top[k] = pr_topk(table, orders, k);

  const auto D = static_cast<double>(eval.tau.size());
  double tau_sum = 0.0, tau_w_sum = 0.0;
  for (std::size_t d = 0; d < eval.tau.size(); ++d) {
    tau_sum += eval.tau[d];
    tau_w_sum += eval.tau_weighted[d];
  }
  eval.mean_tau = D > 0 ? tau_sum / D : 0.0;
  eval.mean_tau_weighted = D > 0 ? tau_w_sum / D : 0.0;
  return eval;
}

std::map<std::string, Ranking> rankings_from_table(const BenchmarkTable& table, bool negate) {
  std::map<std::string, Ranking> out;
  for (std::size_t d = 0; d < table.dataset_ids.size(); ++d) {
    std::vector<RankedModel> entries;
    const auto truth = table.column(d);
    for (std::size_t m = 0; m < truth.size(); ++m) entries.push_back({table.model_ids[m], negate ? -truth[m] : truth[m]});
    out[table.dataset_ids[d]] = make_ranking(std::move(entries));
  }
  return out;
}

}  // namespace etran
