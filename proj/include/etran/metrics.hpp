#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "etran/fusion.hpp"

namespace etran {

/// Kendall tau-a: (2 / (M (M - 1))) sum_{i<j} sgn(G_i - G_j) sgn(T_i - T_j).
double kendall_tau(std::span<const double> ground_truth, std::span<const double> predicted);

/// Hyperbolic weight 1 / (r + 1) of each item, r its zero-based rank under
/// descending ground truth. Tied items share the mean weight of the positions
/// their tie group occupies.
std::vector<double> hyperbolic_rank_weights(std::span<const double> ground_truth);

/// Weighted Kendall tau with additive pair weights w_ij = w_i + w_j:
///   sum w_ij s_g s_p / sqrt(sum w_ij |s_g| * sum w_ij |s_p|).
/// Without ties the denominator is the plain weight total.
double weighted_kendall_tau(std::span<const double> ground_truth, std::span<const double> predicted);

/// Ground-truth fine-tuning accuracies, models x datasets.
struct BenchmarkTable {
  std::vector<std::string> model_ids;
  std::vector<std::string> dataset_ids;
  Eigen::MatrixXd accuracy;

  std::vector<double> column(std::size_t dataset) const;
  std::size_t model_index(const std::string& id) const;  // throws InputError
};

/// CSV: header `model_id,<dataset_id>...`, one row per model.
BenchmarkTable parse_benchmark_table(std::istream& in);
BenchmarkTable read_benchmark_table(const std::filesystem::path& file);

/// Fraction of datasets whose best ground-truth model (any tied maximizer) is among
/// the first k entries of that dataset's predicted order.
double pr_topk(const BenchmarkTable& table, const std::vector<std::vector<std::string>>& predicted_orders, int k);

struct RankingEvaluation {
  std::vector<std::string> dataset_ids;
  std::vector<double> tau;
  std::vector<double> tau_weighted;
  std::map<int, double> pr_top;
  double mean_tau = 0.0;
  double mean_tau_weighted = 0.0;
};

/// Scores each dataset's ranking against its ground-truth column. `rankings` is
/// keyed by dataset id and must cover every table dataset with exactly the table's models.
RankingEvaluation evaluate_benchmark(const BenchmarkTable& table, const std::map<std::string, Ranking>& rankings,
                                     const std::vector<int>& ks = {1, 2, 3});

/// Rankings that reproduce each ground-truth column (fused score = accuracy); `negate`
/// reverses them. Used to build oracle and anti-oracle predictors.
std::map<std::string, Ranking> rankings_from_table(const BenchmarkTable& table, bool negate = false);

}  // namespace etran
