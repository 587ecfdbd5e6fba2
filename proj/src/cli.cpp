#include "etran/cli.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <future>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

#include "CLI11.hpp"
#include "etran/feature_store.hpp"
#include "etran/fusion.hpp"
#include "etran/metrics.hpp"
#include "etran/report.hpp"
#include "etran/roi_pool.hpp"
#include "etran/scores.hpp"

namespace etran {
namespace fs = std::filesystem;

namespace {

struct RankArgs {
  std::string task = "detection";
  std::string scores;
  std::vector<std::string> features;
  bool holdout = false;
  std::string out;
};

struct EvalArgs {
  std::string gt;
  std::vector<std::string> reports;
  std::string k = "1,2,3";
  std::string out;
};

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) throw InputError("cannot write " + path.string());
  file << text;
}

fs::path json_sibling(const fs::path& path) { return fs::path(path.string() + ".json"); }

int cmd_rank(const RankArgs& a, std::ostream& out) {
  const auto task = parse_task(a.task);
  if (!task) throw ConfigError("unknown task '" + a.task + "' (expected classification or detection)");
  const auto kinds = a.scores.empty() ? default_scores(*task) : parse_score_list(a.scores);
  check_score_config(*task, kinds);
  const bool wants_boxes = std::any_of(kinds.begin(), kinds.end(), needs_boxes);
  const bool wants_classes = std::find(kinds.begin(), kinds.end(), ScoreKind::cls) != kinds.end();
  if (a.holdout && std::find(kinds.begin(), kinds.end(), ScoreKind::reg) == kinds.end())
    throw ConfigError("--holdout only applies to the reg score");

  std::vector<FeatureSet> sets;
  std::set<std::string> ids;
  for (const auto& dir : a.features) {
    FeatureSet set;
    try {
      set = read_feature_set(dir);
    } catch (const InputError& e) {
      throw InputError(dir + ": " + e.what());
    }
    if (wants_boxes && !set.has_boxes())
      throw ConfigError(dir + ": selected scores need box targets but the store has none");
    const auto report = validate_feature_set(set, ValidationOptions{wants_boxes, wants_classes});
    if (!report.empty()) throw InputError(dir + ": " + report.front());
    if (!ids.insert(set.model_id).second) throw InputError(dir + ": model id '" + set.model_id + "' is repeated");
    sets.push_back(std::move(set));
  }

  std::vector<std::future<std::map<std::string, double>>> pending;
  for (const auto& set : sets)
    pending.push_back(std::async(std::launch::async, [&set, &kinds, &a] { return compute_scores(set, kinds, a.holdout); }));

  std::vector<ModelScores> table;
  for (std::size_t m = 0; m < sets.size(); ++m) table.push_back({sets[m].model_id, pending[m].get()});

  RankReport report;
  report.task = *task;
  report.holdout = a.holdout;
  for (auto k : kinds) report.scores.emplace_back(score_name(k));
  report.fusion = fuse_and_rank(table, report.scores);

  const auto text = format_report_text(report);
  if (a.out.empty()) {
    out << text;
  } else {
    write_text(a.out, text);
    write_text(json_sibling(a.out), format_report_json(report));
  }
  return kExitOk;
}

std::vector<int> parse_k_list(const std::string& list) {
  std::vector<int> ks;
  std::istringstream in(list);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (item.empty()) continue;
    std::size_t used = 0;
    int k = 0;
    try {
      k = std::stoi(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != item.size() || used == 0) throw ConfigError("--k entry '" + item + "' is not an integer");
    ks.push_back(k);
  }
  if (ks.empty()) throw ConfigError("--k list is empty");
  return ks;
}

int cmd_eval(const EvalArgs& a, std::ostream& out) {
  const auto ks = parse_k_list(a.k);
  const auto table = read_benchmark_table(a.gt);
  for (int k : ks)
    if (k < 1 || k > static_cast<int>(table.model_ids.size()))
      throw ConfigError("--k " + std::to_string(k) + " outside [1, " + std::to_string(table.model_ids.size()) + "]");

  std::map<std::string, Ranking> rankings;
  for (const auto& entry : a.reports) {
    const auto eq = entry.find('=');
    if (eq == std::string::npos || eq == 0 || eq + 1 == entry.size())
      throw ConfigError("--report expects dataset_id=path, got '" + entry + "'");
    const auto dataset = entry.substr(0, eq);
    if (rankings.contains(dataset)) throw ConfigError("dataset '" + dataset + "' given twice");
    rankings[dataset] = read_report(entry.substr(eq + 1));
  }
  for (const auto& [dataset, _] : rankings)
    if (std::find(table.dataset_ids.begin(), table.dataset_ids.end(), dataset) == table.dataset_ids.end())
      throw InputError("dataset '" + dataset + "' is not in the ground-truth table");

  // Only datasets with a report are evaluated.
  BenchmarkTable used = table;
  std::vector<Eigen::Index> columns;
  used.dataset_ids.clear();
  for (std::size_t d = 0; d < table.dataset_ids.size(); ++d) {
    if (!rankings.contains(table.dataset_ids[d])) continue;
    used.dataset_ids.push_back(table.dataset_ids[d]);
    columns.push_back(static_cast<Eigen::Index>(d));
  }
  if (columns.empty()) throw ConfigError("no --report given");
  used.accuracy = table.accuracy(Eigen::all, columns);

  const auto eval = evaluate_benchmark(used, rankings, ks);
  const auto text = format_evaluation_text(eval);
  out << text;
  if (!a.out.empty()) {
    write_text(a.out, text);
    write_text(json_sibling(a.out), format_evaluation_json(eval));
  }
  return kExitOk;
}

int cmd_inspect(const std::string& dir, std::ostream& out) {
  const auto manifest = read_manifest(dir);
  const auto set = read_feature_set(dir);
  out << "format_version\t" << manifest.format_version << '\n';
  out << "model_id\t" << manifest.model_id << '\n';
  out << "dataset_id\t" << manifest.dataset_id << '\n';
  out << "K\t" << manifest.k << '\n';
  out << "h\t" << manifest.h << '\n';
  out << "C\t" << manifest.c << '\n';
  out << "has_boxes\t" << (manifest.has_boxes ? "true" : "false") << '\n';
  for (const auto& f : manifest.files) {
    out << "file\t" << f.name << '\t' << f.dtype << '\t';
    for (std::size_t i = 0; i < f.shape.size(); ++i) out << (i ? "x" : "") << f.shape[i];
    out << '\t' << manifest.checksums.at(f.name) << '\n';
  }
  const auto counts = class_counts(set);
  for (std::size_t c = 0; c < counts.size(); ++c) out << "class\t" << c << '\t' << counts[c] << '\n';
  const auto report = validate_feature_set(set, ValidationOptions{false, true});
  if (report.empty()) {
    out << "status\tvalid\n";
    return kExitOk;
  }
  for (const auto& v : report) out << "violation\t" << v << '\n';
  out << "status\tinvalid\n";
  return kExitInput;
}

int cmd_pool(const std::string& bundle_dir, const std::string& out_dir, std::ostream& out) {
  if (out_dir.empty()) throw ConfigError("pool needs --out");
  const auto bundle = read_map_bundle(bundle_dir);
  const auto set = construct_detection_features(bundle.maps, bundle.annotations, bundle.model_id, bundle.dataset_id,
                                                bundle.class_count);
  if (const auto report = validate_feature_set(set, true); !report.empty())
    throw InputError(bundle_dir + ": " + report.front());
  write_feature_set(set, out_dir);
  out << "wrote " << set.sample_count() << " pooled rows of dimension " << set.dimension() << " to " << out_dir << '\n';
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Transferability estimation: score, rank and evaluate pre-trained models from extracted features"};
  app.name("etran");
  app.require_subcommand(1);

  RankArgs rank;
  auto* rank_cmd = app.add_subcommand("rank", "Score feature stores and rank the candidate models");
  rank_cmd->add_option("--task", rank.task, "classification or detection")->capture_default_str();
  rank_cmd->add_option("--scores", rank.scores, "Comma list from energy,cls,reg,logme,lmr (default per task)");
  rank_cmd->add_option("--features", rank.features, "Feature store directory, one per model")->required()->expected(1, -1);
  rank_cmd->add_flag("--holdout", rank.holdout, "Score regression on a fixed 7:3 split");
  rank_cmd->add_option("--out", rank.out, "Report path (text); a .json twin is written alongside");

  EvalArgs eval;
  auto* eval_cmd = app.add_subcommand("eval", "Evaluate rank reports against ground-truth accuracies");
  eval_cmd->add_option("--gt", eval.gt, "Ground-truth CSV (model_id,<dataset>...)")->required();
  eval_cmd->add_option("--report", eval.reports, "dataset_id=path of a rank report")->required()->expected(1, -1);
  eval_cmd->add_option("--k", eval.k, "Comma list of k for Pr(top-k)")->capture_default_str();
  eval_cmd->add_option("--out", eval.out, "Also write the evaluation here (text + .json)");

  std::string inspect_dir;
  auto* inspect_cmd = app.add_subcommand("inspect", "Summarize and validate one feature store");
  inspect_cmd->add_option("--features,dir", inspect_dir, "Feature store directory")->required();

  std::string pool_dir, pool_out;
  auto* pool_cmd = app.add_subcommand("pool", "Pool per-image feature maps over boxes into a detection store");
  pool_cmd->add_option("--features", pool_dir, "Map bundle directory (maps.json, feat_*.f32, annotations.txt)")
      ->required();
  pool_cmd->add_option("--out", pool_out, "Output feature store directory")->required();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "etran: " << e.what() << '\n';
    return kExitConfig;
  }

  try {
    if (rank_cmd->parsed()) return cmd_rank(rank, out);
    if (eval_cmd->parsed()) return cmd_eval(eval, out);
    if (inspect_cmd->parsed()) return cmd_inspect(inspect_dir, out);
    if (pool_cmd->parsed()) return cmd_pool(pool_dir, pool_out, out);
  } catch (const ConfigError& e) {
    err << "etran: " << e.what() << '\n';
    return kExitConfig;
  } catch (const InputError& e) {
    err << "etran: " << e.what() << '\n';
    return kExitInput;
  } catch (const std::exception& e) {
    err << "etran: " << e.what() << '\n';
    return kExitInput;
  }
  return kExitConfig;
}

}  // namespace etran
