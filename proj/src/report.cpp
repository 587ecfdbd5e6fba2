#include "etran/report.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace etran {

namespace {

constexpr std::string_view kReportMagic = "# etran rank report v1";

std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto tab = line.find('\t', start);
    out.push_back(line.substr(start, tab == std::string::npos ? std::string::npos : tab - start));
    if (tab == std::string::npos) break;
    start = tab + 1;
  }
  if (!out.empty() && !out.back().empty() && out.back().back() == '\r') out.back().pop_back();
  return out;
}

double parse_number(const std::string& text, int line_no) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || ptr != text.data() + text.size())
    throw InputError("report line " + std::to_string(line_no) + ": '" + text + "' is not a number");
  return v;
}

}  // namespace

std::string format_number(double value) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value, std::chars_format::general, 17);
  return ec == std::errc{} ? std::string(buf, ptr) : std::string("nan");
}

std::string format_report_text(const RankReport& report) {
  std::ostringstream os;
  os << kReportMagic << '\n';
  os << "# task\t" << task_name(report.task) << '\n';
  os << "# scores\t";
  for (std::size_t i = 0; i < report.scores.size(); ++i) os << (i ? "," : "") << report.scores[i];
  os << '\n';
  os << "# holdout\t" << (report.holdout ? "true" : "false") << '\n';
  os << "rank\tmodel_id\tfused";
  for (const auto& s : report.scores) os << "\traw_" << s;
  for (const auto& s : report.scores) os << "\tnorm_" << s;
  os << '\n';
  for (const auto& entry : report.fusion.ranking.entries) {
    for (const auto& r : report.fusion.reports) {
      if (r.model_id != entry.model_id) continue;
      os << r.rank << '\t' << r.model_id << '\t' << format_number(r.fused);
      for (const auto& s : report.scores) os << '\t' << format_number(r.raw_scores.at(s));
      for (const auto& s : report.scores) os << '\t' << format_number(r.normalized_scores.at(s));
      os << '\n';
    }
  }
  return os.str();
}

std::string format_report_json(const RankReport& report) {
  using nlohmann::ordered_json;
  ordered_json models = ordered_json::array();
  for (const auto& entry : report.fusion.ranking.entries) {
    for (const auto& r : report.fusion.reports) {
      if (r.model_id != entry.model_id) continue;
      ordered_json raw = ordered_json::object(), norm = ordered_json::object();
      for (const auto& s : report.scores) {
        raw[s] = r.raw_scores.at(s);
        norm[s] = r.normalized_scores.at(s);
      }
      models.push_back({{"rank", r.rank}, {"model_id", r.model_id}, {"fused", r.fused}, {"raw", raw}, {"normalized", norm}});
    }
  }
  ordered_json j = {{"task", std::string(task_name(report.task))},
                    {"scores", report.scores},
                    {"holdout", report.holdout},
                    {"models", models},
                    {"tie_groups", report.fusion.ranking.tie_groups}};
  return j.dump(2) + "\n";
}

Ranking parse_report_text(std::istream& in) {
  std::string line;
  int line_no = 0;
  bool magic = false, header = false;
  std::vector<RankedModel> entries;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line.starts_with('#')) {
      if (line == kReportMagic) magic = true;
      continue;
    }
    const auto cells = split_tabs(line);
    if (!header) {
      if (cells.size() < 3 || cells[0] != "rank" || cells[1] != "model_id" || cells[2] != "fused")
        throw InputError("report line " + std::to_string(line_no) + ": missing column header");
      header = true;
      continue;
    }
    if (cells.size() < 3) throw InputError("report line " + std::to_string(line_no) + " is truncated");
    entries.push_back({cells[1], parse_number(cells[2], line_no)});
  }
  if (!magic) throw InputError("not an etran rank report");
  if (entries.empty()) throw InputError("report lists no models");
  return make_ranking(std::move(entries));
}

Ranking read_report(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw InputError("cannot open report " + file.string());
  return parse_report_text(in);
}

std::string format_evaluation_text(const RankingEvaluation& eval) {
  std::ostringstream os;
  os << "dataset\ttau\ttau_w\n";
  for (std::size_t d = 0; d < eval.dataset_ids.size(); ++d)
    os << eval.dataset_ids[d] << '\t' << format_number(eval.tau[d]) << '\t' << format_number(eval.tau_weighted[d])
       << '\n';
  os << "mean\t" << format_number(eval.mean_tau) << '\t' << format_number(eval.mean_tau_weighted) << '\n';
  for (const auto& [k, p] : eval.pr_top) os << "pr_top" << k << '\t' << format_number(p) << '\n';
  return os.str();
}

std::string format_evaluation_json(const RankingEvaluation& eval) {
  using nlohmann::ordered_json;
  ordered_json datasets = ordered_json::array();
  for (std::size_t d = 0; d < eval.dataset_ids.size(); ++d)
    datasets.push_back({{"dataset_id", eval.dataset_ids[d]}, {"tau", eval.tau[d]}, {"tau_w", eval.tau_weighted[d]}});
  ordered_json pr = ordered_json::object();
  for (const auto& [k, p] : eval.pr_top) pr["top" + std::to_string(k)] = p;
  ordered_json j = {{"datasets", datasets},
                    {"mean_tau", eval.mean_tau},
                    {"mean_tau_w", eval.mean_tau_weighted},
                    {"pr_top", pr}};
  return j.dump(2) + "\n";
}

}  // namespace etran
