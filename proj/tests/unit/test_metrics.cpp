#include <algorithm>
#include <numeric>
#include <sstream>

#include "doctest.h"
#include "etran/feature_set.hpp"
#include "etran/metrics.hpp"
#include "support/dense_reference.hpp"

using namespace etran;

namespace {

using Vec = std::vector<double>;

BenchmarkTable fixture(const std::string& name) { return read_benchmark_table(std::string(ETRAN_FIXTURE_DIR) + "/" + name); }

}  // namespace

TEST_CASE("kendall_tau examples") {
  CHECK(kendall_tau(Vec{1, 2, 3}, Vec{10, 20, 30}) == 1.0);
  CHECK(kendall_tau(Vec{1, 2, 3}, Vec{3, 2, 1}) == -1.0);
  CHECK(kendall_tau(Vec{1, 2, 3}, Vec{1, 3, 2}) == doctest::Approx(1.0 / 3.0));
  CHECK_THROWS_AS(kendall_tau(Vec{1}, Vec{1}), InputError);
  CHECK_THROWS_AS(kendall_tau(Vec{1, 2}, Vec{1, 2, 3}), InputError);
}

TEST_CASE("weighted_kendall_tau examples") {
  CHECK(weighted_kendall_tau(Vec{3, 2, 1}, Vec{3, 2, 1}) == 1.0);
  CHECK(weighted_kendall_tau(Vec{3, 2, 1}, Vec{1, 2, 3}) == -1.0);
  // swapping the bottom pair costs weight 1/2 + 1/3 out of 11/3
  CHECK(weighted_kendall_tau(Vec{3, 2, 1}, Vec{3, 1, 2}) == doctest::Approx(6.0 / 11.0).epsilon(1e-14));
  // swapping the top pair costs more
  CHECK(weighted_kendall_tau(Vec{3, 2, 1}, Vec{2, 3, 1}) == doctest::Approx(2.0 / 11.0).epsilon(1e-14));
}

TEST_CASE("hyperbolic weights share within tie groups") {
  CHECK(hyperbolic_rank_weights(Vec{0.1, 0.9, 0.5}) == Vec{1.0 / 3.0, 1.0, 0.5});
  const auto w = hyperbolic_rank_weights(Vec{0.9, 0.9, 0.1});
  CHECK(w[0] == doctest::Approx(0.75));
  CHECK(w[1] == doctest::Approx(0.75));
  CHECK(w[2] == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("tied ground truth: a predictor reproducing it scores exactly 1") {
  const Vec g{0.5, 0.9, 0.5, 0.2};
  CHECK(weighted_kendall_tau(g, g) == 1.0);
  CHECK(weighted_kendall_tau(g, Vec{-0.5, -0.9, -0.5, -0.2}) == -1.0);
}

TEST_CASE("property: all permutations of five items match enumeration") {
  const Vec g{5, 4, 3, 2, 1};
  std::vector<double> p{1, 2, 3, 4, 5};
  int count = 0;
  do {
    ++count;
    const double t = kendall_tau(g, p);
    CHECK(t == doctest::Approx(reference::tau_by_enumeration(g, p)).epsilon(1e-15));
    const double tw = weighted_kendall_tau(g, p);
    CHECK(tw >= -1.0);
    CHECK(tw <= 1.0);
    Vec neg(p.size());
    std::transform(p.begin(), p.end(), neg.begin(), [](double v) { return -v; });
    CHECK(kendall_tau(g, neg) == doctest::Approx(-t));
    CHECK(weighted_kendall_tau(g, neg) == doctest::Approx(-tw));
    CHECK(kendall_tau(p, g) == t);
  } while (std::next_permutation(p.begin(), p.end()));
  CHECK(count == 120);
}

TEST_CASE("benchmark table parsing") {
  SUBCASE("fixtures load") {
    const auto hf = fixture("hf.csv");
    CHECK(hf.model_ids.size() == 6);
    CHECK(hf.dataset_ids == std::vector<std::string>{"NFL", "Blood", "CSGO", "Forklift", "Valorant"});
    CHECK(hf.accuracy(hf.model_index("yolov5m"), 0) == 0.314);
    CHECK(hf.accuracy(hf.model_index("yolov8m"), 1) == 0.927);
    const auto voc = fixture("voc_ft.csv");
    CHECK(voc.model_ids.size() == 19);
    CHECK(voc.dataset_ids.size() == 28);
    const auto coco = fixture("coco.csv");
    CHECK(coco.model_ids.size() == 9);
    CHECK(coco.dataset_ids.size() == 15);
  }
  SUBCASE("errors") {
    std::istringstream wrong_header("model,d1\na,1\nb,2\n");
    CHECK_THROWS_AS(parse_benchmark_table(wrong_header), InputError);
    std::istringstream short_row("model_id,d1,d2\na,1,2\nb,2\n");
    CHECK_THROWS_WITH_AS(parse_benchmark_table(short_row), doctest::Contains("line 3"), InputError);
    std::istringstream blank("model_id,d1,d2\na,1,\nb,2,3\n");
    CHECK_THROWS_AS(parse_benchmark_table(blank), InputError);
    std::istringstream junk("model_id,d1\na,0.5x\nb,2\n");
    CHECK_THROWS_AS(parse_benchmark_table(junk), InputError);
    std::istringstream dup("model_id,d1\na,1\na,2\n");
    CHECK_THROWS_AS(parse_benchmark_table(dup), InputError);
    std::istringstream empty("");
    CHECK_THROWS_AS(parse_benchmark_table(empty), InputError);
  }
}

TEST_CASE("pr_topk on the detection benchmark") {
  const auto hf = fixture("hf.csv");
  // bests: NFL, CSGO, Forklift, Valorant -> yolov5m; Blood -> yolov8m
  const std::vector<std::string> v5m_first{"yolov5m", "yolov8s", "yolov8m", "yolov5s", "yolov5n", "yolov8n"};
  const std::vector<std::string> v8s_first{"yolov8s", "yolov8m", "yolov5m", "yolov5s", "yolov5n", "yolov8n"};
  const std::vector<std::vector<std::string>> same(5, v5m_first);
  CHECK(pr_topk(hf, same, 1) == doctest::Approx(0.8));
  CHECK(pr_topk(hf, same, 2) == doctest::Approx(0.8));
  CHECK(pr_topk(hf, same, 3) == 1.0);
  const std::vector<std::vector<std::string>> mixed{v5m_first, v8s_first, v5m_first, v8s_first, v5m_first};
  CHECK(pr_topk(hf, mixed, 1) == doctest::Approx(0.6));
  CHECK(pr_topk(hf, mixed, 2) == doctest::Approx(0.8));
  CHECK(pr_topk(hf, mixed, 3) == 1.0);
  CHECK(pr_topk(hf, mixed, 6) == 1.0);
  CHECK_THROWS_AS(pr_topk(hf, mixed, 0), InputError);
  CHECK_THROWS_AS(pr_topk(hf, mixed, 7), InputError);
}

TEST_CASE("pr_topk counts any tied best model") {
  std::istringstream in("model_id,d\na,0.5\nb,0.9\nc,0.9\n");
  const auto t = parse_benchmark_table(in);
  CHECK(pr_topk(t, {{"c", "a", "b"}}, 1) == 1.0);
  CHECK(pr_topk(t, {{"a", "b", "c"}}, 1) == 0.0);
}

TEST_CASE("evaluate_benchmark oracle and anti-oracle") {
  for (const char* name : {"hf.csv", "voc_ft.csv", "coco.csv"}) {
    CAPTURE(name);
    const auto table = fixture(name);
    const auto oracle = evaluate_benchmark(table, rankings_from_table(table));
    CHECK(oracle.mean_tau_weighted == 1.0);
    for (double t : oracle.tau_weighted) CHECK(t == 1.0);
    for (int k : {1, 2, 3}) CHECK(oracle.pr_top.at(k) == 1.0);
    const auto anti = evaluate_benchmark(table, rankings_from_table(table, true));
    for (double t : anti.tau_weighted) CHECK(t == -1.0);
    CHECK(anti.mean_tau == doctest::Approx(-oracle.mean_tau));
  }
}

TEST_CASE("evaluate_benchmark input errors") {
  const auto hf = fixture("hf.csv");
  auto rankings = rankings_from_table(hf);
  SUBCASE("missing model") {
    auto& entries = rankings["Blood"].entries;
    entries.erase(std::find_if(entries.begin(), entries.end(), [](const RankedModel& e) { return e.model_id == "yolov8n"; }));
    CHECK_THROWS_WITH_AS(evaluate_benchmark(hf, rankings), doctest::Contains("yolov8n"), InputError);
  }
  SUBCASE("unknown model") {
    rankings["NFL"].entries[0].model_id = "resnet";
    CHECK_THROWS_WITH_AS(evaluate_benchmark(hf, rankings), doctest::Contains("resnet"), InputError);
  }
  SUBCASE("missing dataset") {
    rankings.erase("CSGO");
    CHECK_THROWS_AS(evaluate_benchmark(hf, rankings), InputError);
  }
}

TEST_CASE("best source for the first classification target") {
  const auto voc = fixture("voc_ft.csv");
  const auto col = voc.column(0);
  const double best = *std::max_element(col.begin(), col.end());
  CHECK(best == 0.36);
  CHECK(col[voc.model_index("source18")] == best);
  const auto order = rankings_from_table(voc).at("target1").model_order();
  CHECK((order[0] == "source18" || order[0] == "source4"));
}
