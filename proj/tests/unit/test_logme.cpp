#include <cmath>
#include <numeric>
#include <random>

#include "doctest.h"
#include "etran/logme.hpp"
#include "support/dense_reference.hpp"
#include "support/synthetic.hpp"

using namespace etran;
using synthetic::gaussian;

namespace {

Eigen::VectorXd shuffled(const Eigen::VectorXd& v, std::mt19937_64& rng) {
  std::vector<Eigen::Index> perm(static_cast<std::size_t>(v.size()));
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), rng);
  return v(perm);
}

}  // namespace

TEST_CASE("log_evidence agrees with the dense formula") {
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 20; ++trial) {
    const auto f = gaussian(15 + trial, 1 + trial % 7, rng);
    const Eigen::VectorXd b = gaussian(f.rows(), 1, rng);
    for (double alpha : {1e-3, 1.0, 50.0})
      for (double gamma : {1e-2, 1.0, 30.0})
        CHECK(log_evidence(EvidenceBasis(f), b, alpha, gamma) ==
              doctest::Approx(reference::log_evidence(f, b, alpha, gamma)).epsilon(1e-9));
  }
}

TEST_CASE("evidence_maximize examples") {
  std::mt19937_64 rng(2);
  SUBCASE("exactly linear target beats the same values shuffled") {
    const auto f = gaussian(50, 5, rng);
    const Eigen::VectorXd b = f * gaussian(5, 1, rng);
    const auto fit = evidence_maximize(f, b);
    const auto perm = evidence_maximize(f, shuffled(b, rng));
    CHECK(std::isfinite(fit.evidence));
    CHECK(fit.evidence > perm.evidence);
  }
  SUBCASE("zero target stays finite") {
    const auto f = gaussian(20, 3, rng);
    const auto r = evidence_maximize(f, Eigen::VectorXd::Zero(20));
    CHECK(std::isfinite(r.evidence));
  }
  SUBCASE("all-zero features are degenerate") {
    CHECK_THROWS_AS(evidence_maximize(Eigen::MatrixXd::Zero(10, 3), Eigen::VectorXd::Ones(10)), InputError);
  }
  SUBCASE("iteration only climbs from the starting point") {
    const auto f = gaussian(40, 6, rng);
    const Eigen::VectorXd b = f.col(0) + 0.5 * gaussian(40, 1, rng);
    const auto r = evidence_maximize(f, b);
    CHECK(r.evidence >= log_evidence(EvidenceBasis(f), b, 1.0, 1.0) - 1e-12);
    CHECK(r.converged);
    CHECK(r.iterations >= 1);
    CHECK(r.alpha > 0.0);
    CHECK(r.gamma > 0.0);
  }
  SUBCASE("bit-identical on repeat") {
    const auto f = gaussian(30, 4, rng);
    const Eigen::VectorXd b = gaussian(30, 1, rng);
    CHECK(evidence_maximize(f, b).evidence == evidence_maximize(f, b).evidence);
  }
}

TEST_CASE("property: row order does not change the evidence") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 15; ++trial) {
    const auto f = gaussian(25, 4, rng);
    const Eigen::VectorXd b = f.col(1) + gaussian(25, 1, rng, 0.3);
    std::vector<Eigen::Index> perm(25);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    const Eigen::MatrixXd f2 = f(perm, Eigen::all);
    const Eigen::VectorXd b2 = b(perm);
    CHECK(evidence_maximize(f2, b2).evidence == doctest::Approx(evidence_maximize(f, b).evidence).epsilon(1e-9));
  }
}

TEST_CASE("property: maximized evidence reaches the grid optimum") {
  std::mt19937_64 rng(4);
  std::uniform_int_distribution<int> kd(10, 60), hd(1, 12);
  for (int trial = 0; trial < 30; ++trial) {
    const auto f = gaussian(kd(rng), hd(rng), rng);
    const Eigen::VectorXd b = f * gaussian(f.cols(), 1, rng, 0.5) + gaussian(f.rows(), 1, rng, 0.7);
    CHECK(evidence_maximize(f, b).evidence >= reference::grid_search_evidence(f, b) - 1e-3);
  }
}

TEST_CASE("logme scores average per-sample evidence over target columns") {
  std::mt19937_64 rng(5);
  const auto f = gaussian(30, 5, rng);
  const Eigen::VectorXd col = (0.5 * f.col(2).array()).tanh() * 0.3 + 0.5;
  const Eigen::MatrixXd boxes = col.replicate(1, 4);
  const auto set = synthetic::make_set(f, synthetic::balanced_labels(30, 2), 2, &boxes);
  const double single = evidence_maximize(set.features_f64(), set.boxes_f64().col(0)).evidence;
  CHECK(logme_regression_score(set) == doctest::Approx(single / 30.0).epsilon(1e-12));

  SUBCASE("box column order does not matter") {
    Eigen::MatrixXd b = (gaussian(30, 4, rng).array() * 0.1 + 0.5).matrix();
    const auto a = synthetic::make_set(f, synthetic::balanced_labels(30, 2), 2, &b);
    b.col(0).swap(b.col(3));
    const auto swapped = synthetic::make_set(f, synthetic::balanced_labels(30, 2), 2, &b);
    CHECK(logme_regression_score(swapped) == doctest::Approx(logme_regression_score(a)).epsilon(1e-12));
  }
  SUBCASE("regression score needs boxes") {
    const auto nb = synthetic::make_set(f, synthetic::balanced_labels(30, 2), 2);
    CHECK_THROWS_AS(logme_regression_score(nb), ConfigError);
  }
}

TEST_CASE("logme classification prefers separable features") {
  std::mt19937_64 rng(6);
  const auto y = synthetic::balanced_labels(60, 3);
  Eigen::MatrixXd noise = gaussian(60, 6, rng);
  Eigen::MatrixXd separable = noise;
  for (int k = 0; k < 60; ++k) separable(k, y[static_cast<std::size_t>(k)]) += 4.0;
  const double good = logme_classification_score(synthetic::make_set(separable, y, 3));
  const double bad = logme_classification_score(synthetic::make_set(noise, y, 3));
  CHECK(std::isfinite(good));
  CHECK(good > bad);
}
