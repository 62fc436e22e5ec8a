#include <catch2/catch.hpp>

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <vector>

#include "lmknn/lmnn.hpp"
#include "lmknn/rng.hpp"

using lmknn::ActiveTriple;
using lmknn::find_active_triples;
using lmknn::hinge_loss;
using lmknn::LabeledInstance;
using lmknn::lmnn_gradient;
using lmknn::Matrix;
using lmknn::Metric;
using lmknn::objective;
using lmknn::outer_difference;
using lmknn::psd_project;
using lmknn::select_target_neighbors;
using lmknn::squared_distance;
using lmknn::TargetNeighborMap;
using lmknn::TrainConfig;
using lmknn::train_metric;

namespace {

// Independent distance route for oracles: Eigen quadratic form.
double eigen_sqdist(const Matrix& m, const std::vector<double>& a, const std::vector<double>& b) {
  Eigen::VectorXd d(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) d(static_cast<long>(i)) = a[i] - b[i];
  Eigen::MatrixXd em(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) em(static_cast<long>(i), static_cast<long>(j)) = m(i, j);
  return d.transpose() * em * d;
}

Matrix random_symmetric(lmknn::Rng& rng, std::size_t n, double scale = 1.0) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) m(i, j) = m(j, i) = scale * rng.normal();
  return m;
}

Matrix random_psd(lmknn::Rng& rng, std::size_t n) {
  Matrix a(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) a(i, j) = rng.normal();
  return lmknn::matmul(a.transposed(), a);
}

std::vector<double> random_point(lmknn::Rng& rng, std::size_t n, double scale = 1.0) {
  std::vector<double> p(n);
  for (double& v : p) v = scale * rng.normal();
  return p;
}

/// Two loose Gaussian blobs per class; small enough that impostors exist.
std::vector<LabeledInstance> two_class_fixture(lmknn::Rng& rng, int per_class, double gap,
                                               std::size_t dim = 2) {
  std::vector<LabeledInstance> out;
  for (int c = 0; c < 2; ++c)
    for (int i = 0; i < per_class; ++i) {
      LabeledInstance inst;
      inst.label = c;
      inst.x = random_point(rng, dim, 1.0);
      inst.x[0] += gap * c;
      out.push_back(std::move(inst));
    }
  return out;
}

double min_eigenvalue(const Matrix& m) {
  Eigen::MatrixXd em(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) em(static_cast<long>(i), static_cast<long>(j)) = m(i, j);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(em);
  return eig.eigenvalues().minCoeff();
}

}  // namespace

TEST_CASE("squared distance quadratic form", "[lmnn]") {
  const Matrix identity = Matrix::identity(2);
  CHECK(squared_distance(identity, {0, 0}, {3, 4}) == Approx(25.0));
  CHECK(squared_distance(identity, {1.5, -2}, {1.5, -2}) == 0.0);

  const Matrix diag = {{2, 0}, {0, 1}};
  CHECK(squared_distance(diag, {1, 0}, {0, 1}) == Approx(3.0));
  CHECK_THROWS_AS(squared_distance(identity, {1, 2, 3}, {1, 2}), lmknn::shape_error);
  CHECK_THROWS_AS(squared_distance(identity, {1, 2, 3}, {1, 2, 3}), lmknn::shape_error);
}

TEST_CASE("squared distance equals trace(C_ab M)", "[lmnn]") {
  lmknn::Rng rng(101);
  for (int rep = 0; rep < 100; ++rep) {
    const std::size_t n = 1 + rng.uniform_below(8);
    const Matrix m = random_psd(rng, n);
    const auto a = random_point(rng, n, 2.0);
    const auto b = random_point(rng, n, 2.0);
    const double direct = squared_distance(m, a, b);
    const double via_trace = lmknn::matmul(outer_difference(a, b), m).trace();
    CHECK(direct == Approx(via_trace).epsilon(1e-9).margin(1e-12));
  }
}

TEST_CASE("outer difference is the rank-one pair matrix", "[lmnn]") {
  const Matrix c = outer_difference({1, 0}, {0, 1});
  CHECK(c(0, 0) == 1.0);
  CHECK(c(0, 1) == -1.0);
  CHECK(c(1, 0) == -1.0);
  CHECK(c(1, 1) == 1.0);

  const Matrix zero = outer_difference({2, 3}, {2, 3});
  CHECK(zero.frobenius_norm() == 0.0);

  const Matrix c2 = outer_difference({2, 1}, {0, 0});
  CHECK(c2(0, 0) == 4.0);
  CHECK(c2(0, 1) == 2.0);
  CHECK(c2(1, 0) == 2.0);
  CHECK(c2(1, 1) == 1.0);

  // trace = squared Euclidean norm of the difference
  lmknn::Rng rng(3);
  for (int rep = 0; rep < 20; ++rep) {
    const auto a = random_point(rng, 5);
    const auto b = random_point(rng, 5);
    double norm2 = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) norm2 += (a[i] - b[i]) * (a[i] - b[i]);
    CHECK(outer_difference(a, b).trace() == Approx(norm2));
  }
  CHECK_THROWS_AS(outer_difference({1}, {1, 2}), lmknn::shape_error);
}

TEST_CASE("target neighbors under the Euclidean prior", "[lmnn]") {
  SECTION("two per class, k=1: the only classmate") {
    std::vector<LabeledInstance> train = {
        {{0.0}, 0}, {{5.0}, 0}, {{100.0}, 1}, {{101.0}, 1}};
    const TargetNeighborMap targets = select_target_neighbors(train, 1);
    CHECK(targets[0] == std::vector<int>{1});
    CHECK(targets[1] == std::vector<int>{0});
    CHECK(targets[2] == std::vector<int>{3});
    CHECK(targets[3] == std::vector<int>{2});
  }

  SECTION("collinear points, tie to the lower index") {
    std::vector<LabeledInstance> train = {{{0.0}, 0}, {{1.0}, 0}, {{2.0}, 0}, {{10.0}, 0}, {{-50.0}, 1}};
    const TargetNeighborMap targets = select_target_neighbors(train, 2);
    CHECK(targets[1] == std::vector<int>{0, 2});
  }

  SECTION("singleton class gets an empty list") {
    std::vector<LabeledInstance> train = {{{0.0}, 0}, {{1.0}, 0}, {{9.0}, 1}};
    const TargetNeighborMap targets = select_target_neighbors(train, 2);
    CHECK(targets[0] == std::vector<int>{1});
    CHECK(targets[2].empty());
  }

  SECTION("matches the exhaustive-sort oracle") {
    lmknn::Rng rng(47);
    std::vector<LabeledInstance> train;
    for (int c = 0; c < 3; ++c)
      for (int i = 0; i < 60; ++i) train.push_back({random_point(rng, 4), c});
    const TargetNeighborMap targets = select_target_neighbors(train, 3);

    for (std::size_t i = 0; i < train.size(); ++i) {
      std::vector<std::pair<double, int>> ranked;
      for (std::size_t j = 0; j < train.size(); ++j) {
        if (i == j || train[j].label != train[i].label) continue;
        ranked.emplace_back(eigen_sqdist(Matrix::identity(4), train[i].x, train[j].x),
                            static_cast<int>(j));
      }
      std::stable_sort(ranked.begin(), ranked.end());
      REQUIRE(targets[i].size() == 3);
      for (int t = 0; t < 3; ++t) CHECK(targets[i][static_cast<std::size_t>(t)] == ranked[static_cast<std::size_t>(t)].second);
    }
  }
}

TEST_CASE("hinge loss against direct substitution", "[lmnn]") {
  const Matrix identity = Matrix::identity(1);

  // d²(i,j) = 1, d²(i,l) picked via point placement on the line.
  std::vector<LabeledInstance> margin_ok = {{{0.0}, 0}, {{1.0}, 0}, {{std::sqrt(3.0)}, 1}};
  CHECK(hinge_loss(identity, margin_ok, 0, 1, 2) == 0.0);

  std::vector<LabeledInstance> margin_zero = {{{0.0}, 0}, {{1.0}, 0}, {{-1.0}, 1}};
  CHECK(hinge_loss(identity, margin_zero, 0, 1, 2) == Approx(1.0));

  std::vector<LabeledInstance> violated = {{{0.0}, 0}, {{std::sqrt(2.5)}, 0}, {{std::sqrt(0.5)}, 1}};
  CHECK(hinge_loss(identity, violated, 0, 1, 2) == Approx(3.0));

  CHECK_THROWS_AS(hinge_loss(identity, margin_ok, 0, 2, 1), lmknn::invalid_triple);
  CHECK_THROWS_AS(hinge_loss(identity, margin_ok, 0, 1, 1), lmknn::invalid_triple);
}

TEST_CASE("objective matches exhaustive triple enumeration", "[lmnn]") {
  lmknn::Rng rng(53);
  const std::vector<LabeledInstance> train = two_class_fixture(rng, 3, 1.5);
  const TargetNeighborMap targets = select_target_neighbors(train, 2);
  const Matrix m = Matrix::identity(2);
  const double mu = 0.5;

  double pull = 0.0, push = 0.0;
  for (std::size_t i = 0; i < train.size(); ++i)
    for (int j : targets[i]) {
      const double dij = eigen_sqdist(m, train[i].x, train[static_cast<std::size_t>(j)].x);
      pull += dij;
      for (std::size_t l = 0; l < train.size(); ++l) {
        if (train[l].label == train[i].label) continue;
        push += std::max(0.0, 1.0 + dij - eigen_sqdist(m, train[i].x, train[l].x));
      }
    }
  const double expected = (1.0 - mu) * pull + mu * push;
  CHECK(objective(m, train, targets, mu) == Approx(expected).epsilon(1e-12));

  SECTION("single class reduces to the pull term") {
    std::vector<LabeledInstance> solo = train;
    for (auto& inst : solo) inst.label = 0;
    const TargetNeighborMap solo_targets = select_target_neighbors(solo, 2);
    double solo_pull = 0.0;
    for (std::size_t i = 0; i < solo.size(); ++i)
      for (int j : solo_targets[i])
        solo_pull += eigen_sqdist(m, solo[i].x, solo[static_cast<std::size_t>(j)].x);
    CHECK(objective(m, solo, solo_targets, mu) == Approx((1.0 - mu) * solo_pull).epsilon(1e-12));
  }

  SECTION("unweighted mode drops the pull weight") {
    CHECK(objective(m, train, targets, mu, true) == Approx(pull + mu * push).epsilon(1e-12));
  }
}

TEST_CASE("objective is non-negative on PSD metrics", "[lmnn]") {
  lmknn::Rng rng(109);
  for (int rep = 0; rep < 30; ++rep) {
    const std::size_t dim = 1 + rng.uniform_below(4);
    const auto train = two_class_fixture(rng, 2 + static_cast<int>(rng.uniform_below(4)),
                                         2.0 * rng.uniform(), dim);
    const TargetNeighborMap targets = select_target_neighbors(train, 1 + static_cast<int>(rng.uniform_below(2)));
    const Matrix m = random_psd(rng, dim);
    CHECK(objective(m, train, targets, 0.1 + 0.8 * rng.uniform()) >= 0.0);
  }
}

TEST_CASE("well-separated clusters have no active triples", "[lmnn]") {
  std::vector<LabeledInstance> train = {
      {{0.0, 0.0}, 0}, {{0.5, 0.0}, 0}, {{100.0, 0.0}, 1}, {{100.5, 0.0}, 1}};
  const TargetNeighborMap targets = select_target_neighbors(train, 1);
  CHECK(find_active_triples(Matrix::identity(2), train, targets).empty());
}

TEST_CASE("coincident points of different classes activate everything", "[lmnn]") {
  std::vector<LabeledInstance> train = {
      {{1.0, 1.0}, 0}, {{1.2, 1.0}, 0}, {{1.0, 1.0}, 1}, {{7.0, 7.0}, 1}};
  const TargetNeighborMap targets = select_target_neighbors(train, 1);
  const auto active = find_active_triples(Matrix::identity(2), train, targets);
  // Every (i, j) pair whose impostor is the coincident opposite-class
  // point must be active: d²(i,l)=0 while 1 + d²(i,j) > 0.
  bool found_0_1_2 = false;
  for (const auto& t : active)
    if (t.i == 0 && t.j == 1 && t.l == 2) found_0_1_2 = true;
  CHECK(found_0_1_2);
  CHECK_FALSE(active.empty());
}

TEST_CASE("active set equals brute-force positive-hinge enumeration", "[lmnn]") {
  lmknn::Rng rng(59);
  const std::vector<LabeledInstance> train = two_class_fixture(rng, 6, 1.0, 3);
  const TargetNeighborMap targets = select_target_neighbors(train, 2);
  const Matrix m = random_psd(rng, 3);

  std::vector<ActiveTriple> expected;
  for (std::size_t i = 0; i < train.size(); ++i)
    for (int j : targets[i])
      for (std::size_t l = 0; l < train.size(); ++l) {
        if (train[l].label == train[i].label) continue;
        const double margin = 1.0 + eigen_sqdist(m, train[i].x, train[static_cast<std::size_t>(j)].x) -
                              eigen_sqdist(m, train[i].x, train[l].x);
        if (margin > 0.0) expected.push_back({static_cast<int>(i), j, static_cast<int>(l)});
      }

  const auto got = find_active_triples(m, train, targets);
  REQUIRE(got.size() == expected.size());
  for (std::size_t t = 0; t < got.size(); ++t) {
    CHECK(got[t].i == expected[t].i);
    CHECK(got[t].j == expected[t].j);
    CHECK(got[t].l == expected[t].l);
  }
}

TEST_CASE("restricted impostor scan is a subset of the canonical one", "[lmnn]") {
  lmknn::Rng rng(61);
  const std::vector<LabeledInstance> train = two_class_fixture(rng, 8, 0.5, 2);
  const TargetNeighborMap targets = select_target_neighbors(train, 2);
  const Matrix m = Matrix::identity(2);

  const auto canonical = find_active_triples(m, train, targets, false);
  const auto restricted = find_active_triples(m, train, targets, true, 3);
  CHECK(restricted.size() <= canonical.size());
  for (const auto& t : restricted) {
    bool found = false;
    for (const auto& c : canonical)
      if (c.i == t.i && c.j == t.j && c.l == t.l) found = true;
    CHECK(found);
  }
}

TEST_CASE("gradient of a single pair with no impostors", "[lmnn]") {
  std::vector<LabeledInstance> train = {{{0.0, 0.0}, 0}, {{1.0, 2.0}, 0}, {{100.0, 100.0}, 1}, {{101.0, 99.0}, 1}};
  const TargetNeighborMap targets = {{1}, {0}, {3}, {2}};
  const double mu = 0.3;
  const Matrix g = lmnn_gradient(train, targets, {}, mu);

  // Pull term only: (1−μ)(C_01 + C_10 + C_23 + C_32).
  Matrix expected =
      outer_difference(train[0].x, train[1].x) + outer_difference(train[1].x, train[0].x) +
      outer_difference(train[2].x, train[3].x) + outer_difference(train[3].x, train[2].x);
  expected *= 1.0 - mu;
  CHECK((g - expected).frobenius_norm() == Approx(0.0).margin(1e-12));
}

TEST_CASE("gradient matches hand assembly on a small fixture", "[lmnn]") {
  lmknn::Rng rng(67);
  const std::vector<LabeledInstance> train = two_class_fixture(rng, 3, 1.2);
  const TargetNeighborMap targets = select_target_neighbors(train, 1);
  const Matrix m = Matrix::identity(2);
  const double mu = 0.4;
  const auto active = find_active_triples(m, train, targets);

  Matrix expected(2, 2);
  for (std::size_t i = 0; i < train.size(); ++i)
    for (int j : targets[i]) {
      Matrix c = outer_difference(train[i].x, train[static_cast<std::size_t>(j)].x);
      c *= 1.0 - mu;
      expected += c;
    }
  for (const auto& t : active) {
    Matrix push = outer_difference(train[static_cast<std::size_t>(t.i)].x, train[static_cast<std::size_t>(t.j)].x) -
                  outer_difference(train[static_cast<std::size_t>(t.i)].x, train[static_cast<std::size_t>(t.l)].x);
    push *= mu;
    expected += push;
  }
  CHECK((lmnn_gradient(train, targets, active, mu) - expected).frobenius_norm() ==
        Approx(0.0).margin(1e-12));
}

TEST_CASE("gradient agrees with central finite differences", "[lmnn]") {
  lmknn::Rng rng(71);
  const double h = 1e-5;
  int checked = 0;
  while (checked < 25) {
    const std::size_t dim = 2 + rng.uniform_below(3);
    const std::vector<LabeledInstance> train = two_class_fixture(rng, 4, 1.0, dim);
    const TargetNeighborMap targets = select_target_neighbors(train, 2);
    const Matrix m = random_psd(rng, dim);
    const double mu = 0.2 + 0.6 * rng.uniform();

    // Stay away from hinge kinks so the objective is differentiable.
    bool near_kink = false;
    for (std::size_t i = 0; i < train.size(); ++i)
      for (int j : targets[i])
        for (std::size_t l = 0; l < train.size(); ++l) {
          if (train[l].label == train[i].label) continue;
          const double margin = 1.0 + squared_distance(m, train[i].x, train[static_cast<std::size_t>(j)].x) -
                                squared_distance(m, train[i].x, train[l].x);
          if (std::fabs(margin) < 1e-3) near_kink = true;
        }
    if (near_kink) continue;

    const Matrix g = lmnn_gradient(train, targets, find_active_triples(m, train, targets), mu);
    const Matrix direction = random_symmetric(rng, dim);
    const double fd = (objective(m + h * direction, train, targets, mu) -
                       objective(m - h * direction, train, targets, mu)) /
                      (2.0 * h);
    const double analytic = lmknn::frobenius_dot(g, direction);
    CHECK(fd == Approx(analytic).epsilon(1e-4).margin(1e-8));
    ++checked;
  }
}

TEST_CASE("psd projection clamps negative eigenvalues", "[lmnn]") {
  const Matrix m = {{2, 0}, {0, -1}};
  const Matrix p = psd_project(m);
  CHECK(p(0, 0) == Approx(2.0));
  CHECK(p(1, 1) == Approx(0.0).margin(1e-12));
  CHECK(p(0, 1) == Approx(0.0).margin(1e-12));

  const Matrix identity = Matrix::identity(3);
  CHECK((psd_project(identity) - identity).frobenius_norm() == Approx(0.0).margin(1e-12));
}

TEST_CASE("psd projection is the Frobenius-nearest PSD matrix", "[lmnn]") {
  lmknn::Rng rng(73);
  for (int rep = 0; rep < 40; ++rep) {
    const std::size_t n = 2 + rng.uniform_below(12);
    const Matrix m = random_symmetric(rng, n, 2.0);
    const Matrix p = psd_project(m);

    // Oracle: clamp the Eigen eigendecomposition.
    Eigen::MatrixXd em(n, n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) em(static_cast<long>(i), static_cast<long>(j)) = m(i, j);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(em);
    Eigen::VectorXd clamped = eig.eigenvalues().cwiseMax(0.0);
    Eigen::MatrixXd expected =
        eig.eigenvectors() * clamped.asDiagonal() * eig.eigenvectors().transpose();

    double diff = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        diff = std::max(diff, std::fabs(p(i, j) - expected(static_cast<long>(i), static_cast<long>(j))));
    CHECK(diff < 1e-9 * std::max(1.0, m.frobenius_norm()));

    // Idempotent, PSD output.
    CHECK((psd_project(p) - p).frobenius_norm() < 1e-9 * std::max(1.0, p.frobenius_norm()));
    CHECK(min_eigenvalue(p) >= -1e-8);
  }
}

TEST_CASE("training with zero iterations returns the identity metric", "[lmnn]") {
  lmknn::Rng rng(79);
  const std::vector<LabeledInstance> train = two_class_fixture(rng, 4, 2.0);
  TrainConfig config;
  config.max_iterations = 0;
  const Metric metric = train_metric(train, config, {"a", "b"});
  CHECK((metric.m - Matrix::identity(2)).frobenius_norm() == 0.0);
  CHECK(metric.feature_names == std::vector<std::string>{"a", "b"});
}

TEST_CASE("training rejects degenerate datasets", "[lmnn]") {
  std::vector<LabeledInstance> one_class = {{{0.0}, 0}, {{1.0}, 0}};
  CHECK_THROWS_AS(train_metric(one_class, {}, {"a"}), lmknn::training_error);
  CHECK_THROWS_AS(train_metric({}, {}, {}), lmknn::training_error);

  TrainConfig bad;
  bad.mu = 1.5;
  std::vector<LabeledInstance> ok = {{{0.0}, 0}, {{1.0}, 0}, {{5.0}, 1}, {{6.0}, 1}};
  CHECK_THROWS_AS(train_metric(ok, bad, {"a"}), lmknn::invalid_argument);
}

TEST_CASE("learned metric favors the informative coordinate", "[lmnn]") {
  lmknn::Rng rng(83);
  std::vector<LabeledInstance> train;
  for (int c = 0; c < 2; ++c)
    for (int i = 0; i < 20; ++i) {
      // Coordinate 0 separates the classes; coordinate 1 is pure noise.
      train.push_back({{2.5 * c + 0.3 * rng.normal(), 3.0 * rng.normal()}, c});
    }

  TrainConfig config;
  config.k = 1;
  config.mu = 0.1;
  config.step = 0.01;
  config.max_iterations = 10;

  const TargetNeighborMap targets = select_target_neighbors(train, config.k);
  const std::size_t impostors_before =
      find_active_triples(Matrix::identity(2), train, targets).size();

  const Metric metric = train_metric(train, config, {"informative", "noise"});
  CHECK(metric.m(0, 0) > metric.m(1, 1));

  const std::size_t impostors_after = find_active_triples(metric.m, train, targets).size();
  CHECK(impostors_after <= impostors_before);
}

TEST_CASE("every training iterate satisfies the metric invariants", "[lmnn]") {
  lmknn::Rng rng(89);
  const std::vector<LabeledInstance> train = two_class_fixture(rng, 8, 1.0, 3);
  TrainConfig config;
  config.k = 2;
  config.max_iterations = 8;

  int iterations_seen = 0;
  train_metric(train, config, {"a", "b", "c"},
               [&](int, const Matrix& m, std::size_t) {
                 ++iterations_seen;
                 CHECK(m.max_asymmetry() <= 1e-10);
                 CHECK(min_eigenvalue(m) >= -1e-8);
               });
  CHECK(iterations_seen >= 1);
  CHECK(iterations_seen <= 8);
}

TEST_CASE("fixed-active-set objective decreases along the negative gradient", "[lmnn]") {
  lmknn::Rng rng(97);
  const std::vector<LabeledInstance> train = two_class_fixture(rng, 5, 0.8);
  const TargetNeighborMap targets = select_target_neighbors(train, 2);
  const double mu = 0.35;
  const Matrix m = Matrix::identity(2);
  const auto active = find_active_triples(m, train, targets);
  REQUIRE_FALSE(active.empty());
  const Matrix g = lmnn_gradient(train, targets, active, mu);

  auto frozen_objective = [&](const Matrix& mm) {
    double pull = 0.0;
    for (std::size_t i = 0; i < train.size(); ++i)
      for (int j : targets[i]) pull += squared_distance(mm, train[i].x, train[static_cast<std::size_t>(j)].x);
    double push = 0.0;
    for (const auto& t : active)
      push += 1.0 + squared_distance(mm, train[static_cast<std::size_t>(t.i)].x, train[static_cast<std::size_t>(t.j)].x) -
              squared_distance(mm, train[static_cast<std::size_t>(t.i)].x, train[static_cast<std::size_t>(t.l)].x);
    return (1.0 - mu) * pull + mu * push;
  };

  const double before = frozen_objective(m);
  const double after = frozen_objective(m - 1e-6 * g);
  CHECK(after < before);
}

TEST_CASE("metric axioms hold for PSD metrics", "[lmnn]") {
  lmknn::Rng rng(103);
  for (int rep = 0; rep < 100; ++rep) {
    const std::size_t n = 1 + rng.uniform_below(6);
    const Matrix m = random_psd(rng, n);
    const auto a = random_point(rng, n, 3.0);
    const auto b = random_point(rng, n, 3.0);
    const auto c = random_point(rng, n, 3.0);

    CHECK(squared_distance(m, a, a) == 0.0);
    CHECK(squared_distance(m, a, b) == Approx(squared_distance(m, b, a)).epsilon(1e-12));
    CHECK(squared_distance(m, a, b) >= -1e-8);

    const double dab = std::sqrt(std::max(0.0, squared_distance(m, a, b)));
    const double dbc = std::sqrt(std::max(0.0, squared_distance(m, b, c)));
    const double dac = std::sqrt(std::max(0.0, squared_distance(m, a, c)));
    CHECK(dac <= dab + dbc + 1e-8);
  }
}

TEST_CASE("standardized training folds the scaling back", "[lmnn]") {
  lmknn::Rng rng(107);
  // Same geometry at wildly different feature scales.
  std::vector<LabeledInstance> train;
  for (int c = 0; c < 2; ++c)
    for (int i = 0; i < 10; ++i)
      train.push_back({{1000.0 * (c + 0.1 * rng.normal()), 0.001 * rng.normal()}, c});

  TrainConfig config;
  config.standardize = true;
  config.max_iterations = 5;
  const Metric metric = train_metric(train, config, {"big", "small"});

  // The returned matrix acts on raw coordinates.
  CHECK(metric.m.rows() == 2);
  CHECK(metric.m.max_asymmetry() <= 1e-10);
  const double d = squared_distance(metric, train[0].x, train[10].x);
  CHECK(d >= 0.0);
  CHECK(std::isfinite(d));
}
