#include <doctest.h>

#include <mcsvm/core_model.hpp>
#include <mcsvm/data_gen.hpp>
#include <mcsvm/errors.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <stdexcept>

using namespace mcsvm;

TEST_CASE("make_ground_truth k=2 d=2 symmetric construction") {
  GroundTruth gt = make_ground_truth(2, 2, 0.5, 0.05, 2.0, 0.5, 1);
  CHECK(gt.wstar.norm() == doctest::Approx(1.0).epsilon(1e-12));
  REQUIRE(gt.spec.components.size() == 2);
  for (int j = 0; j < 2; ++j) {
    const Vector& mu = gt.spec.components[j].mean;
    const int y = predict(gt.wstar, mu);
    CHECK(margin_of(gt.wstar, mu, y) >= 2.0 * gt.gamma - 1e-12);
  }
}

TEST_CASE("make_ground_truth separation at desk parameters") {
  const double C = 2.0, sigma = 0.05, alpha = 1.0 / 3.0;
  GroundTruth gt = make_ground_truth(3, 8, 0.5, sigma, C, alpha, 7);
  CHECK(gt.wstar.norm() == doctest::Approx(1.0).epsilon(1e-12));
  const double sep = C * C * 2.0 * sigma / std::sqrt(alpha);
  CHECK(sep == doctest::Approx(0.6928).epsilon(1e-3));
  for (size_t a = 0; a < gt.spec.components.size(); ++a)
    for (size_t b = a + 1; b < gt.spec.components.size(); ++b)
      CHECK((gt.spec.components[a].mean - gt.spec.components[b].mean).norm() > sep);
}

TEST_CASE("make_ground_truth rejects d < k and impossible margins") {
  CHECK_THROWS_AS(make_ground_truth(3, 2, 0.5, 0.05, 2.0, 1.0 / 3.0, 1), std::invalid_argument);
}

TEST_CASE("sample_component n=0 and shape validation") {
  ComponentSpec comp;
  comp.mean = Vector::Zero(2);
  comp.sigma = 1.0;
  comp.shape = Shape::gaussian;
  CHECK(sample_component(comp, 0, 5).size() == 0);
  ComponentSpec bad = comp;
  bad.shape = Shape::student_t;
  bad.nu = 2.0;  // needs nu > 2
  CHECK_THROWS_AS(sample_component(bad, 10, 5), std::invalid_argument);
}

TEST_CASE("sample_component gaussian variance Monte Carlo") {
  ComponentSpec comp;
  comp.mean = Vector::Zero(2);
  comp.sigma = 1.0;
  comp.shape = Shape::gaussian;
  Matrix X = sample_component(comp, 50000, 123);
  REQUIRE(X.rows() == 50000);
  for (int j = 0; j < 2; ++j) {
    const double m = X.col(j).mean();
    const double var = (X.col(j).array() - m).square().sum() / (X.rows() - 1);
    CHECK(var >= 0.97);
    CHECK(var <= 1.03);
  }
}

TEST_CASE("sample_component student-t heavy tail") {
  ComponentSpec comp;
  comp.mean = Vector::Zero(1);
  comp.sigma = 1.0;
  comp.shape = Shape::student_t;
  comp.nu = 4.0;
  Matrix X = sample_component(comp, 50000, 321);
  const double m = X.col(0).mean();
  Eigen::ArrayXd c = X.col(0).array() - m;
  const double var = c.square().sum() / (X.rows() - 1);
  CHECK(var >= 0.95);
  CHECK(var <= 1.05);
  const double kurt = (c.pow(4).sum() / X.rows()) / (var * var);
  CHECK(kurt > 3.0);
}

TEST_CASE("component top empirical eigenvalue bounded by sigma^2") {
  for (Shape shape : {Shape::gaussian, Shape::uniform_ball, Shape::student_t}) {
    ComponentSpec comp;
    comp.mean = Vector::Zero(4);
    comp.sigma = 0.3;
    comp.shape = shape;
    comp.nu = 6.0;
    Matrix X = sample_component(comp, 50000, 99);
    Vector mu = X.colwise().mean();
    Matrix centered = X.rowwise() - mu.transpose();
    Matrix cov = centered.transpose() * centered / (X.rows() - 1);
    Eigen::SelfAdjointEigenSolver<Matrix> es(cov);
    CHECK(es.eigenvalues().maxCoeff() <= comp.sigma * comp.sigma * 1.05);
  }
}

TEST_CASE("gaussian projections obey the log-concave tail bound") {
  ComponentSpec comp;
  comp.mean = Vector::Zero(3);
  comp.sigma = 0.7;
  comp.shape = Shape::gaussian;
  const int n = 200000;
  Matrix X = sample_component(comp, n, 555);
  Vector w = Vector::Zero(3);
  w[0] = 1.0 / std::sqrt(2.0);
  w[2] = -1.0 / std::sqrt(2.0);
  for (double beta : {0.1, 0.01}) {
    const double thr = comp.sigma * (std::log(1.0 / beta) + 1.0);
    int exceed = 0;
    for (int i = 0; i < n; ++i)
      if (std::abs(w.dot(X.row(i)) - w.dot(comp.mean)) > thr) ++exceed;
    const double frac = static_cast<double>(exceed) / n;
    const double se = std::sqrt(beta * (1.0 - beta) / n);
    CHECK(frac <= beta + 3.0 * se);
  }
}

TEST_CASE("sample_clean margin enforcement, label consistency, class balance") {
  GroundTruth gt = make_ground_truth(2, 2, 0.3, 0.2, 2.0, 0.5, 17);
  LabeledSet S = sample_clean(gt, 10000, 18);
  REQUIRE(S.size() == 10000);
  int count1 = 0;
  for (int i = 0; i < S.size(); ++i) {
    CHECK(S.label(i) == predict(gt.wstar, S.x(i)));
    CHECK(margin_of(gt.wstar, S.x(i), S.label(i)) >= gt.gamma);
    if (S.label(i) == 1) ++count1;
  }
  const double freq1 = static_cast<double>(count1) / S.size();
  CHECK(std::abs(freq1 - gt.spec.weights[0]) <= 0.02);
  CHECK(S.rejection_rate >= 0.0);
  CHECK(S.rejection_rate <= 0.5);
}

TEST_CASE("sample_clean throws when gamma swamps sigma") {
  // margin-at-mean is 2*gamma but points spread sigma >> gamma kills most draws
  GroundTruth gt = make_ground_truth(2, 2, 0.05, 0.2, 2.0, 0.5, 21);
  GroundTruth hostile = gt;
  hostile.gamma = 30.0;  // far beyond any achievable margin
  CHECK_THROWS_AS(sample_clean(hostile, 200, 22), InfeasibleConfigError);
}

TEST_CASE("sampling determinism: identical seeds give bit-identical sets") {
  GroundTruth gt = make_ground_truth(3, 5, 0.4, 0.05, 2.0, 1.0 / 3.0, 31);
  LabeledSet A = sample_clean(gt, 2000, 77);
  LabeledSet B = sample_clean(gt, 2000, 77);
  LabeledSet Cdif = sample_clean(gt, 2000, 78);
  REQUIRE(A.size() == B.size());
  bool identical = true, differs = false;
  for (int i = 0; i < A.size(); ++i) {
    if (A.label(i) != B.label(i) || (A.x(i).array() != B.x(i).array()).any()) identical = false;
    if (A.label(i) != Cdif.label(i) || (A.x(i).array() != Cdif.x(i).array()).any()) differs = true;
  }
  CHECK(identical);
  CHECK(differs);

  GroundTruth gt2 = make_ground_truth(3, 5, 0.4, 0.05, 2.0, 1.0 / 3.0, 31);
  CHECK((gt.wstar.raw().array() == gt2.wstar.raw().array()).all());
}

TEST_CASE("labeled set serialization round-trips exactly") {
  GroundTruth gt = make_ground_truth(3, 4, 0.4, 0.05, 2.0, 1.0 / 3.0, 41);
  LabeledSet S = sample_clean(gt, 500, 42);
  const std::string path = (std::filesystem::temp_directory_path() / "mcsvm_set.csv").string();
  save_labeled_set(S, path);
  LabeledSet L = load_labeled_set(path);
  REQUIRE(L.size() == S.size());
  REQUIRE(L.dim() == S.dim());
  CHECK(L.num_classes() == S.num_classes());
  for (int i = 0; i < S.size(); ++i) {
    CHECK(L.label(i) == S.label(i));
    CHECK((L.x(i).array() == S.x(i).array()).all());
  }
  std::filesystem::remove(path);
}

TEST_CASE("ground truth and model serialization round-trip") {
  GroundTruth gt = make_ground_truth(3, 4, 0.4, 0.05, 2.0, 1.0 / 3.0, 51);
  const auto dir = std::filesystem::temp_directory_path();
  const std::string gpath = (dir / "mcsvm_gt.txt").string();
  const std::string mpath = (dir / "mcsvm_model.txt").string();
  save_ground_truth(gt, gpath);
  GroundTruth gt2 = load_ground_truth(gpath);
  CHECK((gt.wstar.raw().array() == gt2.wstar.raw().array()).all());
  CHECK(gt.gamma == gt2.gamma);
  CHECK(gt.spec.alpha == gt2.spec.alpha);
  REQUIRE(gt2.spec.components.size() == gt.spec.components.size());
  for (size_t j = 0; j < gt.spec.components.size(); ++j) {
    CHECK((gt.spec.components[j].mean.array() == gt2.spec.components[j].mean.array()).all());
    CHECK(gt.spec.components[j].sigma == gt2.spec.components[j].sigma);
    CHECK(gt.spec.weights[j] == gt2.spec.weights[j]);
  }
  save_model(gt.wstar, mpath);
  WeightMatrix W = load_model(mpath);
  CHECK((W.raw().array() == gt.wstar.raw().array()).all());
  std::filesystem::remove(gpath);
  std::filesystem::remove(mpath);
}
