#include <doctest.h>

#include <mcsvm/core_model.hpp>
#include <mcsvm/rng.hpp>

#include <cmath>
#include <stdexcept>

using namespace mcsvm;

namespace {

WeightMatrix make_w(std::initializer_list<std::initializer_list<double>> rows) {
  const int k = static_cast<int>(rows.size());
  const int d = static_cast<int>(rows.begin()->size());
  WeightMatrix W(k, d);
  int y = 1;
  for (const auto& r : rows) {
    int j = 0;
    for (double v : r) W.raw()(y - 1, j++) = v;
    ++y;
  }
  return W;
}

Vector vec(std::initializer_list<double> vals) {
  Vector v(static_cast<Eigen::Index>(vals.size()));
  int i = 0;
  for (double x : vals) v[i++] = x;
  return v;
}

WeightMatrix random_w(Rng& rng, int k, int d) {
  WeightMatrix W(k, d);
  for (int y = 1; y <= k; ++y)
    for (int j = 0; j < d; ++j) W.raw()(y - 1, j) = rng.normal();
  return W;
}

}  // namespace

TEST_CASE("feature_map places x in block y") {
  Vector x = vec({1, 2});
  Vector f1 = feature_map(x, 1, 2);
  Vector f2 = feature_map(x, 2, 2);
  CHECK(f1.size() == 4);
  CHECK(f1[0] == 1.0);
  CHECK(f1[1] == 2.0);
  CHECK(f1[2] == 0.0);
  CHECK(f1[3] == 0.0);
  CHECK(f2[0] == 0.0);
  CHECK(f2[1] == 0.0);
  CHECK(f2[2] == 1.0);
  CHECK(f2[3] == 2.0);
}

TEST_CASE("feature_map cross-class difference has norm sqrt(2)*norm(x)") {
  Vector x = vec({3, 4});
  Vector diff = feature_map(x, 1, 3) - feature_map(x, 2, 3);
  CHECK(diff.norm() == doctest::Approx(std::sqrt(2.0) * 5.0).epsilon(1e-12));
}

TEST_CASE("feature_map norm preservation, label range errors") {
  Rng rng(7);
  for (int t = 0; t < 50; ++t) {
    const int d = 1 + (int)rng.uniform_int(6);
    const int k = 2 + rng.uniform_int(4);
    Vector x(d);
    for (int j = 0; j < d; ++j) x[j] = rng.normal();
    const int y = 1 + (int)rng.uniform_int(k);
    CHECK(feature_map(x, y, k).norm() == doctest::Approx(x.norm()).epsilon(1e-15));
  }
  Vector x = vec({1.0});
  CHECK_THROWS_AS(feature_map(x, 0, 2), std::invalid_argument);
  CHECK_THROWS_AS(feature_map(x, 3, 2), std::invalid_argument);
}

TEST_CASE("predict hand oracles and tie rule") {
  WeightMatrix W = make_w({{1, 0}, {0, 1}});
  CHECK(predict(W, vec({2, 1})) == 1);
  CHECK(predict(W, vec({1, 1})) == 1);
  WeightMatrix W3 = make_w({{1, 0}, {-1, 0}, {0, 2}});
  CHECK(predict(W3, vec({1, 1})) == 3);
  CHECK_THROWS_AS(predict(W, vec({1, 1, 1})), std::invalid_argument);
}

TEST_CASE("predict invariant under positive rescaling") {
  Rng rng(11);
  for (int t = 0; t < 200; ++t) {
    const int k = 2 + rng.uniform_int(4);
    const int d = 1 + (int)rng.uniform_int(5);
    WeightMatrix W = random_w(rng, k, d);
    Vector x(d);
    for (int j = 0; j < d; ++j) x[j] = rng.normal();
    const double c = std::exp(rng.uniform(-3.0, 3.0));
    WeightMatrix Wc(k, d);
    Wc.raw() = W.raw() * c;
    CHECK(predict(W, x) == predict(Wc, x));
  }
}

TEST_CASE("margin_of hand oracles") {
  const double s = 1.0 / std::sqrt(2.0);
  WeightMatrix W = make_w({{s, 0}, {-s, 0}});
  CHECK(margin_of(W, vec({1, 0}), 1) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));

  WeightMatrix Z = make_w({{0, 0}, {0, 0}, {0, 0}});
  CHECK(margin_of(Z, vec({3, -1}), 2) == 0.0);

  WeightMatrix U = make_w({{1, 0}, {-1, 0}});
  CHECK(margin_of(U, vec({-1, 0}), 1) == doctest::Approx(-2.0).epsilon(1e-12));

  WeightMatrix one(1, 2);
  one.raw().row(0) = vec({1, 0}).transpose();
  CHECK_THROWS_AS(margin_of(one, vec({1, 0}), 1), std::invalid_argument);
}

TEST_CASE("hinge_loss hand oracles") {
  const double s = 1.0 / std::sqrt(2.0);
  WeightMatrix W = make_w({{s, 0}, {-s, 0}});
  // margin sqrt(2) > gamma = 1 on both classes: zero loss
  CHECK(hinge_loss(W, LabeledPoint{vec({1, 0}), 1}, 1.0) == 0.0);
  CHECK(hinge_loss(W, LabeledPoint{vec({-1, 0}), 2}, 1.0) == 0.0);
  // 1 - 0.3*sqrt(2)
  CHECK(hinge_loss(W, LabeledPoint{vec({0.3, 0}), 1}, 1.0) ==
        doctest::Approx(1.0 - 0.3 * std::sqrt(2.0)).epsilon(1e-12));
  CHECK_THROWS_AS(hinge_loss(W, LabeledPoint{vec({1, 0}), 1}, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(hinge_loss(W, LabeledPoint{vec({1, 0}), 1}, -1.0), std::invalid_argument);
}

TEST_CASE("hinge_loss set overload sums point losses") {
  Rng rng(19);
  WeightMatrix W = random_w(rng, 3, 2);
  LabeledSet S(2, 3);
  double manual = 0.0;
  for (int i = 0; i < 40; ++i) {
    LabeledPoint p{vec({rng.normal(), rng.normal()}), 1 + (int)rng.uniform_int(3)};
    S.add(p.x, p.y);
    manual += hinge_loss(W, p, 0.7);
  }
  CHECK(hinge_loss(W, S, 0.7) == doctest::Approx(manual).epsilon(1e-12));
}

TEST_CASE("binary reduction matches standard hinge") {
  Rng rng(23);
  for (int t = 0; t < 500; ++t) {
    const int d = 1 + (int)rng.uniform_int(5);
    Vector u(d), x(d);
    for (int j = 0; j < d; ++j) {
      u[j] = rng.normal();
      x[j] = rng.normal();
    }
    const double gamma = std::exp(rng.uniform(-1.0, 1.0));
    WeightMatrix W(2, d);
    W.raw().row(0) = (u / std::sqrt(2.0)).transpose();
    W.raw().row(1) = (-u / std::sqrt(2.0)).transpose();
    const int y = 1 + (int)rng.uniform_int(2);
    const double s = (y == 1) ? 1.0 : -1.0;
    const double binary = std::max(0.0, 1.0 - std::sqrt(2.0) * u.dot(x) * s / gamma);
    CHECK(hinge_loss(W, LabeledPoint{x, y}, gamma) == doctest::Approx(binary).epsilon(1e-12));
  }
}

TEST_CASE("hinge_loss convexity on random triples") {
  Rng rng(29);
  for (int t = 0; t < 1000; ++t) {
    const int k = 2 + rng.uniform_int(3);
    const int d = 1 + (int)rng.uniform_int(4);
    WeightMatrix W1 = random_w(rng, k, d);
    WeightMatrix W2 = random_w(rng, k, d);
    Vector x(d);
    for (int j = 0; j < d; ++j) x[j] = rng.normal();
    const LabeledPoint p{x, 1 + (int)rng.uniform_int(k)};
    const double gamma = std::exp(rng.uniform(-1.0, 1.0));
    const double tt = rng.uniform();
    WeightMatrix Wm(k, d);
    Wm.raw() = tt * W1.raw() + (1.0 - tt) * W2.raw();
    const double lhs = hinge_loss(Wm, p, gamma);
    const double rhs = tt * hinge_loss(W1, p, gamma) + (1.0 - tt) * hinge_loss(W2, p, gamma);
    CHECK(lhs <= rhs + 1e-9);
  }
}

TEST_CASE("subgradient inequality") {
  Rng rng(31);
  for (int t = 0; t < 1000; ++t) {
    const int k = 2 + rng.uniform_int(3);
    const int d = 1 + (int)rng.uniform_int(4);
    WeightMatrix W = random_w(rng, k, d);
    WeightMatrix Wp = random_w(rng, k, d);
    Vector x(d);
    for (int j = 0; j < d; ++j) x[j] = rng.normal();
    const LabeledPoint p{x, 1 + (int)rng.uniform_int(k)};
    const double gamma = std::exp(rng.uniform(-1.0, 1.0));
    const Vector g = hinge_subgradient(W, p, gamma);
    const double lhs = hinge_loss(Wp, p, gamma);
    const double rhs = hinge_loss(W, p, gamma) + g.dot(Wp.flat() - W.flat());
    CHECK(lhs >= rhs - 1e-9);
  }
}

TEST_CASE("hinge_subgradient hand oracles") {
  WeightMatrix W = make_w({{1}, {0}, {-1}});
  const LabeledPoint p{vec({0.5}), 1};
  CHECK(hinge_argmax(W, p.x, p.y, 1.0) == 2);
  Vector g = hinge_subgradient(W, p, 1.0);
  CHECK(g[0] == doctest::Approx(-0.5).epsilon(1e-12));
  CHECK(g[1] == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(g[2] == 0.0);

  // margins comfortably above gamma: zero subgradient
  const double s = 1.0 / std::sqrt(2.0);
  WeightMatrix Wsep = make_w({{s, 0}, {-s, 0}});
  Vector z = hinge_subgradient(Wsep, LabeledPoint{vec({2, 0}), 1}, 1.0);
  CHECK(z.norm() == 0.0);
  CHECK_THROWS_AS(hinge_subgradient(W, p, 0.0), std::invalid_argument);
}

TEST_CASE("hinge_subgradient matches central finite differences away from ties") {
  Rng rng(37);
  int done = 0;
  while (done < 100) {
    const int k = 2 + rng.uniform_int(3);
    const int d = 1 + (int)rng.uniform_int(4);
    WeightMatrix W = random_w(rng, k, d);
    Vector x(d);
    for (int j = 0; j < d; ++j) x[j] = rng.normal();
    const LabeledPoint p{x, 1 + (int)rng.uniform_int(k)};
    const double gamma = 1.0;

    // skip near-ties: require the hinge maximizer to win by a clear gap
    const int yhat = hinge_argmax(W, p.x, p.y, gamma);
    double best = 0.0, second = -1e300;
    for (int yp = 1; yp <= k; ++yp) {
      const double val =
          (yp == p.y ? 0.0 : 1.0) - (W.row(p.y).dot(x) - W.row(yp).dot(x)) / gamma;
      if (yp == yhat)
        best = val;
      else
        second = std::max(second, val);
    }
    if (best - second < 1e-3) continue;

    const Vector g = hinge_subgradient(W, p, gamma);
    Vector dir(k * d);
    for (int j = 0; j < k * d; ++j) dir[j] = rng.normal();
    dir /= dir.norm();
    const double h = 1e-6;
    WeightMatrix Wp(k, d), Wm(k, d);
    Wp.raw() = W.raw();
    Wm.raw() = W.raw();
    Eigen::Map<Vector>(Wp.raw().data(), k * d) += h * dir;
    Eigen::Map<Vector>(Wm.raw().data(), k * d) -= h * dir;
    const double fd = (hinge_loss(Wp, p, gamma) - hinge_loss(Wm, p, gamma)) / (2.0 * h);
    CHECK(std::abs(fd - g.dot(dir)) <= 1e-5);
    ++done;
  }
}

TEST_CASE("pancake_contains") {
  WeightMatrix W = make_w({{1, 0}, {0, 1}});
  const LabeledPoint c{vec({0, 0}), 1};
  CHECK(pancake_contains(W, 0.1, c, c));
  CHECK_FALSE(pancake_contains(W, 0.1, c, LabeledPoint{vec({0, 0}), 2}));
  CHECK_FALSE(pancake_contains(W, 0.1, c, LabeledPoint{vec({0.05, 0.2}), 1}));
  CHECK(pancake_contains(W, 0.1, c, LabeledPoint{vec({0.05, 0.05}), 1}));
  CHECK_THROWS_AS(pancake_contains(W, 0.1, c, LabeledPoint{vec({0.0, 0.0, 0.0}), 1}),
                  std::invalid_argument);
}
