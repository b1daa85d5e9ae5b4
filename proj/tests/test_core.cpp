#include "doctest.h"
#include "ermr/core.hpp"
#include "support.hpp"

#include <random>

using namespace ermr;

TEST_CASE("bag_score takes the max inner product") {
  CHECK(bag_score(LinearWeights{1, 0}, Bag{{2, 3}, {-1, 5}}) == 2.0);
  CHECK(bag_score(LinearWeights{0, 0}, Bag{{2, 3}, {-1, 5}}) == 0.0);
  CHECK(bag_score(LinearWeights{1, 1}, Bag{{1, 0}, {0, 1}, {1, 1}}) == 2.0);
  CHECK(bag_witness(LinearWeights{1, 1}.values(), Bag{{1, 0}, {0, 1}, {1, 1}}) == 2);
  CHECK(bag_witness(LinearWeights{0, 0}.values(), Bag{{1, 0}, {0, 1}}) == 0);
  CHECK_THROWS_AS(bag_score(LinearWeights{1, 0, 0}, Bag{{1, 0}}), DimensionError);
}

TEST_CASE("zero-one loss counts ties as errors") {
  CHECK(zero_one_binary(-1, -0.5) == 0);
  CHECK(zero_one_binary(-1, 0.0) == 1);
  CHECK(zero_one_binary(1, 2.0) == 0);
  CHECK(zero_one_binary(1, -0.0) == 1);
}

TEST_CASE("hinge") {
  CHECK(hinge(-1, -1.0) == 0.0);
  CHECK(hinge(1, 0.0) == 1.0);
  CHECK(hinge(-1, 0.5) == 1.5);
  std::mt19937_64 rng(3);
  std::normal_distribution<double> z(0.0, 2.0);
  for (int t = 0; t < 1000; ++t) {
    const double s = z(rng), u = z(rng);
    for (int y : {-1, 1}) {
      CHECK(hinge(y, s) >= zero_one_binary(y, s));
      CHECK(std::fabs(hinge(y, s) - hinge(y, u)) <= std::fabs(s - u) + 1e-12);
    }
  }
}

TEST_CASE("empirical_risk_mil") {
  const std::vector<MILExample> one{MILExample(Bag{{1, 0}}, -1)};
  CHECK(empirical_risk_mil(one, LinearWeights{-1, 0}, BinaryLoss::kZeroOne) == 0.0);
  CHECK(empirical_risk_mil(one, LinearWeights{1, 0}, BinaryLoss::kZeroOne) == 1.0);
  const std::vector<MILExample> two{MILExample(Bag{{1, 0}}, -1), MILExample(Bag{{-1, 0}}, -1)};
  CHECK(empirical_risk_mil(two, LinearWeights{1, 0}, BinaryLoss::kZeroOne) == 0.5);
  CHECK(empirical_risk_mil(two, LinearWeights{1, 0}, BinaryLoss::kHinge) == doctest::Approx(1.0));
  CHECK_THROWS(empirical_risk_mil({}, LinearWeights{1, 0}, BinaryLoss::kZeroOne));
}

TEST_CASE("top1_predict breaks ties by lowest index") {
  const std::vector<Instance> a{{0, 1}, {2, 0}};
  CHECK(top1_predict(LinearWeights{1, 0}, a) == 1);
  CHECK(top1_predict(LinearWeights{0, 0}, a) == 0);
  const std::vector<Instance> b{{1, 0}, {0, 1}};
  CHECK(top1_predict(LinearWeights{1, 1}, b) == 0);
  CHECK(top1_predict(LinearWeights{3, 0}, a) == top1_predict(LinearWeights{0.5, 0}, a));
  CHECK_THROWS(top1_predict(LinearWeights{1, 0}, std::vector<Instance>{}));
}

TEST_CASE("trl_loss") {
  const TRLExample ex({{1, 0}, {0, 1}}, 0);
  CHECK(trl_loss(LinearWeights{1, 0}, ex) == 0);
  CHECK(trl_loss(LinearWeights{1, 1}, ex) == 1);
  CHECK(trl_loss(LinearWeights{-4, 7}, TRLExample({{5, 5}}, 0)) == 0);
  CHECK_THROWS(TRLExample({{1, 0}}, 1));
}

TEST_CASE("mcl_loss and lcl_loss") {
  const MulticlassWeights W({{1, 0}, {-1, 0}});
  CHECK(mcl_loss(W, MCLExample({1, 0}, 1, 2)) == 0);
  CHECK(mcl_loss(MulticlassWeights({{1, 0}, {1, 0}}), MCLExample({1, 0}, 1, 2)) == 1);
  CHECK(mcl_loss(MulticlassWeights::zeros(3, 2), MCLExample({0.3, -2}, 2, 3)) == 1);
  CHECK(lcl_loss(W, LCLExample({1, 0}, 1, true, 2)) == 0);
  CHECK(lcl_loss(W, LCLExample({1, 0}, 1, false, 2)) == 1);
  CHECK(lcl_loss(W, LCLExample({1, 0}, 2, false, 2)) == 0);
  CHECK_THROWS(MCLExample({1, 0}, 3, 2));
  CHECK_THROWS(MCLExample({1, 0}, 0, 2));
  CHECK_THROWS(MCLExample({1, 0}, 1, 1));
  CHECK_THROWS(mcl_loss(MulticlassWeights::zeros(3, 2), MCLExample({1, 0}, 1, 2)));
}

TEST_CASE("losses agree with the argmax formulation") {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> z;
  for (int t = 0; t < 2000; ++t) {
    const int k = 2 + static_cast<int>(rng() % 5);
    const std::size_t d = 1 + rng() % 4;
    support::Vec flat(static_cast<std::size_t>(k) * d), x(d);
    for (double& v : flat) v = z(rng);
    for (double& v : x) v = z(rng);
    const int y = 1 + static_cast<int>(rng() % static_cast<unsigned>(k));
    const MulticlassWeights W(k, d, flat);
    CHECK(mcl_loss(W, MCLExample(Instance(x), y, k)) == support::argmax_mcl_loss(flat, x, y, k));
    CHECK(lcl_loss(W, LCLExample(Instance(x), y, true, k)) == support::argmax_mcl_loss(flat, x, y, k));
    CHECK(lcl_loss(W, LCLExample(Instance(x), y, false, k)) ==
          support::argmax_complementary_loss(flat, x, y, k));
  }
}

TEST_CASE("margin losses ignore a common shift of the rows") {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> z;
  for (int t = 0; t < 500; ++t) {
    const int k = 3;
    const std::size_t d = 2;
    std::vector<double> flat(6), shifted(6);
    const double v0 = z(rng), v1 = z(rng);
    for (std::size_t i = 0; i < 6; ++i) {
      flat[i] = std::round(4 * z(rng));
      shifted[i] = flat[i] + (i % 2 == 0 ? v0 : v1);
    }
    const MCLExample ex(Instance{std::round(z(rng)), std::round(z(rng))}, 2, k);
    const auto a = multiclass_margin_violation(MulticlassWeights(k, d, flat), ex.x(), 2);
    const auto b = multiclass_margin_violation(MulticlassWeights(k, d, shifted), ex.x(), 2);
    CHECK(a == doctest::Approx(b).epsilon(1e-9));
  }
}

TEST_CASE("homogeneity of bag_score") {
  const Bag b{{1, -2}, {0.5, 3}, {-1, -1}};
  const LinearWeights w{0.3, -0.7};
  for (double c : {0.0, 0.5, 2.0, 10.0}) {
    CHECK(bag_score(w.scaled(c), b) == doctest::Approx(c * bag_score(w, b)));
  }
}

TEST_CASE("construction invariants") {
  CHECK_THROWS(Instance(std::vector<double>{}));
  CHECK_THROWS(Instance{1.0, std::nan("")});
  CHECK_THROWS(Instance{std::numeric_limits<double>::infinity()});
  CHECK_THROWS(Bag(std::vector<Instance>{}));
  CHECK_THROWS_AS(Bag({Instance{1, 0}, Instance{1}}), DimensionError);
  CHECK_THROWS(MILExample(Bag{{1}}, 0));
  CHECK_THROWS(LinearWeights({3, 4}, 4.9));
  CHECK_NOTHROW(LinearWeights({3, 4}, 5.0));
  CHECK_THROWS(MulticlassWeights({{3, 0}, {0, 4}}, 4.0));
  CHECK_THROWS(MulticlassWeights(std::vector<std::vector<double>>{{1, 0}}));
  const MulticlassWeights W(2, 2, {1, 2, 3, 4});
  CHECK(W.row(2)[0] == 3.0);
  CHECK_THROWS(W.row(3));
}
