#include "doctest.h"
#include "ermr/datagen.hpp"

#include <cmath>

using namespace ermr;

namespace {

GenConfig config(std::uint64_t seed, std::size_t n) {
  GenConfig g;
  g.seed = seed;
  g.n = n;
  g.d = 3;
  g.k = 4;
  g.set_size = 5;
  g.r_norm = 2.0;
  return g;
}

}  // namespace

TEST_CASE("config validation") {
  GenConfig g;
  g.n = 0;
  CHECK_THROWS(gen_mil(g));
  g = GenConfig{};
  g.k = 1;
  CHECK_THROWS(gen_mcl(g));
  g = GenConfig{};
  g.theta = 1.2;
  CHECK_THROWS(gen_lcl(g));
  g = GenConfig{};
  g.set_size = 0;
  CHECK_THROWS(gen_trl(g));
}

TEST_CASE("features respect r_norm") {
  const auto g = config(3, 300);
  for (const auto& ex : gen_mil(g).examples) {
    for (const auto& x : ex.bag()) CHECK(x.norm() <= g.r_norm);
  }
  for (const auto& ex : gen_trl(g).examples) {
    for (const auto& x : ex.items()) CHECK(x.norm() <= g.r_norm);
  }
  for (const auto& ex : gen_mcl(g).examples) CHECK(ex.x().norm() <= g.r_norm);
}

TEST_CASE("generators are deterministic per seed") {
  const auto g = config(12, 50);
  CHECK(gen_mil(g).examples == gen_mil(g).examples);
  CHECK(gen_trl(g).examples == gen_trl(g).examples);
  CHECK(gen_mcl(g).examples == gen_mcl(g).examples);
  CHECK(gen_lcl(g).examples == gen_lcl(g).examples);
  CHECK_FALSE(gen_mcl(g).examples == gen_mcl(config(13, 50)).examples);
}

TEST_CASE("mil labels follow the planted rule") {
  const auto g = config(4, 200);
  const auto data = gen_mil(g);
  CHECK(data.planted.norm() == doctest::Approx(1.0));
  for (const auto& ex : data.examples) {
    CHECK(ex.label() == (bag_score(data.planted, ex.bag()) > g.mil_threshold ? 1 : -1));
  }
}

TEST_CASE("trl targets maximise the planted score") {
  auto g = config(5, 200);
  const auto data = gen_trl(g);
  for (const auto& ex : data.examples) {
    const double t = dot(data.planted.values(), ex.target().coords());
    for (std::size_t i = 0; i < ex.items().size(); ++i) {
      const double s = dot(data.planted.values(), ex.items()[i].coords());
      CHECK(s <= t);
      if (i < ex.target_index()) CHECK(s < t);
    }
  }
  g.set_size = 1;
  for (const auto& ex : gen_trl(g).examples) CHECK(ex.target_index() == 0);
  g.set_size = 5;
  g.margin = 0.05;
  const auto sep = gen_trl(g);
  CHECK(empirical_risk_trl(sep.examples, sep.planted) == 0.0);
}

TEST_CASE("mcl labels and margins") {
  auto g = config(6, 300);
  const auto data = gen_mcl(g);
  for (const auto& ex : data.examples) {
    CHECK(ex.label() >= 1);
    CHECK(ex.label() <= g.k);
    CHECK(multiclass_predict(data.planted, ex.x()) == ex.label());
  }
  g.margin = 0.1;
  const auto sep = gen_mcl(g);
  CHECK(empirical_risk_mcl(sep.examples, sep.planted) == 0.0);
  for (const auto& ex : sep.examples) CHECK(-multiclass_margin_violation(sep.planted, ex.x(), ex.label()) >= 0.1);
}

TEST_CASE("lcl flags and complementary labels") {
  auto g = config(7, 2000);
  g.theta = 1.0;
  for (const auto& ex : gen_lcl(g).examples) CHECK(ex.is_true());
  const auto all_true = gen_lcl(g);
  for (std::size_t i = 0; i < all_true.examples.size(); ++i) {
    CHECK(all_true.examples[i].label() == all_true.true_labels[i]);
  }
  g.theta = 0.0;
  const auto comp = gen_lcl(g);
  for (std::size_t i = 0; i < comp.examples.size(); ++i) {
    CHECK_FALSE(comp.examples[i].is_true());
    CHECK(comp.examples[i].label() != comp.true_labels[i]);
  }
  // Uniformity over the k - 1 other labels: chi-square on the offset.
  std::vector<double> counts(3, 0.0);
  for (std::size_t i = 0; i < comp.examples.size(); ++i) {
    const int offset = (comp.examples[i].label() - comp.true_labels[i] + g.k) % g.k;
    counts[static_cast<std::size_t>(offset - 1)] += 1.0;
  }
  const double expected = static_cast<double>(comp.examples.size()) / 3.0;
  double chi2 = 0.0;
  for (double c : counts) chi2 += (c - expected) * (c - expected) / expected;
  CHECK(chi2 < 13.8);  // 0.999 quantile of chi-square with 2 degrees of freedom
}

TEST_CASE("ordinary-label fraction concentrates at theta") {
  auto g = config(8, 100000);
  g.d = 2;
  for (double theta : {0.3, 0.7}) {
    g.theta = theta;
    const auto data = gen_lcl(g);
    double ordinary = 0.0;
    for (const auto& ex : data.examples) ordinary += ex.is_true() ? 1.0 : 0.0;
    const double n = static_cast<double>(data.examples.size());
    CHECK(std::fabs(ordinary / n - theta) <= 3.0 * std::sqrt(theta * (1 - theta) / n));
  }
}

TEST_CASE("rejection sampling gives up") {
  auto g = config(9, 5);
  g.margin = 100.0;
  g.max_rejections = 50;
  CHECK_THROWS(gen_mcl(g));
}
