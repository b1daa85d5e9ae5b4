#include "doctest.h"
#include "ermr/reductions.hpp"
#include "support.hpp"

#include <random>

using namespace ermr;

namespace {

std::vector<double> coords(const Instance& x) { return {x.coords().begin(), x.coords().end()}; }

// z(x, y') - z(x, y) built directly from its definition.
std::vector<double> block_difference(const std::vector<double>& x, int y_other, int y, int k) {
  const std::size_t d = x.size();
  std::vector<double> v(d * static_cast<std::size_t>(k), 0.0);
  for (std::size_t i = 0; i < d; ++i) {
    v[static_cast<std::size_t>(y_other - 1) * d + i] += x[i];
    v[static_cast<std::size_t>(y - 1) * d + i] -= x[i];
  }
  return v;
}

}  // namespace

TEST_CASE("trl_reduce") {
  const auto r = trl_reduce(TRLExample({{1, 0}, {0, 1}, {1, 1}}, 2));
  REQUIRE(r.has_value());
  CHECK(r->label() == -1);
  CHECK(r->bag() == Bag{{0, -1}, {-1, 0}});
  CHECK_FALSE(trl_reduce(TRLExample({{5, 5}}, 0)).has_value());
  const auto dup = trl_reduce(TRLExample({{1, 0}, {1, 0}}, 0));
  REQUIRE(dup.has_value());
  CHECK(dup->bag() == Bag{{0, 0}});
}

TEST_CASE("trl_restore is the identity on weights") {
  const auto h = trl_restore(LinearWeights{1, 2});
  CHECK(h.weights() == LinearWeights{1, 2});
  const auto zero = trl_restore(LinearWeights{0, 0});
  CHECK(zero.predict(std::vector<Instance>{{3, 1}, {-2, 9}}) == 0);
}

TEST_CASE("mcl_embed") {
  CHECK(mcl_embed(Instance{1, 2}, 2, 3) == Instance{0, 0, 1, 2, 0, 0});
  CHECK(mcl_embed(Instance{0, 0}, 1, 3) == Instance{0, 0, 0, 0, 0, 0});
  CHECK(mcl_embed(Instance{3}, 1, 2) == Instance{3, 0});
  CHECK(mcl_embed(Instance{3, 4}, 2, 4).norm() == 5.0);
  CHECK_THROWS(mcl_embed(Instance{1}, 3, 2));
  CHECK_THROWS(mcl_embed(Instance{1}, 0, 2));
}

TEST_CASE("mcl_reduce") {
  const auto r = mcl_reduce(MCLExample({1, 2}, 2, 3));
  CHECK(r.label() == -1);
  CHECK(r.bag() == Bag{{1, 2, -1, -2, 0, 0}, {0, 0, -1, -2, 1, 2}});
  const auto zero = mcl_reduce(MCLExample({0, 0}, 1, 4));
  CHECK(zero.bag().size() == 3);
  for (const auto& x : zero.bag()) CHECK(x.norm() == 0.0);
  CHECK(mcl_reduce(MCLExample({1}, 1, 2)).bag() == Bag{{-1, 1}});
}

TEST_CASE("mcl_reduce matches the block-difference definition") {
  std::mt19937_64 rng(9);
  std::normal_distribution<double> z;
  for (int t = 0; t < 300; ++t) {
    const int k = 2 + static_cast<int>(rng() % 5);
    const std::size_t d = 1 + rng() % 4;
    std::vector<double> x(d);
    for (double& v : x) v = z(rng);
    const int y = 1 + static_cast<int>(rng() % static_cast<unsigned>(k));
    const auto bag = mcl_reduce(MCLExample(Instance(x), y, k)).bag();
    REQUIRE(bag.size() == static_cast<std::size_t>(k - 1));
    std::size_t i = 0;
    for (int other = 1; other <= k; ++other) {
      if (other == y) continue;
      CHECK(coords(bag[i++]) == block_difference(x, other, y, k));
    }
    for (const auto& b : bag) CHECK(b.norm() <= std::sqrt(2.0) * Instance(x).norm() * (1 + 1e-15));
  }
}

TEST_CASE("mcl_restore and flatten") {
  const auto W = mcl_restore(LinearWeights{1, 2, 3, 4}, 2);
  CHECK(W == MulticlassWeights({{1, 2}, {3, 4}}));
  CHECK(mcl_restore(LinearWeights{0, 0, 0}, 3) == MulticlassWeights::zeros(3, 1));
  const LinearWeights omega{0.5, -1.25, 3, 7, 2, -9};
  CHECK(flatten(mcl_restore(omega, 3)) == omega);
  CHECK(mcl_restore(omega, 2).norm() == omega.norm());
  CHECK_THROWS_AS(mcl_restore(LinearWeights{1, 2, 3}, 2), DimensionError);
}

TEST_CASE("lcl_reduce labels") {
  const MCLExample base({1, 2}, 2, 3);
  const auto t = lcl_reduce(LCLExample({1, 2}, 2, true, 3));
  CHECK(t == mcl_reduce(base));
  const auto f = lcl_reduce(LCLExample({1}, 1, false, 2));
  CHECK(f.label() == 1);
  CHECK(f.bag() == Bag{{-1, 1}});
  CHECK(lcl_bag_label(true) == -1);
  CHECK(lcl_bag_label(false) == 1);
}

TEST_CASE("reduce_sample") {
  CHECK(reduce_sample(std::span<const MCLExample>()).examples.empty());
  CHECK(reduce_sample(std::span<const MCLExample>()).skipped_count == 0);

  const std::vector<MCLExample> mcl{MCLExample({1, 0}, 1, 3), MCLExample({0, 1}, 2, 3), MCLExample({1, 1}, 3, 3)};
  const auto r = reduce_sample(std::span<const MCLExample>(mcl));
  CHECK(r.examples.size() == 3);
  CHECK(r.classes == 3);
  CHECK(r.dim == 2);
  for (const auto& ex : r.examples) {
    CHECK(ex.bag().size() == 2);
    CHECK(ex.label() == -1);
  }

  const std::vector<TRLExample> trl{TRLExample({{1, 0}, {0, 1}}, 0), TRLExample({{1, 1}}, 0),
                                    TRLExample({{1, 0}, {0, 1}, {2, 2}}, 2), TRLExample({{0, 0}, {1, 1}}, 1),
                                    TRLExample({{3, 0}, {0, 3}}, 1)};
  const auto t = reduce_sample(std::span<const TRLExample>(trl));
  CHECK(t.examples.size() == 4);
  CHECK(t.skipped_count == 1);
  CHECK(t.source_index == std::vector<std::size_t>{0, 2, 3, 4});
  CHECK(t.examples[1].bag().size() == 2);

  const std::vector<MCLExample> mixed{MCLExample({1, 0}, 1, 3), MCLExample({1}, 1, 3)};
  CHECK_THROWS_AS(reduce_sample(std::span<const MCLExample>(mixed)), DimensionError);
  const std::vector<MCLExample> mixed_k{MCLExample({1, 0}, 1, 3), MCLExample({1, 0}, 1, 4)};
  CHECK_THROWS(reduce_sample(std::span<const MCLExample>(mixed_k)));
  CHECK_THROWS(reduce_sample(Dataset(mcl), ProblemKind::kTRL));
  CHECK_THROWS(reduce_sample(Dataset(std::vector<MILExample>{}), ProblemKind::kMIL));
}

TEST_CASE("check_loss_equality reports") {
  const auto a = check_loss_equality(TRLExample({{1, 0}, {0, 1}}, 0), LinearWeights{1, 0});
  CHECK(a.passed);
  CHECK(a.lhs == 0.0);
  CHECK(a.rhs == 0.0);
  const auto b = check_loss_equality(MCLExample({0.3, 0.4}, 2, 3), MulticlassWeights::zeros(3, 2));
  CHECK(b.passed);
  CHECK(b.lhs == 1.0);
  CHECK(b.rhs == 1.0);
  const auto c = check_loss_equality(LCLExample({1, 0}, 1, false, 2), MulticlassWeights({{1, 0}, {-1, 0}}));
  CHECK(c.passed);
  CHECK(c.lhs == 1.0);
  CHECK(check_loss_equality(TRLExample({{4, 4}}, 0), LinearWeights{1, 1}).passed);
}

TEST_CASE("reduced losses equal the argmax oracle on random draws") {
  std::mt19937_64 rng(21);
  std::normal_distribution<double> z;
  for (int t = 0; t < 3000; ++t) {
    const int k = 2 + static_cast<int>(rng() % 5);
    const std::size_t d = 1 + rng() % 5;
    std::vector<double> flat(static_cast<std::size_t>(k) * d), x(d);
    for (double& v : flat) v = z(rng);
    for (double& v : x) v = z(rng);
    const int y = 1 + static_cast<int>(rng() % static_cast<unsigned>(k));
    const bool gamma = rng() % 2 == 0;
    const auto reduced = lcl_reduce(LCLExample(Instance(x), y, gamma, k));
    const int lb = zero_one_binary(reduced.label(), bag_score(flat, reduced.bag()));
    const int expected = gamma ? support::argmax_mcl_loss(flat, x, y, k)
                               : support::argmax_complementary_loss(flat, x, y, k);
    CHECK(lb == expected);

    const std::size_t m = 1 + rng() % 8;
    std::vector<std::vector<double>> items(m, std::vector<double>(d));
    std::vector<Instance> inst;
    for (auto& it : items) {
      for (double& v : it) v = z(rng);
      inst.emplace_back(it);
    }
    const std::size_t target = rng() % m;
    std::vector<double> w(d);
    for (double& v : w) v = z(rng);
    const auto tr = trl_reduce(TRLExample(inst, target));
    const int reduced_loss = tr ? zero_one_binary(-1, bag_score(w, tr->bag())) : 0;
    const int oracle = m == 1 ? 0 : support::ranking_loss(w, items, target);
    CHECK(reduced_loss == oracle);
  }
}

TEST_CASE("norm transport on reduced instances") {
  std::mt19937_64 rng(4);
  std::normal_distribution<double> z;
  for (int t = 0; t < 200; ++t) {
    std::vector<Instance> items;
    double r = 0.0;
    for (int i = 0; i < 5; ++i) {
      items.emplace_back(std::vector<double>{z(rng), z(rng), z(rng)});
      r = std::max(r, items.back().norm());
    }
    const auto tr = trl_reduce(TRLExample(items, 2));
    for (const auto& x : tr->bag()) CHECK(x.norm() <= 2.0 * r + 1e-12);
  }
}
