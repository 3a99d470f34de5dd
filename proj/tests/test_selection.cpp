#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>

#include "oracles.hpp"
#include "seldiag/diagnostics.hpp"
#include "seldiag/selection.hpp"

using namespace seldiag;

namespace {

Individual make_ind(std::vector<double> traits) {
  Individual ind;
  ind.genotype.genes = traits;
  ind.phenotype.traits = traits;
  ind.total_fitness = std::accumulate(traits.begin(), traits.end(), 0.0);
  return ind;
}

std::vector<std::size_t> histogram(const std::vector<std::size_t>& picks, std::size_t n) {
  std::vector<std::size_t> h(n, 0);
  for (auto i : picks) ++h[i];
  return h;
}

}  // namespace

TEST_CASE("scheme names round-trip and reject unknowns") {
  for (auto s : kAllSchemes) CHECK(parse_scheme(to_string(s)) == s);
  CHECK_THROWS_AS(parse_scheme("nosuch"), ConfigError);
}

TEST_CASE("truncation cycles over the top tr") {
  Rng rng(1);
  const std::vector<double> f{10, 20, 30, 40};
  const auto picks = truncation_select(f, 2, 4, rng);
  const auto h = histogram(picks, 4);
  CHECK(h == std::vector<std::size_t>{0, 0, 2, 2});

  CHECK(histogram(truncation_select(f, 1, 4, rng), 4) == std::vector<std::size_t>{0, 0, 0, 4});
  CHECK(histogram(truncation_select(f, 4, 4, rng), 4) == std::vector<std::size_t>{1, 1, 1, 1});
}

TEST_CASE("truncation breaks ties among equal fitness at random") {
  Rng rng(2);
  const std::vector<double> f{5, 5, 5, 5};
  std::vector<std::size_t> counts(4, 0);
  for (int t = 0; t < 4000; ++t) ++counts[truncation_select(f, 1, 1, rng)[0]];
  for (auto c : counts) CHECK(c > 800);
}

TEST_CASE("tournament of two picks the better about three quarters of the time") {
  Rng rng(3);
  const std::vector<double> f{0, 100};
  const auto picks = tournament_select(f, 2, 20000, rng);
  const double frac = static_cast<double>(histogram(picks, 2)[1]) / 20000.0;
  CHECK(frac == doctest::Approx(0.75).epsilon(0.02));
}

TEST_CASE("tournament of size N always picks the unique best") {
  Rng rng(4);
  // Sampling is with replacement, so only the probability bound holds for
  // ts = N; use a large tournament instead to make a miss astronomically rare.
  const std::vector<double> f{1, 2, 9, 3};
  for (auto i : tournament_select(f, 64, 500, rng)) CHECK(i == 2u);
}

TEST_CASE("random selection is uniform") {
  Rng rng(5);
  const auto h = histogram(random_select(4, 10000, rng), 4);
  // 2500 +- 3 sigma where sigma = sqrt(10000 * 0.25 * 0.75)
  const double sigma = std::sqrt(10000 * 0.25 * 0.75);
  for (auto c : h) {
    CHECK(static_cast<double>(c) > 2500 - 3 * sigma);
    CHECK(static_cast<double>(c) < 2500 + 3 * sigma);
  }
}

TEST_CASE("stochastic remainder: integer parts deterministic") {
  Rng rng(6);
  // Expected counts 2, 1, 1 exactly.
  const std::vector<double> w{2, 1, 1};
  for (int t = 0; t < 20; ++t) {
    CHECK(histogram(stochastic_remainder(w, 4, rng), 3) == std::vector<std::size_t>{2, 1, 1});
  }
}

TEST_CASE("stochastic remainder: fractional parts drawn proportionally") {
  Rng rng(7);
  // Expected counts 1.5, 0.5: one guaranteed copy of 0, last slot 50/50.
  const std::vector<double> w{3, 1};
  std::size_t second = 0;
  for (int t = 0; t < 10000; ++t) {
    const auto h = histogram(stochastic_remainder(w, 2, rng), 2);
    CHECK(h[0] >= 1);
    second += h[1];
  }
  CHECK(second / 10000.0 == doctest::Approx(0.5).epsilon(0.05));
}

TEST_CASE("stochastic remainder: all-zero weights fall back to uniform") {
  Rng rng(8);
  const std::vector<double> w{0, 0, 0};
  const auto picks = stochastic_remainder(w, 3000, rng);
  for (auto c : histogram(picks, 3)) CHECK(c > 800);
}

TEST_CASE("sharing kernel") {
  CHECK(sharing_kernel(0.0, 0.3, 1.0) == 1.0);
  CHECK(sharing_kernel(0.15, 0.3, 1.0) == doctest::Approx(0.5));
  CHECK(sharing_kernel(0.3, 0.3, 1.0) == 0.0);
  CHECK(sharing_kernel(0.5, 0.3, 1.0) == 0.0);
  CHECK(sharing_kernel(0.15, 0.3, 2.0) == doctest::Approx(0.75));
  CHECK(sharing_kernel(0.0, 0.0, 1.0) == 0.0);
}

TEST_CASE("niche counts") {
  const std::vector<std::vector<double>> same(5, std::vector<double>{1.0, 2.0});
  for (double m : niche_counts(same, 0.3, 1.0, 1.0)) CHECK(m == doctest::Approx(5.0));

  const std::vector<std::vector<double>> pair{{0.0}, {0.15}};
  for (double m : niche_counts(pair, 0.3, 1.0, 1.0)) CHECK(m == doctest::Approx(1.5));

  const std::vector<std::vector<double>> far{{0.0}, {50.0}, {100.0}};
  for (double m : niche_counts(far, 0.3, 1.0, 1.0)) CHECK(m == 1.0);

  for (double m : niche_counts(same, 0.0, 1.0, 1.0)) CHECK(m == 1.0);

  // Normalization divides by the scale.
  const std::vector<std::vector<double>> scaled{{0.0}, {15.0}};
  for (double m : niche_counts(scaled, 0.3, 1.0, 100.0)) CHECK(m == doctest::Approx(1.5));
  CHECK(space_diameter(4) == doctest::Approx(200.0));
}

TEST_CASE("niche counts match a direct double loop") {
  Rng rng(9);
  std::vector<std::vector<double>> pts(30, std::vector<double>(3));
  for (auto& p : pts)
    for (auto& v : p) v = rng.uniform(0.0, 0.5);
  const auto m = niche_counts(pts, 0.3, 1.0, 1.0);
  for (std::size_t i = 0; i < pts.size(); ++i) {
    double expected = 0.0;
    for (std::size_t j = 0; j < pts.size(); ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < 3; ++k) s += (pts[i][k] - pts[j][k]) * (pts[i][k] - pts[j][k]);
      const double d = std::sqrt(s);
      if (d < 0.3) expected += 1.0 - d / 0.3;
    }
    CHECK(m[i] == doctest::Approx(expected).epsilon(1e-12));
  }
}

TEST_CASE("fitness sharing favours the lonely individual against a clump") {
  Rng rng(10);
  Population pop;
  for (int i = 0; i < 2; ++i) pop.push_back(make_ind({50.0, 50.0}));
  pop.push_back(make_ind({0.0, 100.0}));
  // Raw fitness is equal, so shared fitness is 50 : 50 : 100.
  const auto picks =
      fitness_sharing_select(pop, SimilarityMetric::Phenotypic, 0.3, 1.0, true, 40000, rng);
  const auto h = histogram(picks, 3);
  CHECK(h[2] / 40000.0 == doctest::Approx(0.5).epsilon(0.01));
  CHECK((h[0] + h[1]) / 40000.0 == doctest::Approx(0.5).epsilon(0.01));
}

TEST_CASE("lexicase filters by the case order") {
  const std::vector<std::vector<double>> s{{10, 1}, {10, 5}, {9, 9}};
  const std::vector<std::size_t> o01{0, 1}, o10{1, 0};
  CHECK(lexicase_survivors(s, o01) == std::vector<std::size_t>{1});
  CHECK(lexicase_survivors(s, o10) == std::vector<std::size_t>{2});

  const std::vector<std::vector<double>> tie{{3, 3}, {3, 3}, {1, 1}};
  CHECK(lexicase_survivors(tie, o01) == std::vector<std::size_t>{0, 1});
}

TEST_CASE("lexicase selects specialists on each case") {
  Rng rng(11);
  const std::vector<std::vector<double>> s{{10, 0, 0}, {0, 10, 0}, {0, 0, 10}, {5, 5, 5}};
  const auto h = histogram(lexicase_select(s, 9000, rng), 4);
  CHECK(h[3] == 0u);
  for (int i = 0; i < 3; ++i) CHECK(h[i] / 9000.0 == doctest::Approx(1.0 / 3).epsilon(0.06));
}

TEST_CASE("Pareto dominance") {
  const std::vector<double> a{2, 2}, b{1, 2}, c{2, 1}, d{3, 0};
  CHECK(dominates(a, b));
  CHECK(dominates(a, c));
  CHECK_FALSE(dominates(b, a));
  CHECK_FALSE(dominates(a, a));
  CHECK_FALSE(dominates(a, d));
  CHECK_FALSE(dominates(d, a));
  const std::vector<double> shorter{1};
  CHECK_THROWS_AS(dominates(a, shorter), std::invalid_argument);
}

TEST_CASE("nondominated fronts on a small example") {
  const std::vector<std::vector<double>> pts{{3, 1}, {1, 3}, {2, 2}, {1, 1}, {0, 2}};
  const auto fronts = nondominated_fronts(pts);
  REQUIRE(fronts.size() == 2);
  auto sorted = [](std::vector<std::size_t> v) {
    std::sort(v.begin(), v.end());
    return v;
  };
  CHECK(sorted(fronts[0]) == std::vector<std::size_t>{0, 1, 2});
  CHECK(sorted(fronts[1]) == std::vector<std::size_t>{3, 4});
}

TEST_CASE("nondominated fronts match the peeling oracle") {
  Rng rng(12);
  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t n = 1 + rng.index(8), dim = 1 + rng.index(3);
    std::vector<std::vector<double>> pts(n, std::vector<double>(dim));
    for (auto& p : pts)
      for (auto& v : p) v = static_cast<double>(rng.index(4));
    const auto rank = oracle::front_ranks(pts);
    const auto fronts = nondominated_fronts(pts);
    std::size_t total = 0;
    for (std::size_t f = 0; f < fronts.size(); ++f) {
      for (auto i : fronts[f]) REQUIRE(rank[i] == f);
      total += fronts[f].size();
    }
    REQUIRE(total == n);
  }
}

TEST_CASE("NSGA fitness for two singleton fronts") {
  const std::vector<std::vector<double>> pts{{1, 1}, {2, 2}};
  const auto fa = nsga_fitness(pts, 0.3, 1.0, true);
  CHECK(fa.shared_fitness[1] == doctest::Approx(2.0));
  CHECK(fa.shared_fitness[0] == doctest::Approx(0.99 * 2.0));
}

TEST_CASE("NSGA fitness is strictly ordered across fronts") {
  Rng rng(13);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<std::vector<double>> pts(20, std::vector<double>(3));
    for (auto& p : pts)
      for (auto& v : p) v = rng.uniform(0.0, 100.0);
    const auto fa = nsga_fitness(pts, 0.3, 1.0, rng.bernoulli(0.5));
    for (std::size_t f = 0; f + 1 < fa.fronts.size(); ++f) {
      double lowest = 1e300, highest = -1e300;
      for (auto i : fa.fronts[f]) lowest = std::min(lowest, fa.shared_fitness[i]);
      for (auto i : fa.fronts[f + 1]) highest = std::max(highest, fa.shared_fitness[i]);
      REQUIRE(highest < lowest);
    }
  }
}

TEST_CASE("novelty scores") {
  const std::vector<std::vector<double>> two{{0, 0}, {3, 4}};
  const auto s2 = novelty_scores(two, {}, 15);
  CHECK(s2[0] == doctest::Approx(5.0));
  CHECK(s2[1] == doctest::Approx(5.0));

  // Triangle with sides 5, 5, 8 and k = 1: nearest neighbour each.
  const std::vector<std::vector<double>> tri{{0, 0}, {8, 0}, {4, 3}};
  const auto s1 = novelty_scores(tri, {}, 1);
  CHECK(s1[0] == doctest::Approx(5.0));
  CHECK(s1[1] == doctest::Approx(5.0));
  CHECK(s1[2] == doctest::Approx(5.0));
  const auto sk2 = novelty_scores(tri, {}, 2);
  CHECK(sk2[0] == doctest::Approx(6.5));
  CHECK(sk2[2] == doctest::Approx(5.0));

  const std::vector<std::vector<double>> one{{1, 1}};
  CHECK(novelty_scores(one, {}, 15)[0] == 0.0);

  const std::vector<Phenotype> archive{Phenotype{{4, 5}}};
  CHECK(novelty_scores(one, archive, 15)[0] == doctest::Approx(5.0));
}

TEST_CASE("novelty archive threshold adjustments") {
  NoveltyParams params;
  Rng rng(14);
  Population pop;
  for (int i = 0; i < 5; ++i) pop.push_back(make_ind({static_cast<double>(i)}));

  NoveltyState state;
  state.pmin = 10.0;
  const std::vector<double> high(5, 20.0);
  CHECK(update_novelty_archive(pop, high, params, state, rng) == 5u);
  CHECK(state.pmin == doctest::Approx(12.5));
  CHECK(state.archive.size() >= 5u);

  NoveltyState quiet;
  quiet.pmin = 10.0;
  const std::vector<double> low(5, 1.0);
  for (int g = 0; g < 499; ++g) update_novelty_archive(pop, low, params, quiet, rng);
  CHECK(quiet.pmin == 10.0);
  update_novelty_archive(pop, low, params, quiet, rng);
  CHECK(quiet.pmin == doctest::Approx(9.5));

  NoveltyState few;
  few.pmin = 10.0;
  const std::vector<double> some{20, 20, 20, 20, 1};
  CHECK(update_novelty_archive(pop, some, params, few, rng) == 4u);
  CHECK(few.pmin == 10.0);
}

TEST_CASE("novelty archive random saves occur at about 1 in 200") {
  NoveltyParams params;
  Rng rng(15);
  Population pop{make_ind({0.0})};
  NoveltyState state;
  const std::vector<double> low{0.0};
  for (int g = 0; g < 100000; ++g) update_novelty_archive(pop, low, params, state, rng);
  // mean 500, sd ~22
  CHECK(state.archive.size() > 430u);
  CHECK(state.archive.size() < 570u);
}

TEST_CASE("every scheme returns n in-range indices") {
  Rng rng(16);
  const auto spec = DiagnosticSpec::make(DiagnosticKind::ExploitationRate);
  Population pop;
  for (int i = 0; i < 40; ++i) pop.push_back(evaluate(random_genotype(6, 0.0, 100.0, rng), spec));
  for (auto kind : kAllSchemes) {
    SchemeParams sp;
    sp.kind = kind;
    Selector sel(sp);
    for (std::size_t n : {1u, 40u, 97u}) {
      const auto picks = sel.select(pop, n, rng);
      REQUIRE(picks.size() == n);
      for (auto i : picks) REQUIRE(i < pop.size());
    }
  }
}

TEST_CASE("scheme parameter validation") {
  SchemeParams sp;
  sp.kind = SchemeKind::Truncation;
  sp.truncation_size = 0;
  CHECK_THROWS_AS(sp.validate(10), ConfigError);
  sp.truncation_size = 11;
  CHECK_THROWS_AS(sp.validate(10), ConfigError);
  sp.truncation_size = 8;
  CHECK_NOTHROW(sp.validate(10));
  sp.sigma = -1.0;
  CHECK_THROWS_AS(sp.validate(10), ConfigError);
}
