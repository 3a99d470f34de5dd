#include <doctest.h>

#include <limits>
#include <numeric>
#include <set>
#include <sstream>

#include "seldiag/metrics.hpp"

using namespace seldiag;

namespace {

Population evaluate_rows(const std::vector<std::vector<double>>& rows, DiagnosticKind kind) {
  Population pop;
  for (const auto& r : rows) pop.push_back(evaluate(Genotype{r}, DiagnosticSpec::make(kind)));
  return pop;
}

}  // namespace

TEST_CASE("performance is the mean trait") {
  const Phenotype ph{{96.9, 90.1, 63.7, 54.5, 48.1, 44.3, 35.3, 0, 0, 0}};
  CHECK(performance(ph) == doctest::Approx(43.29));
  CHECK(performance(Phenotype{std::vector<double>(7, 99.0)}) == doctest::Approx(99.0));
}

TEST_CASE("satisfactory threshold is inclusive at 99") {
  CHECK(is_satisfactory(99.0));
  CHECK(is_satisfactory(100.0));
  CHECK_FALSE(is_satisfactory(98.999));
  CHECK(is_satisfactory_solution(Phenotype{{99.0, 99.5}}));
  CHECK_FALSE(is_satisfactory_solution(Phenotype{{99.0, 98.9}}));
}

TEST_CASE("satisfactory trait coverage counts distinct indices") {
  const auto pop = evaluate_rows({{99.5, 1, 2, 3}, {1, 99.2, 0, 0}, {1, 99.9, 0, 0}, {98.9, 0, 0, 0}},
                                 DiagnosticKind::ContradictoryObjectives);
  CHECK(satisfactory_trait_coverage(pop) == 2u);
  const std::vector<Phenotype> archive{Phenotype{{0, 0, 0, 99.0}}};
  CHECK(satisfactory_trait_coverage(pop, archive) == 3u);
}

TEST_CASE("activation gene coverage counts distinct activation genes") {
  const auto pop = evaluate_rows({{5, 1, 2}, {1, 7, 0}, {1, 8, 0}, {0, 0, 3}},
                                 DiagnosticKind::MultiPathExploration);
  CHECK(activation_gene_coverage(pop) == 3u);
  const auto er = evaluate_rows({{5, 1, 2}}, DiagnosticKind::ExploitationRate);
  CHECK_FALSE(activation_gene_coverage(er).has_value());
}

TEST_CASE("activation gene recovered from an expressed phenotype") {
  Rng rng(23);
  for (auto d : kAllDiagnostics) {
    if (!has_activation_gene(d)) continue;
    for (int trial = 0; trial < 500; ++trial) {
      auto g = random_genotype(6, 0.0, 100.0, rng);
      if (trial % 50 == 0) g.genes.assign(6, 0.0);
      const auto ind = evaluate(g, DiagnosticSpec::make(d));
      REQUIRE(activation_from_phenotype(ind.phenotype) == *ind.activation_gene);
    }
  }
}

TEST_CASE("largest valley reached") {
  const auto& p = default_sawtooth();
  CHECK_FALSE(largest_valley_reached(Genotype{{5.0, 7.9}}, p).has_value());
  CHECK(largest_valley_reached(Genotype{{8.0}}, p) == 0u);
  CHECK(largest_valley_reached(Genotype{{1.0, 99.5}}, p) == 13u);
  CHECK(largest_valley_reached(Genotype{{18.0, 3.0}}, p) == 4u);
  CHECK(largest_valley_reached(Genotype{{22.99}}, p) == 4u);
}

TEST_CASE("best index prefers the lowest index on ties") {
  const auto pop = evaluate_rows({{1, 2}, {3, 0}, {2, 1}}, DiagnosticKind::ExploitationRate);
  CHECK(best_index(pop) == 0u);
}

TEST_CASE("snapshot fills only applicable fields") {
  const std::vector<std::vector<double>> rows{{20, 99.5, 3}, {1, 2, 3}};
  for (auto d : kAllDiagnostics) {
    const auto pop = evaluate_rows(rows, d);
    const auto rec = snapshot(pop, 7, DiagnosticSpec::make(d));
    CHECK(rec.generation == 7u);
    CHECK(rec.satisfactory_trait_coverage.has_value() == has_activation_gene(d));
    CHECK(rec.activation_gene_coverage.has_value() == has_activation_gene(d));
    CHECK(rec.largest_valley_reached.has_value() == has_valleys(d));
    CHECK_FALSE(rec.archive_size.has_value());
    CHECK(rec.best_total_fitness == doctest::Approx(rec.best_performance * 3));
  }
}

TEST_CASE("snapshot records archive size and optionally lets the archive compete") {
  const auto spec = DiagnosticSpec::make(DiagnosticKind::ContradictoryObjectives);
  const auto pop = evaluate_rows({{10, 0, 0}}, DiagnosticKind::ContradictoryObjectives);
  const std::vector<Phenotype> archive{Phenotype{{0, 99.5, 0}}};
  SnapshotOptions opts;
  opts.archive = &archive;
  auto rec = snapshot(pop, 0, spec, opts);
  CHECK(rec.archive_size == 1u);
  CHECK(rec.best_total_fitness == 10.0);
  CHECK(rec.satisfactory_trait_coverage == 0u);
  CHECK(rec.activation_gene_coverage == 1u);
  opts.include_archive = true;
  rec = snapshot(pop, 0, spec, opts);
  CHECK(rec.best_total_fitness == 99.5);
  CHECK(rec.satisfactory_trait_coverage == 1u);
  CHECK(rec.activation_gene_coverage == 2u);
}

TEST_CASE("coverage of the contradictory diagnostic is bounded by activation coverage") {
  Rng rng(21);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<std::vector<double>> rows(16, std::vector<double>(8));
    for (auto& r : rows)
      for (auto& v : r) v = rng.uniform(90.0, 100.0);
    const auto pop = evaluate_rows(rows, DiagnosticKind::ContradictoryObjectives);
    std::set<std::size_t> sat, act;
    for (const auto& ind : pop) {
      act.insert(*ind.activation_gene);
      for (std::size_t i = 0; i < 8; ++i) {
        if (ind.phenotype.traits[i] >= 99.0) sat.insert(i);
      }
    }
    REQUIRE(std::includes(act.begin(), act.end(), sat.begin(), sat.end()));
    REQUIRE(satisfactory_trait_coverage(pop) == sat.size());
    REQUIRE(activation_gene_coverage(pop) == act.size());
    REQUIRE(satisfactory_trait_coverage(pop) <= *activation_gene_coverage(pop));
  }
}

TEST_CASE("format_double round-trips") {
  Rng rng(22);
  for (int i = 0; i < 10000; ++i) {
    const double v = rng.uniform(-1e6, 1e6);
    REQUIRE(std::stod(format_double(v)) == v);
  }
  CHECK(format_double(43.29) == "43.29");
  CHECK(format_double(0.0) == "0");
}

TEST_CASE("record CSV round-trips") {
  std::vector<GenerationRecord> recs(3);
  recs[0].generation = 0;
  recs[0].best_performance = 0.1 + 0.2;
  recs[0].best_total_fitness = 3.0000000000000004;
  recs[1].generation = 10;
  recs[1].satisfactory_trait_coverage = 4;
  recs[1].activation_gene_coverage = 9;
  recs[2].generation = 20;
  recs[2].largest_valley_reached = 13;
  recs[2].archive_size = 1234;

  std::stringstream ss;
  write_records_csv(ss, recs);
  CHECK(ss.str().rfind(std::string(kRecordCsvHeader) + "\n", 0) == 0);
  std::stringstream in(ss.str());
  CHECK(read_records_csv(in) == recs);
}

TEST_CASE("record CSV rejects malformed input") {
  std::stringstream bad_header("gen,perf\n1,2\n");
  CHECK_THROWS_AS(read_records_csv(bad_header), std::runtime_error);
  std::stringstream bad_row(std::string(kRecordCsvHeader) + "\n1,x,2,,,,\n");
  CHECK_THROWS_AS(read_records_csv(bad_row), std::runtime_error);
}
