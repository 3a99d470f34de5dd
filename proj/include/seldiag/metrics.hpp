#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "seldiag/core.hpp"
#include "seldiag/diagnostics.hpp"

namespace seldiag {

inline constexpr double kSatisfactoryFraction = 0.99;

/// One row of per-generation tracking. Fields that do not apply to the
/// diagnostic (or scheme) are empty.
struct GenerationRecord {
  std::size_t generation = 0;
  double best_performance = 0.0;
  double best_total_fitness = 0.0;
  std::optional<std::size_t> satisfactory_trait_coverage;
  std::optional<std::size_t> activation_gene_coverage;
  std::optional<std::size_t> largest_valley_reached;
  std::optional<std::size_t> archive_size;

  bool operator==(const GenerationRecord&) const = default;
};

/// Average trait value.
double performance(const Phenotype& ph);

bool is_satisfactory(double trait);
/// Every trait satisfactory.
bool is_satisfactory_solution(const Phenotype& ph);
bool has_satisfactory_solution(const Population& pop);

/// Distinct trait indices that are satisfactory in at least one phenotype,
/// optionally counting archive phenotypes too.
std::size_t satisfactory_trait_coverage(const Population& pop,
                                        std::span<const Phenotype> archive = {});

/// Activation gene of an expressed phenotype from a diagnostic that has one:
/// the first nonzero trait, or 0 when every trait is zero.
std::size_t activation_from_phenotype(const Phenotype& ph);

/// Distinct activation genes in the population (plus archive phenotypes, if
/// given); empty when no member carries one.
std::optional<std::size_t> activation_gene_coverage(const Population& pop,
                                                    std::span<const Phenotype> archive = {});

/// Index of the highest peak reached by any gene (i.e. the number of fully
/// crossed valleys); empty when every gene is below the first peak.
std::optional<std::size_t> largest_valley_reached(const Genotype& g, const SawtoothParams& p);

/// Highest total fitness, lowest index on ties.
std::size_t best_index(const Population& pop);

struct SnapshotOptions {
  // Archive of a novelty-search run; its size is recorded when present.
  const std::vector<Phenotype>* archive = nullptr;
  // Let archive phenotypes compete for best performance and count toward
  // both coverages.
  bool include_archive = false;
};

GenerationRecord snapshot(const Population& pop, std::size_t generation,
                          const DiagnosticSpec& spec, const SnapshotOptions& options = {});

// --- CSV --------------------------------------------------------------------

inline constexpr const char* kRecordCsvHeader =
    "generation,best_performance,best_total_fitness,satisfactory_trait_coverage,"
    "activation_gene_coverage,largest_valley_reached,archive_size";

/// Shortest decimal form that parses back to the same double.
std::string format_double(double v);

void write_records_csv(std::ostream& out, std::span<const GenerationRecord> records);
/// Throws std::runtime_error naming the offending line on malformed input.
std::vector<GenerationRecord> read_records_csv(std::istream& in);

}  // namespace seldiag
