#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "seldiag/core.hpp"
#include "seldiag/diagnostics.hpp"
#include "seldiag/metrics.hpp"
#include "seldiag/rng.hpp"
#include "seldiag/selection.hpp"

namespace seldiag {

struct ReplicateConfig {
  DiagnosticSpec diagnostic = DiagnosticSpec::make(DiagnosticKind::ExploitationRate);
  SchemeParams scheme;
  std::size_t pop_size = kDefaultPopulationSize;
  std::size_t generations = 50'000;
  std::size_t dim = kDefaultDimensionality;
  MutationParams mutation;
  double init_lo = 0.0;
  double init_hi = 1.0;
  std::uint64_t seed = 0;
  std::size_t record_stride = 1;
  // Novelty search only: archive phenotypes count toward best performance
  // and both coverages.
  bool include_archive = true;

  void validate() const;
};

struct ReplicateResult {
  std::vector<GenerationRecord> records;
  // First generation whose population holds a solution with every trait
  // satisfactory.
  std::optional<std::size_t> satisfactory_generation;
  Individual final_best;
  std::size_t final_archive_size = 0;
};

Population evaluate_all(const std::vector<Genotype>& genotypes, const DiagnosticSpec& spec);

/// Select N parents and return their mutated, evaluated offspring.
Population run_generation(const Population& pop, const ReplicateConfig& config,
                          Selector& selector, Rng& rng);

ReplicateResult run_replicate(const ReplicateConfig& config);

}  // namespace seldiag
