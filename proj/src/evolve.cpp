#include "seldiag/evolve.hpp"

#include <stdexcept>

namespace seldiag {

void ReplicateConfig::validate() const {
  if (pop_size < 1) throw ConfigError("population size must be at least 1");
  if (generations < 1) throw ConfigError("generations must be at least 1");
  if (dim < 1) throw ConfigError("dimensionality must be at least 1");
  if (record_stride < 1) throw ConfigError("record stride must be at least 1");
  if (!(init_lo < init_hi) || init_lo < kGeneLowerBound || init_hi > kGeneUpperBound) {
    throw ConfigError("initialization range must be a non-empty subrange of [0, 100]");
  }
  if (has_valleys(diagnostic.kind) != diagnostic.sawtooth.has_value()) {
    throw ConfigError("sawtooth parameters must be set exactly for valley diagnostics");
  }
  mutation.validate();
  scheme.validate(pop_size);
}

Population evaluate_all(const std::vector<Genotype>& genotypes, const DiagnosticSpec& spec) {
  Population pop;
  pop.reserve(genotypes.size());
  for (const auto& g : genotypes) pop.push_back(evaluate(g, spec));
  return pop;
}

Population run_generation(const Population& pop, const ReplicateConfig& config,
                          Selector& selector, Rng& rng) {
  const auto parents = selector.select(pop, pop.size(), rng);
  std::vector<Genotype> offspring;
  offspring.reserve(parents.size());
  for (std::size_t p : parents) {
    offspring.push_back(mutate(pop[p].genotype, config.mutation, rng));
  }
  return evaluate_all(offspring, config.diagnostic);
}

ReplicateResult run_replicate(const ReplicateConfig& config) {
  config.validate();
  Rng rng(config.seed);
  Selector selector(config.scheme);
  const bool novelty = config.scheme.kind == SchemeKind::NoveltySearch;

  std::vector<Genotype> initial;
  initial.reserve(config.pop_size);
  for (std::size_t i = 0; i < config.pop_size; ++i) {
    initial.push_back(random_genotype(config.dim, config.init_lo, config.init_hi, rng));
  }
  Population pop = evaluate_all(initial, config.diagnostic);

  ReplicateResult result;
  auto observe = [&](std::size_t gen, bool force_record) {
    if (!result.satisfactory_generation && has_satisfactory_solution(pop)) {
      result.satisfactory_generation = gen;
    }
    if (force_record || gen % config.record_stride == 0) {
      SnapshotOptions opts;
      if (novelty) opts.archive = &selector.novelty_state().archive;
      opts.include_archive = config.include_archive;
      result.records.push_back(snapshot(pop, gen, config.diagnostic, opts));
    }
  };

  for (std::size_t gen = 0; gen < config.generations; ++gen) {
    observe(gen, false);
    if (gen % 1000 == 0) {
      for (const auto& ind : pop) {
        if (!genotype_in_bounds(ind.genotype)) {
          throw std::logic_error("gene left [0, 100] at generation " + std::to_string(gen));
        }
      }
    }
    pop = run_generation(pop, config, selector, rng);
  }
  observe(config.generations, true);

  result.final_best = pop[best_index(pop)];
  result.final_archive_size = selector.novelty_state().archive.size();
  return result;
}

}  // namespace seldiag
