#include "seldiag/core.hpp"

#include <algorithm>

namespace seldiag {

void MutationParams::validate() const {
  if (!(per_gene_rate >= 0.0 && per_gene_rate <= 1.0)) {
    throw ConfigError("mutation rate must lie in [0, 1], got " + std::to_string(per_gene_rate));
  }
  if (!(step_stddev > 0.0)) {
    throw ConfigError("mutation step stddev must be positive, got " + std::to_string(step_stddev));
  }
  if (!(lower < upper)) {
    throw ConfigError("mutation bounds must satisfy lower < upper");
  }
}

bool genotype_in_bounds(const Genotype& g, double lo, double hi) {
  return std::all_of(g.genes.begin(), g.genes.end(),
                     [lo, hi](double v) { return v >= lo && v <= hi; });
}

Genotype random_genotype(std::size_t dim, double lo, double hi, Rng& rng) {
  if (dim == 0) throw ConfigError("dimensionality must be at least 1");
  if (!(lo < hi)) {
    throw ConfigError("initialization range is empty: [" + std::to_string(lo) + ", " +
                      std::to_string(hi) + ")");
  }
  if (lo < kGeneLowerBound || hi > kGeneUpperBound) {
    throw ConfigError("initialization range must lie within [0, 100]");
  }
  Genotype g;
  g.genes.resize(dim);
  for (double& gene : g.genes) gene = rng.uniform(lo, hi);
  return g;
}

double rebound(double value, double lo, double hi) {
  if (value < lo) {
    value = lo + (lo - value);
  } else if (value > hi) {
    value = hi - (value - hi);
  }
  return std::clamp(value, lo, hi);
}

Genotype mutate(const Genotype& g, const MutationParams& params, Rng& rng) {
  Genotype child = g;
  for (double& gene : child.genes) {
    if (rng.bernoulli(params.per_gene_rate)) {
      gene = rebound(gene + rng.normal(0.0, params.step_stddev), params.lower, params.upper);
    }
  }
  return child;
}

}  // namespace seldiag
