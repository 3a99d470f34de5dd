#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "seldiag/rng.hpp"

namespace seldiag {

inline constexpr double kGeneLowerBound = 0.0;
inline constexpr double kGeneUpperBound = 100.0;
inline constexpr std::size_t kDefaultDimensionality = 100;
inline constexpr std::size_t kDefaultPopulationSize = 512;

/// Raised for invalid user-facing parameters (bad ranges, unknown names).
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Heritable state: D genes, each in [0, 100].
struct Genotype {
  std::vector<double> genes;

  std::size_t size() const { return genes.size(); }
  bool operator==(const Genotype&) const = default;
};

/// Output of a diagnostic for one genotype; same length as the genotype.
struct Phenotype {
  std::vector<double> traits;

  std::size_t size() const { return traits.size(); }
  bool operator==(const Phenotype&) const = default;
};

struct Individual {
  Genotype genotype;
  Phenotype phenotype;
  double total_fitness = 0.0;
  // Set only by diagnostics with an activation gene.
  std::optional<std::size_t> activation_gene;
};

using Population = std::vector<Individual>;

struct MutationParams {
  double per_gene_rate = 0.007;
  double step_stddev = 1.0;
  double lower = kGeneLowerBound;
  double upper = kGeneUpperBound;

  /// Throws ConfigError when a field is out of range.
  void validate() const;
};

bool genotype_in_bounds(const Genotype& g, double lo = kGeneLowerBound,
                        double hi = kGeneUpperBound);

/// Draws dim genes independently and uniformly on [lo, hi).
Genotype random_genotype(std::size_t dim, double lo, double hi, Rng& rng);

/// Reflects a value back across whichever bound it crossed, then clamps.
double rebound(double value, double lo, double hi);

Genotype mutate(const Genotype& g, const MutationParams& params, Rng& rng);

}  // namespace seldiag
