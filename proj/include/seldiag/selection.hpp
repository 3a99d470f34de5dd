#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "seldiag/core.hpp"
#include "seldiag/rng.hpp"

namespace seldiag {

enum class SchemeKind {
  Truncation,
  Tournament,
  SharingGenotypic,
  SharingPhenotypic,
  Lexicase,
  NondominatedSorting,
  NoveltySearch,
  Random,
};

inline constexpr std::array<SchemeKind, 8> kAllSchemes = {
    SchemeKind::Truncation,        SchemeKind::Tournament,
    SchemeKind::SharingGenotypic,  SchemeKind::SharingPhenotypic,
    SchemeKind::Lexicase,          SchemeKind::NondominatedSorting,
    SchemeKind::NoveltySearch,     SchemeKind::Random,
};

std::string_view to_string(SchemeKind kind);
/// Throws ConfigError listing the valid names.
SchemeKind parse_scheme(std::string_view name);

struct NoveltyParams {
  std::size_t k = 15;
  double pmin_initial = 10.0;
  std::size_t save_period = 200;   // expected generations between random saves
  std::size_t burst_limit = 4;     // threshold additions above this raise pmin
  double raise_factor = 1.25;
  std::size_t decay_window = 500;  // generations without additions before pmin decays
  double decay_factor = 0.95;
  std::size_t tournament_size = 2;
};

/// Mutable per-replicate novelty state. The archive only grows.
struct NoveltyState {
  double pmin = 10.0;
  std::vector<Phenotype> archive;
  std::size_t generations_since_add = 0;
};

struct SchemeParams {
  SchemeKind kind = SchemeKind::Tournament;
  std::size_t truncation_size = 8;
  std::size_t tournament_size = 8;
  double sigma = 0.3;
  double alpha = 1.0;
  // Divide Euclidean distances by the space diameter 100 * sqrt(D) before
  // comparing with sigma.
  bool normalize_distance = true;
  NoveltyParams novelty;

  void validate(std::size_t pop_size) const;
};

enum class SimilarityMetric { Genotypic, Phenotypic };

// --- primitives -----------------------------------------------------------

std::vector<std::size_t> truncation_select(std::span<const double> fitness, std::size_t tr,
                                           std::size_t n, Rng& rng);

std::vector<std::size_t> tournament_select(std::span<const double> scores, std::size_t ts,
                                           std::size_t n, Rng& rng);

std::vector<std::size_t> random_select(std::size_t pop_size, std::size_t n, Rng& rng);

/// Stochastic remainder selection with replacement. Negative weights count
/// as zero; all-zero weights fall back to uniform draws.
std::vector<std::size_t> stochastic_remainder(std::span<const double> weights, std::size_t n,
                                              Rng& rng);

/// Sharing kernel S(d). sigma == 0 disables sharing (S == 0 everywhere).
double sharing_kernel(double d, double sigma, double alpha);

double euclidean_distance(std::span<const double> a, std::span<const double> b);

/// Diameter of [0, 100]^dim, used to normalize sharing distances.
double space_diameter(std::size_t dim);

/// Niche count m_x for every point, self term included. All counts are 1
/// when sigma == 0. `scale` divides each raw distance.
std::vector<double> niche_counts(std::span<const std::vector<double>> points, double sigma,
                                 double alpha, double scale);

std::vector<double> shared_fitness(std::span<const double> fitness,
                                   std::span<const std::vector<double>> points, double sigma,
                                   double alpha, double scale);

std::vector<std::size_t> fitness_sharing_select(const Population& pop, SimilarityMetric metric,
                                                double sigma, double alpha, bool normalize,
                                                std::size_t n, Rng& rng);

/// Runs one lexicase filter with a fixed case order; returns the survivors.
std::vector<std::size_t> lexicase_survivors(std::span<const std::vector<double>> scores,
                                            std::span<const std::size_t> case_order);

std::vector<std::size_t> lexicase_select(std::span<const std::vector<double>> scores,
                                         std::size_t n, Rng& rng);

/// Pareto dominance on maximized traits. Throws std::invalid_argument on
/// length mismatch.
bool dominates(std::span<const double> x, std::span<const double> y);

struct FrontAssignment {
  std::vector<std::vector<std::size_t>> fronts;
  std::vector<double> shared_fitness;
};

std::vector<std::vector<std::size_t>> nondominated_fronts(
    std::span<const std::vector<double>> scores);

/// Front ranking plus within-front phenotypic sharing. Front 0 starts at
/// dummy fitness N; each later front starts at 0.99 of the previous front's
/// smallest shared fitness.
FrontAssignment nsga_fitness(std::span<const std::vector<double>> scores, double sigma,
                             double alpha, bool normalize);

std::vector<std::size_t> nsga_select(std::span<const std::vector<double>> scores, double sigma,
                                     double alpha, bool normalize, std::size_t n, Rng& rng);

/// Mean distance to the k nearest neighbours among the population (minus
/// the point itself) and the archive. Fewer than k neighbours: mean over
/// what exists; none: 0.
std::vector<double> novelty_scores(std::span<const std::vector<double>> pop,
                                   std::span<const Phenotype> archive, std::size_t k);

/// Updates the archive and pmin, then runs size-2 tournaments on novelty.
std::vector<std::size_t> novelty_select(const Population& pop, const NoveltyParams& params,
                                        NoveltyState& state, std::size_t n, Rng& rng);

/// Archive bookkeeping for one generation; returns the number of threshold
/// additions. Exposed for tests.
std::size_t update_novelty_archive(const Population& pop, std::span<const double> scores,
                                   const NoveltyParams& params, NoveltyState& state, Rng& rng);

// --- scheme dispatch --------------------------------------------------------

/// A configured selection scheme plus whatever state it carries between
/// generations (only novelty search has any).
class Selector {
 public:
  explicit Selector(SchemeParams params);

  std::vector<std::size_t> select(const Population& pop, std::size_t n, Rng& rng);

  const SchemeParams& params() const { return params_; }
  const NoveltyState& novelty_state() const { return novelty_; }

 private:
  SchemeParams params_;
  NoveltyState novelty_;
};

// Row views used by the multi-objective schemes.
std::vector<std::vector<double>> phenotype_matrix(const Population& pop);
std::vector<std::vector<double>> genotype_matrix(const Population& pop);
std::vector<double> total_fitness(const Population& pop);

}  // namespace seldiag
