#include "seldiag/selection.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace seldiag {

namespace {

constexpr std::array<std::string_view, 8> kSchemeNames = {
    "truncation", "tournament", "sharing-genotypic", "sharing-phenotypic",
    "lexicase",   "nsga",       "novelty",           "random",
};

// Uniform pick among tied maxima via reservoir sampling; the RNG is touched
// only when a tie actually occurs.
class ArgmaxRandomTies {
 public:
  void offer(std::size_t idx, double value, Rng& rng) {
    if (ties_ == 0 || value > best_value_) {
      best_ = idx;
      best_value_ = value;
      ties_ = 1;
    } else if (value == best_value_) {
      ++ties_;
      if (rng.index(ties_) == 0) best_ = idx;
    }
  }
  std::size_t best() const { return best_; }

 private:
  std::size_t best_ = 0;
  double best_value_ = 0.0;
  std::size_t ties_ = 0;
};

double squared_distance(std::span<const double> a, std::span<const double> b) {
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    sum += d * d;
  }
  return sum;
}

}  // namespace

std::string_view to_string(SchemeKind kind) { return kSchemeNames[static_cast<std::size_t>(kind)]; }

SchemeKind parse_scheme(std::string_view name) {
  for (std::size_t i = 0; i < kSchemeNames.size(); ++i) {
    if (kSchemeNames[i] == name) return kAllSchemes[i];
  }
  std::string msg = "unknown scheme '" + std::string(name) + "'; valid names:";
  for (auto n : kSchemeNames) msg += " " + std::string(n);
  throw ConfigError(msg);
}

void SchemeParams::validate(std::size_t pop_size) const {
  if (kind == SchemeKind::Truncation && (truncation_size < 1 || truncation_size > pop_size)) {
    throw ConfigError("truncation size must lie in [1, population size]");
  }
  if (kind == SchemeKind::Tournament && (tournament_size < 1 || tournament_size > pop_size)) {
    throw ConfigError("tournament size must lie in [1, population size]");
  }
  if (!(sigma >= 0.0)) throw ConfigError("sigma must be non-negative");
  if (!(alpha > 0.0)) throw ConfigError("alpha must be positive");
  if (novelty.k < 1) throw ConfigError("novelty k must be at least 1");
  if (!(novelty.pmin_initial > 0.0)) throw ConfigError("novelty pmin must be positive");
  if (novelty.tournament_size < 1) throw ConfigError("novelty tournament size must be >= 1");
  if (novelty.save_period < 1) throw ConfigError("novelty save period must be >= 1");
  if (!(novelty.raise_factor > 0.0) || !(novelty.decay_factor > 0.0)) {
    throw ConfigError("novelty pmin factors must be positive");
  }
}

// --- fitness-based ----------------------------------------------------------

std::vector<std::size_t> truncation_select(std::span<const double> fitness, std::size_t tr,
                                           std::size_t n, Rng& rng) {
  if (tr < 1 || tr > fitness.size()) {
    throw ConfigError("truncation size " + std::to_string(tr) + " outside [1, " +
                      std::to_string(fitness.size()) + "]");
  }
  std::vector<std::size_t> order(fitness.size());
  std::iota(order.begin(), order.end(), 0);
  // Shuffle then stable sort: ties end up in random order.
  rng.shuffle(std::span(order));
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return fitness[a] > fitness[b]; });

  std::vector<std::size_t> parents(n);
  for (std::size_t s = 0; s < n; ++s) parents[s] = order[s % tr];
  return parents;
}

std::vector<std::size_t> tournament_select(std::span<const double> scores, std::size_t ts,
                                           std::size_t n, Rng& rng) {
  if (scores.empty()) throw std::invalid_argument("tournament on empty population");
  if (ts < 1) throw ConfigError("tournament size must be at least 1");
  std::vector<std::size_t> parents(n);
  for (auto& parent : parents) {
    ArgmaxRandomTies pick;
    for (std::size_t j = 0; j < ts; ++j) {
      const std::size_t idx = rng.index(scores.size());
      pick.offer(idx, scores[idx], rng);
    }
    parent = pick.best();
  }
  return parents;
}

std::vector<std::size_t> random_select(std::size_t pop_size, std::size_t n, Rng& rng) {
  if (pop_size == 0) throw std::invalid_argument("random selection on empty population");
  std::vector<std::size_t> parents(n);
  for (auto& p : parents) p = rng.index(pop_size);
  return parents;
}

std::vector<std::size_t> stochastic_remainder(std::span<const double> weights, std::size_t n,
                                              Rng& rng) {
  if (weights.empty()) throw std::invalid_argument("stochastic remainder on empty population");
  double total = 0.0;
  for (double w : weights) total += std::max(w, 0.0);
  if (!(total > 0.0)) return random_select(weights.size(), n, rng);

  std::vector<std::size_t> parents;
  parents.reserve(n);
  std::vector<double> fractions(weights.size());
  const double per_unit = static_cast<double>(n) / total;
  for (std::size_t i = 0; i < weights.size() && parents.size() < n; ++i) {
    const double expected = std::max(weights[i], 0.0) * per_unit;
    const double whole = std::floor(expected);
    fractions[i] = expected - whole;
    const auto copies = std::min(static_cast<std::size_t>(whole), n - parents.size());
    parents.insert(parents.end(), copies, i);
  }
  if (parents.size() == n) return parents;

  std::vector<double> cumulative(fractions.size());
  std::partial_sum(fractions.begin(), fractions.end(), cumulative.begin());
  const double frac_total = cumulative.back();
  while (parents.size() < n) {
    if (!(frac_total > 0.0)) {
      // Only reachable through rounding in the floor step.
      parents.push_back(rng.index(weights.size()));
      continue;
    }
    const double r = rng.uniform(0.0, frac_total);
    auto it = std::upper_bound(cumulative.begin(), cumulative.end(), r);
    if (it == cumulative.end()) --it;
    parents.push_back(static_cast<std::size_t>(it - cumulative.begin()));
  }
  return parents;
}

// --- fitness sharing --------------------------------------------------------

double sharing_kernel(double d, double sigma, double alpha) {
  if (sigma <= 0.0 || d >= sigma) return 0.0;
  return 1.0 - std::pow(d / sigma, alpha);
}

double euclidean_distance(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw std::invalid_argument("distance between unequal lengths");
  return std::sqrt(squared_distance(a, b));
}

double space_diameter(std::size_t dim) {
  return kGeneUpperBound * std::sqrt(static_cast<double>(dim));
}

std::vector<double> niche_counts(std::span<const std::vector<double>> points, double sigma,
                                 double alpha, double scale) {
  std::vector<double> m(points.size(), 1.0);
  if (sigma <= 0.0) return m;
  // Compare squared raw distances against the raw cutoff first; most pairs
  // in a spread population are outside the niche.
  const double cutoff = sigma * scale;
  const double cutoff_sq = cutoff * cutoff;
  for (std::size_t i = 0; i < points.size(); ++i) {
    for (std::size_t j = i + 1; j < points.size(); ++j) {
      const double d2 = squared_distance(points[i], points[j]);
      if (d2 >= cutoff_sq) continue;
      const double s = sharing_kernel(std::sqrt(d2) / scale, sigma, alpha);
      m[i] += s;
      m[j] += s;
    }
  }
  return m;
}

std::vector<double> shared_fitness(std::span<const double> fitness,
                                   std::span<const std::vector<double>> points, double sigma,
                                   double alpha, double scale) {
  auto m = niche_counts(points, sigma, alpha, scale);
  for (std::size_t i = 0; i < m.size(); ++i) m[i] = fitness[i] / m[i];
  return m;
}

std::vector<std::size_t> fitness_sharing_select(const Population& pop, SimilarityMetric metric,
                                                double sigma, double alpha, bool normalize,
                                                std::size_t n, Rng& rng) {
  if (pop.empty()) throw std::invalid_argument("fitness sharing on empty population");
  const auto points =
      metric == SimilarityMetric::Genotypic ? genotype_matrix(pop) : phenotype_matrix(pop);
  const double scale = normalize ? space_diameter(points.front().size()) : 1.0;
  const auto fitness = total_fitness(pop);
  return stochastic_remainder(shared_fitness(fitness, points, sigma, alpha, scale), n, rng);
}

// --- lexicase ---------------------------------------------------------------

std::vector<std::size_t> lexicase_survivors(std::span<const std::vector<double>> scores,
                                            std::span<const std::size_t> case_order) {
  std::vector<std::size_t> candidates(scores.size());
  std::iota(candidates.begin(), candidates.end(), 0);
  for (std::size_t c : case_order) {
    if (candidates.size() <= 1) break;
    double best = scores[candidates.front()][c];
    for (std::size_t idx : candidates) best = std::max(best, scores[idx][c]);
    std::erase_if(candidates, [&](std::size_t idx) { return scores[idx][c] != best; });
  }
  return candidates;
}

std::vector<std::size_t> lexicase_select(std::span<const std::vector<double>> scores,
                                         std::size_t n, Rng& rng) {
  if (scores.empty()) throw std::invalid_argument("lexicase on empty population");
  std::vector<std::size_t> cases(scores.front().size());
  std::vector<std::size_t> parents(n);
  for (auto& parent : parents) {
    std::iota(cases.begin(), cases.end(), 0);
    rng.shuffle(std::span(cases));
    const auto survivors = lexicase_survivors(scores, cases);
    parent = survivors.size() == 1 ? survivors.front() : survivors[rng.index(survivors.size())];
  }
  return parents;
}

// --- nondominated sorting ---------------------------------------------------

bool dominates(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw std::invalid_argument("dominance between unequal lengths");
  bool strictly_better = false;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] < y[i]) return false;
    if (x[i] > y[i]) strictly_better = true;
  }
  return strictly_better;
}

std::vector<std::vector<std::size_t>> nondominated_fronts(
    std::span<const std::vector<double>> scores) {
  const std::size_t n = scores.size();
  std::vector<std::vector<std::size_t>> dominated_by_me(n);
  std::vector<std::size_t> domination_count(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (dominates(scores[i], scores[j])) {
        dominated_by_me[i].push_back(j);
        ++domination_count[j];
      } else if (dominates(scores[j], scores[i])) {
        dominated_by_me[j].push_back(i);
        ++domination_count[i];
      }
    }
  }

  std::vector<std::vector<std::size_t>> fronts;
  std::vector<std::size_t> current;
  for (std::size_t i = 0; i < n; ++i) {
    if (domination_count[i] == 0) current.push_back(i);
  }
  while (!current.empty()) {
    std::vector<std::size_t> next;
    for (std::size_t i : current) {
      for (std::size_t j : dominated_by_me[i]) {
        if (--domination_count[j] == 0) next.push_back(j);
      }
    }
    fronts.push_back(std::move(current));
    current = std::move(next);
  }
  return fronts;
}

FrontAssignment nsga_fitness(std::span<const std::vector<double>> scores, double sigma,
                             double alpha, bool normalize) {
  constexpr double kFrontDecay = 0.99;
  FrontAssignment out;
  out.fronts = nondominated_fronts(scores);
  out.shared_fitness.assign(scores.size(), 0.0);
  if (scores.empty()) return out;

  const double scale = normalize ? space_diameter(scores.front().size()) : 1.0;
  double dummy = static_cast<double>(scores.size());
  std::vector<std::vector<double>> members;
  for (const auto& front : out.fronts) {
    members.clear();
    for (std::size_t idx : front) members.push_back(scores[idx]);
    const auto m = niche_counts(members, sigma, alpha, scale);
    double lowest = dummy;
    for (std::size_t i = 0; i < front.size(); ++i) {
      const double shared = dummy / m[i];
      out.shared_fitness[front[i]] = shared;
      lowest = std::min(lowest, shared);
    }
    dummy = kFrontDecay * lowest;
  }
  return out;
}

std::vector<std::size_t> nsga_select(std::span<const std::vector<double>> scores, double sigma,
                                     double alpha, bool normalize, std::size_t n, Rng& rng) {
  return stochastic_remainder(nsga_fitness(scores, sigma, alpha, normalize).shared_fitness, n,
                              rng);
}

// --- novelty search ---------------------------------------------------------

std::vector<double> novelty_scores(std::span<const std::vector<double>> pop,
                                   std::span<const Phenotype> archive, std::size_t k) {
  const std::size_t n = pop.size();
  // Pairwise squared distances inside the population, filled symmetrically.
  std::vector<double> pair(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      pair[i * n + j] = pair[j * n + i] = squared_distance(pop[i], pop[j]);
    }
  }

  std::vector<double> scores(n, 0.0);
  std::vector<double> pool;
  pool.reserve(n + archive.size());
  for (std::size_t i = 0; i < n; ++i) {
    pool.clear();
    for (std::size_t j = 0; j < n; ++j) {
      if (j != i) pool.push_back(pair[i * n + j]);
    }
    for (const auto& a : archive) pool.push_back(squared_distance(pop[i], a.traits));
    if (pool.empty()) continue;
    const std::size_t take = std::min(k, pool.size());
    std::nth_element(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(take - 1),
                     pool.end());
    // Sum in sorted order so the result does not depend on nth_element's
    // internal arrangement.
    std::sort(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(take));
    double sum = 0.0;
    for (std::size_t t = 0; t < take; ++t) sum += std::sqrt(pool[t]);
    scores[i] = sum / static_cast<double>(take);
  }
  return scores;
}

std::size_t update_novelty_archive(const Population& pop, std::span<const double> scores,
                                   const NoveltyParams& params, NoveltyState& state, Rng& rng) {
  std::size_t added = 0;
  for (std::size_t i = 0; i < pop.size(); ++i) {
    if (scores[i] > state.pmin) {
      state.archive.push_back(pop[i].phenotype);
      ++added;
    }
  }
  if (added > params.burst_limit) state.pmin *= params.raise_factor;

  if (added == 0) {
    if (++state.generations_since_add >= params.decay_window) {
      state.pmin *= params.decay_factor;
      state.generations_since_add = 0;
    }
  } else {
    state.generations_since_add = 0;
  }

  if (!pop.empty() && rng.bernoulli(1.0 / static_cast<double>(params.save_period))) {
    state.archive.push_back(pop[rng.index(pop.size())].phenotype);
  }
  return added;
}

std::vector<std::size_t> novelty_select(const Population& pop, const NoveltyParams& params,
                                        NoveltyState& state, std::size_t n, Rng& rng) {
  const auto matrix = phenotype_matrix(pop);
  const auto scores = novelty_scores(matrix, state.archive, params.k);
  update_novelty_archive(pop, scores, params, state, rng);
  return tournament_select(scores, params.tournament_size, n, rng);
}

// --- dispatch ---------------------------------------------------------------

Selector::Selector(SchemeParams params) : params_(std::move(params)) {
  novelty_.pmin = params_.novelty.pmin_initial;
}

std::vector<std::size_t> Selector::select(const Population& pop, std::size_t n, Rng& rng) {
  switch (params_.kind) {
    case SchemeKind::Truncation:
      return truncation_select(total_fitness(pop), params_.truncation_size, n, rng);
    case SchemeKind::Tournament:
      return tournament_select(total_fitness(pop), params_.tournament_size, n, rng);
    case SchemeKind::SharingGenotypic:
      return fitness_sharing_select(pop, SimilarityMetric::Genotypic, params_.sigma,
                                    params_.alpha, params_.normalize_distance, n, rng);
    case SchemeKind::SharingPhenotypic:
      return fitness_sharing_select(pop, SimilarityMetric::Phenotypic, params_.sigma,
                                    params_.alpha, params_.normalize_distance, n, rng);
    case SchemeKind::Lexicase:
      return lexicase_select(phenotype_matrix(pop), n, rng);
    case SchemeKind::NondominatedSorting:
      return nsga_select(phenotype_matrix(pop), params_.sigma, params_.alpha,
                         params_.normalize_distance, n, rng);
    case SchemeKind::NoveltySearch:
      return novelty_select(pop, params_.novelty, novelty_, n, rng);
    case SchemeKind::Random:
      return random_select(pop.size(), n, rng);
  }
  throw std::logic_error("unreachable scheme kind");
}

std::vector<std::vector<double>> phenotype_matrix(const Population& pop) {
  std::vector<std::vector<double>> out;
  out.reserve(pop.size());
  for (const auto& ind : pop) out.push_back(ind.phenotype.traits);
  return out;
}

std::vector<std::vector<double>> genotype_matrix(const Population& pop) {
  std::vector<std::vector<double>> out;
  out.reserve(pop.size());
  for (const auto& ind : pop) out.push_back(ind.genotype.genes);
  return out;
}

std::vector<double> total_fitness(const Population& pop) {
  std::vector<double> out;
  out.reserve(pop.size());
  for (const auto& ind : pop) out.push_back(ind.total_fitness);
  return out;
}

}  // namespace seldiag
