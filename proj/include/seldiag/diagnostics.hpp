#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "seldiag/core.hpp"

namespace seldiag {

enum class DiagnosticKind {
  ExploitationRate,
  OrderedExploitation,
  ContradictoryObjectives,
  MultiPathExploration,
  ValleyCrossing,
  OrderedExploitationValleys,
  ContradictoryObjectivesValleys,
  MultiPathValleys,
};

inline constexpr std::array<DiagnosticKind, 8> kAllDiagnostics = {
    DiagnosticKind::ExploitationRate,
    DiagnosticKind::OrderedExploitation,
    DiagnosticKind::ContradictoryObjectives,
    DiagnosticKind::MultiPathExploration,
    DiagnosticKind::ValleyCrossing,
    DiagnosticKind::OrderedExploitationValleys,
    DiagnosticKind::ContradictoryObjectivesValleys,
    DiagnosticKind::MultiPathValleys,
};

std::string_view to_string(DiagnosticKind kind);
/// Throws ConfigError listing the valid names.
DiagnosticKind parse_diagnostic(std::string_view name);

bool has_valleys(DiagnosticKind kind);
bool has_activation_gene(DiagnosticKind kind);
/// The valley-free diagnostic a valley variant is built on (identity otherwise).
DiagnosticKind base_diagnostic(DiagnosticKind kind);

/// Sawtooth transform. Peaks sit at v_initial + k(k+1)/2 for every k that
/// stays within the upper bound; valley k has width k + 1.
class SawtoothParams {
 public:
  static constexpr double kDescentSlope = -1.0;

  explicit SawtoothParams(double v_initial = 8.0, double upper = kGeneUpperBound);

  double v_initial() const { return v_initial_; }
  double upper() const { return upper_; }
  std::span<const double> peaks() const { return peaks_; }

 private:
  double v_initial_;
  double upper_;
  std::vector<double> peaks_;
};

/// Default parameters; checked once against the published 14-peak schedule.
const SawtoothParams& default_sawtooth();

double sawtooth(double v, const SawtoothParams& p);

struct DiagnosticSpec {
  DiagnosticKind kind = DiagnosticKind::ExploitationRate;
  // Present iff kind has valleys.
  std::optional<SawtoothParams> sawtooth;

  static DiagnosticSpec make(DiagnosticKind kind);
};

struct Translation {
  Phenotype phenotype;
  std::optional<std::size_t> activation;
};

Phenotype exploitation_rate(const Genotype& g);
Phenotype ordered_exploitation(const Genotype& g);
Translation contradictory_objectives(const Genotype& g);
Translation multipath_exploration(const Genotype& g);

/// Index of the largest gene, lowest index on ties.
std::size_t activation_index(std::span<const double> genes);

Phenotype apply_valleys(const Phenotype& base, const SawtoothParams& p);

Individual evaluate(const Genotype& g, const DiagnosticSpec& spec);

}  // namespace seldiag
