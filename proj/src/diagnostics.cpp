#include "seldiag/diagnostics.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace seldiag {

namespace {

constexpr std::array<std::string_view, 8> kDiagnosticNames = {
    "exploitation-rate",
    "ordered-exploitation",
    "contradictory-objectives",
    "multipath-exploration",
    "valley-crossing",
    "ordered-exploitation-valleys",
    "contradictory-objectives-valleys",
    "multipath-valleys",
};

constexpr std::array<double, 14> kPublishedPeaks = {8.0,  9.0,  11.0, 14.0, 18.0, 23.0, 29.0,
                                                    36.0, 44.0, 53.0, 63.0, 74.0, 86.0, 99.0};

// Length of the non-increasing run of genes starting at `start`.
std::size_t descending_run(std::span<const double> genes, std::size_t start) {
  std::size_t end = start + 1;
  while (end < genes.size() && genes[end] <= genes[end - 1]) ++end;
  return end - start;
}

Phenotype copy_region(const Genotype& g, std::size_t start, std::size_t length) {
  Phenotype ph;
  ph.traits.assign(g.size(), 0.0);
  std::copy_n(g.genes.begin() + static_cast<std::ptrdiff_t>(start), length,
              ph.traits.begin() + static_cast<std::ptrdiff_t>(start));
  return ph;
}

}  // namespace

std::string_view to_string(DiagnosticKind kind) {
  return kDiagnosticNames[static_cast<std::size_t>(kind)];
}

DiagnosticKind parse_diagnostic(std::string_view name) {
  for (std::size_t i = 0; i < kDiagnosticNames.size(); ++i) {
    if (kDiagnosticNames[i] == name) return kAllDiagnostics[i];
  }
  std::string msg = "unknown diagnostic '" + std::string(name) + "'; valid names:";
  for (auto n : kDiagnosticNames) msg += " " + std::string(n);
  throw ConfigError(msg);
}

bool has_valleys(DiagnosticKind kind) {
  return static_cast<int>(kind) >= static_cast<int>(DiagnosticKind::ValleyCrossing);
}

bool has_activation_gene(DiagnosticKind kind) {
  switch (base_diagnostic(kind)) {
    case DiagnosticKind::ContradictoryObjectives:
    case DiagnosticKind::MultiPathExploration:
      return true;
    default:
      return false;
  }
}

DiagnosticKind base_diagnostic(DiagnosticKind kind) {
  switch (kind) {
    case DiagnosticKind::ValleyCrossing: return DiagnosticKind::ExploitationRate;
    case DiagnosticKind::OrderedExploitationValleys: return DiagnosticKind::OrderedExploitation;
    case DiagnosticKind::ContradictoryObjectivesValleys:
      return DiagnosticKind::ContradictoryObjectives;
    case DiagnosticKind::MultiPathValleys: return DiagnosticKind::MultiPathExploration;
    default: return kind;
  }
}

SawtoothParams::SawtoothParams(double v_initial, double upper)
    : v_initial_(v_initial), upper_(upper) {
  if (!(v_initial >= 0.0 && v_initial < upper)) {
    throw ConfigError("sawtooth requires 0 <= v_initial < upper");
  }
  for (std::size_t k = 0;; ++k) {
    const double peak = v_initial + static_cast<double>(k * (k + 1) / 2);
    if (peak > upper) break;
    peaks_.push_back(peak);
  }
}

const SawtoothParams& default_sawtooth() {
  static const SawtoothParams params = [] {
    SawtoothParams p;
    if (!std::equal(p.peaks().begin(), p.peaks().end(), kPublishedPeaks.begin(),
                    kPublishedPeaks.end())) {
      throw std::logic_error("sawtooth peak schedule does not match the 14 published peaks");
    }
    return p;
  }();
  return params;
}

double sawtooth(double v, const SawtoothParams& p) {
  if (!(v >= 0.0 && v <= p.upper())) {
    throw std::domain_error("sawtooth input " + std::to_string(v) + " outside [0, upper]");
  }
  if (v <= p.v_initial()) return v;
  const auto peaks = p.peaks();
  // Last peak at or below v; exists because v > v_initial == peaks[0].
  const double peak = *(std::upper_bound(peaks.begin(), peaks.end(), v) - 1);
  return peak + SawtoothParams::kDescentSlope * (v - peak);
}

DiagnosticSpec DiagnosticSpec::make(DiagnosticKind kind) {
  DiagnosticSpec spec;
  spec.kind = kind;
  if (has_valleys(kind)) spec.sawtooth = default_sawtooth();
  return spec;
}

std::size_t activation_index(std::span<const double> genes) {
  return static_cast<std::size_t>(std::max_element(genes.begin(), genes.end()) - genes.begin());
}

Phenotype exploitation_rate(const Genotype& g) { return Phenotype{g.genes}; }

Phenotype ordered_exploitation(const Genotype& g) {
  if (g.size() == 0) return {};
  return copy_region(g, 0, descending_run(g.genes, 0));
}

Translation contradictory_objectives(const Genotype& g) {
  if (g.size() == 0) return {};
  const std::size_t a = activation_index(g.genes);
  return {copy_region(g, a, 1), a};
}

Translation multipath_exploration(const Genotype& g) {
  if (g.size() == 0) return {};
  const std::size_t a = activation_index(g.genes);
  return {copy_region(g, a, descending_run(g.genes, a)), a};
}

Phenotype apply_valleys(const Phenotype& base, const SawtoothParams& p) {
  Phenotype out = base;
  for (double& t : out.traits) t = sawtooth(t, p);
  return out;
}

Individual evaluate(const Genotype& g, const DiagnosticSpec& spec) {
  Translation tr;
  switch (base_diagnostic(spec.kind)) {
    case DiagnosticKind::ExploitationRate: tr.phenotype = exploitation_rate(g); break;
    case DiagnosticKind::OrderedExploitation: tr.phenotype = ordered_exploitation(g); break;
    case DiagnosticKind::ContradictoryObjectives: tr = contradictory_objectives(g); break;
    case DiagnosticKind::MultiPathExploration: tr = multipath_exploration(g); break;
    default: throw std::logic_error("unreachable diagnostic kind");
  }
  if (has_valleys(spec.kind)) {
    tr.phenotype = apply_valleys(tr.phenotype, spec.sawtooth ? *spec.sawtooth : default_sawtooth());
  }
  Individual ind;
  ind.genotype = g;
  ind.total_fitness = std::accumulate(tr.phenotype.traits.begin(), tr.phenotype.traits.end(), 0.0);
  ind.phenotype = std::move(tr.phenotype);
  ind.activation_gene = tr.activation;
  return ind;
}

}  // namespace seldiag
