#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "seldiag/diagnostics.hpp"
#include "seldiag/evolve.hpp"
#include "seldiag/selection.hpp"

namespace seldiag {

enum ExitCode : int { kExitOk = 0, kExitConfig = 1, kExitIo = 2 };

using ConfigEntries = std::vector<std::pair<std::string, std::string>>;

struct ExperimentConfig {
  std::vector<DiagnosticKind> diagnostics{kAllDiagnostics.begin(), kAllDiagnostics.end()};
  std::vector<SchemeKind> schemes{kAllSchemes.begin(), kAllSchemes.end()};
  std::size_t replicates = 50;
  std::uint64_t base_seed = 0;
  std::filesystem::path output_dir = "results";
  std::size_t workers = 0;  // 0: hardware concurrency
  // Diagnostic, scheme kind and seed are filled in per replicate.
  ReplicateConfig base;

  /// Config for one (diagnostic, scheme, replicate) cell of the grid.
  ReplicateConfig replicate_config(DiagnosticKind d, SchemeKind s, std::size_t rep) const;

  /// Canonical key = value entries; parsing them back yields this config.
  ConfigEntries entries() const;
};

/// Applies `key = value` lines (with `#` comments) onto cfg. Throws
/// ConfigError naming the key on unknown keys or bad values.
void apply_config_text(ExperimentConfig& cfg, std::string_view text);
void apply_config_entry(ExperimentConfig& cfg, std::string_view key, std::string_view value);

/// Reads the file (if path non-empty), applies overrides after it, validates.
ExperimentConfig parse_config(const std::filesystem::path& file, const ConfigEntries& overrides);

/// Stable per-cell seed: base + mix64(treatment << 32 | replicate), where the
/// treatment id is diagnostic index * 8 + scheme index.
std::uint64_t replicate_seed(std::uint64_t base, DiagnosticKind d, SchemeKind s, std::size_t rep);

std::string replicate_file_name(DiagnosticKind d, SchemeKind s, std::size_t rep);

/// Runs every grid cell, writes one CSV per replicate plus manifest.json.
int run_experiment(const ExperimentConfig& cfg, std::ostream& log);

enum class Reduction { Final, Max };

struct AnalyzeOptions {
  std::filesystem::path result_dir;
  std::string metric = "best_total_fitness";
  Reduction reduction = Reduction::Final;
  std::filesystem::path output;  // empty: <result_dir>/comparisons.csv
};

inline constexpr const char* kComparisonsCsvHeader =
    "group_a,group_b,metric,statistic,p_raw,p_adjusted,significant";

/// Kruskal-Wallis across schemes per diagnostic, then Bonferroni-adjusted
/// pairwise rank-sum tests where the omnibus test is significant.
int analyze(const AnalyzeOptions& options, std::ostream& log);

void describe(std::ostream& out);

}  // namespace seldiag
