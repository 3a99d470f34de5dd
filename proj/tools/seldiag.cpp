// Command-line front end: run a treatment grid, analyze its CSVs, or list
// the available diagnostics and schemes.

#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "seldiag/experiment.hpp"

namespace {

template <typename T>
void add_override(seldiag::ConfigEntries& out, const char* key, const std::optional<T>& v) {
  if (v) {
    if constexpr (std::is_same_v<T, std::string>) {
      out.emplace_back(key, *v);
    } else {
      out.emplace_back(key, std::to_string(*v));
    }
  }
}

std::string join(const std::vector<std::string>& items) {
  std::string out;
  for (const auto& s : items) out += (out.empty() ? "" : ",") + s;
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Selection-scheme diagnostics: evolve, record, compare"};
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "execute a diagnostic x scheme x replicate grid");
  std::string config_path;
  std::vector<std::string> diagnostics, schemes;
  std::optional<std::size_t> replicates, pop_size, generations, dim, stride, workers;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> output_dir;
  std::optional<bool> include_archive;
  run->add_option("--config", config_path, "key = value config file");
  run->add_option("--diagnostic", diagnostics, "diagnostic name (repeatable)");
  run->add_option("--scheme", schemes, "scheme name (repeatable)");
  run->add_option("--replicates", replicates);
  run->add_option("--seed", seed, "base seed");
  run->add_option("--pop-size", pop_size);
  run->add_option("--generations", generations);
  run->add_option("--dim", dim);
  run->add_option("--stride", stride, "record every n-th generation");
  run->add_option("--output-dir", output_dir);
  run->add_option("--workers", workers, "parallel replicates (default: all cores)");
  run->add_flag("--include-archive{true}", include_archive,
                "count novelty archive phenotypes in best performance and coverage "
                "(default on; --include-archive=false to disable)");

  auto* an = app.add_subcommand("analyze", "Kruskal-Wallis + pairwise rank-sum over results");
  seldiag::AnalyzeOptions analyze_opts;
  std::string reduction = "final";
  an->add_option("result_dir", analyze_opts.result_dir, "directory written by `run`")->required();
  an->add_option("--metric", analyze_opts.metric, "CSV column to compare");
  an->add_option("--reduce", reduction, "final | max: which value of each run to compare")
      ->check(CLI::IsMember({"final", "max"}));
  an->add_option("--output", analyze_opts.output, "comparisons CSV path");

  auto* desc = app.add_subcommand("describe", "list diagnostics and schemes");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? seldiag::kExitOk : seldiag::kExitConfig;
  }

  if (desc->parsed()) {
    seldiag::describe(std::cout);
    return seldiag::kExitOk;
  }

  if (an->parsed()) {
    analyze_opts.reduction =
        reduction == "max" ? seldiag::Reduction::Max : seldiag::Reduction::Final;
    return seldiag::analyze(analyze_opts, std::cerr);
  }

  seldiag::ConfigEntries overrides;
  if (!diagnostics.empty()) overrides.emplace_back("diagnostic", join(diagnostics));
  if (!schemes.empty()) overrides.emplace_back("scheme", join(schemes));
  add_override(overrides, "replicates", replicates);
  add_override(overrides, "seed", seed);
  add_override(overrides, "pop_size", pop_size);
  add_override(overrides, "generations", generations);
  add_override(overrides, "dim", dim);
  add_override(overrides, "stride", stride);
  add_override(overrides, "output_dir", output_dir);
  add_override(overrides, "workers", workers);
  if (include_archive) overrides.emplace_back("include_archive", *include_archive ? "true" : "false");

  seldiag::ExperimentConfig cfg;
  try {
    cfg = seldiag::parse_config(config_path, overrides);
  } catch (const seldiag::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return seldiag::kExitConfig;
  }
  return seldiag::run_experiment(cfg, std::cerr);
}
