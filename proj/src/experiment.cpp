#include "seldiag/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <ostream>
#include <regex>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "seldiag/metrics.hpp"
#include "seldiag/stats.hpp"

namespace seldiag {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split_list(std::string_view s) {
  std::vector<std::string_view> out;
  while (true) {
    const auto comma = s.find(',');
    const auto item = trim(s.substr(0, comma));
    if (!item.empty()) out.push_back(item);
    if (comma == std::string_view::npos) break;
    s.remove_prefix(comma + 1);
  }
  return out;
}

template <typename T>
T parse_number(std::string_view key, std::string_view value) {
  T out{};
  const auto res = std::from_chars(value.data(), value.data() + value.size(), out);
  if (res.ec != std::errc() || res.ptr != value.data() + value.size()) {
    throw ConfigError("config key '" + std::string(key) + "': malformed value '" +
                      std::string(value) + "'");
  }
  return out;
}

bool parse_bool(std::string_view key, std::string_view value) {
  if (value == "true" || value == "1" || value == "yes") return true;
  if (value == "false" || value == "0" || value == "no") return false;
  throw ConfigError("config key '" + std::string(key) + "': expected true/false, got '" +
                    std::string(value) + "'");
}

using Setter = std::function<void(ExperimentConfig&, std::string_view key, std::string_view)>;

template <typename T, typename Field>
Setter number_setter(Field field) {
  return [field](ExperimentConfig& c, std::string_view k, std::string_view v) {
    field(c) = parse_number<T>(k, v);
  };
}

const std::map<std::string, Setter, std::less<>>& setters() {
  static const std::map<std::string, Setter, std::less<>> table = {
      {"diagnostic",
       [](ExperimentConfig& c, std::string_view k, std::string_view v) {
         c.diagnostics.clear();
         for (auto name : split_list(v)) {
           try {
             c.diagnostics.push_back(parse_diagnostic(name));
           } catch (const ConfigError& e) {
             throw ConfigError("config key '" + std::string(k) + "': " + e.what());
           }
         }
       }},
      {"scheme",
       [](ExperimentConfig& c, std::string_view k, std::string_view v) {
         c.schemes.clear();
         for (auto name : split_list(v)) {
           try {
             c.schemes.push_back(parse_scheme(name));
           } catch (const ConfigError& e) {
             throw ConfigError("config key '" + std::string(k) + "': " + e.what());
           }
         }
       }},
      {"replicates", number_setter<std::size_t>([](ExperimentConfig& c) -> auto& { return c.replicates; })},
      {"seed", number_setter<std::uint64_t>([](ExperimentConfig& c) -> auto& { return c.base_seed; })},
      {"output_dir",
       [](ExperimentConfig& c, std::string_view, std::string_view v) { c.output_dir = std::string(v); }},
      {"workers", number_setter<std::size_t>([](ExperimentConfig& c) -> auto& { return c.workers; })},
      {"pop_size", number_setter<std::size_t>([](ExperimentConfig& c) -> auto& { return c.base.pop_size; })},
      {"generations", number_setter<std::size_t>([](ExperimentConfig& c) -> auto& { return c.base.generations; })},
      {"dim", number_setter<std::size_t>([](ExperimentConfig& c) -> auto& { return c.base.dim; })},
      {"stride", number_setter<std::size_t>([](ExperimentConfig& c) -> auto& { return c.base.record_stride; })},
      {"mutation_rate", number_setter<double>([](ExperimentConfig& c) -> auto& { return c.base.mutation.per_gene_rate; })},
      {"mutation_stddev", number_setter<double>([](ExperimentConfig& c) -> auto& { return c.base.mutation.step_stddev; })},
      {"init_lo", number_setter<double>([](ExperimentConfig& c) -> auto& { return c.base.init_lo; })},
      {"init_hi", number_setter<double>([](ExperimentConfig& c) -> auto& { return c.base.init_hi; })},
      {"truncation_size", number_setter<std::size_t>([](ExperimentConfig& c) -> auto& { return c.base.scheme.truncation_size; })},
      {"tournament_size", number_setter<std::size_t>([](ExperimentConfig& c) -> auto& { return c.base.scheme.tournament_size; })},
      {"sigma", number_setter<double>([](ExperimentConfig& c) -> auto& { return c.base.scheme.sigma; })},
      {"alpha", number_setter<double>([](ExperimentConfig& c) -> auto& { return c.base.scheme.alpha; })},
      {"normalize_distance",
       [](ExperimentConfig& c, std::string_view k, std::string_view v) {
         c.base.scheme.normalize_distance = parse_bool(k, v);
       }},
      {"novelty_k", number_setter<std::size_t>([](ExperimentConfig& c) -> auto& { return c.base.scheme.novelty.k; })},
      {"novelty_pmin", number_setter<double>([](ExperimentConfig& c) -> auto& { return c.base.scheme.novelty.pmin_initial; })},
      {"novelty_save_period", number_setter<std::size_t>([](ExperimentConfig& c) -> auto& { return c.base.scheme.novelty.save_period; })},
      {"novelty_burst_limit", number_setter<std::size_t>([](ExperimentConfig& c) -> auto& { return c.base.scheme.novelty.burst_limit; })},
      {"novelty_raise_factor", number_setter<double>([](ExperimentConfig& c) -> auto& { return c.base.scheme.novelty.raise_factor; })},
      {"novelty_decay_window", number_setter<std::size_t>([](ExperimentConfig& c) -> auto& { return c.base.scheme.novelty.decay_window; })},
      {"novelty_decay_factor", number_setter<double>([](ExperimentConfig& c) -> auto& { return c.base.scheme.novelty.decay_factor; })},
      {"novelty_tournament_size", number_setter<std::size_t>([](ExperimentConfig& c) -> auto& { return c.base.scheme.novelty.tournament_size; })},
      {"include_archive",
       [](ExperimentConfig& c, std::string_view k, std::string_view v) {
         c.base.include_archive = parse_bool(k, v);
       }},
  };
  return table;
}

void validate(const ExperimentConfig& cfg) {
  if (cfg.diagnostics.empty()) throw ConfigError("config key 'diagnostic': no diagnostics selected");
  if (cfg.schemes.empty()) throw ConfigError("config key 'scheme': no schemes selected");
  if (cfg.replicates < 1) throw ConfigError("config key 'replicates': must be at least 1");
  // Check one representative cell per scheme; the diagnostic only changes
  // the sawtooth field, which make() always sets consistently.
  for (auto s : cfg.schemes) cfg.replicate_config(cfg.diagnostics.front(), s, 0).validate();
}

std::string join_names(const auto& kinds) {
  std::string out;
  for (auto k : kinds) {
    if (!out.empty()) out += ',';
    out += to_string(k);
  }
  return out;
}

void write_file(const std::filesystem::path& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out << contents;
  out.flush();
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

}  // namespace

ReplicateConfig ExperimentConfig::replicate_config(DiagnosticKind d, SchemeKind s,
                                                   std::size_t rep) const {
  ReplicateConfig rc = base;
  rc.diagnostic = DiagnosticSpec::make(d);
  rc.scheme.kind = s;
  rc.seed = replicate_seed(base_seed, d, s, rep);
  return rc;
}

ConfigEntries ExperimentConfig::entries() const {
  const auto& n = base.scheme.novelty;
  return {
      {"diagnostic", join_names(diagnostics)},
      {"scheme", join_names(schemes)},
      {"replicates", std::to_string(replicates)},
      {"seed", std::to_string(base_seed)},
      {"output_dir", output_dir.string()},
      {"workers", std::to_string(workers)},
      {"pop_size", std::to_string(base.pop_size)},
      {"generations", std::to_string(base.generations)},
      {"dim", std::to_string(base.dim)},
      {"stride", std::to_string(base.record_stride)},
      {"mutation_rate", format_double(base.mutation.per_gene_rate)},
      {"mutation_stddev", format_double(base.mutation.step_stddev)},
      {"init_lo", format_double(base.init_lo)},
      {"init_hi", format_double(base.init_hi)},
      {"truncation_size", std::to_string(base.scheme.truncation_size)},
      {"tournament_size", std::to_string(base.scheme.tournament_size)},
      {"sigma", format_double(base.scheme.sigma)},
      {"alpha", format_double(base.scheme.alpha)},
      {"normalize_distance", base.scheme.normalize_distance ? "true" : "false"},
      {"novelty_k", std::to_string(n.k)},
      {"novelty_pmin", format_double(n.pmin_initial)},
      {"novelty_save_period", std::to_string(n.save_period)},
      {"novelty_burst_limit", std::to_string(n.burst_limit)},
      {"novelty_raise_factor", format_double(n.raise_factor)},
      {"novelty_decay_window", std::to_string(n.decay_window)},
      {"novelty_decay_factor", format_double(n.decay_factor)},
      {"novelty_tournament_size", std::to_string(n.tournament_size)},
      {"include_archive", base.include_archive ? "true" : "false"},
  };
}

void apply_config_entry(ExperimentConfig& cfg, std::string_view key, std::string_view value) {
  const auto& table = setters();
  const auto it = table.find(key);
  if (it == table.end()) {
    std::string msg = "unknown config key '" + std::string(key) + "'; valid keys:";
    for (const auto& [k, _] : table) msg += " " + k;
    throw ConfigError(msg);
  }
  it->second(cfg, key, trim(value));
}

void apply_config_text(ExperimentConfig& cfg, std::string_view text) {
  std::size_t line_no = 0;
  while (!text.empty()) {
    ++line_no;
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text.remove_prefix(nl == std::string_view::npos ? text.size() : nl + 1);
    if (const auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("config line " + std::to_string(line_no) + ": expected 'key = value'");
    }
    apply_config_entry(cfg, trim(line.substr(0, eq)), line.substr(eq + 1));
  }
}

ExperimentConfig parse_config(const std::filesystem::path& file, const ConfigEntries& overrides) {
  ExperimentConfig cfg;
  if (!file.empty()) {
    std::ifstream in(file);
    if (!in) throw ConfigError("cannot read config file " + file.string());
    std::stringstream buf;
    buf << in.rdbuf();
    apply_config_text(cfg, buf.str());
  }
  for (const auto& [k, v] : overrides) apply_config_entry(cfg, k, v);
  validate(cfg);
  return cfg;
}

std::uint64_t replicate_seed(std::uint64_t base, DiagnosticKind d, SchemeKind s, std::size_t rep) {
  const auto treatment = static_cast<std::uint64_t>(d) * kAllSchemes.size() +
                         static_cast<std::uint64_t>(s);
  return base + mix64((treatment << 32) | static_cast<std::uint32_t>(rep));
}

std::string replicate_file_name(DiagnosticKind d, SchemeKind s, std::size_t rep) {
  return std::string(to_string(d)) + "__" + std::string(to_string(s)) + "__rep" +
         std::to_string(rep) + ".csv";
}

int run_experiment(const ExperimentConfig& cfg, std::ostream& log) {
  struct Cell {
    DiagnosticKind diagnostic;
    SchemeKind scheme;
    std::size_t rep;
    std::uint64_t seed;
    std::optional<std::size_t> satisfactory_generation;
    bool done = false;
  };
  std::vector<Cell> cells;
  for (auto d : cfg.diagnostics) {
    for (auto s : cfg.schemes) {
      for (std::size_t r = 0; r < cfg.replicates; ++r) {
        cells.push_back({d, s, r, replicate_seed(cfg.base_seed, d, s, r), std::nullopt});
      }
    }
  }

  std::error_code ec;
  std::filesystem::create_directories(cfg.output_dir, ec);
  if (ec) {
    log << "error: cannot create " << cfg.output_dir << ": " << ec.message() << '\n';
    return kExitIo;
  }

  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::mutex log_mutex;
  std::string failure;

  auto worker = [&] {
    while (!failed) {
      const std::size_t i = next.fetch_add(1);
      if (i >= cells.size()) return;
      Cell& cell = cells[i];
      try {
        const auto result =
            run_replicate(cfg.replicate_config(cell.diagnostic, cell.scheme, cell.rep));
        std::ostringstream csv;
        write_records_csv(csv, result.records);
        write_file(cfg.output_dir / replicate_file_name(cell.diagnostic, cell.scheme, cell.rep),
                   csv.str());
        cell.satisfactory_generation = result.satisfactory_generation;
        cell.done = true;
      } catch (const std::exception& e) {
        std::lock_guard lock(log_mutex);
        if (!failed.exchange(true)) failure = e.what();
      }
    }
  };

  std::size_t workers = cfg.workers != 0 ? cfg.workers : std::thread::hardware_concurrency();
  workers = std::clamp<std::size_t>(workers, 1, std::max<std::size_t>(cells.size(), 1));
  {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
  }

  nlohmann::ordered_json manifest;
  manifest["status"] = failed ? "incomplete" : "complete";
  if (failed) manifest["error"] = failure;
  for (const auto& [k, v] : cfg.entries()) manifest["config"][k] = v;
  manifest["runs"] = nlohmann::ordered_json::array();
  for (const auto& c : cells) {
    if (!c.done) continue;
    nlohmann::ordered_json run;
    run["file"] = replicate_file_name(c.diagnostic, c.scheme, c.rep);
    run["diagnostic"] = to_string(c.diagnostic);
    run["scheme"] = to_string(c.scheme);
    run["replicate"] = c.rep;
    run["seed"] = c.seed;
    run["satisfactory_generation"] =
        c.satisfactory_generation ? nlohmann::ordered_json(*c.satisfactory_generation) : nullptr;
    manifest["runs"].push_back(std::move(run));
  }

  try {
    write_file(cfg.output_dir / "manifest.json", manifest.dump(2) + "\n");
  } catch (const std::exception& e) {
    log << "error: " << e.what() << '\n';
    return kExitIo;
  }
  if (failed) {
    log << "error: " << failure << "\nmanifest.json lists the " << manifest["runs"].size()
        << " completed replicates\n";
    return kExitIo;
  }
  log << "wrote " << cells.size() << " replicate files to " << cfg.output_dir.string() << '\n';
  return kExitOk;
}

// --- analyze ----------------------------------------------------------------

namespace {

constexpr std::array<std::string_view, 6> kMetricColumns = {
    "best_performance",         "best_total_fitness",     "satisfactory_trait_coverage",
    "activation_gene_coverage", "largest_valley_reached", "archive_size",
};

std::optional<double> metric_value(const GenerationRecord& r, std::string_view metric) {
  auto opt = [](const std::optional<std::size_t>& v) -> std::optional<double> {
    if (!v) return std::nullopt;
    return static_cast<double>(*v);
  };
  if (metric == "best_performance") return r.best_performance;
  if (metric == "best_total_fitness") return r.best_total_fitness;
  if (metric == "satisfactory_trait_coverage") return opt(r.satisfactory_trait_coverage);
  if (metric == "activation_gene_coverage") return opt(r.activation_gene_coverage);
  if (metric == "largest_valley_reached") return opt(r.largest_valley_reached);
  return opt(r.archive_size);
}

std::optional<double> reduce(const std::vector<GenerationRecord>& records, std::string_view metric,
                             Reduction how) {
  if (records.empty()) return std::nullopt;
  if (how == Reduction::Final) return metric_value(records.back(), metric);
  std::optional<double> best;
  for (const auto& r : records) {
    if (auto v = metric_value(r, metric); v && (!best || *v > *best)) best = v;
  }
  return best;
}

}  // namespace

int analyze(const AnalyzeOptions& options, std::ostream& log) {
  if (std::find(kMetricColumns.begin(), kMetricColumns.end(), options.metric) ==
      kMetricColumns.end()) {
    log << "error: unknown metric '" << options.metric << "'; valid metrics:";
    for (auto m : kMetricColumns) log << ' ' << m;
    log << '\n';
    return kExitConfig;
  }
  std::error_code ec;
  if (!std::filesystem::is_directory(options.result_dir, ec)) {
    log << "error: " << options.result_dir << " is not a directory\n";
    return kExitIo;
  }

  static const std::regex pattern(R"(^(.+)__(.+)__rep(\d+)\.csv$)");
  // diagnostic -> scheme -> values, ordered by canonical enum order.
  std::map<DiagnosticKind, std::map<SchemeKind, std::vector<double>>> data;
  std::vector<std::string> skipped;

  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(options.result_dir, ec)) {
    if (entry.is_regular_file()) files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  for (const auto& path : files) {
    const std::string name = path.filename().string();
    std::smatch m;
    if (!std::regex_match(name, m, pattern)) continue;
    try {
      const auto d = parse_diagnostic(m[1].str());
      const auto s = parse_scheme(m[2].str());
      std::ifstream in(path);
      if (!in) throw std::runtime_error("cannot open");
      const auto records = read_records_csv(in);
      if (auto v = reduce(records, options.metric, options.reduction)) data[d][s].push_back(*v);
    } catch (const std::exception& e) {
      skipped.push_back(name + ": " + e.what());
    }
  }

  std::ostringstream csv;
  csv << kComparisonsCsvHeader << '\n';
  auto row = [&](const std::string& a, const std::string& b, double stat, double p_raw,
                 double p_adj) {
    csv << a << ',' << b << ',' << options.metric << ',' << format_double(stat) << ','
        << format_double(p_raw) << ',' << format_double(p_adj) << ','
        << (p_adj < stats::kSignificanceLevel ? "true" : "false") << '\n';
  };

  for (const auto& [diag, by_scheme] : data) {
    if (by_scheme.size() < 2) continue;
    const std::string dname(to_string(diag));
    std::vector<stats::SampleGroup> groups;
    for (const auto& [scheme, values] : by_scheme) {
      groups.push_back({dname + "/" + std::string(to_string(scheme)), values});
    }
    const auto omnibus = stats::kruskal_wallis(groups);
    row(dname, "*", omnibus.statistic, omnibus.p, omnibus.p);
    if (!(omnibus.p < stats::kSignificanceLevel)) continue;

    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    std::vector<stats::TestResult> results;
    std::vector<double> raw;
    for (std::size_t i = 0; i < groups.size(); ++i) {
      for (std::size_t j = i + 1; j < groups.size(); ++j) {
        pairs.emplace_back(i, j);
        results.push_back(stats::wilcoxon_rank_sum(groups[i].values, groups[j].values));
        raw.push_back(results.back().p);
      }
    }
    const auto adjusted = stats::bonferroni(raw);
    for (std::size_t t = 0; t < pairs.size(); ++t) {
      row(groups[pairs[t].first].label, groups[pairs[t].second].label, results[t].statistic,
          raw[t], adjusted[t]);
    }
  }

  const auto out_path =
      options.output.empty() ? options.result_dir / "comparisons.csv" : options.output;
  try {
    write_file(out_path, csv.str());
  } catch (const std::exception& e) {
    log << "error: " << e.what() << '\n';
    return kExitIo;
  }
  for (const auto& s : skipped) log << "skipped " << s << '\n';
  return skipped.empty() ? kExitOk : kExitIo;
}

void describe(std::ostream& out) {
  static const std::map<DiagnosticKind, std::string_view> diag_notes = {
      {DiagnosticKind::ExploitationRate, "genes copied straight to traits"},
      {DiagnosticKind::OrderedExploitation, "leading non-increasing run of genes is expressed"},
      {DiagnosticKind::ContradictoryObjectives, "only the largest gene is expressed"},
      {DiagnosticKind::MultiPathExploration,
       "non-increasing run starting at the largest gene is expressed"},
      {DiagnosticKind::ValleyCrossing, "exploitation-rate + sawtooth valleys"},
      {DiagnosticKind::OrderedExploitationValleys, "ordered-exploitation + sawtooth valleys"},
      {DiagnosticKind::ContradictoryObjectivesValleys,
       "contradictory-objectives + sawtooth valleys"},
      {DiagnosticKind::MultiPathValleys, "multipath-exploration + sawtooth valleys"},
  };
  static const std::map<SchemeKind, std::string_view> scheme_notes = {
      {SchemeKind::Truncation, "top truncation_size by total fitness share the offspring"},
      {SchemeKind::Tournament, "best total fitness of tournament_size random picks"},
      {SchemeKind::SharingGenotypic, "shared total fitness (genome distance), stochastic remainder"},
      {SchemeKind::SharingPhenotypic,
       "shared total fitness (phenotype distance), stochastic remainder"},
      {SchemeKind::Lexicase, "filter on shuffled traits, keep those tied for best"},
      {SchemeKind::NondominatedSorting, "Pareto fronts with within-front sharing"},
      {SchemeKind::NoveltySearch, "size-2 tournaments on k-nearest novelty with an archive"},
      {SchemeKind::Random, "uniform random parents (control)"},
  };
  out << "diagnostics:\n";
  for (auto d : kAllDiagnostics) out << "  " << to_string(d) << "\t" << diag_notes.at(d) << '\n';
  out << "schemes:\n";
  for (auto s : kAllSchemes) out << "  " << to_string(s) << "\t" << scheme_notes.at(s) << '\n';
  out << "config keys (defaults):\n";
  for (const auto& [k, v] : ExperimentConfig{}.entries()) out << "  " << k << " = " << v << '\n';
}

}  // namespace seldiag
