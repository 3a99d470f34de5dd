#include "seldiag/metrics.hpp"

#include <algorithm>
#include <charconv>
#include <istream>
#include <numeric>
#include <ostream>
#include <set>
#include <sstream>
#include <stdexcept>

namespace seldiag {

double performance(const Phenotype& ph) {
  if (ph.size() == 0) return 0.0;
  return std::accumulate(ph.traits.begin(), ph.traits.end(), 0.0) /
         static_cast<double>(ph.size());
}

bool is_satisfactory(double trait) { return trait >= kSatisfactoryFraction * kGeneUpperBound; }

bool is_satisfactory_solution(const Phenotype& ph) {
  return std::all_of(ph.traits.begin(), ph.traits.end(), is_satisfactory);
}

bool has_satisfactory_solution(const Population& pop) {
  return std::any_of(pop.begin(), pop.end(),
                     [](const Individual& ind) { return is_satisfactory_solution(ind.phenotype); });
}

std::size_t satisfactory_trait_coverage(const Population& pop, std::span<const Phenotype> archive) {
  std::vector<bool> seen;
  auto mark = [&seen](const Phenotype& ph) {
    if (seen.size() < ph.size()) seen.resize(ph.size(), false);
    for (std::size_t i = 0; i < ph.size(); ++i) {
      if (is_satisfactory(ph.traits[i])) seen[i] = true;
    }
  };
  for (const auto& ind : pop) mark(ind.phenotype);
  for (const auto& ph : archive) mark(ph);
  return static_cast<std::size_t>(std::count(seen.begin(), seen.end(), true));
}

std::size_t activation_from_phenotype(const Phenotype& ph) {
  const auto it = std::find_if(ph.traits.begin(), ph.traits.end(), [](double t) { return t != 0.0; });
  return it == ph.traits.end() ? 0 : static_cast<std::size_t>(it - ph.traits.begin());
}

std::optional<std::size_t> activation_gene_coverage(const Population& pop,
                                                    std::span<const Phenotype> archive) {
  std::set<std::size_t> genes;
  for (const auto& ind : pop) {
    if (ind.activation_gene) genes.insert(*ind.activation_gene);
  }
  if (genes.empty()) return std::nullopt;
  for (const auto& ph : archive) genes.insert(activation_from_phenotype(ph));
  return genes.size();
}

std::optional<std::size_t> largest_valley_reached(const Genotype& g, const SawtoothParams& p) {
  if (g.size() == 0) return std::nullopt;
  const double top = *std::max_element(g.genes.begin(), g.genes.end());
  const auto peaks = p.peaks();
  const auto reached = static_cast<std::size_t>(std::upper_bound(peaks.begin(), peaks.end(), top) -
                                                peaks.begin());
  if (reached == 0) return std::nullopt;
  return reached - 1;
}

std::size_t best_index(const Population& pop) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < pop.size(); ++i) {
    if (pop[i].total_fitness > pop[best].total_fitness) best = i;
  }
  return best;
}

GenerationRecord snapshot(const Population& pop, std::size_t generation,
                          const DiagnosticSpec& spec, const SnapshotOptions& options) {
  if (pop.empty()) throw std::invalid_argument("snapshot of empty population");
  GenerationRecord rec;
  rec.generation = generation;
  const Individual& best = pop[best_index(pop)];
  rec.best_total_fitness = best.total_fitness;
  rec.best_performance = performance(best.phenotype);

  std::span<const Phenotype> archive;
  if (options.archive != nullptr) {
    rec.archive_size = options.archive->size();
    if (options.include_archive) archive = *options.archive;
  }
  for (const auto& ph : archive) {
    const double total = std::accumulate(ph.traits.begin(), ph.traits.end(), 0.0);
    if (total > rec.best_total_fitness) {
      rec.best_total_fitness = total;
      rec.best_performance = performance(ph);
    }
  }

  if (has_activation_gene(spec.kind)) {
    rec.satisfactory_trait_coverage = satisfactory_trait_coverage(pop, archive);
    rec.activation_gene_coverage = activation_gene_coverage(pop, archive);
  }
  if (has_valleys(spec.kind)) {
    rec.largest_valley_reached = largest_valley_reached(
        best.genotype, spec.sawtooth ? *spec.sawtooth : default_sawtooth());
  }
  return rec;
}

// --- CSV --------------------------------------------------------------------

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

namespace {

std::string format_optional(const std::optional<std::size_t>& v) {
  return v ? std::to_string(*v) : std::string();
}

template <typename T>
T parse_field(std::string_view field, std::size_t line_no) {
  T value{};
  const auto res = std::from_chars(field.data(), field.data() + field.size(), value);
  if (res.ec != std::errc() || res.ptr != field.data() + field.size()) {
    throw std::runtime_error("line " + std::to_string(line_no) + ": cannot parse '" +
                             std::string(field) + "'");
  }
  return value;
}

std::optional<std::size_t> parse_optional(std::string_view field, std::size_t line_no) {
  if (field.empty()) return std::nullopt;
  return parse_field<std::size_t>(field, line_no);
}

}  // namespace

void write_records_csv(std::ostream& out, std::span<const GenerationRecord> records) {
  out << kRecordCsvHeader << '\n';
  for (const auto& r : records) {
    out << r.generation << ',' << format_double(r.best_performance) << ','
        << format_double(r.best_total_fitness) << ',' << format_optional(r.satisfactory_trait_coverage)
        << ',' << format_optional(r.activation_gene_coverage) << ','
        << format_optional(r.largest_valley_reached) << ',' << format_optional(r.archive_size)
        << '\n';
  }
}

std::vector<GenerationRecord> read_records_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kRecordCsvHeader) {
    throw std::runtime_error("missing or unexpected CSV header");
  }
  std::vector<GenerationRecord> records;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<std::string_view> fields;
    std::string_view rest(line);
    while (true) {
      const auto comma = rest.find(',');
      fields.push_back(rest.substr(0, comma));
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
    if (fields.size() != 7) {
      throw std::runtime_error("line " + std::to_string(line_no) + ": expected 7 fields, got " +
                               std::to_string(fields.size()));
    }
    GenerationRecord r;
    r.generation = parse_field<std::size_t>(fields[0], line_no);
    r.best_performance = parse_field<double>(fields[1], line_no);
    r.best_total_fitness = parse_field<double>(fields[2], line_no);
    r.satisfactory_trait_coverage = parse_optional(fields[3], line_no);
    r.activation_gene_coverage = parse_optional(fields[4], line_no);
    r.largest_valley_reached = parse_optional(fields[5], line_no);
    r.archive_size = parse_optional(fields[6], line_no);
    records.push_back(r);
  }
  return records;
}

}  // namespace seldiag
