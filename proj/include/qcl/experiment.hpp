#pragma once

#include <charconv>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "qcl/basis.hpp"
#include "qcl/enumerate.hpp"
#include "qcl/reduce.hpp"
#include "qcl/sample.hpp"

namespace qcl {

/// Reduction-length key used in exported histograms; -1 marks samples that
/// ran out of fuel.
inline constexpr std::int64_t kFuelExhaustedLength = -1;

/// G(s, n, r): s uniform size-n terms, each reduced with at most r steps.
struct ExperimentConfig {
  std::uint64_t samples = 1;
  std::uint64_t size = 0;
  std::uint64_t fuel = 1;
  std::uint64_t seed = 0;
  unsigned workers = 0;  // 0: one per hardware thread
  Basis basis = sk_basis();

  void validate() const {
    if (samples < 1) throw std::invalid_argument("experiment: samples must be at least 1");
    if (fuel < 1) throw std::invalid_argument("experiment: fuel must be at least 1");
  }
};

struct ExperimentResult {
  ExperimentConfig config;
  std::map<std::int64_t, std::uint64_t> histogram;
  std::uint64_t normalized = 0;
  std::uint64_t unnormalized = 0;
  double fraction_normalized = 0.0;
  std::optional<double> mean_reduction_length;  // over normalised samples only
  double log2_n = 0.0;
};

/// Fills the summary fields of `r` from its histogram.
inline void summarize(ExperimentResult& r) {
  r.normalized = 0;
  r.unnormalized = 0;
  long double weighted = 0;
  for (const auto& [len, count] : r.histogram) {
    if (len < 0) {
      r.unnormalized += count;
    } else {
      r.normalized += count;
      weighted += static_cast<long double>(len) * count;
    }
  }
  const std::uint64_t total = r.normalized + r.unnormalized;
  r.fraction_normalized = total == 0 ? 0.0 : static_cast<double>(r.normalized) / static_cast<double>(total);
  r.mean_reduction_length.reset();
  if (r.normalized > 0) r.mean_reduction_length = static_cast<double>(weighted / r.normalized);
  r.log2_n = r.config.size == 0 ? 0.0 : std::log2(static_cast<double>(r.config.size));
}

/// Sample i is random_term(basis, n, RandomSource(seed, i)), so the result
/// does not depend on the number of workers.
inline ExperimentResult run_experiment(const ExperimentConfig& config) {
  config.validate();
  const unsigned workers = resolve_workers(config.workers);
  auto tally = detail::sharded(config.samples, workers,
                               [&](std::uint64_t lo, std::uint64_t hi, detail::CensusTally& t) {
                                 Normalizer normalizer(config.basis);
                                 for (std::uint64_t i = lo; i < hi; ++i) {
                                   RandomSource rng(config.seed, i);
                                   const Term term = random_term(config.basis, config.size, rng);
                                   auto outcome = normalizer(term, config.fuel);
                                   if (const auto* nf = std::get_if<NormalForm>(&outcome)) {
                                     if (t.lengths.size() <= nf->steps) t.lengths.resize(nf->steps + 1, 0);
                                     ++t.lengths[nf->steps];
                                   } else {
                                     ++t.exhausted;
                                   }
                                 }
                               });
  ExperimentResult r;
  r.config = config;
  if (tally.exhausted != 0) r.histogram[kFuelExhaustedLength] = tally.exhausted;
  for (std::size_t len = 0; len < tally.lengths.size(); ++len)
    if (tally.lengths[len] != 0) r.histogram[static_cast<std::int64_t>(len)] = tally.lengths[len];
  summarize(r);
  return r;
}

// ---------------------------------------------------------------------------
// Export and import.

enum class ExportFormat { Csv, Json };

/// Header `reduction_length,count`, rows ascending, so -1 comes first.
inline std::string histogram_to_csv(const std::map<std::int64_t, std::uint64_t>& histogram) {
  std::ostringstream out;
  out << "reduction_length,count\n";
  for (const auto& [len, count] : histogram) out << len << ',' << count << '\n';
  return out.str();
}

inline nlohmann::json result_to_json(const ExperimentResult& r) {
  nlohmann::json hist = nlohmann::json::array();
  for (const auto& [len, count] : r.histogram) hist.push_back({{"reduction_length", len}, {"count", count}});
  nlohmann::json j{{"config",
                    {{"samples", r.config.samples},
                     {"size", r.config.size},
                     {"fuel", r.config.fuel},
                     {"seed", r.config.seed},
                     {"workers", resolve_workers(r.config.workers)},
                     {"basis", r.config.basis.to_json()}}},
                   {"histogram", hist},
                   {"normalized", r.normalized},
                   {"unnormalized", r.unnormalized},
                   {"fraction_normalized", r.fraction_normalized},
                   {"mean_reduction_length", nullptr},
                   {"log2_n", r.log2_n}};
  if (r.mean_reduction_length) j["mean_reduction_length"] = *r.mean_reduction_length;
  return j;
}

inline std::string export_result(const ExperimentResult& r, ExportFormat format) {
  if (format == ExportFormat::Csv) return histogram_to_csv(r.histogram);
  return result_to_json(r).dump(2) + "\n";
}

namespace detail {

inline std::int64_t parse_int(std::string_view text, std::size_t line, const char* what) {
  while (!text.empty() && text.front() == ' ') text.remove_prefix(1);
  while (!text.empty() && (text.back() == ' ' || text.back() == '\r')) text.remove_suffix(1);
  std::int64_t value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size())
    throw std::invalid_argument("line " + std::to_string(line) + ": bad " + what + " '" + std::string(text) + "'");
  return value;
}

inline void add_bucket(std::map<std::int64_t, std::uint64_t>& h, std::int64_t len, std::int64_t count,
                       std::size_t line) {
  if (len < kFuelExhaustedLength) throw std::invalid_argument("line " + std::to_string(line) + ": reduction length below -1");
  if (count < 0) throw std::invalid_argument("line " + std::to_string(line) + ": negative count");
  if (!h.emplace(len, static_cast<std::uint64_t>(count)).second)
    throw std::invalid_argument("line " + std::to_string(line) + ": duplicate reduction length");
}

}  // namespace detail

/// Reads the CSV written by histogram_to_csv.
inline std::map<std::int64_t, std::uint64_t> import_histogram_csv(std::string_view text) {
  std::map<std::int64_t, std::uint64_t> h;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (lineno == 1) {
      if (line != "reduction_length,count") throw std::invalid_argument("missing header 'reduction_length,count'");
      continue;
    }
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw std::invalid_argument("line " + std::to_string(lineno) + ": expected two columns");
    const std::string_view sv(line);
    detail::add_bucket(h, detail::parse_int(sv.substr(0, comma), lineno, "reduction length"),
                       detail::parse_int(sv.substr(comma + 1), lineno, "count"), lineno);
  }
  return h;
}

/// Reads a plot coordinate list, one `(x,y)` per line.
inline std::map<std::int64_t, std::uint64_t> import_coordinates(std::string_view text) {
  std::map<std::int64_t, std::uint64_t> h;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    const auto last = line.find_last_not_of(" \t\r");
    const std::string_view sv = std::string_view(line).substr(first, last - first + 1);
    const auto comma = sv.find(',');
    if (sv.front() != '(' || sv.back() != ')' || comma == std::string_view::npos)
      throw std::invalid_argument("line " + std::to_string(lineno) + ": expected '(x,y)'");
    detail::add_bucket(h, detail::parse_int(sv.substr(1, comma - 1), lineno, "x"),
                       detail::parse_int(sv.substr(comma + 1, sv.size() - comma - 2), lineno, "y"), lineno);
  }
  return h;
}

inline std::string export_coordinates(const std::map<std::int64_t, std::uint64_t>& histogram) {
  std::ostringstream out;
  for (const auto& [len, count] : histogram) out << '(' << len << ',' << count << ")\n";
  return out.str();
}

}  // namespace qcl
