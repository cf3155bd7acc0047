#pragma once

#include <cstdint>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <limits>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "qcl/basis.hpp"
#include "qcl/enumerate.hpp"
#include "qcl/experiment.hpp"
#include "qcl/reduce.hpp"
#include "qcl/sample.hpp"
#include "qcl/series.hpp"
#include "qcl/term.hpp"

namespace qcl::cli {

/// Exit statuses of dispatch().
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitRuntime = 2;

namespace detail {

// Terms this large are summarised instead of printed; with sharing, the
// printed form of a reduct can be exponentially longer than its graph.
inline constexpr std::uint64_t kPrintLimit = 100000;

inline std::string show(const Term& t, const Basis& basis) {
  if (t.size() > kPrintLimit) return "<term of size " + std::to_string(t.size()) + ">";
  return to_string(t, basis);
}

// "sk" names the built-in basis; anything else is a basis JSON file.
inline Basis resolve_basis(const std::string& spec) {
  if (spec == "sk" || spec == "SK") return sk_basis();
  return Basis::load(spec);
}

inline std::string format_double(double v) {
  std::ostringstream out;
  out << std::setprecision(17) << v;
  return out.str();
}

inline void write_file(const std::string& path, const std::string& content) {
  std::ofstream file(path, std::ios::binary);
  if (!file) throw std::runtime_error("cannot write '" + path + "'");
  file << content;
  if (!file) throw std::runtime_error("error writing '" + path + "'");
}

inline nlohmann::json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw std::runtime_error("'" + path + "' is not valid JSON: " + e.what());
  }
}

struct Options {
  std::string basis = "sk";
  // reduce
  std::string term;
  std::uint64_t fuel = 1000;
  bool trace = false;
  // count / census / sample / experiment
  std::uint64_t size = 0;
  std::optional<std::string> pattern;
  bool typecheck = false;
  std::string format = "csv";
  unsigned workers = 0;
  std::uint64_t count = 1;
  std::uint64_t seed = 0;
  bool print = false;
  std::uint64_t samples = 1;
  std::optional<std::string> out_file;
  std::optional<std::string> json_file;
  // series / density
  std::string fn;
  std::uint64_t order = 0;
  std::uint64_t d = 2;
  std::uint64_t p = 1;
  std::vector<std::string> grammars;
  std::string constants;
};

inline int run_reduce(const Options& o, std::ostream& out) {
  const Basis basis = resolve_basis(o.basis);
  const Term start = parse_term(o.term, basis);
  if (o.trace) {
    Term current = start;
    out << 0 << '\t' << show(current, basis) << '\n';
    std::uint64_t k = 0;
    for (; k < o.fuel; ++k) {
      auto next = step(current, basis);
      if (!next) break;
      current = std::move(*next);
      out << k + 1 << '\t' << show(current, basis) << '\n';
    }
    if (is_normal_form(current, basis))
      out << "normal form after " << k << " steps\n";
    else
      out << "fuel exhausted after " << k << " steps\n";
    return kExitOk;
  }
  auto outcome = normalize(start, basis, o.fuel);
  if (const auto* nf = std::get_if<NormalForm>(&outcome)) {
    out << "normal form: " << show(nf->result, basis) << '\n' << "steps: " << nf->steps << '\n';
  } else {
    const auto& fe = std::get<FuelExhausted>(outcome);
    out << "fuel exhausted after " << fe.steps_taken << " steps\n" << "last: " << show(fe.last, basis) << '\n';
  }
  return kExitOk;
}

inline int run_count(const Options& o, std::ostream& out) {
  const Basis basis = resolve_basis(o.basis);
  out << count_terms(basis.size(), o.size) << '\n';
  return kExitOk;
}

inline int run_census(const Options& o, std::ostream& out) {
  const Basis basis = resolve_basis(o.basis);
  CensusOptions options;
  options.fuel = o.fuel;
  options.typecheck = o.typecheck;
  options.workers = o.workers;
  if (o.pattern) options.pattern = parse_term(*o.pattern, basis);
  const CensusResult r = census(basis, o.size, options);
  if (o.format == "json")
    out << census_to_json(r).dump(2) << '\n';
  else
    out << census_to_csv(r);
  return kExitOk;
}

inline int run_sample(const Options& o, std::ostream& out) {
  const Basis basis = resolve_basis(o.basis);
  std::map<std::string, std::uint64_t> shapes;
  for (std::uint64_t i = 0; i < o.count; ++i) {
    RandomSource rng(o.seed, i);
    const Term t = random_term(basis, o.size, rng);
    if (o.print) out << show(t, basis) << '\n';
    else if (o.size <= 16) ++shapes[shape_code(t)];
  }
  if (!o.print) {
    out << "sampled " << o.count << " terms of size " << o.size << " (seed " << o.seed << ", protocol v"
        << kDrawProtocolVersion << ")\n";
    if (!shapes.empty()) {
      out << "shape,count\n";
      for (const auto& [code, n] : shapes) out << code << ',' << n << '\n';
    }
  }
  return kExitOk;
}

inline int run_experiment_cmd(const Options& o, std::ostream& out) {
  ExperimentConfig config;
  config.basis = resolve_basis(o.basis);
  config.samples = o.samples;
  config.size = o.size;
  config.fuel = o.fuel;
  config.seed = o.seed;
  config.workers = o.workers;
  const ExperimentResult r = run_experiment(config);
  const std::string csv = export_result(r, ExportFormat::Csv);
  if (o.json_file) write_file(*o.json_file, export_result(r, ExportFormat::Json));
  if (!o.out_file) {
    out << csv;
    return kExitOk;
  }
  write_file(*o.out_file, csv);
  out << "normalized: " << r.normalized << '/' << config.samples << " (" << format_double(r.fraction_normalized)
      << ")\n";
  out << "mean reduction length: "
      << (r.mean_reduction_length ? format_double(*r.mean_reduction_length) : std::string("n/a")) << '\n';
  out << "log2 n: " << format_double(r.log2_n) << '\n';
  return kExitOk;
}

inline CoefficientStream grammar_series(const std::vector<std::string>& files, std::uint64_t order) {
  std::vector<CoefficientStream> streams{series_R0(order)};
  for (const auto& file : files) {
    const GrammarData g = GrammarData::load(file);
    if (g.n != streams.size())
      throw std::runtime_error("grammar file '" + file + "' has n=" + std::to_string(g.n) + ", expected n=" +
                               std::to_string(streams.size()) + " (pass R_1 .. R_n in order)");
    streams.push_back(grammar_coeffs(g, streams, order));
  }
  return streams.back();
}

inline int run_series(const Options& o, std::ostream& out) {
  CoefficientStream s;
  if (o.fn == "C") s = series_C(o.order);
  else if (o.fn == "R0") s = series_R0(o.order);
  else if (o.fn == "TL") s = series_TL(o.d, o.order);
  else if (o.fn == "subterm") s = series_subterm(o.d, o.p, o.order);
  else if (o.fn == "invsqrt") s = inverse_sqrt_core(o.order);
  else {
    if (o.grammars.empty()) throw CLI::ValidationError("--grammar", "--fn grammar needs at least one --grammar file");
    s = grammar_series(o.grammars, o.order);
  }
  out << "n,coefficient\n";
  for (std::uint64_t n = 0; n <= s.order(); ++n) out << n << ',' << s[n] << '\n';
  return kExitOk;
}

// {"constants": [{"m": 1, "c_tilde": 0.1011...}, {"m": 2, "density": 0.0419...}]}
inline int run_density(const Options& o, std::ostream& out) {
  const nlohmann::json j = read_json(o.constants);
  std::vector<double> densities;
  out << "m,density\n";
  try {
    for (const auto& entry : j.at("constants")) {
      const auto m = entry.at("m").get<std::uint64_t>();
      double density = 0;
      if (entry.contains("c_tilde"))
        density = density_from_constant(entry.at("c_tilde").get<double>());
      else
        density = entry.at("density").get<double>();
      densities.push_back(density);
      out << m << ',' << format_double(density) << '\n';
    }
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error("malformed constants file: " + std::string(e.what()));
  }
  out << "sum," << format_double(sum_densities(densities)) << '\n';
  return kExitOk;
}

}  // namespace detail

/// Runs the command line `argv` and returns the exit status: 0 on success,
/// 1 on a usage error (including no arguments), 2 on a runtime error.
inline int dispatch(int argc, const char* const* argv, std::ostream& out = std::cout,
                    std::ostream& err = std::cerr) {
  detail::Options o;
  CLI::App app{"Quantitative combinatory logic workbench", "qcl"};
  app.require_subcommand(1);
  app.fallthrough(false);

  auto positive = CLI::PositiveNumber;

  auto* reduce = app.add_subcommand("reduce", "Normal-order reduction of a term");
  reduce->add_option("--term", o.term, "Term text, e.g. \"S K K S\"")->required();
  reduce->add_option("--fuel", o.fuel, "Maximum number of reduction steps")->capture_default_str();
  reduce->add_flag("--trace", o.trace, "Print every intermediate term");
  reduce->add_option("--basis", o.basis, "\"sk\" or a basis JSON file")->capture_default_str();

  auto* count = app.add_subcommand("count", "Number of terms of a given size");
  count->add_option("--basis", o.basis, "\"sk\" or a basis JSON file")->capture_default_str();
  count->add_option("--size", o.size, "Term size (application nodes)")->required();

  auto* census_cmd = app.add_subcommand("census", "Exhaustive reduction-length census");
  census_cmd->add_option("--basis", o.basis, "\"sk\" or a basis JSON file")->capture_default_str();
  census_cmd->add_option("--size", o.size, "Term size")->required();
  census_cmd->add_option("--fuel", o.fuel, "Maximum number of reduction steps")->capture_default_str()->check(positive);
  census_cmd->add_option("--pattern", o.pattern, "Also count terms containing this subterm");
  census_cmd->add_flag("--typecheck", o.typecheck, "Also count simply typeable terms (SK only)");
  census_cmd->add_option("--out", o.format, "Output format")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
  census_cmd->add_option("--workers", o.workers, "Worker threads (0: all cores)")->capture_default_str();

  auto* sample_cmd = app.add_subcommand("sample", "Draw uniform random terms");
  sample_cmd->add_option("--basis", o.basis, "\"sk\" or a basis JSON file")->capture_default_str();
  sample_cmd->add_option("--size", o.size, "Term size")->required();
  sample_cmd->add_option("--count", o.count, "Number of terms")->capture_default_str();
  sample_cmd->add_option("--seed", o.seed, "Seed")->capture_default_str();
  sample_cmd->add_flag("--print", o.print, "Print every term");

  auto* experiment_cmd = app.add_subcommand("experiment", "Monte Carlo normalisation experiment G(s, n, r)");
  experiment_cmd->add_option("--basis", o.basis, "\"sk\" or a basis JSON file")->capture_default_str();
  experiment_cmd->add_option("--samples", o.samples, "Number of samples s")->required()->check(positive);
  experiment_cmd->add_option("--size", o.size, "Term size n")->required();
  experiment_cmd->add_option("--fuel", o.fuel, "Reduction steps per sample r")->required()->check(positive);
  experiment_cmd->add_option("--seed", o.seed, "Seed")->capture_default_str();
  experiment_cmd->add_option("--workers", o.workers, "Worker threads (0: all cores)")->capture_default_str();
  experiment_cmd->add_option("--out", o.out_file, "Histogram CSV file (default: standard output)");
  experiment_cmd->add_option("--json", o.json_file, "Full result as JSON");

  auto* series_cmd = app.add_subcommand("series", "Exact generating-function coefficients");
  series_cmd->add_option("--fn", o.fn, "Series")
      ->required()
      ->check(CLI::IsMember({"C", "R0", "TL", "subterm", "invsqrt", "grammar"}));
  series_cmd->add_option("--n", o.order, "Truncation order N")->required();
  series_cmd->add_option("--d", o.d, "Number of primitives (TL, subterm)")->capture_default_str()->check(positive);
  series_cmd->add_option("--p", o.p, "Pattern size (subterm)")->capture_default_str()->check(positive);
  series_cmd->add_option("--grammar", o.grammars, "Grammar JSON for R_1 .. R_n, in order")->allow_extra_args(false);
  series_cmd->add_option("--out", o.format, "Output format")->check(CLI::IsMember({"csv"}))->capture_default_str();

  auto* density_cmd = app.add_subcommand("density", "Densities from normalised constants, and their sum");
  density_cmd->add_option("--constants", o.constants, "Constants JSON file")->required();

  if (argc <= 1) {
    err << app.help();
    return kExitUsage;
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (reduce->parsed()) return detail::run_reduce(o, out);
    if (count->parsed()) return detail::run_count(o, out);
    if (census_cmd->parsed()) return detail::run_census(o, out);
    if (sample_cmd->parsed()) return detail::run_sample(o, out);
    if (experiment_cmd->parsed()) return detail::run_experiment_cmd(o, out);
    if (series_cmd->parsed()) return detail::run_series(o, out);
    if (density_cmd->parsed()) return detail::run_density(o, out);
  } catch (const CLI::ValidationError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  err << app.help();
  return kExitUsage;
}

}  // namespace qcl::cli
