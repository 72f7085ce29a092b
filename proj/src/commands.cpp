#include "sginf/commands.hpp"

#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

#include <omp.h>

#include <json.hpp>

#include "sginf/ensembles.hpp"
#include "sginf/errors.hpp"
#include "sginf/infinity.hpp"
#include "sginf/matrix_io.hpp"
#include "sginf/parabolic.hpp"
#include "sginf/report.hpp"

namespace sginf::cli {

namespace {

using nlohmann::json;

void write_file(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw InputError("cannot open output file \"" + path + "\"");
  f << text;
  if (!f) throw InputError("failed writing \"" + path + "\"");
}

void emit(const CommandOptions& opts, const json& j, std::ostream& out) {
  const std::string text = report::dump(j);
  if (opts.output.empty()) {
    out << text;
  } else {
    write_file(opts.output, text);
  }
}

NormP parse_norm(const std::string& s) {
  if (s == "1") return NormP::One;
  if (s == "2") return NormP::Two;
  if (s == "inf") return NormP::Inf;
  throw InputError("--norm must be 1, 2 or inf (got \"" + s + "\")");
}

void require_input(const CommandOptions& opts) {
  if (opts.input.empty()) throw InputError(opts.verb + ": --input is required");
}

SemigroupSpec load_semigroup(const CommandOptions& opts, bool discrete) {
  require_input(opts);
  const std::string text = read_text_file(opts.input);
  std::optional<SemigroupSpec> sg;
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && text[first] == '{') {
    json j;
    try {
      j = json::parse(text);
    } catch (const json::parse_error& e) {
      throw InputError(opts.input + ": " + e.what());
    }
    if (j.contains("mode")) {
      sg = SemigroupSpec::from_json(j);
      if (sg->is_discrete() != discrete)
        throw InputError(opts.input + ": field \"mode\" must be \"" +
                         std::string(discrete ? "discrete" : "continuous") + "\" for " + opts.verb);
    }
  }
  ComplexMatrix m = sg ? sg->matrix() : load_matrix(opts.input);
  NormP p = sg ? sg->norm_p() : NormP::Inf;
  IndexMonoid monoid = sg ? sg->monoid() : (discrete ? IndexMonoid::naturals() : IndexMonoid::nonneg_reals());
  if (opts.norm) p = parse_norm(*opts.norm);
  if (opts.monoid) monoid = IndexMonoid::parse(*opts.monoid);
  return discrete ? SemigroupSpec::discrete(std::move(m), p, monoid)
                  : SemigroupSpec::continuous(std::move(m), p, monoid);
}

AnalyzerOptions analyzer_options(const CommandOptions& opts) {
  AnalyzerOptions a;
  if (opts.tol) {
    if (!(*opts.tol > 0.0 && *opts.tol < 1e-2)) throw InputError("--tol must lie in (0, 1e-2)");
    a.tol.circle = *opts.tol;
  }
  if (opts.k_max) {
    if (*opts.k_max < 1 || *opts.k_max > 100000000) throw InputError("--k-max must lie in [1, 1e8]");
    a.k_max = *opts.k_max;
  }
  return a;
}

void analyze(const CommandOptions& opts, bool discrete, std::ostream& out) {
  const SemigroupSpec sg = load_semigroup(opts, discrete);
  const ConvergenceReport rep = converges(sg, analyzer_options(opts));
  json j = report::convergence_to_json(opts.verb, sg, rep);
  j["positive"] = is_positive(sg);
  emit(opts, j, out);
}

void abel_probe(const CommandOptions& opts, std::ostream& out) {
  require_input(opts);
  const ComplexMatrix t = load_matrix(opts.input);
  const auto lam = parse_complex(opts.lambda);
  if (!lam) throw InputError("--lambda must be \"re\" or \"re,im\" (got \"" + opts.lambda + "\")");
  const Complex lambda(lam->first, lam->second);
  if (std::abs(std::abs(lambda) - 1.0) > 1e-8) throw InputError("--lambda must be unimodular");
  AbelOptions ao;
  if (opts.tol) ao.eps0 = *opts.tol;
  const auto res = abel_pole_probe(t, lambda, 16, ao);
  emit(opts, report::pole_probe_to_json(t, lambda, res), out);
}

void pde_demo(const CommandOptions& opts, std::ostream& out) {
  require_input(opts);
  json j;
  try {
    j = json::parse(read_text_file(opts.input));
  } catch (const json::parse_error& e) {
    throw InputError(opts.input + ": " + e.what());
  }
  pde::Scenario sc = pde::Scenario::from_json(j);
  if (opts.t_max) {
    if (!(*opts.t_max > 0.0)) throw InputError("--t-max must be positive");
    sc.t_max = *opts.t_max;
  }
  const auto res = pde::run_scenario(sc);
  emit(opts, report::scenario_to_json(sc, res), out);

  std::string csv_path = opts.csv;
  if (csv_path.empty() && !opts.output.empty())
    csv_path = std::filesystem::path(opts.output).replace_extension(".csv").string();
  if (!csv_path.empty()) write_file(csv_path, report::convergence_csv(res.convergence));
}

void ensemble(const CommandOptions& opts, std::ostream& out) {
  if (opts.kind.empty()) throw InputError("ensemble: --kind is required");
  const auto kind = ensemble::parse_kind(opts.kind);
  const auto stats = ensemble::run(kind, opts.count, opts.seed);
  json j = {{"report", "ensemble"}, {"schema_version", report::kSchemaVersion}};
  j.update(stats.to_json());
  emit(opts, j, out);
}

}  // namespace

std::optional<std::pair<double, double>> parse_complex(const std::string& text) {
  std::istringstream is(text);
  double re = 0.0;
  double im = 0.0;
  if (!(is >> re)) return std::nullopt;
  char sep = 0;
  if (is >> sep) {
    if (sep != ',' || !(is >> im)) return std::nullopt;
  }
  std::string rest;
  if (is >> rest) return std::nullopt;
  return std::make_pair(re, im);
}

int run(const CommandOptions& opts, std::ostream& out, std::ostream& err) {
  try {
    if (opts.jobs < 0) throw InputError("--jobs must be >= 0");
    if (opts.jobs > 0) omp_set_num_threads(opts.jobs);
    if (opts.verb == "analyze-matrix") {
      analyze(opts, true, out);
    } else if (opts.verb == "analyze-generator") {
      analyze(opts, false, out);
    } else if (opts.verb == "abel-probe") {
      abel_probe(opts, out);
    } else if (opts.verb == "pde-demo") {
      pde_demo(opts, out);
    } else if (opts.verb == "ensemble") {
      ensemble(opts, out);
    } else {
      throw InputError("unknown verb \"" + opts.verb + "\"");
    }
    return kOk;
  } catch (const NumericalError& e) {
    err << "numerical failure: " << e.what() << '\n';
    return kNumericalError;
  } catch (const InputError& e) {
    err << "input error: " << e.what() << '\n';
  } catch (const PreconditionError& e) {
    err << "input error: " << e.what() << '\n';
  } catch (const DomainError& e) {
    err << "input error: " << e.what() << '\n';
  } catch (const nlohmann::json::exception& e) {
    err << "input error: " << e.what() << '\n';
  } catch (const std::exception& e) {
    err << "numerical failure: " << e.what() << '\n';
    return kNumericalError;
  }
  return kInputError;
}

}  // namespace sginf::cli
