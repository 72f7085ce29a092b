#pragma once

// Batch verbs behind the sginf command-line tool. Each verb reads its
// inputs, runs one analysis and writes a JSON report (plus a CSV series for
// pde-demo). Output depends only on inputs, options and seed.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

namespace sginf::cli {

enum ExitCode : int { kOk = 0, kInputError = 2, kNumericalError = 3 };

inline constexpr std::uint64_t kDefaultSeed = 20240521;

struct CommandOptions {
  std::string verb;
  std::string input;
  std::string output;  // empty: stdout
  std::string csv;     // pde-demo series; empty: <output stem>.csv, or none when writing to stdout
  std::optional<std::string> monoid;
  std::optional<std::string> norm;
  std::optional<double> tol;
  std::optional<long long> k_max;
  std::optional<double> t_max;
  std::uint64_t seed = kDefaultSeed;
  int jobs = 0;  // 0: OpenMP default
  std::string lambda = "1";
  std::string kind;
  int count = 100;
};

/// Runs one verb. Diagnostics go to `err`; the report goes to `out` when
/// no output path is set. Never throws.
int run(const CommandOptions& opts, std::ostream& out, std::ostream& err);

/// Parses "re" or "re,im".
std::optional<std::pair<double, double>> parse_complex(const std::string& text);

}  // namespace sginf::cli
