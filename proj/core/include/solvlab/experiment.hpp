#pragma once

// Seeded, reproducible experiment suites over the core modules. Each suite
// renders a canonical table (CSV or JSON) whose bytes depend only on the
// configuration, and reports failures as a machine-readable record naming
// the module, the operation, and a witness.

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "solvlab/furman.hpp"

namespace solvlab::experiment {

struct ConfigError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

enum class OutputFormat { Csv, Json };

OutputFormat parse_format(const std::string& text);  // "csv" or "json"
std::string to_string(OutputFormat format);

// Suites:
//   metric-axioms  boundary-metric laws (identity, symmetry, triangle) on
//                  random triples, half on the digit boundary of branching
//                  `m`, half on the block boundary of `matrix`.
//   relations      defining-relation deviations of the model action of
//                  `matrix` over seeded sample points.
//   furman         the section-map report for `group` extended by
//                  `extension` at `radius`.
struct ExperimentConfig {
  std::string suite;
  std::string matrix = "[[2,1],[1,1]]";
  int m = 2;
  std::string group = "ll:2";
  std::string extension = "flip";
  int radius = 5;
  long long samples = 10000;
  std::uint64_t seed = 1;
  OutputFormat format = OutputFormat::Csv;
};

struct FailureRecord {
  std::string module;
  std::string operation;
  std::string witness;
};

// One-line JSON rendering of a failure record.
std::string format_failure(const FailureRecord& record);

struct SuiteResult {
  bool pass = false;
  std::optional<FailureRecord> failure;  // set when pass is false
  std::vector<std::string> columns;
  std::string table;  // rendered in the configured format
};

// Runs one suite. Deterministic: identical configurations give
// byte-identical tables. Throws ConfigError on an unknown suite or
// malformed parameters; assertion failures are reported in the result,
// not thrown.
SuiteResult run_suite(const ExperimentConfig& config);

// Group literals: "bs:1,m", "abc:[[...]]", "ll:q".
furman::BaseGroup parse_base_group(const std::string& text);

// Extension literals: "trivial" (F order 1), "product:<f>" (trivial action),
// "flip" (the mirror involution; lamplighter bases only).
furman::Envelope parse_envelope(const std::string& group, const std::string& extension);

// Comma-joined header and rows, one line each; fields must not contain
// commas or newlines.
std::string render_csv(const std::vector<std::string>& columns,
                       const std::vector<std::vector<std::string>>& rows);

// Fixed 12-significant-digit rendering, stable across runs.
std::string format_double(double x);

}  // namespace solvlab::experiment
