#pragma once

#include "pel/io.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace pel::experiments {

enum class Task { Pattern, ExactEntropy, McEntropy, Rate, Bounds, Growth, VerifyAll };

std::string to_string(Task t);
/// Throws SchemaError for unknown task names.
Task parse_task(const std::string& text);

enum class Format { Csv, Json };

struct ExperimentConfig {
  /// May be left out of the file and supplied on the command line.
  std::optional<Task> task;
  std::optional<ProcessSpec> spec;
  /// pattern task: a text file (one sequence per line) and/or inline lines.
  std::optional<std::string> input_path;
  std::vector<std::string> lines;

  std::size_t n_min = 1;
  std::optional<std::size_t> n_max;
  std::vector<std::size_t> lengths;
  std::size_t cap = kDefaultEnumerationCap;

  std::size_t samples = 100000;
  std::optional<std::uint64_t> seed;
  Estimator estimator = Estimator::Plugin;
  std::size_t bootstrap = 200;
  std::size_t workers = 1;

  double eps = 0.5;
  std::optional<double> delta;
  std::vector<std::size_t> n_grid;
  /// Atom subset B for the single-letter bound; empty means every atom.
  std::vector<Symbol> keep;

  std::optional<std::string> out;
  Format format = Format::Csv;
  /// Treat failed hypothesis checks as errors (exit 1) instead of warnings.
  bool strict = false;
};

/// Parses a config document. Relative paths inside it resolve against `base_dir`.
/// Throws SchemaError.
ExperimentConfig config_from_json(const Json& j, const std::string& base_dir = ".");
ExperimentConfig load_config(const std::string& path);

struct Outcome {
  int exit_code = 0;
  /// Report text, already written to config.out when set.
  std::string report;
  std::vector<std::string> warnings;
};

/// Runs one experiment. Engine and schema errors propagate as exceptions;
/// exit_code is 1 when a checked criterion or a strict hypothesis fails.
Outcome run(const ExperimentConfig& config);

}  // namespace pel::experiments
