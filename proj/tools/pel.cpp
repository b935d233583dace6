#include "experiments.hpp"

#include <CLI11.hpp>

#include <iostream>

namespace {

int run_cli(int argc, char** argv) {
  using namespace pel::experiments;
  CLI::App app{"Pattern entropy experiments"};
  std::string task_name, config_path, out, format;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> samples, n_max, workers;
  app.add_option("task", task_name, "pattern, exact-entropy, mc-entropy, rate, bounds, growth or verify-all")
      ->required();
  app.add_option("--config", config_path, "experiment config (JSON)");
  app.add_option("--seed", seed, "master seed");
  app.add_option("--samples", samples, "Monte Carlo sample count");
  app.add_option("--n-max", n_max, "largest block length");
  app.add_option("--out", out, "output file (default stdout)");
  app.add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  app.add_option("--workers", workers, "worker threads")->check(CLI::PositiveNumber);
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    const Task task = parse_task(task_name);
    ExperimentConfig config;
    if (!config_path.empty()) {
      config = load_config(config_path);
    } else if (task != Task::VerifyAll) {
      throw pel::SchemaError("--config is required for task " + task_name);
    }
    if (config.task && *config.task != task) {
      throw pel::SchemaError("config task \"" + to_string(*config.task) + "\" does not match " + task_name);
    }
    config.task = task;
    if (seed) config.seed = *seed;
    if (samples) config.samples = *samples;
    if (n_max) config.n_max = *n_max;
    if (workers) config.workers = *workers;
    if (!out.empty()) config.out = out;
    if (!format.empty()) config.format = format == "json" ? Format::Json : Format::Csv;

    const auto outcome = run(config);
    for (const auto& w : outcome.warnings) std::cerr << "warning: " << w << '\n';
    if (!config.out) std::cout << outcome.report;
    if (task == Task::VerifyAll && config.out) std::cout << outcome.report;
    return outcome.exit_code;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
}

}  // namespace

int main(int argc, char** argv) { return run_cli(argc, argv); }
