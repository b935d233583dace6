#include "experiments.hpp"

#include "acceptance.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

namespace pel::experiments {

namespace {

const std::vector<std::pair<Task, std::string>> kTaskNames{
    {Task::Pattern, "pattern"}, {Task::ExactEntropy, "exact-entropy"}, {Task::McEntropy, "mc-entropy"},
    {Task::Rate, "rate"},       {Task::Bounds, "bounds"},              {Task::Growth, "growth"},
    {Task::VerifyAll, "verify-all"}};

const std::vector<std::string> kKnownKeys{
    "task", "spec", "input", "lines", "n_min", "n_max", "lengths", "cap", "samples", "seed", "estimator",
    "bootstrap", "workers", "eps", "delta", "n_grid", "keep", "out", "format", "strict"};

std::size_t size_field(const Json& j, const char* key) {
  const auto& v = j.at(key);
  if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0)) {
    throw SchemaError(std::string("\"") + key + "\" must be a non-negative integer");
  }
  return v.get<std::size_t>();
}

std::vector<std::size_t> size_list(const Json& j, const char* key) {
  if (!j.at(key).is_array()) throw SchemaError(std::string("\"") + key + "\" must be an array");
  std::vector<std::size_t> out;
  for (const auto& v : j.at(key)) {
    if (!v.is_number_integer() || v.get<long long>() < 1) {
      throw SchemaError(std::string("\"") + key + "\" entries must be positive integers");
    }
    out.push_back(v.get<std::size_t>());
  }
  return out;
}

std::string resolve(const std::string& path, const std::string& base_dir) {
  const std::filesystem::path p(path);
  if (p.is_absolute()) return path;
  return (std::filesystem::path(base_dir) / p).string();
}

std::string csv_quote(const std::string& s) {
  std::string out = "\"";
  for (const char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

const ProcessSpec& require_spec(const ExperimentConfig& config) {
  if (!config.spec) throw SchemaError("task " + to_string(*config.task) + " needs a \"spec\"");
  return *config.spec;
}

std::size_t require_n_max(const ExperimentConfig& config) {
  if (!config.n_max) throw SchemaError("task " + to_string(*config.task) + " needs \"n_max\"");
  if (*config.n_max < config.n_min) throw SchemaError("\"n_max\" is below \"n_min\"");
  return *config.n_max;
}

void collect_compliance(const ProcessSpec& spec, Outcome& outcome, bool strict) {
  const auto c = check_compliance(spec);
  outcome.warnings.insert(outcome.warnings.end(), c.warnings.begin(), c.warnings.end());
  if (strict && !c.repeatability) outcome.exit_code = 1;
}

std::string pattern_task(const ExperimentConfig& config) {
  std::vector<std::string> lines;
  if (config.input_path) {
    std::ifstream in(*config.input_path);
    if (!in) throw SchemaError("cannot read input file " + *config.input_path);
    std::string line;
    while (std::getline(in, line)) {
      if (!line.empty() && line.back() == '\r') line.pop_back();
      lines.push_back(line);
    }
  }
  lines.insert(lines.end(), config.lines.begin(), config.lines.end());
  if (lines.empty()) throw SchemaError("task pattern needs \"input\" or \"lines\"");

  std::ostringstream os;
  if (config.format == Format::Csv) {
    os << "# pel patterns v1\nline,length,distinct,pattern\n";
    for (std::size_t i = 0; i < lines.size(); ++i) {
      const auto p = pattern_of_text(lines[i]);
      os << i + 1 << ',' << p.size() << ',' << p.distinct() << ',' << csv_quote(p.to_string()) << '\n';
    }
  } else {
    Json rows = Json::array();
    for (std::size_t i = 0; i < lines.size(); ++i) {
      const auto p = pattern_of_text(lines[i]);
      rows.push_back({{"line", i + 1}, {"text", lines[i]}, {"pattern", p.labels()}, {"distinct", p.distinct()}});
    }
    os << Json{{"format", "pel patterns v1"}, {"patterns", rows}}.dump(2) << '\n';
  }
  return os.str();
}

std::string entropy_text(const EntropyReport& report, Format format) {
  std::ostringstream os;
  if (format == Format::Csv) {
    write_csv(os, report);
  } else {
    os << to_json(report).dump(2) << '\n';
  }
  return os.str();
}

std::string bounds_task(const ExperimentConfig& config) {
  const auto& spec = require_spec(config);
  std::ostringstream os;
  if (const auto* iid = std::get_if<IidSpec>(&spec.body)) {
    const auto keep = config.keep.empty() ? iid->dist.atom_labels() : config.keep;
    if (keep.empty()) throw SchemaError("the single-letter bound needs at least one atom");
    const std::size_t n_max = require_n_max(config);
    std::string keep_text;
    for (const auto& s : keep) keep_text += (keep_text.empty() ? "" : " ") + s.to_string();
    Json rows = Json::array();
    if (config.format == Format::Csv) {
      os << "# pel single-letter-bound v1 keep=" << keep_text << "\nn,bound_bits,vacuous,spec_id\n";
    }
    for (std::size_t n = std::max<std::size_t>(config.n_min, 1); n <= n_max; ++n) {
      const double b = prop4_lower_bound(iid->dist, keep, n);
      const bool vacuous = prop4_is_vacuous(iid->dist, keep, n);
      if (config.format == Format::Csv) {
        os << n << ',' << format_number(b) << ',' << (vacuous ? 1 : 0) << ',' << spec.id << '\n';
      } else {
        rows.push_back({{"n", n}, {"bound_bits", b}, {"vacuous", vacuous}});
      }
    }
    if (config.format == Format::Json) {
      os << Json{{"format", "pel single-letter-bound v1"}, {"spec_id", spec.id}, {"keep", keep_text}, {"rows", rows}}
                .dump(2)
         << '\n';
    }
  } else if (const auto* mixed = std::get_if<MixedMarkovModel>(&spec.body)) {
    const auto atoms = config.keep.empty() ? mixed->atoms() : config.keep;
    Json rows = Json::array();
    if (config.format == Format::Csv) os << "# pel waiting-time-bound v1\natom,bound_bits,spec_id\n";
    for (const auto& a : atoms) {
      const double b = waiting_time_entropy_bound(*mixed, a);
      if (config.format == Format::Csv) {
        os << csv_quote(a.to_string()) << ',' << format_number(b) << ',' << spec.id << '\n';
      } else {
        rows.push_back({{"atom", a.to_string()}, {"bound_bits", b}});
      }
    }
    if (config.format == Format::Json) {
      os << Json{{"format", "pel waiting-time-bound v1"}, {"spec_id", spec.id}, {"rows", rows}}.dump(2) << '\n';
    }
  } else {
    throw UnsupportedSpec("task bounds supports i.i.d. and mixed Markov specs");
  }
  return os.str();
}

std::string growth_task(const ExperimentConfig& config, Outcome& outcome) {
  const GrowthDistribution dist(config.eps);
  std::vector<std::size_t> grid = config.n_grid;
  if (grid.empty()) grid = {1000, 10000, 100000, 1000000};
  const auto curve = theorem5_curve(dist, grid);
  if (config.delta) {
    // The curve should beat (log n)^{1-delta} eventually when eps < delta.
    if (!(config.eps < std::min(*config.delta, 1.0))) {
      outcome.warnings.push_back("eps is not below min(delta, 1); the growth comparison does not apply");
      if (config.strict) outcome.exit_code = 1;
    }
  }
  std::ostringstream os;
  if (config.format == Format::Csv) {
    write_csv(os, curve, config.eps);
  } else {
    os << to_json(curve, config.eps).dump(2) << '\n';
  }
  return os.str();
}

std::string verify_task(const ExperimentConfig& config, Outcome& outcome) {
  acceptance::Options options;
  if (config.seed) options.seed = *config.seed;
  options.workers = config.workers;
  const auto results = acceptance::run_all(options);
  if (!acceptance::all_passed(results)) outcome.exit_code = 1;
  if (config.format == Format::Csv) return acceptance::format_report(results);
  Json rows = Json::array();
  for (const auto& r : results) {
    rows.push_back({{"id", r.id}, {"name", r.name}, {"passed", r.passed}, {"detail", r.detail}});
  }
  return Json{{"format", "pel acceptance v1"}, {"criteria", rows}}.dump(2) + "\n";
}

}  // namespace

std::string to_string(Task t) {
  for (const auto& [task, name] : kTaskNames) {
    if (task == t) return name;
  }
  return "unknown";
}

Task parse_task(const std::string& text) {
  for (const auto& [task, name] : kTaskNames) {
    if (name == text) return task;
  }
  throw SchemaError("unknown task \"" + text + "\"");
}

ExperimentConfig config_from_json(const Json& j, const std::string& base_dir) {
  if (!j.is_object()) throw SchemaError("config must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    if (std::find(kKnownKeys.begin(), kKnownKeys.end(), key) == kKnownKeys.end()) {
      throw SchemaError("unknown config field \"" + key + "\"");
    }
  }
  ExperimentConfig c;
  try {
    if (j.contains("task")) c.task = parse_task(j.at("task").get<std::string>());
    if (j.contains("spec")) {
      const auto& s = j.at("spec");
      c.spec = s.is_string() ? load_spec(resolve(s.get<std::string>(), base_dir)) : spec_from_json(s);
    }
    if (j.contains("input")) c.input_path = resolve(j.at("input").get<std::string>(), base_dir);
    if (j.contains("lines")) c.lines = j.at("lines").get<std::vector<std::string>>();
    if (j.contains("n_min")) c.n_min = size_field(j, "n_min");
    if (j.contains("n_max")) c.n_max = size_field(j, "n_max");
    if (j.contains("lengths")) c.lengths = size_list(j, "lengths");
    if (j.contains("cap")) c.cap = size_field(j, "cap");
    if (j.contains("samples")) c.samples = size_field(j, "samples");
    if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("estimator")) c.estimator = parse_estimator(j.at("estimator").get<std::string>());
    if (j.contains("bootstrap")) c.bootstrap = size_field(j, "bootstrap");
    if (j.contains("workers")) c.workers = size_field(j, "workers");
    if (j.contains("eps")) c.eps = j.at("eps").get<double>();
    if (j.contains("delta")) c.delta = j.at("delta").get<double>();
    if (j.contains("n_grid")) c.n_grid = size_list(j, "n_grid");
    if (j.contains("keep")) {
      for (const auto& s : j.at("keep")) c.keep.push_back(symbol_from_json(s));
    }
    if (j.contains("out")) c.out = j.at("out").get<std::string>();
    if (j.contains("format")) {
      const auto f = j.at("format").get<std::string>();
      if (f == "csv") {
        c.format = Format::Csv;
      } else if (f == "json") {
        c.format = Format::Json;
      } else {
        throw SchemaError("format must be csv or json");
      }
    }
    if (j.contains("strict")) c.strict = j.at("strict").get<bool>();
  } catch (const Json::exception& e) {
    throw SchemaError(std::string("config: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw SchemaError(std::string("config: ") + e.what());
  }
  if (c.workers == 0) throw SchemaError("\"workers\" must be at least 1");
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SchemaError("cannot read config file " + path);
  Json j;
  try {
    in >> j;
  } catch (const Json::exception& e) {
    throw SchemaError(path + ": " + e.what());
  }
  const auto dir = std::filesystem::path(path).parent_path();
  return config_from_json(j, dir.empty() ? "." : dir.string());
}

Outcome run(const ExperimentConfig& config) {
  if (!config.task) throw SchemaError("config names no task");
  Outcome outcome;
  switch (*config.task) {
    case Task::Pattern:
      outcome.report = pattern_task(config);
      break;
    case Task::ExactEntropy: {
      const auto& spec = require_spec(config);
      collect_compliance(spec, outcome, config.strict);
      outcome.report = entropy_text(exact_entropy_profile(spec, config.n_min, require_n_max(config), config.cap),
                                    config.format);
      break;
    }
    case Task::McEntropy: {
      const auto& spec = require_spec(config);
      if (!config.seed) throw SchemaError("task mc-entropy needs an explicit \"seed\"");
      collect_compliance(spec, outcome, config.strict);
      McOptions mc;
      mc.lengths = config.lengths;
      if (mc.lengths.empty()) {
        for (std::size_t n = std::max<std::size_t>(config.n_min, 1); n <= require_n_max(config); ++n) {
          mc.lengths.push_back(n);
        }
      }
      mc.samples = config.samples;
      mc.seed = *config.seed;
      mc.estimator = config.estimator;
      mc.bootstrap = config.bootstrap;
      mc.workers = config.workers;
      outcome.report = entropy_text(mc_pattern_entropy(spec, mc), config.format);
      break;
    }
    case Task::Rate: {
      const auto& spec = require_spec(config);
      collect_compliance(spec, outcome, config.strict);
      const auto report = theoretical_rate(spec);
      std::ostringstream os;
      if (config.format == Format::Csv) {
        write_csv(os, report, spec.id);
      } else {
        os << to_json(report, spec.id).dump(2) << '\n';
      }
      outcome.report = os.str();
      break;
    }
    case Task::Bounds:
      outcome.report = bounds_task(config);
      break;
    case Task::Growth:
      outcome.report = growth_task(config, outcome);
      break;
    case Task::VerifyAll:
      outcome.report = verify_task(config, outcome);
      break;
  }
  if (config.out) {
    std::ofstream out(*config.out, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + *config.out);
    out << outcome.report;
  }
  return outcome;
}

}  // namespace pel::experiments
