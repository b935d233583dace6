#pragma once

#include "pel/bounds.hpp"
#include "pel/entropy_engine.hpp"
#include "pel/process.hpp"

#include <json.hpp>

#include <iosfwd>
#include <string>
#include <vector>

namespace pel {

using Json = nlohmann::json;

/// Raised for JSON documents that do not match the spec schemas.
class SchemaError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Labels: a JSON string is a discrete label; an integer or {"rational": "p/q"}
// is an exact numeric location. Probabilities are "p/q" strings (integers 0
// and 1 may be bare numbers).
Symbol symbol_from_json(const Json& j);
Json symbol_to_json(const Symbol& s);

MixedDistribution distribution_from_json(const Json& j);
Json distribution_to_json(const MixedDistribution& d);

/// Process spec with a "kind" tag: iid, markov, mixed_markov, noisy, sticky,
/// hidden_markov, or builtin (by "name").
ProcessSpec spec_from_json(const Json& j);
Json spec_to_json(const ProcessSpec& spec);

/// Reads a spec from a JSON file.
ProcessSpec load_spec(const std::string& path);

/// Names of the built-in worked examples, in a fixed order.
std::vector<std::string> builtin_names();
/// Throws std::invalid_argument for unknown names.
ProcessSpec builtin_spec(const std::string& name);

/// Fixed-format number text used in every report ("%.15g").
std::string format_number(double value);

void write_csv(std::ostream& out, const EntropyReport& report);
Json to_json(const EntropyReport& report);

void write_csv(std::ostream& out, const std::vector<BoundPoint>& curve, double eps);
Json to_json(const std::vector<BoundPoint>& curve, double eps);

void write_csv(std::ostream& out, const RateReport& report, const std::string& spec_id);
Json to_json(const RateReport& report, const std::string& spec_id);

}  // namespace pel
