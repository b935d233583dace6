#include "pel/io.hpp"

#include <cstdio>
#include <fstream>
#include <ostream>
#include <set>

namespace pel {

namespace {

const Json& require(const Json& j, const char* key, const char* where) {
  if (!j.is_object() || !j.contains(key)) {
    throw SchemaError(std::string(where) + ": missing field '" + key + "'");
  }
  return j.at(key);
}

Rational prob_from_json(const Json& j) {
  if (j.is_string()) {
    try {
      return parse_rational(j.get<std::string>());
    } catch (const std::invalid_argument& e) {
      throw SchemaError(e.what());
    }
  }
  if (j.is_number_integer()) return Rational(j.get<long long>());
  throw SchemaError("probabilities must be exact rational strings such as \"1/3\"");
}

std::vector<Symbol> symbols_from_json(const Json& j, const char* where) {
  if (!j.is_array()) throw SchemaError(std::string(where) + " must be an array");
  std::vector<Symbol> out;
  for (const auto& e : j) out.push_back(symbol_from_json(e));
  return out;
}

std::vector<Rational> probs_from_json(const Json& j, const char* where) {
  if (!j.is_array()) throw SchemaError(std::string(where) + " must be an array");
  std::vector<Rational> out;
  for (const auto& e : j) out.push_back(prob_from_json(e));
  return out;
}

std::size_t index_in(const std::vector<Symbol>& symbols, const Symbol& s, const char* where) {
  for (std::size_t i = 0; i < symbols.size(); ++i) {
    if (symbols[i] == s) return i;
  }
  throw SchemaError(std::string(where) + ": unknown symbol " + s.to_string());
}

MarkovModel markov_from_json(const Json& j) {
  const auto states = symbols_from_json(require(j, "states", "markov"), "markov.states");
  if (j.contains("matrix")) {
    std::vector<std::vector<Rational>> matrix;
    for (const auto& row : j.at("matrix")) matrix.push_back(probs_from_json(row, "markov.matrix row"));
    return MarkovModel::first_order(states, matrix);
  }
  const std::size_t order = j.value("order", std::size_t{1});
  MarkovModel::Rows rows;
  for (const auto& row : require(j, "rows", "markov")) {
    StateTuple key;
    for (const auto& s : symbols_from_json(require(row, "from", "markov row"), "markov row.from")) {
      key.push_back(index_in(states, s, "markov row.from"));
    }
    rows.emplace(std::move(key), probs_from_json(require(row, "probs", "markov row"), "markov row.probs"));
  }
  return MarkovModel(order, states, std::move(rows));
}

Json markov_to_json(const MarkovModel& m) {
  Json states = Json::array();
  for (const auto& s : m.states()) states.push_back(symbol_to_json(s));
  Json rows = Json::array();
  for (const auto& [tuple, probs] : m.rows()) {
    Json from = Json::array();
    for (const auto i : tuple) from.push_back(symbol_to_json(m.states()[i]));
    Json p = Json::array();
    for (const auto& q : probs) p.push_back(format_rational(q));
    rows.push_back({{"from", from}, {"probs", p}});
  }
  return {{"kind", "markov"}, {"order", m.order()}, {"states", states}, {"rows", rows}};
}

template <typename Fn>
auto wrap_errors(Fn&& fn) {
  try {
    return fn();
  } catch (const SchemaError&) {
    throw;
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(e.what());
  } catch (const std::invalid_argument& e) {
    throw SchemaError(e.what());
  }
}

}  // namespace

Symbol symbol_from_json(const Json& j) {
  if (j.is_string()) return Symbol(j.get<std::string>());
  if (j.is_number_integer()) return Symbol(Rational(j.get<long long>()));
  if (j.is_object() && j.contains("rational")) {
    try {
      return Symbol(parse_rational(j.at("rational").get<std::string>()));
    } catch (const std::exception& e) {
      throw SchemaError(std::string("bad rational label: ") + e.what());
    }
  }
  throw SchemaError("labels must be strings, integers, or {\"rational\": \"p/q\"}");
}

Json symbol_to_json(const Symbol& s) {
  if (s.is_label()) return std::get<std::string>(s.value());
  if (s.is_numeric()) {
    const auto& r = s.numeric();
    if (boost::multiprecision::denominator(r) == 1 && abs(r) < Rational(1LL << 53)) {
      return r.convert_to<long long>();
    }
    return Json{{"rational", format_rational(r)}};
  }
  return s.to_string();
}

MixedDistribution distribution_from_json(const Json& j) {
  return wrap_errors([&] {
    std::vector<Atom> atoms;
    for (const auto& a : require(j, "atoms", "distribution")) {
      atoms.push_back({symbol_from_json(require(a, "label", "atom")), prob_from_json(require(a, "prob", "atom"))});
    }
    const Rational c = j.contains("continuous_mass") ? prob_from_json(j.at("continuous_mass")) : Rational(0);
    std::optional<Symbol> reserved;
    if (j.contains("reserved_label")) reserved = symbol_from_json(j.at("reserved_label"));
    return MixedDistribution(std::move(atoms), c, reserved);
  });
}

Json distribution_to_json(const MixedDistribution& d) {
  Json atoms = Json::array();
  for (const auto& a : d.atoms()) atoms.push_back({{"label", symbol_to_json(a.label)}, {"prob", format_rational(a.prob)}});
  return {{"atoms", atoms},
          {"continuous_mass", format_rational(d.continuous_mass())},
          {"reserved_label", symbol_to_json(d.reserved_label())}};
}

ProcessSpec spec_from_json(const Json& j) {
  return wrap_errors([&]() -> ProcessSpec {
    const std::string kind = require(j, "kind", "spec").get<std::string>();
    if (kind == "builtin") {
      auto spec = builtin_spec(require(j, "name", "builtin spec").get<std::string>());
      if (j.contains("id")) spec.id = j.at("id").get<std::string>();
      return spec;
    }
    ProcessSpec spec;
    spec.id = j.value("id", kind);
    if (kind == "iid") {
      spec.body = IidSpec{distribution_from_json(require(j, "distribution", "iid spec"))};
    } else if (kind == "markov") {
      spec.body = markov_from_json(j);
    } else if (kind == "mixed_markov") {
      const auto atoms = symbols_from_json(require(j, "atoms", "mixed_markov"), "mixed_markov.atoms");
      const Symbol reserved = symbol_from_json(require(j, "reserved_label", "mixed_markov"));
      auto states = atoms;
      states.push_back(reserved);
      MixedMarkovModel::Rows rows;
      for (const auto& row : require(j, "rows", "mixed_markov")) {
        StateTuple key;
        for (const auto& s : symbols_from_json(require(row, "from", "mixed_markov row"), "row.from")) {
          key.push_back(index_in(states, s, "mixed_markov row.from"));
        }
        rows.emplace(std::move(key), distribution_from_json(require(row, "distribution", "mixed_markov row")));
      }
      spec.body = MixedMarkovModel(j.value("order", std::size_t{1}), atoms, reserved, std::move(rows));
    } else if (kind == "noisy") {
      spec.body = AdditiveNoiseSpec(markov_from_json(require(j, "base", "noisy spec")),
                                    distribution_from_json(require(j, "noise", "noisy spec")));
    } else if (kind == "sticky") {
      StickySpec sticky{prob_from_json(require(j, "repeat_prob", "sticky spec"))};
      if (sticky.repeat_prob < 0 || sticky.repeat_prob >= 1) {
        throw SchemaError("sticky repeat_prob must lie in [0,1)");
      }
      spec.body = sticky;
    } else if (kind == "hidden_markov") {
      std::vector<std::vector<Rational>> emission;
      for (const auto& row : require(j, "emission", "hidden_markov")) {
        emission.push_back(probs_from_json(row, "emission row"));
      }
      spec.body = HiddenMarkovModel(markov_from_json(require(j, "hidden", "hidden_markov")),
                                    symbols_from_json(require(j, "observations", "hidden_markov"), "observations"),
                                    std::move(emission));
    } else {
      throw SchemaError("unknown process kind '" + kind + "'");
    }
    return spec;
  });
}

Json spec_to_json(const ProcessSpec& spec) {
  Json j;
  if (const auto* iid = std::get_if<IidSpec>(&spec.body)) {
    j = {{"kind", "iid"}, {"distribution", distribution_to_json(iid->dist)}};
  } else if (const auto* m = std::get_if<MarkovModel>(&spec.body)) {
    j = markov_to_json(*m);
  } else if (const auto* mm = std::get_if<MixedMarkovModel>(&spec.body)) {
    Json atoms = Json::array();
    for (const auto& a : mm->atoms()) atoms.push_back(symbol_to_json(a));
    Json rows = Json::array();
    for (const auto& [tuple, dist] : mm->rows()) {
      Json from = Json::array();
      for (const auto i : tuple) {
        from.push_back(symbol_to_json(i == mm->continuum_index() ? mm->reserved_label() : mm->atoms()[i]));
      }
      rows.push_back({{"from", from}, {"distribution", distribution_to_json(dist)}});
    }
    j = {{"kind", "mixed_markov"}, {"order", mm->order()}, {"atoms", atoms},
         {"reserved_label", symbol_to_json(mm->reserved_label())}, {"rows", rows}};
  } else if (const auto* noisy = std::get_if<AdditiveNoiseSpec>(&spec.body)) {
    j = {{"kind", "noisy"}, {"base", markov_to_json(noisy->base())}, {"noise", distribution_to_json(noisy->noise())}};
  } else if (const auto* sticky = std::get_if<StickySpec>(&spec.body)) {
    j = {{"kind", "sticky"}, {"repeat_prob", format_rational(sticky->repeat_prob)}};
  } else {
    const auto& hmm = std::get<HiddenMarkovModel>(spec.body);
    Json obs = Json::array();
    for (const auto& o : hmm.observations()) obs.push_back(symbol_to_json(o));
    Json emission = Json::array();
    for (const auto& row : hmm.emission()) {
      Json r = Json::array();
      for (const auto& p : row) r.push_back(format_rational(p));
      emission.push_back(r);
    }
    j = {{"kind", "hidden_markov"}, {"hidden", markov_to_json(hmm.hidden())}, {"observations", obs}, {"emission", emission}};
  }
  j["id"] = spec.id;
  return j;
}

ProcessSpec load_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SchemaError("cannot open spec file '" + path + "'");
  Json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError("spec file '" + path + "': " + e.what());
  }
  return spec_from_json(j);
}

std::vector<std::string> builtin_names() {
  return {"ex2-finite-iid", "ex3-uniform", "ex4-mixed-iid", "ex5-mixed-markov", "ex6-noisy-markov", "ex7-sticky"};
}

ProcessSpec builtin_spec(const std::string& name) {
  ProcessSpec spec;
  spec.id = name;
  const Rational zero(0), one(1), half(1, 2), third(1, 3), quarter(1, 4);
  if (name == "ex2-finite-iid") {
    spec.body = IidSpec{MixedDistribution({{"a", half}, {"b", quarter}, {"c", quarter}}, zero)};
  } else if (name == "ex3-uniform") {
    spec.body = IidSpec{MixedDistribution({}, one)};
  } else if (name == "ex4-mixed-iid") {
    spec.body = IidSpec{MixedDistribution({{Rational(0), third}, {Rational(1), third}}, third)};
  } else if (name == "ex5-mixed-markov") {
    const Symbol s0(Rational(0)), s1(Rational(1));
    MixedMarkovModel::Rows rows;
    rows.emplace(StateTuple{0}, MixedDistribution({{s0, Rational(3, 4)}, {s1, quarter}}, zero));
    rows.emplace(StateTuple{1}, MixedDistribution({{s0, quarter}, {s1, half}}, quarter));
    rows.emplace(StateTuple{2}, MixedDistribution({{s0, quarter}, {s1, quarter}}, half));
    // The continuum state is labelled 1/2 when the clumped chain is written out.
    spec.body = MixedMarkovModel(1, {s0, s1}, Symbol(half), std::move(rows));
  } else if (name == "ex6-noisy-markov") {
    auto base = MarkovModel::first_order({Symbol(Rational(1)), Symbol(Rational(2))},
                                         {{Rational(3, 4), quarter}, {third, Rational(2, 3)}});
    // Gaussian part of the noise enters only through its mass 1/2.
    spec.body = AdditiveNoiseSpec(std::move(base), MixedDistribution({{Symbol(Rational(0)), half}}, half, Symbol("n_o")));
  } else if (name == "ex7-sticky") {
    spec.body = StickySpec{half};
  } else {
    throw std::invalid_argument("unknown builtin spec '" + name + "'");
  }
  return spec;
}

std::string format_number(double value) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.15g", value);
  return buf;
}

void write_csv(std::ostream& out, const EntropyReport& report) {
  out << "# pel entropy-report v1 estimator=" << to_string(report.estimator) << "\n";
  out << "n,H_block_bits,H_cond_bits,method,stderr,samples,spec_id\n";
  for (const auto& row : report.rows) {
    out << row.n << ',' << format_number(row.block_bits) << ',' << format_number(row.conditional_bits) << ','
        << to_string(row.method) << ',' << (row.block_stderr ? format_number(*row.block_stderr) : "") << ','
        << row.samples << ',' << report.spec_id << '\n';
  }
}

Json to_json(const EntropyReport& report) {
  Json rows = Json::array();
  for (const auto& row : report.rows) {
    Json r = {{"n", row.n},
              {"H_block_bits", row.block_bits},
              {"H_cond_bits", row.conditional_bits},
              {"method", to_string(row.method)},
              {"samples", row.samples}};
    r["stderr"] = row.block_stderr ? Json(*row.block_stderr) : Json(nullptr);
    r["stderr_cond"] = row.conditional_stderr ? Json(*row.conditional_stderr) : Json(nullptr);
    rows.push_back(r);
  }
  return {{"spec_id", report.spec_id}, {"estimator", to_string(report.estimator)}, {"rows", rows}};
}

void write_csv(std::ostream& out, const std::vector<BoundPoint>& curve, double eps) {
  out << "# pel bound-curve v1 eps=" << format_number(eps) << "\n";
  out << "n,bound_bits,argmax_l\n";
  for (const auto& p : curve) out << p.n << ',' << format_number(p.bound_bits) << ',' << p.argmax_l << '\n';
}

Json to_json(const std::vector<BoundPoint>& curve, double eps) {
  Json points = Json::array();
  for (const auto& p : curve) {
    points.push_back({{"n", p.n}, {"bound_bits", p.bound_bits}, {"argmax_l", p.argmax_l}, {"vacuous", p.vacuous}});
  }
  return {{"eps", eps}, {"points", points}};
}

void write_csv(std::ostream& out, const RateReport& report, const std::string& spec_id) {
  out << "# pel rate-report v1\n";
  out << "quantity,value,spec_id\n";
  auto line = [&](const char* name, const std::optional<double>& v) {
    if (v) out << name << ',' << format_number(*v) << ',' << spec_id << '\n';
  };
  line("rate_bits", report.rate);
  line("tilde_rate_bits", report.tilde_rate);
  line("lower_bits", report.lower);
  line("upper_bits", report.upper);
  out << "basis," << report.basis << ',' << spec_id << '\n';
  for (const auto& w : report.warnings) out << "warning," << w << ',' << spec_id << '\n';
}

Json to_json(const RateReport& report, const std::string& spec_id) {
  auto opt = [](const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); };
  return {{"spec_id", spec_id},         {"rate_bits", opt(report.rate)}, {"tilde_rate_bits", opt(report.tilde_rate)},
          {"lower_bits", opt(report.lower)}, {"upper_bits", opt(report.upper)}, {"basis", report.basis},
          {"warnings", report.warnings}};
}

}  // namespace pel
