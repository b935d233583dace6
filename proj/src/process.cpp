#include "pel/process.hpp"

#include "parallel.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <set>

namespace pel {

namespace {

Rational row_total(const std::vector<Rational>& row) {
  Rational total = 0;
  for (const auto& p : row) total += p;
  return total;
}

void check_row(const std::vector<Rational>& row, std::size_t width, const std::string& where) {
  if (row.size() != width) {
    throw std::invalid_argument(where + ": row has " + std::to_string(row.size()) +
                                " entries, expected " + std::to_string(width));
  }
  for (const auto& p : row) {
    if (p < 0) throw std::invalid_argument(where + ": negative transition probability");
  }
  const long double gap = std::fabs(to_long_double(row_total(row)) - 1.0L);
  if (gap > kMassTolerance) throw std::invalid_argument(where + ": row does not sum to 1");
}

std::string tuple_text(const StateTuple& t) {
  std::string out = "(";
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (i) out += ",";
    out += std::to_string(t[i]);
  }
  return out + ")";
}

bool strongly_connected(const std::vector<std::vector<Rational>>& transition) {
  const std::size_t n = transition.size();
  if (n == 0) return false;
  auto reach_all = [&](bool forward) {
    std::vector<bool> seen(n, false);
    std::deque<std::size_t> queue{0};
    seen[0] = true;
    std::size_t count = 1;
    while (!queue.empty()) {
      const std::size_t i = queue.front();
      queue.pop_front();
      for (std::size_t j = 0; j < n; ++j) {
        const bool edge = forward ? transition[i][j] > 0 : transition[j][i] > 0;
        if (edge && !seen[j]) {
          seen[j] = true;
          ++count;
          queue.push_back(j);
        }
      }
    }
    return count == n;
  };
  return reach_all(true) && reach_all(false);
}

std::vector<double> cumulative_of(const std::vector<Rational>& probs) {
  std::vector<double> cum;
  cum.reserve(probs.size());
  long double running = 0;
  for (const auto& p : probs) {
    running += to_long_double(p);
    cum.push_back(static_cast<double>(running));
  }
  return cum;
}

/// A label distinct from every symbol in `taken`, derived from `base`.
Symbol fresh_reserved(const std::vector<Symbol>& taken, const std::string& base) {
  std::string candidate = base;
  while (std::find(taken.begin(), taken.end(), Symbol(candidate)) != taken.end()) candidate += "'";
  return Symbol(candidate);
}

}  // namespace

MarkovModel::MarkovModel(std::size_t order, std::vector<Symbol> states, Rows rows)
    : order_(order), states_(std::move(states)), rows_(std::move(rows)) {
  if (order_ < 1) throw std::invalid_argument("Markov order must be at least 1");
  if (states_.empty()) throw std::invalid_argument("Markov chain needs at least one state");
  if (std::set<Symbol>(states_.begin(), states_.end()).size() != states_.size()) {
    throw std::invalid_argument("Markov chain states must be distinct");
  }
  if (rows_.empty()) throw std::invalid_argument("Markov chain has no rows");
  for (const auto& [tuple, row] : rows_) {
    if (tuple.size() != order_) {
      throw std::invalid_argument("row key " + tuple_text(tuple) + " has the wrong length");
    }
    for (const auto s : tuple) {
      if (s >= states_.size()) throw std::invalid_argument("row key " + tuple_text(tuple) + " out of range");
    }
    check_row(row, states_.size(), "row " + tuple_text(tuple));
  }

  lifted_.tuples.reserve(rows_.size());
  std::map<StateTuple, std::size_t> index;
  for (const auto& [tuple, row] : rows_) {
    index.emplace(tuple, lifted_.tuples.size());
    lifted_.tuples.push_back(tuple);
  }
  const std::size_t count = lifted_.tuples.size();
  lifted_.transition.assign(count, std::vector<Rational>(count, Rational(0)));
  lifted_.next_tuple.assign(count, std::vector<std::size_t>(states_.size(), LiftedChain::npos));
  for (std::size_t i = 0; i < count; ++i) {
    const auto& tuple = lifted_.tuples[i];
    const auto& row = rows_.at(tuple);
    for (std::size_t s = 0; s < states_.size(); ++s) {
      if (row[s] == 0) continue;
      StateTuple next(tuple.begin() + 1, tuple.end());
      next.push_back(s);
      const auto it = index.find(next);
      if (it == index.end()) {
        throw std::invalid_argument("tuple " + tuple_text(next) + " is reachable but has no row");
      }
      lifted_.transition[i][it->second] += row[s];
      lifted_.next_tuple[i][s] = it->second;
    }
  }
}

MarkovModel MarkovModel::first_order(std::vector<Symbol> states,
                                     const std::vector<std::vector<Rational>>& matrix) {
  Rows rows;
  for (std::size_t i = 0; i < matrix.size(); ++i) rows.emplace(StateTuple{i}, matrix[i]);
  return MarkovModel(1, std::move(states), std::move(rows));
}

MarkovModel MarkovModel::iid(std::vector<Symbol> states, const std::vector<Rational>& probs) {
  std::vector<std::vector<Rational>> matrix(states.size(), probs);
  return first_order(std::move(states), matrix);
}

std::size_t MarkovModel::state_index(const Symbol& s) const {
  const auto it = std::find(states_.begin(), states_.end(), s);
  if (it == states_.end()) throw std::invalid_argument("unknown state " + s.to_string());
  return static_cast<std::size_t>(it - states_.begin());
}

std::vector<Rational> stationary_tuple_law(const MarkovModel& chain) {
  const auto& lifted = chain.lifted();
  const std::size_t n = lifted.tuples.size();
  if (!strongly_connected(lifted.transition)) {
    throw NonErgodic("chain is not irreducible; no unique stationary law");
  }
  // Solve mu (P - I) = 0 with the last balance equation replaced by sum(mu) = 1.
  std::vector<std::vector<Rational>> a(n, std::vector<Rational>(n + 1, Rational(0)));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      a[i][j] = lifted.transition[j][i] - (i == j ? Rational(1) : Rational(0));
    }
  }
  for (std::size_t j = 0; j < n; ++j) a[n - 1][j] = 1;
  a[n - 1][n] = 1;

  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    while (pivot < n && a[pivot][col] == 0) ++pivot;
    if (pivot == n) throw NonErgodic("singular balance equations");
    std::swap(a[pivot], a[col]);
    const Rational inv = Rational(1) / a[col][col];
    for (std::size_t j = col; j <= n; ++j) a[col][j] *= inv;
    for (std::size_t r = 0; r < n; ++r) {
      if (r == col || a[r][col] == 0) continue;
      const Rational factor = a[r][col];
      for (std::size_t j = col; j <= n; ++j) a[r][j] -= factor * a[col][j];
    }
  }
  std::vector<Rational> mu(n);
  for (std::size_t i = 0; i < n; ++i) mu[i] = a[i][n];
  return mu;
}

DiscreteDistribution stationary_distribution(const MarkovModel& chain) {
  if (chain.order() != 1) {
    throw std::invalid_argument("stationary_distribution expects a first-order chain");
  }
  const auto mu = stationary_tuple_law(chain);
  std::vector<Rational> by_state(chain.states().size(), Rational(0));
  const auto& tuples = chain.lifted().tuples;
  for (std::size_t i = 0; i < tuples.size(); ++i) by_state[tuples[i][0]] = mu[i];
  std::vector<Atom> entries;
  for (std::size_t s = 0; s < by_state.size(); ++s) entries.push_back({chain.states()[s], by_state[s]});
  return DiscreteDistribution(std::move(entries));
}

double markov_entropy_rate(const MarkovModel& chain) {
  const auto mu = stationary_tuple_law(chain);
  const auto& tuples = chain.lifted().tuples;
  long double rate = 0;
  for (std::size_t i = 0; i < tuples.size(); ++i) {
    rate += to_long_double(mu[i]) * entropy_bits(chain.rows().at(tuples[i]));
  }
  return static_cast<double>(rate);
}

MixedMarkovModel::MixedMarkovModel(std::size_t order, std::vector<Symbol> atoms, Symbol reserved,
                                   Rows rows)
    : order_(order), atoms_(std::move(atoms)), reserved_(std::move(reserved)), rows_(std::move(rows)) {
  if (order_ < 1) throw std::invalid_argument("Markov order must be at least 1");
  const std::set<Symbol> support(atoms_.begin(), atoms_.end());
  if (support.size() != atoms_.size()) throw std::invalid_argument("atom set repeats a label");
  if (support.count(reserved_)) throw std::invalid_argument("reserved label is an atom");
  const MixedDistribution* continuum_row = nullptr;
  for (const auto& [tuple, row] : rows_) {
    if (tuple.size() != order_) {
      throw std::invalid_argument("row key " + tuple_text(tuple) + " has the wrong length");
    }
    bool has_continuum = false;
    for (const auto s : tuple) {
      if (s > atoms_.size()) throw std::invalid_argument("row key " + tuple_text(tuple) + " out of range");
      has_continuum = has_continuum || s == atoms_.size();
    }
    const auto labels = row.atom_labels();
    if (std::set<Symbol>(labels.begin(), labels.end()) != support) {
      throw std::invalid_argument("row " + tuple_text(tuple) + " does not have atom support S");
    }
    if (!has_continuum) continue;
    if (continuum_row == nullptr) {
      continuum_row = &row;
      continue;
    }
    bool same = row.continuous_mass() == continuum_row->continuous_mass();
    for (const auto& a : atoms_) same = same && row.atom_prob(a) == continuum_row->atom_prob(a);
    if (!same) {
      throw std::invalid_argument("rows indexed by continuum states must agree after clumping");
    }
  }
  // Reachability and row sums are checked by the discrete chain.
  (void)tilde_chain();
}

MarkovModel MixedMarkovModel::tilde_chain() const {
  std::vector<Symbol> states = atoms_;
  states.push_back(reserved_);
  MarkovModel::Rows rows;
  for (const auto& [tuple, row] : rows_) {
    std::vector<Rational> probs;
    probs.reserve(states.size());
    for (const auto& a : atoms_) probs.push_back(row.atom_prob(a));
    probs.push_back(row.continuous_mass());
    rows.emplace(tuple, std::move(probs));
  }
  return MarkovModel(order_, std::move(states), std::move(rows));
}

AdditiveNoiseSpec::AdditiveNoiseSpec(MarkovModel base, MixedDistribution noise)
    : base_(std::move(base)), noise_(std::move(noise)) {
  for (const auto& s : base_.states()) {
    if (!s.is_numeric()) throw std::invalid_argument("noisy base states must be numeric");
  }
  for (const auto& a : noise_.atoms()) {
    if (!a.label.is_numeric()) throw std::invalid_argument("noise atoms must be numeric");
  }
  std::set<Rational> sums;
  for (const auto& s : base_.states()) {
    for (const auto& a : noise_.atoms()) sums.insert(s.numeric() + a.label.numeric());
  }
  output_atoms_.assign(sums.begin(), sums.end());
  if (noise_.reserved_label().is_numeric() && sums.count(noise_.reserved_label().numeric())) {
    throw std::invalid_argument("noise reserved label collides with an output atom");
  }
}

HiddenMarkovModel::HiddenMarkovModel(MarkovModel hidden, std::vector<Symbol> observations,
                                     std::vector<std::vector<Rational>> emission)
    : hidden_(std::move(hidden)), observations_(std::move(observations)), emission_(std::move(emission)) {
  if (emission_.size() != hidden_.states().size()) {
    throw std::invalid_argument("emission needs one row per hidden state");
  }
  if (std::set<Symbol>(observations_.begin(), observations_.end()).size() != observations_.size()) {
    throw std::invalid_argument("observation labels must be distinct");
  }
  for (std::size_t s = 0; s < emission_.size(); ++s) {
    check_row(emission_[s], observations_.size(), "emission row " + std::to_string(s));
  }
}

std::string ProcessSpec::kind() const {
  struct Visitor {
    std::string operator()(const IidSpec&) const { return "iid"; }
    std::string operator()(const MarkovModel&) const { return "markov"; }
    std::string operator()(const MixedMarkovModel&) const { return "mixed_markov"; }
    std::string operator()(const AdditiveNoiseSpec&) const { return "noisy"; }
    std::string operator()(const StickySpec&) const { return "sticky"; }
    std::string operator()(const HiddenMarkovModel&) const { return "hidden_markov"; }
  };
  return std::visit(Visitor{}, body);
}

bool ProcessSpec::is_discrete() const {
  if (const auto* iid = std::get_if<IidSpec>(&body)) return iid->dist.is_discrete();
  if (const auto* noisy = std::get_if<AdditiveNoiseSpec>(&body)) return noisy->noise().is_discrete();
  if (std::holds_alternative<StickySpec>(body)) return false;
  if (std::holds_alternative<MixedMarkovModel>(body)) {
    const auto& mm = std::get<MixedMarkovModel>(body);
    return std::all_of(mm.rows().begin(), mm.rows().end(),
                       [](const auto& kv) { return kv.second.is_discrete(); });
  }
  return true;
}

ProcessSpec tilde_process(const ProcessSpec& spec) {
  ProcessSpec out;
  out.id = spec.id + "~";
  struct Visitor {
    ProcessSpec::Body operator()(const IidSpec& iid) const {
      const auto law = tilde_of(iid.dist);
      std::vector<Symbol> labels;
      for (const auto& e : law.entries()) labels.push_back(e.label);
      return IidSpec{MixedDistribution(law.entries(), 0, fresh_reserved(labels, "x_o'"))};
    }
    ProcessSpec::Body operator()(const MarkovModel& m) const { return m; }
    ProcessSpec::Body operator()(const HiddenMarkovModel& h) const { return h; }
    ProcessSpec::Body operator()(const MixedMarkovModel& mm) const { return mm.tilde_chain(); }
    ProcessSpec::Body operator()(const AdditiveNoiseSpec& noisy) const {
      const auto& base = noisy.base();
      const auto& noise = noisy.noise();
      std::vector<Symbol> observations;
      for (const auto& y : noisy.output_atoms()) observations.emplace_back(y);
      const bool erasures = noise.continuous_mass() > 0;
      if (erasures) observations.push_back(noise.reserved_label());
      std::vector<std::vector<Rational>> emission;
      for (const auto& x : base.states()) {
        std::vector<Rational> row(observations.size(), Rational(0));
        for (const auto& a : noise.atoms()) {
          const Rational y = x.numeric() + a.label.numeric();
          const auto it = std::lower_bound(noisy.output_atoms().begin(), noisy.output_atoms().end(), y);
          row[static_cast<std::size_t>(it - noisy.output_atoms().begin())] += a.prob;
        }
        if (erasures) row.back() = noise.continuous_mass();
        emission.push_back(std::move(row));
      }
      return HiddenMarkovModel(base, std::move(observations), std::move(emission));
    }
    ProcessSpec::Body operator()(const StickySpec&) const {
      const Symbol reserved("x_o");
      return IidSpec{MixedDistribution({Atom{reserved, 1}}, 0, Symbol("x_o'"))};
    }
  };
  out.body = std::visit(Visitor{}, spec.body);
  return out;
}

TrajectorySampler::Chain TrajectorySampler::make_chain(const MarkovModel& model) {
  Chain chain;
  chain.order = model.order();
  chain.initial = cumulative_of(stationary_tuple_law(model));
  chain.tuples = model.lifted().tuples;
  chain.next = model.lifted().next_tuple;
  for (const auto& tuple : chain.tuples) chain.row.push_back(cumulative_of(model.rows().at(tuple)));
  return chain;
}

std::size_t TrajectorySampler::draw(const std::vector<double>& cumulative, Generator& gen) {
  const double u = gen.uniform();
  const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
  auto index = static_cast<std::size_t>(it - cumulative.begin());
  if (index == cumulative.size()) index = cumulative.size() - 1;
  // Skip zero-mass slots that share the boundary value.
  while (index > 0 && cumulative[index] == cumulative[index - 1]) --index;
  return index;
}

void TrajectorySampler::run_chain(std::size_t n, Generator& gen, std::vector<std::size_t>& states) const {
  states.clear();
  if (n == 0) return;
  std::size_t tuple = draw(chain_.initial, gen);
  for (const auto s : chain_.tuples[tuple]) {
    if (states.size() == n) return;
    states.push_back(s);
  }
  while (states.size() < n) {
    const std::size_t s = draw(chain_.row[tuple], gen);
    states.push_back(s);
    tuple = chain_.next[tuple][s];
  }
}

TrajectorySampler::TrajectorySampler(const ProcessSpec& spec) {
  if (const auto* iid = std::get_if<IidSpec>(&spec.body)) {
    kind_ = Kind::Iid;
    table_ = iid->dist.atom_labels();
    std::vector<Rational> probs;
    for (const auto& a : iid->dist.atoms()) probs.push_back(a.prob);
    iid_ = cumulative_of(probs);
    iid_has_continuum_ = !iid->dist.is_discrete();
  } else if (const auto* markov = std::get_if<MarkovModel>(&spec.body)) {
    kind_ = Kind::Chain;
    table_ = markov->states();
    chain_ = make_chain(*markov);
  } else if (const auto* mixed = std::get_if<MixedMarkovModel>(&spec.body)) {
    kind_ = Kind::ChainWithContinuum;
    table_ = mixed->atoms();
    continuum_state_ = mixed->continuum_index();
    chain_ = make_chain(mixed->tilde_chain());
  } else if (const auto* noisy = std::get_if<AdditiveNoiseSpec>(&spec.body)) {
    kind_ = Kind::Noisy;
    for (const auto& y : noisy->output_atoms()) table_.emplace_back(y);
    chain_ = make_chain(noisy->base());
    std::vector<Rational> probs;
    for (const auto& a : noisy->noise().atoms()) probs.push_back(a.prob);
    noise_ = cumulative_of(probs);
    iid_has_continuum_ = !noisy->noise().is_discrete();
    for (const auto& x : noisy->base().states()) {
      std::vector<std::uint64_t> codes;
      for (const auto& a : noisy->noise().atoms()) {
        const Rational y = x.numeric() + a.label.numeric();
        const auto& out = noisy->output_atoms();
        codes.push_back(static_cast<std::uint64_t>(std::lower_bound(out.begin(), out.end(), y) - out.begin()));
      }
      sum_code_.push_back(std::move(codes));
    }
  } else if (const auto* hidden = std::get_if<HiddenMarkovModel>(&spec.body)) {
    kind_ = Kind::Hidden;
    table_ = hidden->observations();
    chain_ = make_chain(hidden->hidden());
    for (const auto& row : hidden->emission()) emission_.push_back(cumulative_of(row));
  } else {
    const auto& sticky = std::get<StickySpec>(spec.body);
    if (sticky.repeat_prob < 0 || sticky.repeat_prob >= 1) {
      throw std::invalid_argument("sticky repeat probability must lie in [0,1)");
    }
    kind_ = Kind::Sticky;
    repeat_prob_ = static_cast<double>(to_long_double(sticky.repeat_prob));
  }
}

void TrajectorySampler::codes(std::size_t n, Generator& gen, std::vector<std::uint64_t>& out) const {
  out.clear();
  out.reserve(n);
  auto token = [&] { return kContinuumCode | gen.fresh_token().serial; };
  switch (kind_) {
    case Kind::Iid: {
      for (std::size_t i = 0; i < n; ++i) {
        if (iid_.empty()) {
          out.push_back(token());
          continue;
        }
        const double u = gen.uniform();
        const auto it = std::upper_bound(iid_.begin(), iid_.end(), u);
        auto index = static_cast<std::size_t>(it - iid_.begin());
        if (index == iid_.size() && !iid_has_continuum_) index = iid_.size() - 1;
        out.push_back(index < iid_.size() ? index : token());
      }
      return;
    }
    case Kind::Sticky: {
      for (std::size_t i = 0; i < n; ++i) {
        if (i > 0 && gen.uniform() < repeat_prob_) {
          out.push_back(out.back());
        } else {
          out.push_back(token());
        }
      }
      return;
    }
    default:
      break;
  }
  std::vector<std::size_t> states;
  run_chain(n, gen, states);
  for (const auto s : states) {
    switch (kind_) {
      case Kind::Chain:
        out.push_back(s);
        break;
      case Kind::ChainWithContinuum:
        out.push_back(s == continuum_state_ ? token() : s);
        break;
      case Kind::Noisy: {
        const double u = gen.uniform();
        const auto it = std::upper_bound(noise_.begin(), noise_.end(), u);
        auto index = static_cast<std::size_t>(it - noise_.begin());
        if (index == noise_.size() && !iid_has_continuum_) index = noise_.size() - 1;
        out.push_back(index < noise_.size() ? sum_code_[s][index] : token());
        break;
      }
      case Kind::Hidden:
        out.push_back(draw(emission_[s], gen));
        break;
      default:
        break;
    }
  }
}

Symbol TrajectorySampler::symbol_of(std::uint64_t code, const Generator& gen) const {
  if (code & kContinuumCode) return Symbol(ContinuumToken{gen.stream(), code & ~kContinuumCode});
  return table_[code];
}

SequenceBlock TrajectorySampler::symbols(std::size_t n, Generator& gen) const {
  std::vector<std::uint64_t> raw;
  codes(n, gen, raw);
  SequenceBlock out;
  out.reserve(raw.size());
  for (const auto code : raw) out.push_back(symbol_of(code, gen));
  return out;
}

SequenceBlock simulate(const ProcessSpec& spec, std::size_t n, Generator& gen) {
  return TrajectorySampler(spec).symbols(n, gen);
}

SequenceBlock simulate(const ProcessSpec& spec, std::size_t n, std::uint64_t seed) {
  Generator gen(seed);
  return simulate(spec, n, gen);
}

double repeat_mass_estimate(const ProcessSpec& spec, std::size_t horizon, std::size_t trials,
                            std::uint64_t seed, std::size_t workers) {
  if (horizon < 2) throw std::invalid_argument("repeat mass horizon must be at least 2");
  if (trials < 1) throw std::invalid_argument("repeat mass needs at least one trial");
  const TrajectorySampler sampler(spec);
  workers = std::max<std::size_t>(1, std::min(workers, trials));
  std::vector<std::size_t> hits(workers, 0);
  detail::for_each_block(trials, workers, [&](std::size_t w, std::size_t begin, std::size_t end) {
    Generator gen = Generator::substream(seed, w);
    std::vector<std::uint64_t> path;
    for (std::size_t t = begin; t < end; ++t) {
      sampler.codes(horizon, gen, path);
      if (!(path[0] & TrajectorySampler::kContinuumCode)) continue;
      if (std::find(path.begin() + 1, path.end(), path[0]) != path.end()) ++hits[w];
    }
  });
  std::size_t total = 0;
  for (const auto h : hits) total += h;
  return static_cast<double>(total) / static_cast<double>(trials);
}

Compliance check_compliance(const ProcessSpec& spec) {
  Compliance c;
  if (const auto* sticky = std::get_if<StickySpec>(&spec.body)) {
    if (sticky->repeat_prob > 0) {
      c.repeatability = false;
      c.warnings.push_back(
          "continuum values recur with positive probability; the pattern rate differs from the "
          "tilde-process rate");
    }
  }
  if (const auto* iid = std::get_if<IidSpec>(&spec.body)) {
    std::vector<double> probs;
    for (const auto& a : iid->dist.atoms()) probs.push_back(static_cast<double>(to_long_double(a.prob)));
    if (auto msg = decay_advisory(probs); !msg.empty()) c.warnings.push_back(msg);
  }
  return c;
}

std::string decay_advisory(const std::vector<double>& sorted_probs, double beta) {
  const std::size_t n = sorted_probs.size();
  // Finite atom lists decay trivially; only long truncated lists are tested.
  if (n < 16) return "";
  auto weighted = [&](std::size_t i) { return sorted_probs[i] * std::pow(static_cast<double>(i + 1), beta); };
  double mid = 0, tail = 0;
  for (std::size_t i = n / 4; i < n / 2; ++i) mid = std::max(mid, weighted(i));
  for (std::size_t i = 3 * n / 4; i < n; ++i) tail = std::max(tail, weighted(i));
  if (tail >= mid) {
    return "atom probabilities do not appear to satisfy P_i * i^" + std::to_string(beta) +
           " -> 0 on the truncated list (advisory)";
  }
  return "";
}

}  // namespace pel
