#include "pel/pattern.hpp"

#include <charconv>

namespace pel {

std::string Symbol::to_string() const {
  struct Visitor {
    std::string operator()(const std::string& s) const { return s; }
    std::string operator()(const Rational& r) const { return format_rational(r); }
    std::string operator()(const ContinuumToken& t) const {
      return "~" + std::to_string(t.stream) + ":" + std::to_string(t.serial);
    }
  };
  return std::visit(Visitor{}, value_);
}

Pattern::Pattern(std::vector<Label> labels) : labels_(std::move(labels)) {
  Label running_max = 0;
  for (const Label label : labels_) {
    if (label < 1 || label > running_max + 1) {
      throw std::invalid_argument("not a restricted-growth string: " + to_string());
    }
    running_max = std::max(running_max, label);
  }
  distinct_ = running_max;
}

std::vector<std::size_t> Pattern::multiplicities() const {
  std::vector<std::size_t> counts(distinct_, 0);
  for (const Label label : labels_) ++counts[label - 1];
  return counts;
}

std::string Pattern::to_string() const {
  std::string out;
  for (std::size_t i = 0; i < labels_.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(labels_[i]);
  }
  return out;
}

Pattern Pattern::parse(std::string_view text) {
  std::vector<Label> labels;
  while (!text.empty() && (text.back() == '\n' || text.back() == '\r')) text.remove_suffix(1);
  if (text.empty()) return Pattern();
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t comma = std::min(text.find(',', pos), text.size());
    std::string_view field = text.substr(pos, comma - pos);
    while (!field.empty() && field.front() == ' ') field.remove_prefix(1);
    while (!field.empty() && field.back() == ' ') field.remove_suffix(1);
    Label value = 0;
    const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
    if (field.empty() || ec != std::errc() || ptr != field.data() + field.size()) {
      throw std::invalid_argument("malformed pattern text: '" + std::string(text) + "'");
    }
    labels.push_back(value);
    pos = comma + 1;
  }
  return Pattern(std::move(labels));
}

void PatternBuilder::push_label(Pattern::Label label) {
  if (label < 1 || label > distinct_ + 1) {
    throw std::invalid_argument("label breaks restricted growth");
  }
  labels_.push_back(label);
  distinct_ = std::max(distinct_, label);
}

Pattern pattern_of(std::span<const Symbol> seq) { return pattern_of_values(seq); }

Pattern pattern_of_text(std::string_view text) {
  return pattern_of_values(std::span<const char>(text.data(), text.size()));
}

bool is_valid_pattern(std::span<const long long> labels) {
  long long running_max = 0;
  for (const long long label : labels) {
    if (label < 1 || label > running_max + 1) return false;
    running_max = std::max(running_max, label);
  }
  return true;
}

OccurrenceTable occurrence_table(std::span<const Symbol> seq) {
  OccurrenceTable table;
  table.distinct_per_prefix.reserve(seq.size());
  for (std::size_t i = 0; i < seq.size(); ++i) {
    table.first_index.try_emplace(seq[i], i + 1);
    table.distinct_per_prefix.push_back(table.first_index.size());
  }
  return table;
}

PatternEnumerator::PatternEnumerator(std::size_t n, std::size_t cap) : n_(n) {
  if (n > cap) {
    throw CapExceeded("pattern enumeration length " + std::to_string(n) + " exceeds cap " +
                      std::to_string(cap));
  }
}

PatternEnumerator::iterator::iterator(std::size_t n)
    : labels_(n, 1), prefix_max_(n, 1), done_(false) {
  current_ = Pattern(labels_, n == 0 ? 0 : 1, Pattern::Trusted{});
}

PatternEnumerator::iterator& PatternEnumerator::iterator::operator++() {
  const std::size_t n = labels_.size();
  // Rightmost position that can still grow; position 0 is pinned at 1.
  std::size_t i = n;
  while (i > 1) {
    --i;
    if (labels_[i] <= prefix_max_[i - 1]) {
      ++labels_[i];
      prefix_max_[i] = std::max(prefix_max_[i - 1], labels_[i]);
      for (std::size_t j = i + 1; j < n; ++j) {
        labels_[j] = 1;
        prefix_max_[j] = prefix_max_[i];
      }
      current_ = Pattern(labels_, prefix_max_[n - 1], Pattern::Trusted{});
      return *this;
    }
  }
  done_ = true;
  return *this;
}

}  // namespace pel
