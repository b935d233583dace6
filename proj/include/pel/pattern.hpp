#pragma once

#include "pel/symbol.hpp"

#include <cstddef>
#include <cstdint>
#include <iterator>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace pel {

/// Thrown when an exact enumeration would exceed its configured length cap.
class CapExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Relabeling of a sequence by order of first appearance: a restricted-growth
/// string with labels starting at 1.
class Pattern {
 public:
  using Label = std::uint32_t;

  Pattern() = default;
  /// Throws std::invalid_argument unless `labels` is a restricted-growth string.
  explicit Pattern(std::vector<Label> labels);

  const std::vector<Label>& labels() const { return labels_; }
  std::size_t size() const { return labels_.size(); }
  bool empty() const { return labels_.empty(); }
  Label operator[](std::size_t i) const { return labels_[i]; }

  /// Number of distinct labels (the running maximum at the end).
  Label distinct() const { return distinct_; }

  /// Sizes of each label class, indexed by label - 1.
  std::vector<std::size_t> multiplicities() const;

  /// Comma-joined labels, e.g. "1,2,1,3".
  std::string to_string() const;
  /// Inverse of to_string; throws std::invalid_argument on malformed input.
  static Pattern parse(std::string_view text);

  friend auto operator<=>(const Pattern& a, const Pattern& b) { return a.labels_ <=> b.labels_; }
  friend bool operator==(const Pattern& a, const Pattern& b) { return a.labels_ == b.labels_; }

 private:
  struct Trusted {};
  Pattern(std::vector<Label> labels, Label distinct, Trusted)
      : labels_(std::move(labels)), distinct_(distinct) {}

  std::vector<Label> labels_;
  Label distinct_ = 0;

  friend class PatternBuilder;
  friend class PatternEnumerator;
};

/// Incrementally appends symbols and tracks first-occurrence labels.
class PatternBuilder {
 public:
  /// Appends a label index already known to be either an existing label or
  /// distinct() + 1. Used by engines that produce patterns directly.
  void push_label(Pattern::Label label);
  Pattern build() const& { return Pattern(labels_, distinct_, Pattern::Trusted{}); }
  Pattern build() && { return Pattern(std::move(labels_), distinct_, Pattern::Trusted{}); }
  Pattern::Label distinct() const { return distinct_; }

 private:
  std::vector<Pattern::Label> labels_;
  Pattern::Label distinct_ = 0;
};

/// Pattern of any sequence whose elements are totally ordered.
template <typename T>
Pattern pattern_of_values(std::span<const T> values) {
  std::map<T, Pattern::Label> seen;
  PatternBuilder builder;
  for (const auto& v : values) {
    auto [it, inserted] = seen.try_emplace(v, builder.distinct() + 1);
    builder.push_label(it->second);
  }
  return std::move(builder).build();
}

Pattern pattern_of(std::span<const Symbol> seq);

/// Pattern of a character string, one symbol per byte (spaces included).
Pattern pattern_of_text(std::string_view text);

bool is_valid_pattern(std::span<const long long> labels);

struct OccurrenceTable {
  /// |A(X^i)| for i = 1..n.
  std::vector<std::size_t> distinct_per_prefix;
  /// 1-based index of first appearance for every symbol seen.
  std::map<Symbol, std::size_t> first_index;
};

OccurrenceTable occurrence_table(std::span<const Symbol> seq);

inline constexpr std::size_t kDefaultEnumerationCap = 12;

/// Lazily enumerates every restricted-growth string of length n in
/// lexicographic order. Each length-n pattern is produced exactly once.
class PatternEnumerator {
 public:
  /// Throws CapExceeded when n > cap.
  explicit PatternEnumerator(std::size_t n, std::size_t cap = kDefaultEnumerationCap);

  class iterator {
   public:
    using iterator_category = std::input_iterator_tag;
    using value_type = Pattern;
    using difference_type = std::ptrdiff_t;
    using pointer = const Pattern*;
    using reference = const Pattern&;

    iterator() = default;
    reference operator*() const { return current_; }
    pointer operator->() const { return &current_; }
    iterator& operator++();
    void operator++(int) { ++*this; }
    friend bool operator==(const iterator& a, const iterator& b) { return a.done_ == b.done_; }

   private:
    friend class PatternEnumerator;
    explicit iterator(std::size_t n);

    std::vector<Pattern::Label> labels_;
    // prefix_max_[i] = max(labels_[0..i])
    std::vector<Pattern::Label> prefix_max_;
    Pattern current_;
    bool done_ = true;
  };

  iterator begin() const { return iterator(n_); }
  iterator end() const { return iterator(); }

 private:
  std::size_t n_;
};

}  // namespace pel
