#pragma once

#include "pel/rational.hpp"

#include <compare>
#include <cstdint>
#include <string>
#include <variant>
#include <vector>

namespace pel {

/// A draw from the continuous part of a distribution. Each token a generator
/// hands out is distinct from every other token it hands out.
struct ContinuumToken {
  std::uint64_t stream = 0;
  std::uint64_t serial = 0;

  auto operator<=>(const ContinuumToken&) const = default;
};

/// Alphabet element with exact equality: a discrete label, an exact rational
/// location, or a continuum token.
class Symbol {
 public:
  using Value = std::variant<std::string, Rational, ContinuumToken>;

  Symbol() = default;
  Symbol(std::string label) : value_(std::move(label)) {}
  Symbol(const char* label) : value_(std::string(label)) {}
  Symbol(Rational location) : value_(std::move(location)) {}
  Symbol(ContinuumToken token) : value_(token) {}

  const Value& value() const { return value_; }
  bool is_label() const { return std::holds_alternative<std::string>(value_); }
  bool is_numeric() const { return std::holds_alternative<Rational>(value_); }
  bool is_continuum() const { return std::holds_alternative<ContinuumToken>(value_); }

  const Rational& numeric() const { return std::get<Rational>(value_); }

  friend bool operator==(const Symbol& a, const Symbol& b) { return a.value_ == b.value_; }
  friend bool operator<(const Symbol& a, const Symbol& b) { return a.value_ < b.value_; }
  friend bool operator!=(const Symbol& a, const Symbol& b) { return !(a == b); }

  /// Human-readable form: labels verbatim, rationals as "p/q", tokens as "~stream:serial".
  std::string to_string() const;

 private:
  Value value_;
};

using SequenceBlock = std::vector<Symbol>;

}  // namespace pel
