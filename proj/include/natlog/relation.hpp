#pragma once

// The seven-relation natural-logic algebra: relation and label types, the
// join (composition) table, and the relation -> NLI label mapping.

#include <array>
#include <cstdint>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>

#include "natlog/error.hpp"

namespace natlog {

/// Natural-logic relations in canonical order
/// <equivalence, forward, reverse, negation, alternation, cover, independence>.
enum class Relation : std::uint8_t {
  kEquivalence = 0,  // ≡
  kForward = 1,      // ⊏
  kReverse = 2,      // ⊐
  kNegation = 3,     // ∧
  kAlternation = 4,  // |
  kCover = 5,        // ⌣
  kIndependence = 6, // #
};

inline constexpr std::size_t kNumRelations = 7;

/// The canonical ordered relation list.
inline constexpr std::array<Relation, kNumRelations> kCanonicalRelations = {
    Relation::kEquivalence, Relation::kForward,     Relation::kReverse,
    Relation::kNegation,    Relation::kAlternation, Relation::kCover,
    Relation::kIndependence,
};

/// The five relations the perturbation machinery works with; cover and
/// independence are never targeted.
inline constexpr std::array<Relation, 5> kGenerativeRelations = {
    Relation::kEquivalence, Relation::kForward, Relation::kReverse,
    Relation::kNegation, Relation::kAlternation,
};

constexpr std::size_t index_of(Relation r) { return static_cast<std::size_t>(r); }

enum class NliLabel : std::uint8_t {
  kEntailment = 0,
  kContradiction = 1,
  kNeutral = 2,
};

inline constexpr std::array<NliLabel, 3> kAllLabels = {
    NliLabel::kEntailment, NliLabel::kContradiction, NliLabel::kNeutral};

namespace detail {
using R = Relation;
inline constexpr R EQ = R::kEquivalence, FW = R::kForward, RV = R::kReverse,
                   NG = R::kNegation, AL = R::kAlternation, CV = R::kCover,
                   IN = R::kIndependence;

// Row = left operand, column = right operand.
inline constexpr std::array<std::array<Relation, kNumRelations>, kNumRelations>
    kJoinTable = {{
        //        ≡   ⊏   ⊐   ∧   |   ⌣   #
        /* ≡ */ {EQ, FW, RV, NG, AL, CV, IN},
        /* ⊏ */ {FW, FW, IN, AL, AL, IN, IN},
        /* ⊐ */ {RV, IN, RV, CV, IN, CV, IN},
        /* ∧ */ {NG, CV, AL, EQ, RV, FW, IN},
        /* | */ {AL, IN, AL, FW, IN, FW, IN},
        /* ⌣ */ {CV, CV, IN, RV, RV, IN, IN},
        /* # */ {IN, IN, IN, IN, IN, IN, IN},
    }};

inline constexpr std::array<std::string_view, kNumRelations> kRelationNames = {
    "equiv", "fwd", "rev", "neg", "alt", "cov", "indep"};
inline constexpr std::array<std::string_view, kNumRelations> kRelationSymbols = {
    "≡", "⊏", "⊐", "∧", "|", "⌣", "#"};
inline constexpr std::array<std::string_view, 3> kLabelNames = {
    "entailment", "contradiction", "neutral"};
}  // namespace detail

/// Composition of two relations along a chain of edits.
constexpr Relation join(Relation left, Relation right) {
  return detail::kJoinTable[index_of(left)][index_of(right)];
}

/// Left-to-right fold of join. Composition order can matter in rare cases;
/// this fixes it to sequential order.
inline Relation compose_sequence(std::span<const Relation> rels) {
  if (rels.empty()) throw InputError("compose_sequence: empty relation list");
  Relation acc = rels.front();
  for (auto r : rels.subspan(1)) acc = join(acc, r);
  return acc;
}

inline Relation compose_sequence(std::initializer_list<Relation> rels) {
  return compose_sequence(std::span<const Relation>(rels.begin(), rels.size()));
}

constexpr NliLabel to_nli_label(Relation r) {
  switch (r) {
    case Relation::kEquivalence:
    case Relation::kForward:
      return NliLabel::kEntailment;
    case Relation::kNegation:
    case Relation::kAlternation:
      return NliLabel::kContradiction;
    default:
      return NliLabel::kNeutral;
  }
}

constexpr std::string_view to_string(Relation r) { return detail::kRelationNames[index_of(r)]; }
constexpr std::string_view symbol(Relation r) { return detail::kRelationSymbols[index_of(r)]; }
constexpr std::string_view to_string(NliLabel l) {
  return detail::kLabelNames[static_cast<std::size_t>(l)];
}

/// Single-letter code used in setup names (E, C, N).
constexpr char label_letter(NliLabel l) {
  return l == NliLabel::kEntailment ? 'E' : l == NliLabel::kContradiction ? 'C' : 'N';
}

inline std::optional<Relation> parse_relation(std::string_view name) {
  for (std::size_t i = 0; i < kNumRelations; ++i)
    if (detail::kRelationNames[i] == name || detail::kRelationSymbols[i] == name) return kCanonicalRelations[i];
  return std::nullopt;
}

inline std::optional<NliLabel> parse_label(std::string_view name) {
  for (std::size_t i = 0; i < 3; ++i)
    if (detail::kLabelNames[i] == name) return kAllLabels[i];
  return std::nullopt;
}

inline std::ostream& operator<<(std::ostream& os, Relation r) { return os << to_string(r); }
inline std::ostream& operator<<(std::ostream& os, NliLabel l) { return os << to_string(l); }

/// Small value-type set of relations, iterated in canonical order.
class RelationSet {
 public:
  constexpr RelationSet() = default;
  constexpr RelationSet(std::initializer_list<Relation> rels) {
    for (auto r : rels) insert(r);
  }

  constexpr void insert(Relation r) { bits_ |= bit(r); }
  constexpr void erase(Relation r) { bits_ &= static_cast<std::uint8_t>(~bit(r)); }
  constexpr bool contains(Relation r) const { return (bits_ & bit(r)) != 0; }
  constexpr bool empty() const { return bits_ == 0; }
  constexpr std::size_t size() const { return static_cast<std::size_t>(__builtin_popcount(bits_)); }
  constexpr bool subset_of(RelationSet other) const { return (bits_ & ~other.bits_) == 0; }

  template <typename F>
  constexpr void for_each(F&& f) const {
    for (auto r : kCanonicalRelations)
      if (contains(r)) f(r);
  }

  friend constexpr bool operator==(RelationSet, RelationSet) = default;

 private:
  static constexpr std::uint8_t bit(Relation r) {
    return static_cast<std::uint8_t>(1u << index_of(r));
  }
  std::uint8_t bits_ = 0;
};

inline std::string to_string(RelationSet s) {
  std::string out = "{";
  bool first = true;
  s.for_each([&](Relation r) {
    if (!first) out += ",";
    out += to_string(r);
    first = false;
  });
  return out + "}";
}

}  // namespace natlog
