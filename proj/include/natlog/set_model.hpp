#pragma once

// Finite-universe set-theoretic semantics for the seven relations. Used as an
// independent oracle for the join table.

#include <cstdint>
#include <vector>

#include "natlog/relation.hpp"

namespace natlog {

/// Two subsets of a finite universe {0, ..., universe_size-1}, as bitmasks.
struct FiniteSetModel {
  unsigned universe_size = 0;
  std::uint64_t x = 0;
  std::uint64_t y = 0;

  constexpr std::uint64_t universe() const {
    return universe_size >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << universe_size) - 1;
  }
};

/// Classifies (x, y) into the unique relation they stand in. Both sets must
/// be nonempty proper subsets; otherwise the seven relations are not mutually
/// exclusive and the model is rejected.
inline Relation set_relation(const FiniteSetModel& m) {
  if (m.universe_size < 2 || m.universe_size > 63)
    throw InputError("set_relation: universe size must be in [2, 63]");
  const auto u = m.universe();
  auto proper = [u](std::uint64_t s) { return s != 0 && (s & ~u) == 0 && s != u; };
  if (!proper(m.x) || !proper(m.y))
    throw InputError("set_relation: x and y must be nonempty proper subsets of the universe");

  const auto meet = m.x & m.y;
  const auto unite = m.x | m.y;
  if (m.x == m.y) return Relation::kEquivalence;
  if (meet == m.x) return Relation::kForward;   // x ⊂ y
  if (meet == m.y) return Relation::kReverse;   // x ⊃ y
  if (meet == 0 && unite == u) return Relation::kNegation;
  if (meet == 0) return Relation::kAlternation;
  if (unite == u) return Relation::kCover;
  return Relation::kIndependence;
}

struct OracleViolation {
  unsigned universe_size;
  std::uint64_t x, y, z;
  Relation xy, yz, xz, joined;
};

struct OracleReport {
  std::uint64_t triples_checked = 0;
  std::vector<OracleViolation> violations;
  /// Per table cell: how many triples hit it, and how often the cell was
  /// exactly predictive (non-# and equal to the x-z relation).
  std::array<std::array<std::uint64_t, kNumRelations>, kNumRelations> cell_hits{};
  std::array<std::array<std::uint64_t, kNumRelations>, kNumRelations> cell_exact{};
};

/// Enumerates all ordered triples of nonempty proper subsets of universes of
/// the given sizes and checks join(r(x,y), r(y,z)) ∈ {#, r(x,z)}.
inline OracleReport check_join_soundness(unsigned min_size, unsigned max_size) {
  OracleReport report;
  for (unsigned n = min_size; n <= max_size; ++n) {
    const std::uint64_t u = (std::uint64_t{1} << n) - 1;
    std::vector<std::uint64_t> subsets;
    for (std::uint64_t s = 1; s < u; ++s) subsets.push_back(s);
    for (auto x : subsets)
      for (auto y : subsets) {
        const auto xy = set_relation({n, x, y});
        for (auto z : subsets) {
          const auto yz = set_relation({n, y, z});
          const auto xz = set_relation({n, x, z});
          const auto joined = join(xy, yz);
          ++report.triples_checked;
          ++report.cell_hits[index_of(xy)][index_of(yz)];
          if (joined == xz) ++report.cell_exact[index_of(xy)][index_of(yz)];
          if (joined != Relation::kIndependence && joined != xz)
            report.violations.push_back({n, x, y, z, xy, yz, xz, joined});
        }
      }
  }
  return report;
}

}  // namespace natlog
