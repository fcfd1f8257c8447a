#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <span>
#include <vector>

#include "cera/codebook.hpp"

namespace cera {

struct CurvePoint {
  std::uint64_t users;
  double efficiency;
};

/// Efficiency of a codebook along a load grid (strictly increasing, N >= 1).
/// Expanded specs with uniform budgets run on the lumped chain.
std::vector<CurvePoint> efficiency_curve(const CodebookSpec& spec, std::span<const std::uint64_t> load_grid);

/// Distinct state cardinalities of the (L, M) chain.
std::set<std::uint64_t> state_cardinality_values(std::uint32_t frame_length, std::uint32_t preambles);

/// Cardinalities strictly above the reference codebook size. With no explicit
/// reference size, A_r = M * L.
std::set<std::uint64_t> cardinalities_of_interest(std::uint32_t frame_length, std::uint32_t preambles,
                                                  std::optional<std::uint64_t> reference_size = std::nullopt);

/// Smallest grid N where spec_b is strictly more efficient than spec_a.
std::optional<std::uint64_t> crossover_point(const CodebookSpec& spec_a, const CodebookSpec& spec_b,
                                             std::span<const std::uint64_t> load_grid);

/// Same, on precomputed curves over one grid.
std::optional<std::uint64_t> crossover_point(std::span<const CurvePoint> a, std::span<const CurvePoint> b);

/// Last grid N whose efficiency is at least `threshold`.
std::optional<std::uint64_t> load_limit(std::span<const CurvePoint> curve, double threshold);

struct CandidateSet {
  std::vector<CodebookSpec> candidates;
  std::vector<std::uint64_t> load_grid;

  void validate() const;
};

/// Reference(M_r, L) plus one expanded codebook per cardinality of interest,
/// each realized by the lexicographically smallest restriction of budgets <= M_e.
CandidateSet default_candidates(std::uint32_t frame_length, std::uint32_t expanded_preambles,
                                std::uint32_t reference_preambles, std::vector<std::uint64_t> load_grid);

struct ScheduleSegment {
  std::uint64_t low;   ///< first grid N of the segment
  std::uint64_t high;  ///< last grid N of the segment
  CodebookSpec spec;
  std::uint64_t cardinality;
  double efficiency_low;
  double efficiency_high;
};

struct ThresholdSchedule {
  std::vector<ScheduleSegment> segments;
  /// Envelope efficiency at each grid point.
  std::vector<CurvePoint> envelope;
};

/// Per grid point, the most efficient candidate (ties go to the smaller
/// codebook); equal consecutive choices merge into one segment.
ThresholdSchedule threshold_schedule(const CandidateSet& set);

struct PreambleRange {
  std::uint32_t first;  ///< 1-based
  std::uint32_t count;

  std::uint32_t last() const noexcept { return first + count - 1; }
  friend bool operator==(const PreambleRange&, const PreambleRange&) = default;
};

/// Contiguous, disjoint preamble blocks in class order; preambles past the last
/// block stay unassigned. Throws BudgetExceedsTotal.
std::vector<PreambleRange> partition_preambles(std::uint32_t total, std::span<const std::uint32_t> class_budgets);

/// 1, 2, ..., or first:last:step.
std::vector<std::uint64_t> make_grid(std::uint64_t first, std::uint64_t last, std::uint64_t step = 1);

}  // namespace cera
