#include "cera/planner.hpp"

#include <algorithm>
#include <numeric>

#include "cera/analytic.hpp"
#include "cera/errors.hpp"
#include "cera/markov.hpp"

namespace cera {
namespace {

void validate_grid(std::span<const std::uint64_t> grid) {
  if (grid.empty()) throw DomainError("load grid is empty");
  if (grid.front() == 0) throw DomainError("load grid must start at N >= 1");
  for (std::size_t i = 1; i < grid.size(); ++i) {
    if (grid[i] <= grid[i - 1]) throw DomainError("load grid must be strictly increasing");
  }
}

}  // namespace

std::vector<CurvePoint> efficiency_curve(const CodebookSpec& spec, std::span<const std::uint64_t> load_grid) {
  validate_grid(load_grid);
  const auto size = codebook_size(spec);
  std::vector<CurvePoint> out;
  out.reserve(load_grid.size());
  if (spec.mode() == Mode::Reference) {
    for (auto n : load_grid) out.push_back({n, contention_efficiency(LoadPoint(n, size))});
    return out;
  }
  const auto model = spec.has_uniform_budgets() ? build_lumped_model(spec) : build_transition_model(spec);
  const auto perceived = perceived_curve(model, load_grid);
  for (std::size_t i = 0; i < load_grid.size(); ++i) {
    out.push_back({load_grid[i], expected_singles(LoadPoint(load_grid[i], size)) / perceived[i]});
  }
  return out;
}

std::set<std::uint64_t> state_cardinality_values(std::uint32_t frame_length, std::uint32_t preambles) {
  const auto space = build_state_space(CodebookSpec::uniform(Mode::Expanded, frame_length, preambles));
  return {space.cardinalities().begin(), space.cardinalities().end()};
}

std::set<std::uint64_t> cardinalities_of_interest(std::uint32_t frame_length, std::uint32_t preambles,
                                                  std::optional<std::uint64_t> reference_size) {
  const std::uint64_t threshold = reference_size.value_or(std::uint64_t{preambles} * frame_length);
  std::set<std::uint64_t> out;
  for (auto v : state_cardinality_values(frame_length, preambles)) {
    if (v > threshold) out.insert(v);
  }
  return out;
}

std::optional<std::uint64_t> crossover_point(std::span<const CurvePoint> a, std::span<const CurvePoint> b) {
  if (a.size() != b.size()) throw DomainError("curves are on different grids");
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].users != b[i].users) throw DomainError("curves are on different grids");
    if (b[i].efficiency > a[i].efficiency) return a[i].users;
  }
  return std::nullopt;
}

std::optional<std::uint64_t> crossover_point(const CodebookSpec& spec_a, const CodebookSpec& spec_b,
                                             std::span<const std::uint64_t> load_grid) {
  const auto a = efficiency_curve(spec_a, load_grid);
  const auto b = spec_a == spec_b ? a : efficiency_curve(spec_b, load_grid);
  return crossover_point(a, b);
}

std::optional<std::uint64_t> load_limit(std::span<const CurvePoint> curve, double threshold) {
  std::optional<std::uint64_t> last;
  for (const auto& p : curve) {
    if (p.efficiency >= threshold) last = p.users;
  }
  return last;
}

void CandidateSet::validate() const {
  if (candidates.empty()) throw DomainError("candidate set is empty");
  validate_grid(load_grid);
}

CandidateSet default_candidates(std::uint32_t frame_length, std::uint32_t expanded_preambles,
                                std::uint32_t reference_preambles, std::vector<std::uint64_t> load_grid) {
  CandidateSet set;
  set.load_grid = std::move(load_grid);
  set.candidates.push_back(CodebookSpec::uniform(Mode::Reference, frame_length, reference_preambles));
  const std::uint64_t reference_size = std::uint64_t{reference_preambles} * frame_length;
  const std::uint32_t global = std::max(expanded_preambles, reference_preambles);
  for (auto cardinality : cardinalities_of_interest(frame_length, expanded_preambles, reference_size)) {
    auto budgets = restrictions_for_cardinality(frame_length, expanded_preambles, cardinality).front();
    set.candidates.emplace_back(Mode::Expanded, std::move(budgets), global);
  }
  set.validate();
  return set;
}

ThresholdSchedule threshold_schedule(const CandidateSet& set) {
  set.validate();
  std::vector<std::vector<CurvePoint>> curves;
  curves.reserve(set.candidates.size());
  for (const auto& spec : set.candidates) curves.push_back(efficiency_curve(spec, set.load_grid));

  ThresholdSchedule schedule;
  std::optional<std::size_t> previous;
  for (std::size_t i = 0; i < set.load_grid.size(); ++i) {
    std::size_t best = 0;
    for (std::size_t c = 1; c < curves.size(); ++c) {
      const double e = curves[c][i].efficiency;
      const double b = curves[best][i].efficiency;
      if (e > b || (e == b && codebook_size(set.candidates[c]) < codebook_size(set.candidates[best]))) best = c;
    }
    const auto n = set.load_grid[i];
    const double e = curves[best][i].efficiency;
    schedule.envelope.push_back({n, e});
    if (previous && *previous == best) {
      schedule.segments.back().high = n;
      schedule.segments.back().efficiency_high = e;
    } else {
      schedule.segments.push_back({n, n, set.candidates[best], codebook_size(set.candidates[best]), e, e});
    }
    previous = best;
  }
  return schedule;
}

std::vector<PreambleRange> partition_preambles(std::uint32_t total, std::span<const std::uint32_t> class_budgets) {
  const auto requested = std::accumulate(class_budgets.begin(), class_budgets.end(), std::uint64_t{0});
  if (requested > total) {
    throw BudgetExceedsTotal("classes request " + std::to_string(requested) + " preambles, only " +
                             std::to_string(total) + " exist");
  }
  std::vector<PreambleRange> out;
  std::uint32_t next = 1;
  for (auto b : class_budgets) {
    out.push_back({next, b});
    next += b;
  }
  return out;
}

std::vector<std::uint64_t> make_grid(std::uint64_t first, std::uint64_t last, std::uint64_t step) {
  if (step == 0) throw DomainError("grid step must be positive");
  if (first == 0 || last < first) throw DomainError("grid needs 1 <= first <= last");
  std::vector<std::uint64_t> grid;
  for (std::uint64_t n = first; n <= last; n += step) grid.push_back(n);
  return grid;
}

}  // namespace cera
