#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "cera/codebook.hpp"
#include "cera/rational.hpp"

namespace cera {

/// Observed preambles per sub-frame, idle included: counts[j] in 1..m_j+1.
struct Configuration {
  std::vector<std::uint32_t> counts;

  /// Number of codewords consistent with this observation, prod(C_j) - 1.
  std::uint64_t cardinality() const noexcept;
  friend auto operator<=>(const Configuration&, const Configuration&) = default;
};

std::string to_string(const Configuration& config);

inline constexpr std::uint64_t kDefaultStateCap = 10'000'000;

/**
 * Indexed set of reachable configurations (the all-ones configuration is never
 * reachable once a user has transmitted, so it is excluded).
 *
 * The full space lists every configuration in lexicographic order; its index is
 * the mixed-radix value of (C_j - 1) minus one. The lumped space keeps one
 * sorted representative per multiset of counts and is only defined for uniform
 * budgets, where permuting sub-frames is a symmetry of the chain.
 */
class StateSpace {
public:
  static StateSpace full(const CodebookSpec& spec, std::uint64_t cap = kDefaultStateCap);
  static StateSpace lumped(const CodebookSpec& spec, std::uint64_t cap = kDefaultStateCap);

  const CodebookSpec& spec() const noexcept { return spec_; }
  bool is_lumped() const noexcept { return lumped_; }
  std::size_t size() const noexcept { return cardinalities_.size(); }
  std::uint32_t frame_length() const noexcept { return spec_.frame_length(); }

  std::span<const std::uint32_t> counts(std::size_t state) const {
    return {counts_.data() + state * frame_length(), frame_length()};
  }
  Configuration configuration(std::size_t state) const;
  std::uint64_t cardinality(std::size_t state) const { return cardinalities_[state]; }
  const std::vector<std::uint64_t>& cardinalities() const noexcept { return cardinalities_; }

  /// State id of a configuration; for the lumped space any permutation of a
  /// representative maps to the same id.
  std::optional<std::size_t> index_of(std::span<const std::uint32_t> counts) const;
  std::optional<std::size_t> index_of(const Configuration& config) const { return index_of(config.counts); }

private:
  StateSpace(CodebookSpec spec, bool lumped) : spec_(std::move(spec)), lumped_(lumped) {}
  void push(std::span<const std::uint32_t> counts);
  std::uint64_t code(std::span<const std::uint32_t> counts) const;

  CodebookSpec spec_;
  bool lumped_;
  std::vector<std::uint32_t> counts_;  // size() * L, row-major
  std::vector<std::uint64_t> cardinalities_;
  std::unordered_map<std::uint64_t, std::uint32_t> lumped_index_;
};

StateSpace build_state_space(const CodebookSpec& spec, std::uint64_t cap = kDefaultStateCap);

/// Codewords that move the observation from `from` to `to`: the product over
/// sub-frames of C_j (symbol already seen) or m_j + 1 - C_j (new preamble),
/// minus the all-idle codeword on the diagonal. Zero for impossible moves.
std::uint64_t transition_count(const Configuration& from, const Configuration& to, const CodebookSpec& spec);

/// Compressed sparse rows. `counts` are exact codeword counts, `values` the
/// probabilities counts / denominator.
struct SparseMatrix {
  std::vector<std::uint64_t> offsets;  // rows + 1
  std::vector<std::uint32_t> indices;
  std::vector<std::uint64_t> counts;
  std::vector<double> values;

  std::size_t rows() const noexcept { return offsets.empty() ? 0 : offsets.size() - 1; }
  std::size_t nonzeros() const noexcept { return indices.size(); }
  /// Count at (row, col) or 0.
  std::uint64_t count_at(std::size_t row, std::size_t col) const;
};

/// Row-stochastic chain over a state space plus the distribution after one user.
class TransitionModel {
public:
  TransitionModel(StateSpace space, SparseMatrix forward, std::vector<std::uint64_t> initial_counts);

  const StateSpace& space() const noexcept { return space_; }
  std::size_t size() const noexcept { return space_.size(); }
  /// A_e: every count in the model is over this denominator.
  std::uint64_t denominator() const noexcept { return denominator_; }

  const SparseMatrix& forward() const noexcept { return forward_; }
  /// Transpose of forward(), for column-parallel (pull) products.
  const SparseMatrix& backward() const noexcept { return backward_; }

  const std::vector<std::uint64_t>& initial_counts() const noexcept { return initial_counts_; }
  const std::vector<double>& initial() const noexcept { return initial_; }

  Rational probability(std::size_t from, std::size_t to) const;
  Rational initial_probability(std::size_t state) const;

private:
  StateSpace space_;
  std::uint64_t denominator_;
  SparseMatrix forward_;
  SparseMatrix backward_;
  std::vector<std::uint64_t> initial_counts_;
  std::vector<double> initial_;
};

TransitionModel build_transition_model(const CodebookSpec& spec, std::uint64_t cap = kDefaultStateCap);

/// Model over sorted-configuration classes; requires uniform budgets (NotUniform).
TransitionModel build_lumped_model(const CodebookSpec& spec, std::uint64_t cap = kDefaultStateCap);

enum class Execution { Serial, Parallel };

/**
 * Incremental evaluation of N_P(N) = sum_i alpha_i pi_i^(N).
 *
 * Holds pi^(N) and advances it one sparse vector-matrix product per user, so a
 * sweep to N_max costs N_max - 1 products in total.
 */
class PerceivedSweep {
public:
  explicit PerceivedSweep(const TransitionModel& model, Execution exec = Execution::Parallel);

  std::uint64_t users() const noexcept { return users_; }
  const std::vector<double>& distribution() const noexcept { return current_; }

  /// N_P at `users`; users must not be below the current position.
  double advance_to(std::uint64_t users);

private:
  double expectation() const;

  const TransitionModel* model_;
  Execution exec_;
  std::uint64_t users_ = 1;
  std::vector<double> current_;
  std::vector<double> scratch_;
};

/// N_P for each grid value (grid non-decreasing). Non-positive N yields 0.
std::vector<double> perceived_curve(const TransitionModel& model, std::span<const std::uint64_t> grid,
                                    Execution exec = Execution::Parallel);

double perceived_count(const TransitionModel& model, std::uint64_t users);
double perceived_count(const CodebookSpec& spec, std::uint64_t users);

/// Exact N_P via integer vector-matrix products over denominator A_e^N.
Rational perceived_count_exact(const TransitionModel& model, std::uint64_t users);

/// S_e = N_S / N_P with N_S from the closed form at A = A_e.
double expanded_efficiency(const CodebookSpec& spec, std::uint64_t users);

}  // namespace cera
