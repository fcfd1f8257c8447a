#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "cera/codebook.hpp"
#include "cera/markov.hpp"
#include "cera/rational.hpp"
#include "cera/rng.hpp"

namespace cera {

/// What the base station sees after one contention round.
struct TrialOutcome {
  std::uint64_t singles = 0;             ///< codewords sent by exactly one user
  std::uint64_t collided_codewords = 0;  ///< codewords sent by two or more users
  std::uint64_t distinct_used = 0;       ///< singles + collided_codewords
  std::uint64_t perceived = 0;           ///< codewords consistent with the observation
  std::uint64_t phantoms = 0;            ///< perceived - distinct_used

  friend bool operator==(const TrialOutcome&, const TrialOutcome&) = default;
};

/// Evaluates a fixed assignment of codewords (one per user).
TrialOutcome observe(const CodebookSpec& spec, std::span<const Codeword> chosen);

/// Same, with codewords given by their enumeration rank.
TrialOutcome observe_ranks(const CodebookSpec& spec, std::span<const std::uint64_t> ranks);

/// N users pick codewords independently and uniformly.
TrialOutcome run_trial(const CodebookSpec& spec, std::uint64_t users, Rng& rng);

struct ScenarioConfig {
  CodebookSpec spec;
  std::uint64_t users = 1;
  std::uint64_t trials = 1;
  std::uint64_t master_seed = 0;
};

struct Estimate {
  double mean = 0.0;
  std::optional<double> standard_error;  ///< absent with a single trial
};

struct AggregateStats {
  std::uint64_t trials = 0;
  Estimate singles;
  Estimate collided_codewords;
  Estimate distinct_used;
  Estimate perceived;
  Estimate phantoms;
  /// mean(singles) / mean(perceived), delta-method standard error.
  Estimate efficiency;
  /// mean over trials of singles / perceived.
  Estimate efficiency_per_trial;
};

/// Trials used per accumulation chunk. Chunks are reduced in index order, so the
/// result does not depend on how chunks are spread over threads.
inline constexpr std::uint64_t kTrialChunk = 1024;

/**
 * Runs config.trials independent trials; trial t draws from
 * Rng(derive_seed(master_seed, t)). Serial and Parallel produce bit-identical
 * statistics.
 */
AggregateStats run_batch(const ScenarioConfig& config, Execution exec = Execution::Parallel);

/// Exact expectations of the TrialOutcome fields.
struct ExactOutcome {
  Rational singles;
  Rational collided_codewords;
  Rational distinct_used;
  Rational perceived;
  Rational phantoms;
};

inline constexpr std::uint64_t kDefaultBruteForceCap = 10'000'000;

/// Averages observe() over all A^N equally likely ordered assignments.
/// Throws EnumerationTooLarge when A^N > cap.
ExactOutcome brute_force_expected(const CodebookSpec& spec, std::uint64_t users,
                                  std::uint64_t cap = kDefaultBruteForceCap);

}  // namespace cera
