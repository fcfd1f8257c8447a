#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cera/rng.hpp"

namespace cera {

enum class Mode { Reference, Expanded };

std::string to_string(Mode mode);
Mode mode_from_string(const std::string& text);

/**
 * @brief Scheme parameters for one virtual frame.
 *
 * A virtual frame has L sub-frames. Sub-frame j may use preambles 1..budgets[j];
 * symbol 0 is the idle preamble and is always available. Reference mode sends a
 * single preamble in a single sub-frame and requires equal budgets. Expanded
 * mode sends one symbol (idle allowed) in every sub-frame, excluding all-idle.
 *
 * Construction validates the invariants; a constructed spec is immutable.
 */
class CodebookSpec {
public:
  /// Per-sub-frame budgets. global_preambles = 0 means "max of budgets".
  CodebookSpec(Mode mode, std::vector<std::uint32_t> budgets, std::uint32_t global_preambles = 0);

  /// Uniform budget M in each of L sub-frames.
  static CodebookSpec uniform(Mode mode, std::uint32_t frame_length, std::uint32_t preambles);

  Mode mode() const noexcept { return mode_; }
  std::uint32_t frame_length() const noexcept { return static_cast<std::uint32_t>(budgets_.size()); }
  const std::vector<std::uint32_t>& budgets() const noexcept { return budgets_; }
  std::uint32_t budget(std::size_t subframe) const { return budgets_.at(subframe); }
  std::uint32_t global_preambles() const noexcept { return global_; }
  bool has_uniform_budgets() const noexcept;

  /// Inline form "L=2,m=2,2,mode=expanded" (round-trips through parse_spec).
  std::string describe() const;

  friend bool operator==(const CodebookSpec&, const CodebookSpec&) = default;

private:
  Mode mode_;
  std::vector<std::uint32_t> budgets_;
  std::uint32_t global_;
};

/// symbols[j] in 0..budget(j); 0 is idle.
struct Codeword {
  std::vector<std::uint32_t> symbols;

  std::size_t weight() const noexcept;  ///< number of non-idle symbols
  friend auto operator<=>(const Codeword&, const Codeword&) = default;
};

/// Letters as in the literature: I for idle, A, B, ... for preambles.
std::string to_string(const Codeword& word);

std::uint64_t codebook_size(const CodebookSpec& spec);

inline constexpr std::uint64_t kDefaultEnumerationCap = 1'000'000;

/// All codewords in lexicographic order of their symbol vectors.
/// Throws SizeExceedsCap when codebook_size(spec) > cap.
std::vector<Codeword> enumerate_codewords(const CodebookSpec& spec,
                                          std::uint64_t cap = kDefaultEnumerationCap);

/// Position of a codeword in the enumeration order, 0-based.
std::uint64_t codeword_rank(const CodebookSpec& spec, const Codeword& word);
/// Inverse of codeword_rank.
Codeword codeword_at(const CodebookSpec& spec, std::uint64_t rank);

/// Exactly uniform over the codebook (one bounded draw plus index decoding).
Codeword sample_codeword(const CodebookSpec& spec, Rng& rng);

bool is_member(const CodebookSpec& spec, const Codeword& word);

struct PreambleBound {
  std::uint32_t preambles;  ///< ceil((M_r*L + 1)^(1/L) - 1)
  bool strictly_larger;     ///< (preambles+1)^L - 1 > M_r*L
};

/// Fewest preambles per sub-frame for which an expanded codebook reaches the
/// reference codebook size M_r*L. Evaluated in integers.
PreambleBound min_expanded_preambles(std::uint32_t reference_preambles, std::uint32_t frame_length);

/// Every budget vector (each entry <= max_preambles) whose expanded codebook has
/// exactly `target` codewords, lexicographically ordered.
std::vector<std::vector<std::uint32_t>> restrictions_for_cardinality(std::uint32_t frame_length,
                                                                     std::uint32_t max_preambles,
                                                                     std::uint64_t target);

}  // namespace cera
