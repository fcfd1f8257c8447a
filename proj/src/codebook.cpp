#include "cera/codebook.hpp"

#include <algorithm>
#include <cctype>
#include <functional>
#include <limits>
#include <numeric>
#include <sstream>

#include "cera/errors.hpp"

namespace cera {
namespace {

std::uint64_t checked_mul(std::uint64_t a, std::uint64_t b) {
  std::uint64_t out = 0;
  if (__builtin_mul_overflow(a, b, &out)) {
    throw InvalidSpec("codebook size does not fit in 64 bits");
  }
  return out;
}

// Product of (m_j + 1) over all sub-frames, overflow-checked.
std::uint64_t radix_product(const std::vector<std::uint32_t>& budgets) {
  std::uint64_t p = 1;
  for (auto m : budgets) p = checked_mul(p, std::uint64_t{m} + 1);
  return p;
}

}  // namespace

std::string to_string(Mode mode) { return mode == Mode::Reference ? "reference" : "expanded"; }

Mode mode_from_string(const std::string& text) {
  std::string lower(text);
  std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
  if (lower == "reference" || lower == "ref") return Mode::Reference;
  if (lower == "expanded" || lower == "exp") return Mode::Expanded;
  throw InvalidSpec("unknown mode '" + text + "' (expected reference or expanded)");
}

CodebookSpec::CodebookSpec(Mode mode, std::vector<std::uint32_t> budgets, std::uint32_t global_preambles)
    : mode_(mode), budgets_(std::move(budgets)), global_(global_preambles) {
  if (budgets_.empty()) throw InvalidSpec("frame length L must be at least 1");
  const auto largest = *std::max_element(budgets_.begin(), budgets_.end());
  if (largest == 0) throw InvalidSpec("at least one sub-frame needs a non-idle preamble");
  if (global_ == 0) global_ = largest;
  if (largest > global_) {
    throw InvalidSpec("sub-frame budget " + std::to_string(largest) + " exceeds provisioned preambles " +
                      std::to_string(global_));
  }
  if (mode_ == Mode::Reference && !has_uniform_budgets()) {
    throw InvalidSpec("reference mode requires equal budgets in every sub-frame");
  }
  // Rejects specs whose codebook cannot be indexed by 64-bit ranks.
  radix_product(budgets_);
}

CodebookSpec CodebookSpec::uniform(Mode mode, std::uint32_t frame_length, std::uint32_t preambles) {
  return CodebookSpec(mode, std::vector<std::uint32_t>(frame_length, preambles));
}

bool CodebookSpec::has_uniform_budgets() const noexcept {
  return std::adjacent_find(budgets_.begin(), budgets_.end(), std::not_equal_to<>()) == budgets_.end();
}

std::string CodebookSpec::describe() const {
  std::ostringstream os;
  os << "L=" << budgets_.size() << ",m=";
  for (std::size_t j = 0; j < budgets_.size(); ++j) os << (j ? "," : "") << budgets_[j];
  os << ",mode=" << to_string(mode_);
  if (global_ != *std::max_element(budgets_.begin(), budgets_.end())) os << ",M=" << global_;
  return os.str();
}

std::size_t Codeword::weight() const noexcept {
  return static_cast<std::size_t>(std::count_if(symbols.begin(), symbols.end(), [](auto s) { return s != 0; }));
}

std::string to_string(const Codeword& word) {
  std::string out = "(";
  for (std::size_t j = 0; j < word.symbols.size(); ++j) {
    if (j) out += ',';
    const auto s = word.symbols[j];
    if (s == 0) {
      out += 'I';
    } else if (s <= 26) {
      out += static_cast<char>('A' + s - 1);
    } else {
      out += 'P' + std::to_string(s);
    }
  }
  return out + ")";
}

std::uint64_t codebook_size(const CodebookSpec& spec) {
  if (spec.mode() == Mode::Reference) {
    return std::accumulate(spec.budgets().begin(), spec.budgets().end(), std::uint64_t{0});
  }
  return radix_product(spec.budgets()) - 1;
}

// Expanded: rank r is the mixed-radix value of the symbol vector minus one
// (the all-idle vector has value 0). First sub-frame is most significant.
// Reference: codewords (with one non-idle entry) in lexicographic order put the
// later sub-frames first: (I,A) < (I,B) < (A,I) < (B,I).
std::uint64_t codeword_rank(const CodebookSpec& spec, const Codeword& word) {
  const auto& m = spec.budgets();
  if (!is_member(spec, word)) throw DomainError("codeword " + to_string(word) + " not in codebook");
  if (spec.mode() == Mode::Expanded) {
    std::uint64_t value = 0;
    for (std::size_t j = 0; j < m.size(); ++j) value = value * (m[j] + 1) + word.symbols[j];
    return value - 1;
  }
  const std::size_t L = m.size();
  const std::size_t j = static_cast<std::size_t>(
      std::find_if(word.symbols.begin(), word.symbols.end(), [](auto s) { return s != 0; }) -
      word.symbols.begin());
  return (L - 1 - j) * std::uint64_t{m[0]} + (word.symbols[j] - 1);
}

Codeword codeword_at(const CodebookSpec& spec, std::uint64_t rank) {
  const auto& m = spec.budgets();
  const std::size_t L = m.size();
  Codeword word{std::vector<std::uint32_t>(L, 0)};
  if (spec.mode() == Mode::Expanded) {
    std::uint64_t value = rank + 1;
    for (std::size_t j = L; j-- > 0;) {
      word.symbols[j] = static_cast<std::uint32_t>(value % (m[j] + 1));
      value /= (m[j] + 1);
    }
    return word;
  }
  const std::uint64_t per = m[0];
  const std::size_t j = L - 1 - static_cast<std::size_t>(rank / per);
  word.symbols[j] = static_cast<std::uint32_t>(rank % per) + 1;
  return word;
}

std::vector<Codeword> enumerate_codewords(const CodebookSpec& spec, std::uint64_t cap) {
  const auto size = codebook_size(spec);
  if (size > cap) {
    throw SizeExceedsCap("codebook has " + std::to_string(size) + " codewords, enumeration cap is " +
                         std::to_string(cap));
  }
  std::vector<Codeword> out;
  out.reserve(size);
  for (std::uint64_t r = 0; r < size; ++r) out.push_back(codeword_at(spec, r));
  return out;
}

Codeword sample_codeword(const CodebookSpec& spec, Rng& rng) {
  return codeword_at(spec, rng.uniform_below(codebook_size(spec)));
}

bool is_member(const CodebookSpec& spec, const Codeword& word) {
  const auto& m = spec.budgets();
  if (word.symbols.size() != m.size()) return false;
  for (std::size_t j = 0; j < m.size(); ++j) {
    if (word.symbols[j] > m[j]) return false;
  }
  const auto w = word.weight();
  return spec.mode() == Mode::Expanded ? w >= 1 : w == 1;
}

PreambleBound min_expanded_preambles(std::uint32_t reference_preambles, std::uint32_t frame_length) {
  if (reference_preambles == 0 || frame_length == 0) {
    throw DomainError("min_expanded_preambles needs M_r >= 1 and L >= 1");
  }
  const Uint128 reference_size =
      static_cast<Uint128>(reference_preambles) * frame_length;
  // (x+1)^L saturated at reference_size + 2, enough to decide both comparisons.
  auto power = [&](std::uint64_t base) {
    Uint128 p = 1;
    for (std::uint32_t i = 0; i < frame_length && p <= reference_size + 1; ++i) p *= base;
    return p;
  };
  // smallest x with (x+1)^L >= M_r*L + 1, i.e. x >= (M_r*L + 1)^(1/L) - 1
  std::uint32_t x = 0;
  while (power(std::uint64_t{x} + 1) < reference_size + 1) ++x;
  return {x, power(std::uint64_t{x} + 1) - 1 > reference_size};
}

std::vector<std::vector<std::uint32_t>> restrictions_for_cardinality(std::uint32_t frame_length,
                                                                     std::uint32_t max_preambles,
                                                                     std::uint64_t target) {
  if (frame_length == 0) throw DomainError("frame length must be at least 1");
  std::vector<std::vector<std::uint32_t>> out;
  std::vector<std::uint32_t> current(frame_length, 0);
  // Remaining product of (m_j + 1) to realize over positions j..L-1.
  auto recurse = [&](auto&& self, std::size_t j, std::uint64_t remaining) -> void {
    if (j == frame_length) {
      if (remaining == 1) out.push_back(current);
      return;
    }
    for (std::uint32_t m = 0; m <= max_preambles; ++m) {
      const std::uint64_t factor = std::uint64_t{m} + 1;
      if (factor > remaining) break;
      if (remaining % factor != 0) continue;
      current[j] = m;
      self(self, j + 1, remaining / factor);
    }
  };
  if (target >= 1 && target < std::numeric_limits<std::uint64_t>::max()) recurse(recurse, 0, target + 1);
  return out;
}

}  // namespace cera
