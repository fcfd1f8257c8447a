#include "cera/markov.hpp"

#include <algorithm>
#include <numeric>

#include "cera/analytic.hpp"
#include "cera/errors.hpp"
#include "cera/kernels.hpp"

namespace cera {
namespace {

void require_expanded(const CodebookSpec& spec) {
  if (spec.mode() != Mode::Expanded) throw InvalidSpec("the observation chain is defined for expanded codebooks");
}

// Positions whose count can still grow; only these can take a new preamble.
std::vector<std::uint32_t> open_positions(std::span<const std::uint32_t> counts, const CodebookSpec& spec) {
  std::vector<std::uint32_t> open;
  for (std::uint32_t j = 0; j < counts.size(); ++j) {
    if (counts[j] < spec.budget(j) + 1) open.push_back(j);
  }
  return open;
}

std::uint64_t binomial(std::uint64_t n, std::uint64_t k) {
  std::uint64_t r = 1;
  for (std::uint64_t i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

SparseMatrix transpose(const SparseMatrix& m, std::size_t columns) {
  SparseMatrix t;
  t.offsets.assign(columns + 1, 0);
  for (auto col : m.indices) ++t.offsets[col + 1];
  std::partial_sum(t.offsets.begin(), t.offsets.end(), t.offsets.begin());
  t.indices.resize(m.nonzeros());
  t.counts.resize(m.nonzeros());
  t.values.resize(m.nonzeros());
  std::vector<std::uint64_t> cursor(t.offsets.begin(), t.offsets.end() - 1);
  for (std::size_t row = 0; row < m.rows(); ++row) {
    for (auto k = m.offsets[row]; k < m.offsets[row + 1]; ++k) {
      const auto dst = cursor[m.indices[k]]++;
      t.indices[dst] = static_cast<std::uint32_t>(row);
      t.counts[dst] = m.counts[k];
      t.values[dst] = m.values[k];
    }
  }
  return t;
}

// Shared by the full and lumped builders: per state, enumerate every subset of
// open positions that take a new preamble, map the result to its state id and
// merge duplicates (the lumped space can map several subsets to one class).
TransitionModel assemble(StateSpace space, std::vector<std::uint64_t> initial_counts) {
  const auto& spec = space.spec();
  const std::uint64_t denominator = codebook_size(spec);
  SparseMatrix forward;
  forward.offsets.reserve(space.size() + 1);
  forward.offsets.push_back(0);
  std::vector<std::uint32_t> target(space.frame_length());
  std::vector<std::pair<std::uint32_t, std::uint64_t>> row;
  for (std::size_t state = 0; state < space.size(); ++state) {
    const auto counts = space.counts(state);
    const auto open = open_positions(counts, spec);
    row.clear();
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << open.size()); ++mask) {
      std::copy(counts.begin(), counts.end(), target.begin());
      std::uint64_t count = 1;
      std::size_t bit = 0;
      for (std::uint32_t j = 0; j < counts.size(); ++j) {
        const bool grows = bit < open.size() && open[bit] == j && ((mask >> bit) & 1U);
        if (bit < open.size() && open[bit] == j) ++bit;
        if (grows) {
          count *= spec.budget(j) + 1 - counts[j];
          ++target[j];
        } else {
          count *= counts[j];
        }
      }
      if (mask == 0) count -= 1;
      if (count == 0) continue;
      const auto id = space.index_of(target);
      row.emplace_back(static_cast<std::uint32_t>(*id), count);
    }
    std::sort(row.begin(), row.end());
    for (std::size_t k = 0; k < row.size(); ++k) {
      if (k > 0 && row[k].first == row[k - 1].first) {
        forward.counts.back() += row[k].second;
      } else {
        forward.indices.push_back(row[k].first);
        forward.counts.push_back(row[k].second);
      }
    }
    forward.offsets.push_back(forward.indices.size());
  }
  forward.values.resize(forward.counts.size());
  const double a = static_cast<double>(denominator);
  std::transform(forward.counts.begin(), forward.counts.end(), forward.values.begin(),
                 [a](std::uint64_t c) { return static_cast<double>(c) / a; });
  return TransitionModel(std::move(space), std::move(forward), std::move(initial_counts));
}

}  // namespace

std::uint64_t Configuration::cardinality() const noexcept {
  std::uint64_t p = 1;
  for (auto c : counts) p *= c;
  return p - 1;
}

std::string to_string(const Configuration& config) {
  std::string out = "(";
  for (std::size_t j = 0; j < config.counts.size(); ++j) {
    if (j) out += ',';
    out += std::to_string(config.counts[j]);
  }
  return out + ")";
}

std::uint64_t StateSpace::code(std::span<const std::uint32_t> counts) const {
  std::uint64_t value = 0;
  for (std::size_t j = 0; j < counts.size(); ++j) value = value * (spec_.budget(j) + 1) + (counts[j] - 1);
  return value;
}

void StateSpace::push(std::span<const std::uint32_t> counts) {
  counts_.insert(counts_.end(), counts.begin(), counts.end());
  std::uint64_t p = 1;
  for (auto c : counts) p *= c;
  if (lumped_) lumped_index_.emplace(code(counts), static_cast<std::uint32_t>(cardinalities_.size()));
  cardinalities_.push_back(p - 1);
}

StateSpace StateSpace::full(const CodebookSpec& spec, std::uint64_t cap) {
  require_expanded(spec);
  const std::uint64_t configurations = codebook_size(spec) + 1;
  if (configurations > cap) {
    throw StateSpaceTooLarge(std::to_string(configurations) + " configurations exceed the state cap of " +
                             std::to_string(cap));
  }
  StateSpace space(spec, false);
  const auto L = spec.frame_length();
  space.counts_.reserve((configurations - 1) * L);
  space.cardinalities_.reserve(configurations - 1);
  std::vector<std::uint32_t> counts(L, 1);
  // Odometer over all configurations in lexicographic order, skipping all-ones.
  for (std::uint64_t value = 1; value < configurations; ++value) {
    for (std::size_t j = L; j-- > 0;) {
      if (counts[j] < spec.budget(j) + 1) {
        ++counts[j];
        break;
      }
      counts[j] = 1;
    }
    space.push(counts);
  }
  return space;
}

StateSpace StateSpace::lumped(const CodebookSpec& spec, std::uint64_t cap) {
  require_expanded(spec);
  if (!spec.has_uniform_budgets()) throw NotUniform("lumping requires equal budgets in every sub-frame");
  const std::uint64_t L = spec.frame_length();
  const std::uint64_t top = spec.budget(0) + 1;
  // multisets of size L from {1..top}
  const std::uint64_t classes = binomial(top + L - 1, L);
  if (classes > cap) {
    throw StateSpaceTooLarge(std::to_string(classes) + " lumped classes exceed the state cap of " +
                             std::to_string(cap));
  }
  StateSpace space(spec, true);
  std::vector<std::uint32_t> counts(L, 1);
  auto recurse = [&](auto&& self, std::size_t j, std::uint32_t low) -> void {
    if (j == L) {
      if (counts.back() > 1) space.push(counts);
      return;
    }
    for (std::uint32_t c = low; c <= top; ++c) {
      counts[j] = c;
      self(self, j + 1, c);
    }
  };
  recurse(recurse, 0, 1);
  return space;
}

Configuration StateSpace::configuration(std::size_t state) const {
  const auto c = counts(state);
  return {{c.begin(), c.end()}};
}

std::optional<std::size_t> StateSpace::index_of(std::span<const std::uint32_t> counts) const {
  if (counts.size() != frame_length()) return std::nullopt;
  for (std::size_t j = 0; j < counts.size(); ++j) {
    if (counts[j] < 1 || counts[j] > spec_.budget(j) + 1) return std::nullopt;
  }
  if (!lumped_) {
    const auto value = code(counts);
    if (value == 0) return std::nullopt;
    return static_cast<std::size_t>(value - 1);
  }
  std::vector<std::uint32_t> sorted(counts.begin(), counts.end());
  std::sort(sorted.begin(), sorted.end());
  const auto it = lumped_index_.find(code(sorted));
  if (it == lumped_index_.end()) return std::nullopt;
  return it->second;
}

StateSpace build_state_space(const CodebookSpec& spec, std::uint64_t cap) { return StateSpace::full(spec, cap); }

std::uint64_t transition_count(const Configuration& from, const Configuration& to, const CodebookSpec& spec) {
  const auto L = spec.frame_length();
  if (from.counts.size() != L || to.counts.size() != L) throw DomainError("configuration length differs from L");
  std::uint64_t count = 1;
  bool stays = true;
  for (std::size_t j = 0; j < L; ++j) {
    const std::uint32_t c = from.counts[j];
    const std::uint32_t next = to.counts[j];
    const std::uint32_t top = spec.budget(j) + 1;
    if (c < 1 || c > top || next < 1 || next > top) throw DomainError("configuration outside the spec's budgets");
    if (next == c) {
      count *= c;
    } else if (next == c + 1) {
      count *= top - c;
      stays = false;
    } else {
      return 0;
    }
  }
  return stays ? count - 1 : count;
}

std::uint64_t SparseMatrix::count_at(std::size_t row, std::size_t col) const {
  const auto begin = indices.begin() + static_cast<std::ptrdiff_t>(offsets[row]);
  const auto end = indices.begin() + static_cast<std::ptrdiff_t>(offsets[row + 1]);
  const auto it = std::lower_bound(begin, end, static_cast<std::uint32_t>(col));
  if (it == end || *it != col) return 0;
  return counts[static_cast<std::size_t>(it - indices.begin())];
}

TransitionModel::TransitionModel(StateSpace space, SparseMatrix forward, std::vector<std::uint64_t> initial_counts)
    : space_(std::move(space)),
      denominator_(codebook_size(space_.spec())),
      forward_(std::move(forward)),
      backward_(transpose(forward_, space_.size())),
      initial_counts_(std::move(initial_counts)) {
  initial_.resize(initial_counts_.size());
  const double a = static_cast<double>(denominator_);
  std::transform(initial_counts_.begin(), initial_counts_.end(), initial_.begin(),
                 [a](std::uint64_t c) { return static_cast<double>(c) / a; });
}

Rational TransitionModel::probability(std::size_t from, std::size_t to) const {
  return Rational(BigInt(forward_.count_at(from, to)), BigInt(denominator_));
}

Rational TransitionModel::initial_probability(std::size_t state) const {
  return Rational(BigInt(initial_counts_.at(state)), BigInt(denominator_));
}

// One user: sub-frame j shows idle only (1 codeword choice, idle) or idle plus
// one preamble (m_j choices). Anything above 2 is unreachable.
TransitionModel build_transition_model(const CodebookSpec& spec, std::uint64_t cap) {
  auto space = StateSpace::full(spec, cap);
  std::vector<std::uint64_t> initial(space.size(), 0);
  for (std::size_t i = 0; i < space.size(); ++i) {
    std::uint64_t count = 1;
    const auto c = space.counts(i);
    for (std::size_t j = 0; j < c.size() && count; ++j) {
      count *= c[j] == 1 ? 1 : c[j] == 2 ? spec.budget(j) : 0;
    }
    initial[i] = count;
  }
  return assemble(std::move(space), std::move(initial));
}

TransitionModel build_lumped_model(const CodebookSpec& spec, std::uint64_t cap) {
  auto space = StateSpace::lumped(spec, cap);
  const std::uint64_t m = spec.budget(0);
  std::vector<std::uint64_t> initial(space.size(), 0);
  for (std::size_t i = 0; i < space.size(); ++i) {
    const auto c = space.counts(i);
    if (c.back() > 2) continue;
    const auto twos = static_cast<std::uint64_t>(std::count(c.begin(), c.end(), 2U));
    std::uint64_t count = binomial(c.size(), twos);
    for (std::uint64_t k = 0; k < twos; ++k) count *= m;
    initial[i] = count;
  }
  return assemble(std::move(space), std::move(initial));
}

PerceivedSweep::PerceivedSweep(const TransitionModel& model, Execution exec)
    : model_(&model), exec_(exec), current_(model.initial()), scratch_(model.size(), 0.0) {}

double PerceivedSweep::expectation() const {
  const auto& alpha = model_->space().cardinalities();
  double sum = 0.0;
  for (std::size_t i = 0; i < current_.size(); ++i) sum += static_cast<double>(alpha[i]) * current_[i];
  return sum;
}

double PerceivedSweep::advance_to(std::uint64_t users) {
  if (users == 0) return 0.0;
  if (users < users_) throw DomainError("a sweep only moves forward in N");
  for (; users_ < users; ++users_) {
    kernels::step(exec_, *model_, current_, scratch_);
    current_.swap(scratch_);
  }
  return expectation();
}

std::vector<double> perceived_curve(const TransitionModel& model, std::span<const std::uint64_t> grid,
                                    Execution exec) {
  PerceivedSweep sweep(model, exec);
  std::vector<double> out;
  out.reserve(grid.size());
  for (auto n : grid) out.push_back(sweep.advance_to(n));
  return out;
}

double perceived_count(const TransitionModel& model, std::uint64_t users) {
  PerceivedSweep sweep(model);
  return sweep.advance_to(users);
}

double perceived_count(const CodebookSpec& spec, std::uint64_t users) {
  if (users == 0) return 0.0;
  const auto model = spec.has_uniform_budgets() ? build_lumped_model(spec) : build_transition_model(spec);
  return perceived_count(model, users);
}

Rational perceived_count_exact(const TransitionModel& model, std::uint64_t users) {
  if (users == 0) return Rational(0);
  const auto& fwd = model.forward();
  std::vector<BigInt> current(model.initial_counts().begin(), model.initial_counts().end());
  std::vector<BigInt> next(current.size());
  BigInt denominator = model.denominator();
  for (std::uint64_t n = 1; n < users; ++n) {
    std::fill(next.begin(), next.end(), BigInt(0));
    for (std::size_t row = 0; row < fwd.rows(); ++row) {
      if (current[row] == 0) continue;
      for (auto k = fwd.offsets[row]; k < fwd.offsets[row + 1]; ++k) next[fwd.indices[k]] += current[row] * fwd.counts[k];
    }
    current.swap(next);
    denominator *= model.denominator();
  }
  BigInt numerator = 0;
  const auto& alpha = model.space().cardinalities();
  for (std::size_t i = 0; i < current.size(); ++i) numerator += current[i] * alpha[i];
  return Rational(numerator, denominator);
}

double expanded_efficiency(const CodebookSpec& spec, std::uint64_t users) {
  require_expanded(spec);
  if (users == 0) throw DomainError("efficiency is undefined for N = 0");
  const double singles = expected_singles(LoadPoint(users, codebook_size(spec)));
  return singles / perceived_count(spec, users);
}

}  // namespace cera
