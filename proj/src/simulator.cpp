#include "cera/simulator.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "cera/errors.hpp"

namespace cera {
namespace {

// Reusable buffers for one thread.
class Workspace {
public:
  explicit Workspace(const CodebookSpec& spec) : spec_(&spec) {
    const auto& m = spec.budgets();
    offsets_.resize(m.size() + 1, 0);
    for (std::size_t j = 0; j < m.size(); ++j) offsets_[j + 1] = offsets_[j] + m[j] + 1;
    seen_.assign(offsets_.back(), 0);
    observed_.resize(m.size());
  }

  std::vector<std::uint64_t>& ranks() { return ranks_; }

  TrialOutcome evaluate() {
    TrialOutcome out;
    std::sort(ranks_.begin(), ranks_.end());
    for (std::size_t i = 0; i < ranks_.size();) {
      std::size_t j = i + 1;
      while (j < ranks_.size() && ranks_[j] == ranks_[i]) ++j;
      (j - i == 1 ? out.singles : out.collided_codewords) += 1;
      i = j;
    }
    out.distinct_used = out.singles + out.collided_codewords;
    if (spec_->mode() == Mode::Reference) {
      out.perceived = out.distinct_used;
      return out;
    }
    const auto& m = spec_->budgets();
    const std::size_t L = m.size();
    auto& observed = observed_;
    std::fill(observed.begin(), observed.end(), 0U);
    for (auto rank : ranks_) {
      std::uint64_t value = rank + 1;
      for (std::size_t j = L; j-- > 0;) {
        const auto symbol = static_cast<std::uint32_t>(value % (m[j] + 1));
        value /= (m[j] + 1);
        auto& flag = seen_[offsets_[j] + symbol];
        if (symbol != 0 && !flag) {
          flag = 1;
          ++observed[j];
        }
      }
    }
    std::uint64_t product = 1;
    for (auto o : observed) product *= std::uint64_t{o} + 1;
    out.perceived = product - 1;
    out.phantoms = out.perceived - out.distinct_used;
    std::fill(seen_.begin(), seen_.end(), 0);
    return out;
  }

private:
  const CodebookSpec* spec_;
  std::vector<std::size_t> offsets_;
  std::vector<std::uint8_t> seen_;
  std::vector<std::uint32_t> observed_;
  std::vector<std::uint64_t> ranks_;
};

// Neumaier-compensated sum.
struct CompensatedSum {
  double sum = 0.0;
  double carry = 0.0;

  void add(double x) {
    const double t = sum + x;
    carry += std::abs(sum) >= std::abs(x) ? (sum - t) + x : (x - t) + sum;
    sum = t;
  }
  void add(const CompensatedSum& other) {
    add(other.sum);
    add(other.carry);
  }
  double value() const { return sum + carry; }
};

enum Field { kSingles, kCollided, kDistinct, kPerceived, kPhantoms, kRatio, kFieldCount };

struct Moments {
  std::array<CompensatedSum, kFieldCount> first;
  std::array<CompensatedSum, kFieldCount> second;
  CompensatedSum singles_perceived;

  void add(const TrialOutcome& t) {
    const std::array<double, kFieldCount> x{
        static_cast<double>(t.singles),   static_cast<double>(t.collided_codewords),
        static_cast<double>(t.distinct_used), static_cast<double>(t.perceived),
        static_cast<double>(t.phantoms),  t.perceived ? static_cast<double>(t.singles) / static_cast<double>(t.perceived) : 0.0};
    for (std::size_t f = 0; f < kFieldCount; ++f) {
      first[f].add(x[f]);
      second[f].add(x[f] * x[f]);
    }
    singles_perceived.add(x[kSingles] * x[kPerceived]);
  }
  void add(const Moments& m) {
    for (std::size_t f = 0; f < kFieldCount; ++f) {
      first[f].add(m.first[f]);
      second[f].add(m.second[f]);
    }
    singles_perceived.add(m.singles_perceived);
  }
};

Moments run_chunk(const ScenarioConfig& config, std::uint64_t chunk, Workspace& ws) {
  Moments moments;
  const std::uint64_t begin = chunk * kTrialChunk;
  const std::uint64_t end = std::min(config.trials, begin + kTrialChunk);
  const std::uint64_t size = codebook_size(config.spec);
  auto& ranks = ws.ranks();
  for (std::uint64_t t = begin; t < end; ++t) {
    Rng rng(derive_seed(config.master_seed, t));
    ranks.resize(config.users);
    for (auto& r : ranks) r = rng.uniform_below(size);
    moments.add(ws.evaluate());
  }
  return moments;
}

AggregateStats summarize(const Moments& m, std::uint64_t trials) {
  const double n = static_cast<double>(trials);
  auto mean = [&](Field f) { return m.first[f].value() / n; };
  auto variance = [&](Field f) {
    const double mu = mean(f);
    return std::max(0.0, (m.second[f].value() - n * mu * mu) / (n - 1.0));
  };
  auto estimate = [&](Field f) {
    Estimate e{mean(f), std::nullopt};
    if (trials > 1) e.standard_error = std::sqrt(variance(f) / n);
    return e;
  };
  AggregateStats out;
  out.trials = trials;
  out.singles = estimate(kSingles);
  out.collided_codewords = estimate(kCollided);
  out.distinct_used = estimate(kDistinct);
  out.perceived = estimate(kPerceived);
  out.phantoms = estimate(kPhantoms);
  out.efficiency_per_trial = estimate(kRatio);

  const double ys = mean(kSingles);
  const double xs = mean(kPerceived);
  const double ratio = xs > 0.0 ? ys / xs : 0.0;
  out.efficiency.mean = ratio;
  if (trials > 1 && xs > 0.0) {
    const double cov = (m.singles_perceived.value() - n * ys * xs) / (n - 1.0);
    const double v = variance(kSingles) - 2.0 * ratio * cov + ratio * ratio * variance(kPerceived);
    out.efficiency.standard_error = std::sqrt(std::max(0.0, v) / n) / xs;
  }
  return out;
}

}  // namespace

TrialOutcome observe_ranks(const CodebookSpec& spec, std::span<const std::uint64_t> ranks) {
  const auto size = codebook_size(spec);
  Workspace ws(spec);
  for (auto r : ranks) {
    if (r >= size) throw DomainError("codeword rank out of range");
  }
  ws.ranks().assign(ranks.begin(), ranks.end());
  return ws.evaluate();
}

TrialOutcome observe(const CodebookSpec& spec, std::span<const Codeword> chosen) {
  std::vector<std::uint64_t> ranks;
  ranks.reserve(chosen.size());
  for (const auto& w : chosen) ranks.push_back(codeword_rank(spec, w));
  return observe_ranks(spec, ranks);
}

TrialOutcome run_trial(const CodebookSpec& spec, std::uint64_t users, Rng& rng) {
  Workspace ws(spec);
  const auto size = codebook_size(spec);
  ws.ranks().resize(users);
  for (auto& r : ws.ranks()) r = rng.uniform_below(size);
  return ws.evaluate();
}

AggregateStats run_batch(const ScenarioConfig& config, Execution exec) {
  if (config.trials == 0) throw DomainError("a batch needs at least one trial");
  if (config.users == 0) throw DomainError("a trial needs at least one user");
  const std::uint64_t chunks = (config.trials + kTrialChunk - 1) / kTrialChunk;
  std::vector<Moments> partial(chunks);
  if (exec == Execution::Serial) {
    Workspace ws(config.spec);
    for (std::uint64_t c = 0; c < chunks; ++c) partial[c] = run_chunk(config, c, ws);
  } else {
#pragma omp parallel
    {
      Workspace ws(config.spec);
#pragma omp for schedule(dynamic, 1)
      for (std::int64_t c = 0; c < static_cast<std::int64_t>(chunks); ++c) {
        partial[static_cast<std::size_t>(c)] = run_chunk(config, static_cast<std::uint64_t>(c), ws);
      }
    }
  }
  Moments total;
  for (const auto& p : partial) total.add(p);
  return summarize(total, config.trials);
}

ExactOutcome brute_force_expected(const CodebookSpec& spec, std::uint64_t users, std::uint64_t cap) {
  if (users == 0) throw DomainError("brute force needs at least one user");
  const std::uint64_t size = codebook_size(spec);
  std::uint64_t assignments = 1;
  for (std::uint64_t i = 0; i < users; ++i) {
    if (__builtin_mul_overflow(assignments, size, &assignments) || assignments > cap) {
      throw EnumerationTooLarge("A^N exceeds the enumeration cap of " + std::to_string(cap));
    }
  }
  using Sums = std::array<Uint128, 5>;
  std::vector<Sums> per_leading(size, Sums{});
  // Partitioned by the first user's codeword; each partition is an odometer
  // over the remaining N - 1 users.
#pragma omp parallel
  {
    Workspace ws(spec);
#pragma omp for schedule(dynamic, 1)
    for (std::int64_t lead = 0; lead < static_cast<std::int64_t>(size); ++lead) {
      std::vector<std::uint64_t> tail(users - 1, 0);
      Sums sums{};
      while (true) {
        auto& ranks = ws.ranks();
        ranks.clear();
        ranks.push_back(static_cast<std::uint64_t>(lead));
        ranks.insert(ranks.end(), tail.begin(), tail.end());
        const auto o = ws.evaluate();
        sums[0] += o.singles;
        sums[1] += o.collided_codewords;
        sums[2] += o.distinct_used;
        sums[3] += o.perceived;
        sums[4] += o.phantoms;
        std::size_t k = tail.size();
        while (k > 0 && ++tail[k - 1] == size) tail[--k] = 0;
        if (k == 0) break;
      }
      per_leading[static_cast<std::size_t>(lead)] = sums;
    }
  }
  Sums total{};
  for (const auto& s : per_leading) {
    for (std::size_t f = 0; f < total.size(); ++f) total[f] += s[f];
  }
  auto exact = [&](Uint128 v) {
    BigInt num = static_cast<std::uint64_t>(v >> 64);
    num <<= 64;
    num += static_cast<std::uint64_t>(v);
    return Rational(num, BigInt(assignments));
  };
  return {exact(total[0]), exact(total[1]), exact(total[2]), exact(total[3]), exact(total[4])};
}

}  // namespace cera
