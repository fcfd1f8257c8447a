#include "cera/analytic.hpp"

#include <cmath>
#include <string>

#include "cera/errors.hpp"

namespace cera {
namespace {

constexpr std::uint64_t kLogPowerThreshold = 10'000;

// (1 - 1/A)^e. Large exponents go through exp/log1p to keep relative error flat.
double miss_power(std::uint64_t codewords, std::uint64_t exponent) {
  if (exponent == 0) return 1.0;
  if (codewords == 1) return 0.0;
  const double a = static_cast<double>(codewords);
  if (exponent > kLogPowerThreshold) return std::exp(static_cast<double>(exponent) * std::log1p(-1.0 / a));
  return std::pow(1.0 - 1.0 / a, static_cast<double>(exponent));
}

}  // namespace

LoadPoint::LoadPoint(std::uint64_t n, std::uint64_t a) : users(n), codewords(a) {
  if (codewords == 0) throw DomainError("a load point needs at least one codeword");
}

double contention_pmf(const LoadPoint& point, std::uint64_t k) {
  const auto n = point.users;
  if (k > n) throw DomainError("k = " + std::to_string(k) + " exceeds N = " + std::to_string(n));
  if (point.codewords == 1) return k == n ? 1.0 : 0.0;
  const double p = 1.0 / static_cast<double>(point.codewords);
  const double nd = static_cast<double>(n);
  const double kd = static_cast<double>(k);
  const double log_choose = std::lgamma(nd + 1) - std::lgamma(kd + 1) - std::lgamma(nd - kd + 1);
  return std::exp(log_choose + kd * std::log(p) + (nd - kd) * std::log1p(-p));
}

double expected_singles(const LoadPoint& point) {
  if (point.users == 0) return 0.0;
  return static_cast<double>(point.users) * miss_power(point.codewords, point.users - 1);
}

double expected_collisions(const LoadPoint& point) {
  const auto n = point.users;
  if (n <= 1) return 0.0;
  const double a = static_cast<double>(point.codewords);
  const double idle = miss_power(point.codewords, n);
  const double single = static_cast<double>(n) / a * miss_power(point.codewords, n - 1);
  const double value = (1.0 - idle - single) * a;
  return value < 0.0 ? 0.0 : value;
}

double contention_efficiency(const LoadPoint& point) {
  if (point.users == 0) throw DomainError("efficiency is undefined for N = 0");
  const double singles = expected_singles(point);
  return singles / (singles + expected_collisions(point));
}

double reference_efficiency(std::uint64_t users, std::uint32_t preambles, std::uint32_t frame_length) {
  if (preambles == 0 || frame_length == 0) throw DomainError("reference scheme needs M >= 1 and L >= 1");
  return contention_efficiency(LoadPoint(users, std::uint64_t{preambles} * frame_length));
}

}  // namespace cera
