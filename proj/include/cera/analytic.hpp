#pragma once

#include <cstdint>

namespace cera {

/// N contenders choosing uniformly among A codewords.
struct LoadPoint {
  std::uint64_t users;      ///< N >= 0
  std::uint64_t codewords;  ///< A >= 1

  LoadPoint(std::uint64_t n, std::uint64_t a);
};

/// Pr[X = k]: exactly k of the N users picked one given codeword. Binomial(N, 1/A).
double contention_pmf(const LoadPoint& point, std::uint64_t k);

/// Expected number of codewords picked by exactly one user: N (1 - 1/A)^(N-1).
double expected_singles(const LoadPoint& point);

/// Expected number of codewords picked by two or more users.
double expected_collisions(const LoadPoint& point);

/// N_S / (N_S + N_C) for an arbitrary codebook size; N >= 1.
double contention_efficiency(const LoadPoint& point);

/// Efficiency of the reference scheme with A = M * L codewords. Throws
/// DomainError for N = 0.
double reference_efficiency(std::uint64_t users, std::uint32_t preambles, std::uint32_t frame_length);

}  // namespace cera
