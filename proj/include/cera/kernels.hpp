#pragma once

#include <span>

#include "cera/markov.hpp"

namespace cera::kernels {

/// out = in * P, row-push order. Reference implementation for tests.
void step_serial(const TransitionModel& model, std::span<const double> in, std::span<double> out);

/// out = in * P, each output column gathered independently under OpenMP.
void step_parallel(const TransitionModel& model, std::span<const double> in, std::span<double> out);

inline void step(Execution exec, const TransitionModel& model, std::span<const double> in, std::span<double> out) {
  if (exec == Execution::Serial) {
    step_serial(model, in, out);
  } else {
    step_parallel(model, in, out);
  }
}

}  // namespace cera::kernels
