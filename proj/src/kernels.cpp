#include "cera/kernels.hpp"

#include <algorithm>

namespace cera::kernels {

void step_serial(const TransitionModel& model, std::span<const double> in, std::span<double> out) {
  const auto& fwd = model.forward();
  std::fill(out.begin(), out.end(), 0.0);
  for (std::size_t row = 0; row < fwd.rows(); ++row) {
    const double mass = in[row];
    if (mass == 0.0) continue;
    for (auto k = fwd.offsets[row]; k < fwd.offsets[row + 1]; ++k) out[fwd.indices[k]] += mass * fwd.values[k];
  }
}

void step_parallel(const TransitionModel& model, std::span<const double> in, std::span<double> out) {
  const auto& bwd = model.backward();
  const auto columns = static_cast<std::int64_t>(bwd.rows());
  const double* values = bwd.values.data();
  const std::uint32_t* sources = bwd.indices.data();
  const std::uint64_t* offsets = bwd.offsets.data();
#pragma omp parallel for schedule(static) if (columns > 4096)
  for (std::int64_t col = 0; col < columns; ++col) {
    double sum = 0.0;
    for (auto k = offsets[col]; k < offsets[col + 1]; ++k) sum += in[sources[k]] * values[k];
    out[static_cast<std::size_t>(col)] = sum;
  }
}

}  // namespace cera::kernels
