#include "spinfront/kernels.hpp"

#include <algorithm>
#include <stdexcept>

namespace spinfront {

std::vector<EndAmplitudes> end_amplitude_grid_reference(const EndAmplitudeKernel& kernel,
                                                        double dt, std::size_t count) {
  if (!(dt > 0.0)) throw std::invalid_argument("dt must be > 0");
  std::vector<EndAmplitudes> out(count);
  for (std::size_t i = 0; i < count; ++i) out[i] = kernel.at(static_cast<double>(i) * dt);
  return out;
}

std::vector<EndAmplitudes> end_amplitude_grid(const EndAmplitudeKernel& kernel, double dt,
                                              std::size_t count, const ExecPolicy& policy) {
  if (!(dt > 0.0)) throw std::invalid_argument("dt must be > 0");
  constexpr std::size_t block = EndAmplitudeStepper::kResyncInterval;
  std::vector<EndAmplitudes> out(count);
  const std::size_t blocks = (count + block - 1) / block;
  parallel_for(blocks, policy, [&](std::size_t b) {
    const std::size_t begin = b * block;
    const std::size_t end = std::min(count, begin + block);
    EndAmplitudeStepper stepper(kernel, dt, begin);
    out[begin] = stepper.current();
    for (std::size_t i = begin + 1; i < end; ++i) {
      stepper.advance();
      out[i] = stepper.current();
    }
  });
  return out;
}

std::vector<EndAmplitudes> end_amplitudes_at(const EndAmplitudeKernel& kernel,
                                             std::span<const double> times,
                                             const ExecPolicy& policy) {
  std::vector<EndAmplitudes> out(times.size());
  parallel_for(times.size(), policy, [&](std::size_t i) { out[i] = kernel.at(times[i]); });
  return out;
}

}  // namespace spinfront
