#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "spinfront/chain_model.hpp"
#include "spinfront/parallel.hpp"

namespace spinfront {

// End amplitudes on the grid t_i = i * dt, i in [0, count).
//
// The reference version evaluates every point directly (one sincos per mode
// per point). The fast version splits the grid into blocks of
// EndAmplitudeStepper::kResyncInterval points, walks each block with the
// recurrence, and distributes blocks across OpenMP workers; its output does
// not depend on the worker count.
std::vector<EndAmplitudes> end_amplitude_grid_reference(const EndAmplitudeKernel& kernel,
                                                        double dt, std::size_t count);
std::vector<EndAmplitudes> end_amplitude_grid(const EndAmplitudeKernel& kernel, double dt,
                                              std::size_t count, const ExecPolicy& policy);

// Direct evaluation at arbitrary times, parallel over points.
std::vector<EndAmplitudes> end_amplitudes_at(const EndAmplitudeKernel& kernel,
                                             std::span<const double> times,
                                             const ExecPolicy& policy);

}  // namespace spinfront
