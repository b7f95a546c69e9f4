#include <cmath>

#include <gtest/gtest.h>

#include "spinfront/kernels.hpp"

using namespace spinfront;

TEST(Kernels, BlockedGridMatchesReference) {
  for (const ChainSpec& spec : {ChainSpec{Model::IsingRWA, 80, 1.0, 10.0},
                                ChainSpec{Model::HeisenbergUniform, 33, 0.5, 0.0}}) {
    const EndAmplitudeKernel kernel = EndAmplitudeKernel::for_chain(spec);
    const auto ref = end_amplitude_grid_reference(kernel, 0.02, 1500);
    const auto fast = end_amplitude_grid(kernel, 0.02, 1500, ExecPolicy::serial());
    ASSERT_EQ(ref.size(), fast.size());
    for (std::size_t i = 0; i < ref.size(); ++i) {
      EXPECT_LT(std::abs(ref[i].first - fast[i].first), 1e-12);
      EXPECT_LT(std::abs(ref[i].last - fast[i].last), 1e-12);
    }
  }
}

TEST(Kernels, WorkerCountDoesNotChangeBits) {
  const EndAmplitudeKernel kernel =
      EndAmplitudeKernel::for_chain({Model::IsingRWA, 57, 1.0, 10.0});
  const auto one = end_amplitude_grid(kernel, 0.02, 2049, ExecPolicy::serial());
  for (int workers : {2, 3, 8}) {
    const auto many = end_amplitude_grid(kernel, 0.02, 2049, ExecPolicy::parallel(workers));
    for (std::size_t i = 0; i < one.size(); ++i) {
      ASSERT_EQ(one[i].first, many[i].first);
      ASSERT_EQ(one[i].last, many[i].last);
    }
  }
}

TEST(Kernels, ArbitraryTimesMatchDirectEvaluation) {
  const EndAmplitudeKernel kernel =
      EndAmplitudeKernel::for_chain({Model::IsingRWA, 10, 1.0, 1.0});
  const std::vector<double> times{0.0, 3.3, 1.1, 90.0};
  const auto out = end_amplitudes_at(kernel, times, ExecPolicy::parallel(2));
  for (std::size_t i = 0; i < times.size(); ++i) EXPECT_EQ(out[i].last, kernel.at(times[i]).last);
}

TEST(Kernels, EmptyAndInvalidGrids) {
  const EndAmplitudeKernel kernel = EndAmplitudeKernel::for_chain({Model::IsingRWA, 3, 1.0, 1.0});
  EXPECT_TRUE(end_amplitude_grid(kernel, 0.1, 0, ExecPolicy::serial()).empty());
  EXPECT_THROW(end_amplitude_grid(kernel, -0.1, 4, ExecPolicy::serial()), std::invalid_argument);
  EXPECT_THROW(end_amplitude_grid_reference(kernel, 0.0, 4), std::invalid_argument);
}

TEST(Kernels, ParallelForRethrows) {
  EXPECT_THROW(parallel_for(16, ExecPolicy::parallel(4),
                            [](std::size_t i) {
                              if (i == 9) throw std::runtime_error("boom");
                            }),
               std::runtime_error);
}
