#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "spinfront/chain_model.hpp"

using namespace spinfront;

namespace {

constexpr double kPi = std::numbers::pi;

ChainSpec rwa(int n, double b = 10.0, double j = 1.0) { return {Model::IsingRWA, n, j, b}; }
ChainSpec heis(int n, double j = 1.0) { return {Model::HeisenbergUniform, n, j, 0.0}; }

// Amplitude on the n-th single-flip state of an oracle state vector.
Complex oracle_amplitude(const oracle::Vec& psi, const oracle::Vec& basis_state) {
  return basis_state.dot(psi);  // conj(basis) . psi
}

}  // namespace

TEST(ChainModel, RwaSpectrumIsTheCosineSet) {
  for (int n : {2, 3, 8, 31}) {
    const ChainSpec spec = rwa(n, 3.5, 0.7);
    const ModeTable table = build_mode_table(spec);
    std::vector<double> expected;
    for (int k = 1; k <= n; ++k) {
      expected.push_back(-(n - 2) * spec.field + 2.0 * spec.coupling * std::cos(k * kPi / (n + 1)));
    }
    std::sort(expected.begin(), expected.end());
    auto got = table.eigenvalues();
    ASSERT_EQ(got.size(), expected.size());
    for (std::size_t k = 0; k < got.size(); ++k) EXPECT_NEAR(got[k], expected[k], 1e-12);
    EXPECT_TRUE(std::is_sorted(got.begin(), got.end()));
  }
}

TEST(ChainModel, ModesAreOrthonormalEigenvectors) {
  for (const ChainSpec& spec : {rwa(9), heis(9), rwa(40, 0.0), heis(33, 2.0)}) {
    const ModeTable table = build_mode_table(spec);
    const int n = spec.n_sites;
    const Eigen::MatrixXd gram = table.modes.transpose() * table.modes;
    EXPECT_LT((gram - Eigen::MatrixXd::Identity(n, n)).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(ChainModel, TwoSiteClosedForm) {
  const ChainSpec spec = rwa(2, 10.0, 1.0);
  const ModeTable table = build_mode_table(spec);
  for (double t : {0.0, 0.3, kPi / 4, 2.0, 17.5}) {
    const auto a = amplitudes(table, t).amplitudes;
    EXPECT_NEAR(std::abs(a[0] - Complex(std::cos(t), 0.0)), 0.0, 1e-14) << t;
    EXPECT_NEAR(std::abs(a[1] - Complex(0.0, std::sin(t))), 0.0, 1e-14) << t;
  }
  const auto quarter = amplitudes(table, kPi / 4).amplitudes;
  EXPECT_NEAR(std::norm(quarter[0]), 0.5, 1e-14);
  EXPECT_NEAR(std::norm(quarter[1]), 0.5, 1e-14);
}

TEST(ChainModel, StartsOnFirstSiteAndConservesNorm) {
  for (const ChainSpec& spec : {rwa(7), heis(7), rwa(50), heis(50)}) {
    const ModeTable table = build_mode_table(spec);
    const auto a0 = amplitudes(table, 0.0).amplitudes;
    for (int n = 0; n < spec.n_sites; ++n) {
      EXPECT_NEAR(std::abs(a0[n] - Complex(n == 0 ? 1.0 : 0.0, 0.0)), 0.0, 1e-12);
    }
    for (double t : {0.1, 3.0, 40.0, 333.3}) {
      double norm = 0.0;
      for (const auto& x : amplitudes(table, t).amplitudes) norm += std::norm(x);
      EXPECT_NEAR(norm, 1.0, 1e-12);
    }
  }
}

TEST(ChainModel, MatchesKronEvolutionOfTheRwaHamiltonian) {
  for (int n = 2; n <= 6; ++n) {
    const ChainSpec spec = rwa(n, 4.0, 1.3);
    const oracle::Evolver evolver(
        oracle::kron_hamiltonian(oracle::Chain::IsingRWA, n, spec.coupling, spec.field));
    const oracle::Vec start = oracle::x_product_state(n, 1);
    const ModeTable table = build_mode_table(spec);
    for (double t : {0.0, 0.77, 5.0, 23.1}) {
      const oracle::Vec psi = evolver.evolve(start, t);
      const auto a = amplitudes(table, t).amplitudes;
      for (int site = 1; site <= n; ++site) {
        const Complex want = oracle_amplitude(psi, oracle::x_product_state(n, site));
        EXPECT_LT(std::abs(a[site - 1] - want), 1e-10) << "N=" << n << " t=" << t;
      }
    }
  }
}

TEST(ChainModel, MatchesMatrixExponentialForThreeSites) {
  const ChainSpec spec = rwa(3, 2.0, 1.0);
  const oracle::Mat h = oracle::kron_hamiltonian(oracle::Chain::IsingRWA, 3, 1.0, 2.0);
  const ModeTable table = build_mode_table(spec);
  for (double t : {0.5, 1.7}) {
    const oracle::Vec psi = oracle::evolve_expm(h, oracle::x_product_state(3, 1), t);
    const auto a = amplitudes(table, t).amplitudes;
    for (int site = 1; site <= 3; ++site) {
      EXPECT_LT(std::abs(a[site - 1] - oracle_amplitude(psi, oracle::x_product_state(3, site))),
                1e-10);
    }
  }
}

TEST(ChainModel, HeisenbergMatchesKronEvolution) {
  for (int n = 2; n <= 6; ++n) {
    const ChainSpec spec = heis(n, 0.8);
    const oracle::Evolver evolver(
        oracle::kron_hamiltonian(oracle::Chain::Heisenberg, n, spec.coupling, 0.0));
    const oracle::Vec start = oracle::z_product_state(n, 1);
    const ModeTable table = build_mode_table(spec);
    for (double t : {0.0, 0.4, 3.3, 12.0}) {
      const oracle::Vec psi = evolver.evolve(start, t);
      const auto a = amplitudes(table, t).amplitudes;
      for (int site = 1; site <= n; ++site) {
        const Complex want = oracle_amplitude(psi, oracle::z_product_state(n, site));
        EXPECT_LT(std::abs(a[site - 1] - want), 1e-10) << "N=" << n << " t=" << t;
      }
    }
  }
}

TEST(ChainModel, FieldOnlyChangesTheGlobalPhase) {
  const ModeTable weak = build_mode_table(rwa(12, 10.0));
  const ModeTable strong = build_mode_table(rwa(12, 100.0));
  for (double t : {0.25, 9.0, 71.0}) {
    const auto a = amplitudes(weak, t).amplitudes;
    const auto b = amplitudes(strong, t).amplitudes;
    const Complex expected_ratio = std::polar(1.0, 90.0 * 10.0 * t);  // exp(i (N-2) dB t)
    for (std::size_t n = 0; n < a.size(); ++n) {
      EXPECT_NEAR(std::abs(a[n]), std::abs(b[n]), 1e-13);
      if (std::abs(a[n]) > 1e-3) EXPECT_NEAR(std::abs(b[n] / a[n] - expected_ratio), 0.0, 1e-9);
    }
  }
}

TEST(ChainModel, BackwardPropagationIsTheConjugate) {
  for (const ChainSpec& spec : {rwa(6, 0.0), heis(6)}) {
    const ModeTable table = build_mode_table(spec);
    const auto fwd = propagate(table, 2.5).amplitudes;
    const auto back = propagate(table, -2.5).amplitudes;
    for (std::size_t n = 0; n < fwd.size(); ++n) {
      EXPECT_NEAR(std::abs(back[n] - std::conj(fwd[n])), 0.0, 1e-13);
    }
  }
}

TEST(ChainModel, EndKernelMatchesFullVector) {
  for (const ChainSpec& spec : {rwa(2), rwa(17, 5.0, 0.6), heis(17), rwa(120)}) {
    const ModeTable table = build_mode_table(spec);
    const EndAmplitudeKernel from_table(table);
    const EndAmplitudeKernel fast = EndAmplitudeKernel::for_chain(spec);
    for (double t : {0.0, 1.1, 48.0}) {
      const auto full = amplitudes(table, t).amplitudes;
      for (const auto& k : {from_table, fast}) {
        const EndAmplitudes e = k.at(t);
        EXPECT_LT(std::abs(e.first - full.front()), 1e-12);
        EXPECT_LT(std::abs(e.last - full.back()), 1e-12);
      }
      const EndAmplitudes direct = end_amplitudes(spec, t);
      EXPECT_LT(std::abs(direct.last - full.back()), 1e-12);
    }
  }
}

TEST(ChainModel, StepperTracksDirectEvaluation) {
  const EndAmplitudeKernel kernel = EndAmplitudeKernel::for_chain(rwa(64));
  EndAmplitudeStepper stepper(kernel, 0.02);
  double worst = 0.0;
  for (std::size_t i = 0; i < 3000; ++i) {
    if (i > 0) stepper.advance();
    ASSERT_EQ(stepper.index(), i);
    const EndAmplitudes d = kernel.at(static_cast<double>(i) * 0.02);
    worst = std::max({worst, std::abs(stepper.current().first - d.first),
                      std::abs(stepper.current().last - d.last)});
  }
  EXPECT_LT(worst, 1e-12);
}

TEST(ChainModel, StepperValueDependsOnlyOnIndex) {
  const EndAmplitudeKernel kernel = EndAmplitudeKernel::for_chain(heis(40));
  EndAmplitudeStepper walked(kernel, 0.05);
  for (int i = 0; i < 700; ++i) walked.advance();
  const EndAmplitudeStepper jumped(kernel, 0.05, 700);
  EXPECT_EQ(walked.current().first, jumped.current().first);
  EXPECT_EQ(walked.current().last, jumped.current().last);
}

TEST(ChainModel, RejectsInvalidInput) {
  EXPECT_THROW(validate(rwa(1)), std::invalid_argument);
  EXPECT_THROW(validate(rwa(5, 1.0, 0.0)), std::invalid_argument);
  EXPECT_THROW(validate(rwa(5, -1.0)), std::invalid_argument);
  EXPECT_THROW(validate(rwa(5, std::numeric_limits<double>::quiet_NaN())), std::invalid_argument);
  EXPECT_THROW(validate({Model::IsingFull, kMaxFullSites + 1, 1.0, 1.0}), std::invalid_argument);
  EXPECT_THROW(build_mode_table({Model::IsingFull, 4, 1.0, 1.0}), std::invalid_argument);
  EXPECT_THROW(amplitudes(build_mode_table(rwa(3)), -1.0), std::invalid_argument);
  EXPECT_THROW(end_amplitudes(rwa(3), std::numeric_limits<double>::infinity()),
               std::invalid_argument);
  EXPECT_THROW(EndAmplitudeStepper(EndAmplitudeKernel::for_chain(rwa(3)), 0.0),
               std::invalid_argument);
}

TEST(ChainModel, ModelNamesRoundTrip) {
  for (Model m : {Model::IsingRWA, Model::IsingFull, Model::HeisenbergUniform}) {
    EXPECT_EQ(parse_model(to_string(m)), m);
  }
  EXPECT_THROW(parse_model("xy"), std::invalid_argument);
}
