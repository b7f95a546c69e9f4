#pragma once

#include <complex>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace spinfront {

using Complex = std::complex<double>;

enum class Model { IsingRWA, IsingFull, HeisenbergUniform };

std::string_view to_string(Model model);
Model parse_model(std::string_view name);  // "ising-rwa", "ising-full", "heisenberg"

// One physical chain. Units: hbar = 1, time in 1/J.
struct ChainSpec {
  Model model = Model::IsingRWA;
  int n_sites = 2;
  double coupling = 1.0;  // J
  double field = 0.0;     // B (ignored by HeisenbergUniform)
};

// Largest chain the 2^N exact-diagonalization oracle accepts.
inline constexpr int kMaxFullSites = 14;

// Throws std::invalid_argument for N < 2, J <= 0, B < 0, non-finite values,
// or IsingFull beyond kMaxFullSites.
void validate(const ChainSpec& spec);

// Single-excitation eigenproblem. Energies are stored relative to a global
// offset so that large uniform shifts (the -(N-2)B Zeeman term) never enter
// the interfering phases; eigenvalue(k) = energy_offset + relative_energies[k].
// Columns of `modes` are eigenvectors over the site basis |n>, ordered by
// ascending energy. Immutable after construction.
struct ModeTable {
  int n_sites = 0;
  double energy_offset = 0.0;
  std::vector<double> relative_energies;
  Eigen::MatrixXd modes;

  double eigenvalue(std::size_t k) const { return energy_offset + relative_energies[k]; }
  std::vector<double> eigenvalues() const;
};

// IsingRWA: closed-form sine modes sqrt(2/(N+1)) sin(pi k n/(N+1)) with
// E_k = -(N-2)B - 2J cos(k pi/(N+1)), k = 1..N (ascending). The spectrum is the
// set {-(N-2)B + 2J cos(k pi/(N+1))}; the pairing of sine mode k with
// -2J cos(...) is the one that diagonalizes the RWA hopping block -J T.
// HeisenbergUniform: H = J sum_i sigma_i . sigma_{i+1}, B = 0, one spin flipped
// against the fully polarized background; tridiagonal block with hopping 2J and
// diagonal -2J * (number of bonds at n) relative to the background energy
// J(N-1), diagonalized numerically.
// Throws std::invalid_argument for IsingFull or invalid specs, NumericalError
// if the eigen-residual exceeds 1e-12 (relative to the block norm).
ModeTable build_mode_table(const ChainSpec& spec);

struct AmplitudeVector {
  double time = 0.0;
  std::vector<Complex> amplitudes;  // A_n(t), n = 1..N stored at [n-1]
};

// A_n(t) = sum_k exp(-i E_k t) M(1,k) M(n,k). Requires t >= 0.
AmplitudeVector amplitudes(const ModeTable& table, double t);

// Same sum for any real t (t < 0 is the analytic continuation backwards).
AmplitudeVector propagate(const ModeTable& table, double t);

struct EndAmplitudes {
  Complex first;  // A_1
  Complex last;   // A_N
};

// Holds only what is needed for A_1 and A_N: the relative energies and the
// weights M(1,k)^2 and M(1,k) M(N,k). O(N) per evaluation.
class EndAmplitudeKernel {
 public:
  explicit EndAmplitudeKernel(const ModeTable& table);
  // O(N) construction for IsingRWA; HeisenbergUniform goes through the table.
  static EndAmplitudeKernel for_chain(const ChainSpec& spec);

  int n_sites() const { return static_cast<int>(energies_.size()); }
  double energy_offset() const { return offset_; }

  // Direct evaluation with one cos/sin pair per mode.
  EndAmplitudes at(double t) const;

  const std::vector<double>& relative_energies() const { return energies_; }
  const std::vector<double>& first_weights() const { return w_first_; }
  const std::vector<double>& last_weights() const { return w_last_; }

 private:
  EndAmplitudeKernel() = default;
  std::vector<double> energies_;
  std::vector<double> w_first_;
  std::vector<double> w_last_;
  double offset_ = 0.0;
};

// Walks the uniform grid t_i = i * dt with one complex multiply per mode per
// step. Phases are recomputed exactly every kResyncInterval steps, so the value
// at step i depends only on (kernel, dt, i), not on how the walk started.
class EndAmplitudeStepper {
 public:
  static constexpr std::size_t kResyncInterval = 256;

  EndAmplitudeStepper(const EndAmplitudeKernel& kernel, double dt, std::size_t start_index = 0);

  std::size_t index() const { return index_; }
  double time() const { return static_cast<double>(index_) * dt_; }
  EndAmplitudes current() const { return current_; }
  void advance();

 private:
  void resync();
  void step_phases();
  void accumulate();

  const EndAmplitudeKernel* kernel_;
  double dt_;
  std::size_t index_;
  std::vector<double> phase_re_, phase_im_;
  std::vector<double> step_re_, step_im_;
  EndAmplitudes current_;
};

// (A_1(t), A_N(t)) without materializing the full vector. Requires t >= 0.
EndAmplitudes end_amplitudes(const ChainSpec& spec, double t);

}  // namespace spinfront
