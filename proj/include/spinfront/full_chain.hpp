#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "spinfront/chain_model.hpp"

namespace spinfront {

// Dense 2^N treatment of the chain, used as an oracle for the single-excitation
// model and to check where the rotating-wave approximation holds.
//
// Basis: site-major tensor product with site 1 as the most significant bit.
// Each site is written in the sigma^x eigenbasis, bit 0 = |+>, bit 1 = |->.
// In this basis -B sigma^x is diagonal and sigma^z_i sigma^z_{i+1} flips the
// pair of bits (i, i+1).

enum class HamiltonianForm {
  Ising,     // -J sum sz sz - B sum sx
  IsingRWA,  // only the flip-preserving (|-+> <-> |+->) part of sz sz is kept
};

enum class InitialState { GroundAllPlus, FirstSpinFlipped };

// Basis index of the state with exactly site m (1-based) flipped to |->.
std::uint32_t single_flip_index(int n_sites, int site);
std::uint32_t initial_index(int n_sites, InitialState initial);

// Dense real-symmetric Hamiltonian (dimension 2^N).
Eigen::MatrixXd full_hamiltonian(int n_sites, double coupling, double field, HamiltonianForm form);

// Eigendecomposition of the full Hamiltonian, split by the conserved parity of
// the number of flipped spins (both forms commute with prod sigma^x). Reused
// for many evolution times.
class ExactPropagator {
 public:
  ExactPropagator(int n_sites, double coupling, double field, HamiltonianForm form);

  int n_sites() const { return n_sites_; }
  std::size_t dimension() const { return std::size_t{1} << n_sites_; }

  // e^{-iHt} applied to the basis state `index`; the full 2^N vector.
  std::vector<Complex> evolve_basis_state(std::uint32_t index, double t) const;

  // All 2^N eigenvalues in ascending order, with eigenvectors as columns of
  // the returned matrix (dense, 2^N x 2^N).
  void spectrum(Eigen::VectorXd& values, Eigen::MatrixXd& vectors) const;

 private:
  struct Sector {
    std::vector<std::uint32_t> states;  // global basis indices in this sector
    Eigen::VectorXd values;
    Eigen::MatrixXd vectors;
  };

  int n_sites_;
  Sector sectors_[2];
};

// Exact evolution under the full (non-RWA) Hamiltonian. Requires
// spec.model == IsingFull and n_sites <= kMaxFullSites; norm checked to 1e-10.
std::vector<Complex> evolve_full(const ChainSpec& spec, double t, InitialState initial);

// Weight of a full state vector inside the single-flip subspace {|m>}.
double single_flip_weight(std::span<const Complex> state, int n_sites);

struct RwaComparisonRow {
  double field_ratio = 0.0;  // B / J
  std::vector<double> energies_full;
  std::vector<double> energies_rwa;
  // |<psi_full|psi_rwa>| for ground, first and second excited levels matched
  // by energy order; degenerate clusters use the smallest principal-angle
  // cosine between the two eigenspaces.
  double overlaps[3] = {0.0, 0.0, 0.0};
};

// Requires 2 <= n_sites <= 12.
std::vector<RwaComparisonRow> rwa_spectral_comparison(int n_sites, double coupling,
                                                      std::span<const double> field_ratios);

}  // namespace spinfront
