#pragma once

// Brute-force references used only by tests. Nothing here shares code with the
// library: Hamiltonians are built from Kronecker products of Pauli matrices in
// the sigma^z basis, entropies come from generic Hermitian eigensolves, and
// the measurement optimum from an exhaustive grid.

#include <complex>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

using cd = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;

Mat pauli_x();
Mat pauli_y();
Mat pauli_z();
Mat identity(int dim);

// Operator `op` acting on site (1-based) of an n-site chain.
Mat site_operator(const Mat& op, int site, int n_sites);

enum class Chain { Ising, IsingRWA, Heisenberg };

// Ising:      -J sum sz sz - B sum sx
// IsingRWA:   -B sum sx - (J/2) sum (sz sz + sy sy)   (excitation-conserving part)
// Heisenberg:  J sum (sx sx + sy sy + sz sz)
Mat kron_hamiltonian(Chain chain, int n_sites, double coupling, double field);

// Product state in the sigma^z basis: |+> everywhere except |-> on `flipped`
// (0 = none).
Vec x_product_state(int n_sites, int flipped);
// |0...0> (all up along z) with site `flipped` down (0 = none).
Vec z_product_state(int n_sites, int flipped);

class Evolver {
 public:
  explicit Evolver(const Mat& hamiltonian);
  Vec evolve(const Vec& psi, double t) const;
  const Eigen::VectorXd& energies() const { return values_; }

 private:
  Eigen::VectorXd values_;
  // Rayleigh quotients in long double; phases E t at t ~ 50 need more than the
  // eps |H| accuracy of the double eigensolve.
  std::vector<long double> refined_;
  Mat vectors_;
};

// exp(-i H t) psi through Eigen's matrix exponential (small systems only).
Vec evolve_expm(const Mat& hamiltonian, const Vec& psi, double t);

// ---- two-qubit quantities -------------------------------------------------

// rho on qubits A (first factor) and B.
Mat partial_trace_a(const Mat& rho);  // returns rho_B
Mat partial_trace_b(const Mat& rho);  // returns rho_A
double von_neumann_bits(const Mat& rho);
double mutual_information(const Mat& rho);

// Holevo information about A from the projective measurement of B along
// (theta, phi).
double holevo_on_b(const Mat& rho, double theta, double phi);

// max over an exhaustive theta x phi grid on [0, pi] x [0, 2 pi).
double classical_correlation_grid(const Mat& rho, int theta_points, int phi_points);

// Wootters: C = max(0, l1 - l2 - l3 - l4), l_i = sqrt(eig(rho rho~)), in
// 50-digit arithmetic.
double wootters_concurrence(const Mat& rho);
double eof_from_concurrence(double c);

// Mutual information of the end-pair family computed in long double from the
// three entropies; accurate enough to check the double-precision library form
// for populations down to ~1e-8.
long double end_pair_mi_long(long double p1, long double pn, long double c_abs);

// X-type state with the library's layout: index 2 q1 + qN.
Mat end_pair_density(double p1, double pn, cd c);

}  // namespace oracle
