#include "spinfront/full_chain.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "spinfront/errors.hpp"

namespace spinfront {

namespace {

void require_sites(int n_sites, int limit) {
  if (n_sites < 2 || n_sites > limit) {
    throw std::invalid_argument("exact diagonalization needs 2 <= n_sites <= " +
                                std::to_string(limit) + ", got " + std::to_string(n_sites));
  }
}

// Orthonormal eigenvectors whose eigenvalue lies within tol of values[level].
Eigen::MatrixXd cluster_basis(const Eigen::VectorXd& values, const Eigen::MatrixXd& vectors,
                              Eigen::Index level) {
  const double tol = 1e-9 * std::max(1.0, std::abs(values(level)));
  Eigen::Index lo = level, hi = level;
  while (lo > 0 && std::abs(values(lo - 1) - values(level)) <= tol) --lo;
  while (hi + 1 < values.size() && std::abs(values(hi + 1) - values(level)) <= tol) ++hi;
  return vectors.middleCols(lo, hi - lo + 1);
}

double subspace_overlap(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  const Eigen::MatrixXd cross = a.transpose() * b;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(cross);
  const auto& singular = svd.singularValues();
  return singular.size() == 0 ? 0.0 : singular(singular.size() - 1);
}

}  // namespace

std::uint32_t single_flip_index(int n_sites, int site) {
  if (site < 1 || site > n_sites) throw std::invalid_argument("site out of range");
  return std::uint32_t{1} << (n_sites - site);
}

std::uint32_t initial_index(int n_sites, InitialState initial) {
  return initial == InitialState::GroundAllPlus ? 0u : single_flip_index(n_sites, 1);
}

Eigen::MatrixXd full_hamiltonian(int n_sites, double coupling, double field,
                                 HamiltonianForm form) {
  require_sites(n_sites, kMaxFullSites);
  const std::uint32_t dim = std::uint32_t{1} << n_sites;
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(dim, dim);
  for (std::uint32_t s = 0; s < dim; ++s) {
    h(s, s) = -field * static_cast<double>(n_sites - 2 * std::popcount(s));
    for (int bond = 1; bond < n_sites; ++bond) {
      const int hi_bit = n_sites - bond;
      const std::uint32_t a = (s >> hi_bit) & 1u;
      const std::uint32_t b = (s >> (hi_bit - 1)) & 1u;
      if (form == HamiltonianForm::IsingRWA && a == b) continue;
      const std::uint32_t mask = (std::uint32_t{1} << hi_bit) | (std::uint32_t{1} << (hi_bit - 1));
      h(s ^ mask, s) += -coupling;
    }
  }
  return h;
}

ExactPropagator::ExactPropagator(int n_sites, double coupling, double field,
                                 HamiltonianForm form)
    : n_sites_(n_sites) {
  require_sites(n_sites, kMaxFullSites);
  const Eigen::MatrixXd h = full_hamiltonian(n_sites, coupling, field, form);
  const std::uint32_t dim = std::uint32_t{1} << n_sites;
  for (std::uint32_t s = 0; s < dim; ++s) sectors_[std::popcount(s) % 2].states.push_back(s);

  for (auto& sector : sectors_) {
    const auto size = static_cast<Eigen::Index>(sector.states.size());
    Eigen::MatrixXd block(size, size);
    for (Eigen::Index i = 0; i < size; ++i) {
      for (Eigen::Index j = 0; j < size; ++j) block(i, j) = h(sector.states[i], sector.states[j]);
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(block);
    if (solver.info() != Eigen::Success) throw NumericalError("dense eigensolver failed");
    sector.values = solver.eigenvalues();
    sector.vectors = solver.eigenvectors();
  }
}

std::vector<Complex> ExactPropagator::evolve_basis_state(std::uint32_t index, double t) const {
  if (index >= dimension()) throw std::invalid_argument("basis index out of range");
  const Sector& sector = sectors_[std::popcount(index) % 2];
  const auto pos = static_cast<Eigen::Index>(
      std::lower_bound(sector.states.begin(), sector.states.end(), index) - sector.states.begin());

  const Eigen::Index size = sector.values.size();
  Eigen::VectorXcd coefficients(size);
  for (Eigen::Index k = 0; k < size; ++k) {
    const double a = -sector.values(k) * t;
    coefficients(k) = Complex(std::cos(a), std::sin(a)) * sector.vectors(pos, k);
  }
  const Eigen::VectorXcd local = sector.vectors.cast<Complex>() * coefficients;

  std::vector<Complex> out(dimension(), Complex(0.0, 0.0));
  for (Eigen::Index i = 0; i < size; ++i) out[sector.states[i]] = local(i);
  return out;
}

void ExactPropagator::spectrum(Eigen::VectorXd& values, Eigen::MatrixXd& vectors) const {
  const auto dim = static_cast<Eigen::Index>(dimension());
  std::vector<std::pair<double, std::pair<int, Eigen::Index>>> order;
  order.reserve(dim);
  for (int p = 0; p < 2; ++p) {
    for (Eigen::Index k = 0; k < sectors_[p].values.size(); ++k) {
      order.push_back({sectors_[p].values(k), {p, k}});
    }
  }
  std::stable_sort(order.begin(), order.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });
  values.resize(dim);
  vectors = Eigen::MatrixXd::Zero(dim, dim);
  for (Eigen::Index col = 0; col < dim; ++col) {
    const auto [p, k] = order[col].second;
    values(col) = order[col].first;
    const Sector& sector = sectors_[p];
    for (std::size_t i = 0; i < sector.states.size(); ++i) {
      vectors(sector.states[i], col) = sector.vectors(static_cast<Eigen::Index>(i), k);
    }
  }
}

std::vector<Complex> evolve_full(const ChainSpec& spec, double t, InitialState initial) {
  validate(spec);
  if (spec.model != Model::IsingFull) {
    throw std::invalid_argument("evolve_full requires the ising-full model");
  }
  if (!std::isfinite(t)) throw std::invalid_argument("time must be finite");
  const ExactPropagator propagator(spec.n_sites, spec.coupling, spec.field,
                                   HamiltonianForm::Ising);
  auto state = propagator.evolve_basis_state(initial_index(spec.n_sites, initial), t);
  double norm2 = 0.0;
  for (const auto& a : state) norm2 += std::norm(a);
  if (std::abs(std::sqrt(norm2) - 1.0) > 1e-10) {
    throw NumericalError("full evolution lost normalization");
  }
  return state;
}

double single_flip_weight(std::span<const Complex> state, int n_sites) {
  if (state.size() != (std::size_t{1} << n_sites)) {
    throw std::invalid_argument("state dimension does not match n_sites");
  }
  double weight = 0.0;
  for (int site = 1; site <= n_sites; ++site) weight += std::norm(state[single_flip_index(n_sites, site)]);
  return weight;
}

std::vector<RwaComparisonRow> rwa_spectral_comparison(int n_sites, double coupling,
                                                      std::span<const double> field_ratios) {
  require_sites(n_sites, 12);
  if (!std::isfinite(coupling) || coupling <= 0.0) throw std::invalid_argument("coupling must be > 0");
  std::vector<RwaComparisonRow> rows;
  rows.reserve(field_ratios.size());
  for (const double ratio : field_ratios) {
    if (!std::isfinite(ratio) || ratio < 0.0) throw std::invalid_argument("B/J ratios must be >= 0");
    const double field = ratio * coupling;
    Eigen::VectorXd e_full, e_rwa;
    Eigen::MatrixXd v_full, v_rwa;
    ExactPropagator(n_sites, coupling, field, HamiltonianForm::Ising).spectrum(e_full, v_full);
    ExactPropagator(n_sites, coupling, field, HamiltonianForm::IsingRWA).spectrum(e_rwa, v_rwa);

    RwaComparisonRow row;
    row.field_ratio = ratio;
    row.energies_full.assign(e_full.data(), e_full.data() + e_full.size());
    row.energies_rwa.assign(e_rwa.data(), e_rwa.data() + e_rwa.size());
    for (Eigen::Index level = 0; level < 3 && level < e_full.size(); ++level) {
      row.overlaps[level] =
          subspace_overlap(cluster_basis(e_full, v_full, level), cluster_basis(e_rwa, v_rwa, level));
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace spinfront
