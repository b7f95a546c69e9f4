#include "spinfront/chain_model.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "spinfront/errors.hpp"

namespace spinfront {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kResidualTolerance = 1e-12;

// sin(pi * m / (n + 1)) with m reduced modulo 2(n+1) so the argument stays
// small for long chains.
double sine_node(long long m, long long n) {
  const long long period = 2 * (n + 1);
  m %= period;
  if (m < 0) m += period;
  return std::sin(kPi * static_cast<double>(m) / static_cast<double>(n + 1));
}

Complex phase(double energy, double t) {
  const double a = -energy * t;
  return {std::cos(a), std::sin(a)};
}

ModeTable ising_rwa_table(const ChainSpec& spec) {
  const int n = spec.n_sites;
  ModeTable table;
  table.n_sites = n;
  table.energy_offset = -static_cast<double>(n - 2) * spec.field;
  table.relative_energies.resize(n);
  table.modes.resize(n, n);
  const double norm = std::sqrt(2.0 / static_cast<double>(n + 1));
  for (int k = 1; k <= n; ++k) {
    table.relative_energies[k - 1] =
        -2.0 * spec.coupling * std::cos(kPi * static_cast<double>(k) / static_cast<double>(n + 1));
    for (int site = 1; site <= n; ++site) {
      table.modes(site - 1, k - 1) = norm * sine_node(static_cast<long long>(k) * site, n);
    }
  }
  return table;
}

ModeTable heisenberg_table(const ChainSpec& spec) {
  const int n = spec.n_sites;
  const double j = spec.coupling;
  Eigen::VectorXd diagonal(n);
  Eigen::VectorXd hopping(n - 1);
  for (int site = 0; site < n; ++site) {
    const int bonds = (site == 0 || site == n - 1) ? 1 : 2;
    diagonal(site) = -2.0 * j * bonds;
  }
  hopping.setConstant(2.0 * j);

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
  solver.computeFromTridiagonal(diagonal, hopping, Eigen::ComputeEigenvectors);
  if (solver.info() != Eigen::Success) {
    throw NumericalError("tridiagonal eigensolver did not converge");
  }

  ModeTable table;
  table.n_sites = n;
  table.energy_offset = j * static_cast<double>(n - 1);
  table.modes = solver.eigenvectors();
  const Eigen::VectorXd& values = solver.eigenvalues();
  table.relative_energies.assign(values.data(), values.data() + n);

  const double scale = std::max(1.0, diagonal.cwiseAbs().maxCoeff() + 4.0 * j);
  for (int k = 0; k < n; ++k) {
    double residual2 = 0.0;
    for (int site = 0; site < n; ++site) {
      double hv = diagonal(site) * table.modes(site, k);
      if (site > 0) hv += hopping(site - 1) * table.modes(site - 1, k);
      if (site + 1 < n) hv += hopping(site) * table.modes(site + 1, k);
      const double r = hv - values(k) * table.modes(site, k);
      residual2 += r * r;
    }
    if (std::sqrt(residual2) > kResidualTolerance * scale) {
      std::ostringstream msg;
      msg << "eigenpair " << k << " residual " << std::sqrt(residual2) << " exceeds tolerance";
      throw NumericalError(msg.str());
    }
  }
  return table;
}

void require_subspace_model(const ChainSpec& spec) {
  validate(spec);
  if (spec.model == Model::IsingFull) {
    throw std::invalid_argument("ising-full has no single-excitation mode table; use evolve_full");
  }
}

}  // namespace

std::string_view to_string(Model model) {
  switch (model) {
    case Model::IsingRWA:
      return "ising-rwa";
    case Model::IsingFull:
      return "ising-full";
    case Model::HeisenbergUniform:
      return "heisenberg";
  }
  return "unknown";
}

Model parse_model(std::string_view name) {
  if (name == "ising-rwa") return Model::IsingRWA;
  if (name == "ising-full") return Model::IsingFull;
  if (name == "heisenberg") return Model::HeisenbergUniform;
  throw std::invalid_argument("unknown model '" + std::string(name) +
                              "' (expected ising-rwa, ising-full or heisenberg)");
}

void validate(const ChainSpec& spec) {
  if (spec.n_sites < 2) {
    throw std::invalid_argument("n_sites must be >= 2, got " + std::to_string(spec.n_sites));
  }
  if (!std::isfinite(spec.coupling) || spec.coupling <= 0.0) {
    throw std::invalid_argument("coupling must be finite and > 0");
  }
  if (!std::isfinite(spec.field) || spec.field < 0.0) {
    throw std::invalid_argument("field must be finite and >= 0");
  }
  if (spec.model == Model::IsingFull && spec.n_sites > kMaxFullSites) {
    throw std::invalid_argument("ising-full is limited to n_sites <= " +
                                std::to_string(kMaxFullSites));
  }
}

std::vector<double> ModeTable::eigenvalues() const {
  std::vector<double> out(relative_energies.size());
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = eigenvalue(k);
  return out;
}

ModeTable build_mode_table(const ChainSpec& spec) {
  require_subspace_model(spec);
  return spec.model == Model::IsingRWA ? ising_rwa_table(spec) : heisenberg_table(spec);
}

AmplitudeVector propagate(const ModeTable& table, double t) {
  const int n = table.n_sites;
  std::vector<Complex> weighted(n);
  for (int k = 0; k < n; ++k) {
    weighted[k] = phase(table.relative_energies[k], t) * table.modes(0, k);
  }
  const Complex global = phase(table.energy_offset, t);
  AmplitudeVector out;
  out.time = t;
  out.amplitudes.resize(n);
  for (int site = 0; site < n; ++site) {
    Complex sum = 0.0;
    for (int k = 0; k < n; ++k) sum += weighted[k] * table.modes(site, k);
    out.amplitudes[site] = global * sum;
  }
  return out;
}

AmplitudeVector amplitudes(const ModeTable& table, double t) {
  if (!(t >= 0.0) || !std::isfinite(t)) throw std::invalid_argument("time must be finite and >= 0");
  return propagate(table, t);
}

EndAmplitudeKernel::EndAmplitudeKernel(const ModeTable& table)
    : energies_(table.relative_energies), offset_(table.energy_offset) {
  const int n = table.n_sites;
  w_first_.resize(n);
  w_last_.resize(n);
  for (int k = 0; k < n; ++k) {
    w_first_[k] = table.modes(0, k) * table.modes(0, k);
    w_last_[k] = table.modes(0, k) * table.modes(n - 1, k);
  }
}

EndAmplitudeKernel EndAmplitudeKernel::for_chain(const ChainSpec& spec) {
  require_subspace_model(spec);
  if (spec.model != Model::IsingRWA) return EndAmplitudeKernel(build_mode_table(spec));

  // Restriction of the sine sum to n = 1 and n = N; the identity
  // sin(pi k N/(N+1)) = (-1)^(k+1) sin(pi k/(N+1)) keeps the weights exactly
  // (anti)symmetric.
  const int n = spec.n_sites;
  EndAmplitudeKernel kernel;
  kernel.offset_ = -static_cast<double>(n - 2) * spec.field;
  kernel.energies_.resize(n);
  kernel.w_first_.resize(n);
  kernel.w_last_.resize(n);
  const double norm = 2.0 / static_cast<double>(n + 1);
  for (int k = 1; k <= n; ++k) {
    const double s = sine_node(k, n);
    kernel.energies_[k - 1] =
        -2.0 * spec.coupling * std::cos(kPi * static_cast<double>(k) / static_cast<double>(n + 1));
    kernel.w_first_[k - 1] = norm * s * s;
    kernel.w_last_[k - 1] = (k % 2 == 1 ? 1.0 : -1.0) * norm * s * s;
  }
  return kernel;
}

EndAmplitudes EndAmplitudeKernel::at(double t) const {
  double first_re = 0.0, first_im = 0.0, last_re = 0.0, last_im = 0.0;
  for (std::size_t k = 0; k < energies_.size(); ++k) {
    const double a = -energies_[k] * t;
    const double c = std::cos(a);
    const double s = std::sin(a);
    first_re += w_first_[k] * c;
    first_im += w_first_[k] * s;
    last_re += w_last_[k] * c;
    last_im += w_last_[k] * s;
  }
  const Complex global = phase(offset_, t);
  return {global * Complex(first_re, first_im), global * Complex(last_re, last_im)};
}

EndAmplitudeStepper::EndAmplitudeStepper(const EndAmplitudeKernel& kernel, double dt,
                                         std::size_t start_index)
    : kernel_(&kernel), dt_(dt), index_(start_index - start_index % kResyncInterval) {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw std::invalid_argument("dt must be finite and > 0");
  const std::size_t n = kernel.relative_energies().size();
  phase_re_.resize(n);
  phase_im_.resize(n);
  step_re_.resize(n);
  step_im_.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double a = -kernel.relative_energies()[k] * dt;
    step_re_[k] = std::cos(a);
    step_im_[k] = std::sin(a);
  }
  resync();
  while (index_ < start_index) step_phases();
  accumulate();
}

void EndAmplitudeStepper::resync() {
  const double t = time();
  const auto& energies = kernel_->relative_energies();
  for (std::size_t k = 0; k < energies.size(); ++k) {
    const double a = -energies[k] * t;
    phase_re_[k] = std::cos(a);
    phase_im_[k] = std::sin(a);
  }
}

void EndAmplitudeStepper::advance() {
  step_phases();
  accumulate();
}

void EndAmplitudeStepper::step_phases() {
  ++index_;
  if (index_ % kResyncInterval == 0) {
    resync();
  } else {
    const std::size_t n = phase_re_.size();
    double* __restrict re = phase_re_.data();
    double* __restrict im = phase_im_.data();
    const double* __restrict sre = step_re_.data();
    const double* __restrict sim = step_im_.data();
    for (std::size_t k = 0; k < n; ++k) {
      const double r = re[k] * sre[k] - im[k] * sim[k];
      const double i = re[k] * sim[k] + im[k] * sre[k];
      re[k] = r;
      im[k] = i;
    }
  }
}

void EndAmplitudeStepper::accumulate() {
  const auto& w1 = kernel_->first_weights();
  const auto& wn = kernel_->last_weights();
  double first_re = 0.0, first_im = 0.0, last_re = 0.0, last_im = 0.0;
  for (std::size_t k = 0; k < w1.size(); ++k) {
    first_re += w1[k] * phase_re_[k];
    first_im += w1[k] * phase_im_[k];
    last_re += wn[k] * phase_re_[k];
    last_im += wn[k] * phase_im_[k];
  }
  const Complex global = phase(kernel_->energy_offset(), time());
  current_ = {global * Complex(first_re, first_im), global * Complex(last_re, last_im)};
}

EndAmplitudes end_amplitudes(const ChainSpec& spec, double t) {
  if (!(t >= 0.0) || !std::isfinite(t)) throw std::invalid_argument("time must be finite and >= 0");
  return EndAmplitudeKernel::for_chain(spec).at(t);
}

}  // namespace spinfront
