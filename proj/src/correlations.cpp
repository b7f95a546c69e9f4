#include "spinfront/correlations.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "spinfront/kernels.hpp"

namespace spinfront {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kLn2 = std::numbers::ln2;
constexpr double kStateTolerance = 1e-12;
constexpr double kDiscordClamp = 1e-9;

double xlogx(double x) { return x > 0.0 ? x * std::log(x) : 0.0; }

// Entropy (bits) of a 2x2 Hermitian block [[a, b], [conj(b), d]] after
// normalizing by its trace.
double block_entropy(double a, double d, double off_norm2) {
  const double trace = a + d;
  if (trace <= 0.0) return 0.0;
  const double det = std::max(0.0, a * d - off_norm2) / (trace * trace);
  const double disc = std::sqrt(std::max(0.0, 1.0 - 4.0 * det));
  return binary_entropy(2.0 * det / (1.0 + disc));
}

}  // namespace

double EndPairState::vacancy() const { return std::max(0.0, 1.0 - p1 - pN); }

Eigen::Matrix4cd EndPairState::density_matrix() const {
  Eigen::Matrix4cd rho = Eigen::Matrix4cd::Zero();
  rho(1, 1) = p1;
  rho(2, 2) = pN;
  rho(3, 3) = vacancy();
  rho(1, 2) = coherence;
  rho(2, 1) = std::conj(coherence);
  return rho;
}

EndPairState end_pair_state(Complex a1, Complex aN) {
  const double p1 = std::norm(a1);
  const double pN = std::norm(aN);
  if (!std::isfinite(p1) || !std::isfinite(pN) || p1 + pN > 1.0 + kStateTolerance) {
    throw std::invalid_argument("end amplitudes violate |a1|^2 + |aN|^2 <= 1");
  }
  return {p1, pN, a1 * std::conj(aN)};
}

EndPairState make_end_pair_state(double p1, double pN, Complex coherence) {
  const bool in_range = p1 >= 0.0 && p1 <= 1.0 && pN >= 0.0 && pN <= 1.0;
  if (!in_range || p1 + pN > 1.0 + kStateTolerance) {
    throw std::invalid_argument("populations must lie in [0,1] with p1 + pN <= 1");
  }
  if (!std::isfinite(coherence.real()) || !std::isfinite(coherence.imag()) ||
      std::norm(coherence) > p1 * pN + kStateTolerance) {
    throw std::invalid_argument("|coherence|^2 must not exceed p1 * pN");
  }
  return {p1, pN, coherence};
}

std::string_view to_string(Measure measure) {
  switch (measure) {
    case Measure::MI:
      return "mi";
    case Measure::QD:
      return "qd";
    case Measure::CC:
      return "cc";
    case Measure::EoF:
      return "eof";
    case Measure::CFzz:
      return "cfzz";
    case Measure::CFxx:
      return "cfxx";
  }
  return "unknown";
}

Measure parse_measure(std::string_view name) {
  for (Measure m : {Measure::MI, Measure::QD, Measure::CC, Measure::EoF, Measure::CFzz,
                    Measure::CFxx}) {
    if (name == to_string(m)) return m;
  }
  throw std::invalid_argument("unknown measure '" + std::string(name) +
                              "' (expected mi, qd, cc, eof, cfzz or cfxx)");
}

double binary_entropy(double x) {
  if (!(x > 0.0) || !(x < 1.0)) return 0.0;
  return -(x * std::log(x) + (1.0 - x) * std::log1p(-x)) / kLn2;
}

double cf_zz(const EndPairState& state) { return -4.0 * state.p1 * state.pN; }

double cf_xx(const EndPairState& state) { return 2.0 * state.coherence.real(); }

// Written as the relative entropy between rho and rho_1 (x) rho_N, grouped so
// that every term is O(pN) when pN -> 0; the direct S + S - S difference
// cancels catastrophically for the small values seen before the front arrives.
double mutual_information(const EndPairState& state) {
  const double p1 = state.p1;
  const double pN = state.pN;
  const double c2 = std::norm(state.coherence);
  const double q = state.vacancy();

  const double diff = std::abs(p1 - pN);
  const double r = std::sqrt(diff * diff + 4.0 * c2);
  const double lambda_plus = 0.5 * (p1 + pN + r);
  // lambda_plus - p1 and lambda_plus - pN without cancellation.
  const double small_gap = r + diff > 0.0 ? 2.0 * c2 / (r + diff) : 0.0;
  const double large_gap = 0.5 * (diff + r);
  const double d1 = p1 >= pN ? small_gap : large_gap;
  const double dN = p1 >= pN ? large_gap : small_gap;
  const double lambda_minus =
      lambda_plus > 0.0 ? std::max(0.0, (p1 * pN - c2) / lambda_plus) : 0.0;

  double nats = 0.0;
  if (p1 > 0.0) nats += p1 * std::log1p(d1 / p1);
  if (pN > 0.0) nats += pN * std::log1p(dN / pN);
  if (lambda_minus > 0.0) nats += xlogx(lambda_minus) - lambda_minus * std::log(lambda_plus);
  if (p1 > 0.0 && pN > 0.0) {
    // 1 - p1 = pN + q exactly; that form keeps log(1 - p1) finite as p1 -> 1.
    const double rest1 = p1 < 0.5 ? 1.0 - p1 : pN + q;
    const double restN = pN < 0.5 ? 1.0 - pN : p1 + q;
    const double log_rest1 = p1 < 0.5 ? std::log1p(-p1) : std::log(rest1);
    const double log_restN = pN < 0.5 ? std::log1p(-pN) : std::log(restN);
    nats -= p1 * log_restN + pN * log_rest1;
    // rest1 * restN = p1 pN + q, so this is q log(q / (rest1 restN)) and stays
    // finite when q is a few ulps.
    if (q > 0.0) nats += q * (std::log(q) - log_rest1 - log_restN);
  }
  return nats / kLn2;
}

// Post-measurement blocks of spin 1 for the projector (I + n.sigma)/2 on spin N:
//   M+ = [[p1 P11, c P01], [conj(c) P10, pN P00 + q P11]],  M- with P -> I - P.
double holevo_chi(const EndPairState& state, double theta, double phi) {
  const double q = state.vacancy();
  const double cos_t = std::cos(theta);
  const double up = 0.5 * (1.0 + cos_t);    // P00
  const double down = 0.5 * (1.0 - cos_t);  // P11
  const double sin_t = std::sin(theta);
  const double off2 = std::norm(state.coherence) * 0.25 * sin_t * sin_t;
  (void)phi;  // |c P01|^2 does not depend on the azimuth for this family

  const double plus_a = state.p1 * down;
  const double plus_d = state.pN * up + q * down;
  const double minus_a = state.p1 * up;
  const double minus_d = state.pN * down + q * up;
  const double p_plus = plus_a + plus_d;
  const double p_minus = minus_a + minus_d;

  return binary_entropy(state.p1) - p_plus * block_entropy(plus_a, plus_d, off2) -
         p_minus * block_entropy(minus_a, minus_d, off2);
}

double theta_grid_point(int i) { return 0.5 * kPi * static_cast<double>(i) / (kThetaGrid - 1); }

double phi_grid_point(int j) { return 2.0 * kPi * static_cast<double>(j) / kPhiGrid; }

// holevo_chi is azimuth independent on this family, so every phi column of the
// 64 x 128 grid repeats the phi = 0 column and phi moves never improve during
// refinement; only phi = 0 is evaluated. The result is the same maximizer the
// full grid search would return.
MeasurementOptimum optimize_measurement(const EndPairState& state) {
  MeasurementOptimum best{-std::numeric_limits<double>::infinity(), 0.0, 0.0};
  for (int i = 0; i < kThetaGrid; ++i) {
    const double theta = theta_grid_point(i);
    const double chi = holevo_chi(state, theta, 0.0);
    if (chi > best.value) best = {chi, theta, 0.0};
  }

  double step = theta_grid_point(1);
  for (int round = 0; round < kRefineRounds; ++round) {
    MeasurementOptimum candidate = best;
    for (double theta : {std::min(0.5 * kPi, best.theta + step), std::max(0.0, best.theta - step)}) {
      const double chi = holevo_chi(state, theta, 0.0);
      if (chi > candidate.value) candidate = {chi, theta, 0.0};
    }
    best = candidate;
    step *= 0.5;
  }
  return best;
}

double classical_correlation(const EndPairState& state) {
  return optimize_measurement(state).value;
}

double quantum_discord(double mi, double cc) {
  const double qd = mi - cc;
  return (qd < 0.0 && qd >= -kDiscordClamp) ? 0.0 : qd;
}

double quantum_discord(const EndPairState& state) {
  return quantum_discord(mutual_information(state), classical_correlation(state));
}

double concurrence(const EndPairState& state) {
  return std::min(1.0, 2.0 * std::abs(state.coherence));
}

double entanglement_of_formation(const EndPairState& state) {
  const double c = concurrence(state);
  const double root = std::sqrt(std::max(0.0, 1.0 - c * c));
  return binary_entropy(c * c / (2.0 * (1.0 + root)));
}

double evaluate(Measure measure, const EndPairState& state) {
  switch (measure) {
    case Measure::MI:
      return mutual_information(state);
    case Measure::QD:
      return quantum_discord(state);
    case Measure::CC:
      return classical_correlation(state);
    case Measure::EoF:
      return entanglement_of_formation(state);
    case Measure::CFzz:
      return cf_zz(state);
    case Measure::CFxx:
      return cf_xx(state);
  }
  throw std::invalid_argument("unknown measure");
}

MeasureSet MeasureSet::all() {
  MeasureSet set;
  for (Measure m : {Measure::MI, Measure::QD, Measure::CC, Measure::EoF, Measure::CFzz,
                    Measure::CFxx}) {
    set.insert(m);
  }
  return set;
}

MeasureSet MeasureSet::parse(std::string_view list) {
  MeasureSet set;
  std::size_t start = 0;
  while (start <= list.size()) {
    const std::size_t comma = list.find(',', start);
    const std::size_t end = comma == std::string_view::npos ? list.size() : comma;
    const std::string_view item = list.substr(start, end - start);
    if (item == "all") {
      set = all();
    } else if (!item.empty()) {
      set.insert(parse_measure(item));
    }
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  if (set.empty()) throw std::invalid_argument("empty measure list");
  return set;
}

MeasureSet& MeasureSet::insert(Measure m) {
  bits_ |= 1u << static_cast<unsigned>(m);
  return *this;
}

bool MeasureSet::contains(Measure m) const { return (bits_ >> static_cast<unsigned>(m)) & 1u; }

std::string MeasureSet::to_string() const {
  std::string out;
  for (Measure m : {Measure::MI, Measure::QD, Measure::CC, Measure::EoF, Measure::CFzz,
                    Measure::CFxx}) {
    if (!contains(m)) continue;
    if (!out.empty()) out += ',';
    out += spinfront::to_string(m);
  }
  return out;
}

CorrelationSample measure_all(double time, const EndPairState& state,
                              const MeasureSet& selection) {
  constexpr double nan = std::numeric_limits<double>::quiet_NaN();
  CorrelationSample s{time, nan, nan, nan, nan, nan, nan};
  const bool want_qd = selection.contains(Measure::QD);
  if (selection.contains(Measure::CFzz)) s.cf_zz = cf_zz(state);
  if (selection.contains(Measure::CFxx)) s.cf_xx = cf_xx(state);
  if (selection.contains(Measure::MI) || want_qd) s.mi = mutual_information(state);
  if (selection.contains(Measure::CC) || want_qd) s.cc = classical_correlation(state);
  if (want_qd) s.qd = quantum_discord(s.mi, s.cc);
  if (selection.contains(Measure::EoF)) s.eof = entanglement_of_formation(state);
  return s;
}

std::vector<CorrelationSample> sample_all(const ChainSpec& spec, std::span<const double> times,
                                          const ExecPolicy& policy, const MeasureSet& selection) {
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (!(times[i] >= 0.0) || !std::isfinite(times[i])) {
      throw std::invalid_argument("sample times must be finite and >= 0");
    }
    if (i > 0 && !(times[i] > times[i - 1])) {
      throw std::invalid_argument("sample times must be strictly increasing");
    }
  }
  const EndAmplitudeKernel kernel = EndAmplitudeKernel::for_chain(spec);
  const auto ends = end_amplitudes_at(kernel, times, policy);
  std::vector<CorrelationSample> out(times.size());
  parallel_for(times.size(), policy, [&](std::size_t i) {
    out[i] = measure_all(times[i], end_pair_state(ends[i].first, ends[i].last), selection);
  });
  return out;
}

}  // namespace spinfront
