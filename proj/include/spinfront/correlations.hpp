#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "spinfront/chain_model.hpp"
#include "spinfront/parallel.hpp"

namespace spinfront {

// Reduced state of the two end spins. In the basis |q_1 q_N> (index
// 2 q_1 + q_N, q = 0 meaning "spin flipped") the density matrix is
//
//   [ 0   0        0        0          ]
//   [ 0   p1       c        0          ]
//   [ 0   conj(c)  pN       0          ]
//   [ 0   0        0        1 - p1 - pN]
//
// with c = coherence = A_1 conj(A_N).
struct EndPairState {
  double p1 = 0.0;
  double pN = 0.0;
  Complex coherence{0.0, 0.0};

  double vacancy() const;  // 1 - p1 - pN, clamped at 0
  Eigen::Matrix4cd density_matrix() const;
};

// From the end amplitudes; throws std::invalid_argument if
// |a1|^2 + |aN|^2 > 1 + 1e-12.
EndPairState end_pair_state(Complex a1, Complex aN);

// Any member of the family (mixed states allowed): requires p1, pN in [0, 1],
// p1 + pN <= 1 + 1e-12 and |c|^2 <= p1 pN + 1e-12.
EndPairState make_end_pair_state(double p1, double pN, Complex coherence);

enum class Measure { MI, QD, CC, EoF, CFzz, CFxx };

std::string_view to_string(Measure measure);
Measure parse_measure(std::string_view name);  // mi, qd, cc, eof, cfzz, cfxx

// Binary entropy in bits, h(0) = h(1) = 0.
double binary_entropy(double x);

double cf_zz(const EndPairState& state);  // -4 p1 pN
double cf_xx(const EndPairState& state);  // 2 Re(c)
double mutual_information(const EndPairState& state);

// Holevo quantity S(rho_1) - sum_k p_k S(rho_1^k) for the projective
// measurement of spin N along the Bloch direction (theta, phi).
double holevo_chi(const EndPairState& state, double theta, double phi);

struct MeasurementOptimum {
  double value = 0.0;
  double theta = 0.0;
  double phi = 0.0;
};

// Maximizes holevo_chi over theta in [0, pi/2], phi in [0, 2 pi): grid search
// (theta endpoints included) followed by 30 rounds of coordinate search whose
// step halves every round. The azimuth never matters here, so phi stays 0.
MeasurementOptimum optimize_measurement(const EndPairState& state);

inline constexpr int kThetaGrid = 64;
inline constexpr int kPhiGrid = 128;
inline constexpr int kRefineRounds = 30;
double theta_grid_point(int i);  // (pi/2) * i / (kThetaGrid - 1)
double phi_grid_point(int j);    // 2 pi * j / kPhiGrid

double classical_correlation(const EndPairState& state);

// mi - cc, with results in [-1e-9, 0) reported as 0.
double quantum_discord(const EndPairState& state);
double quantum_discord(double mi, double cc);

// Concurrence C = 2|c| of the family, EoF = h((1 + sqrt(1 - C^2)) / 2).
double concurrence(const EndPairState& state);
double entanglement_of_formation(const EndPairState& state);

// Signed value of one measure.
double evaluate(Measure measure, const EndPairState& state);

// Bit set over Measure.
class MeasureSet {
 public:
  MeasureSet() = default;
  static MeasureSet all();
  static MeasureSet parse(std::string_view list);  // comma separated

  MeasureSet& insert(Measure m);
  bool contains(Measure m) const;
  bool empty() const { return bits_ == 0; }
  std::string to_string() const;

 private:
  std::uint32_t bits_ = 0;
};

struct CorrelationSample {
  double time = 0.0;
  double cf_zz = 0.0;
  double cf_xx = 0.0;
  double mi = 0.0;
  double cc = 0.0;
  double qd = 0.0;
  double eof = 0.0;
};

// Measures not in `selection` are left as NaN; qd forces cc to be computed.
CorrelationSample measure_all(double time, const EndPairState& state,
                              const MeasureSet& selection = MeasureSet::all());

// Requires strictly increasing times >= 0. Output order matches input.
std::vector<CorrelationSample> sample_all(const ChainSpec& spec, std::span<const double> times,
                                          const ExecPolicy& policy = ExecPolicy::serial(),
                                          const MeasureSet& selection = MeasureSet::all());

}  // namespace spinfront
