#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "spinfront/chain_model.hpp"
#include "spinfront/correlations.hpp"
#include "spinfront/parallel.hpp"

namespace spinfront {

// Time grid for one chain: {0, dt, 2 dt, ...} up to t_max(N). Unless a fixed
// t_max is given the horizon grows with the chain, t_max = t_max_per_site * N.
struct ScanGrid {
  double dt = 0.02;
  double t_max_per_site = 2.5;
  std::optional<double> t_max_fixed;

  double t_max(int n_sites) const;
};

struct StartupTarget {
  Measure measure = Measure::MI;
  double criterion = 1e-6;
};

// First grid time where |measure(t)| >= criterion, refined by bisection
// between the bracketing grid points to dt / 1000. nullopt if the criterion is
// never reached by t_max.
std::optional<double> startup_time(const ChainSpec& spec, Measure measure, double criterion,
                                   double t_max, double dt);

// Several (measure, criterion) pairs in one walk over the grid.
std::vector<std::optional<double>> startup_times(const ChainSpec& spec,
                                                 std::span<const StartupTarget> targets,
                                                 double t_max, double dt);

struct NRange {
  int first = 2;
  int last = 2;  // inclusive
};

struct StartupEntry {
  int n_sites = 0;
  double startup_time = 0.0;
};

struct SegmentFit {
  std::size_t begin = 0;  // entry indices [begin, end)
  std::size_t end = 0;
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
};

struct StartupScan {
  Measure measure = Measure::MI;
  double criterion = 0.0;
  std::vector<StartupEntry> entries;  // sorted by n_sites
  std::vector<int> not_arrived;       // chains that never reached the criterion
  std::optional<std::size_t> switch_index;
  std::vector<std::size_t> jumps;  // every i + 1 whose forward difference passed the threshold
  double jump_threshold = 0.0;     // 3 x median forward difference
  std::vector<SegmentFit> segment_fits;
};

// Start-up times for N in n_range (within [2, 1000]), parallel over N.
StartupScan scan_startup(const ChainSpec& spec_template, Measure measure, double criterion,
                         NRange n_range, const ScanGrid& grid,
                         const ExecPolicy& policy = ExecPolicy::serial());
std::vector<StartupScan> scan_startup(const ChainSpec& spec_template,
                                      std::span<const StartupTarget> targets, NRange n_range,
                                      const ScanGrid& grid,
                                      const ExecPolicy& policy = ExecPolicy::serial());

// Switch = largest forward difference among splits that leave at least two
// entries on each side, accepted if it exceeds 3x the median forward
// difference. Stores one least-squares line per segment (one segment when no
// switch is accepted). Requires >= 8 entries.
StartupScan detect_switch(StartupScan scan);

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
};
LineFit fit_line(std::span<const double> x, std::span<const double> y);

struct VelocityEstimate {
  double value = 0.0;  // 1 / slope, sites per unit time
  bool reliable = true;
  std::string warning;
};

// Generalized Lieb-Robinson velocity of one fitted segment. Flagged unreliable
// (still returned) when slope <= 0 or r^2 < 0.98.
VelocityEstimate velocity(const StartupScan& scan, std::size_t segment);

struct Peak {
  double time = 0.0;
  double value = 0.0;
};

// Raw maxima below this are treated as round-off, not signal.
inline constexpr double kPeakFloor = 1e-12;

// First `count` envelope peaks of |measure(t)|, in time order.
//  1. raw maxima: grid points above both neighbours and above kPeakFloor,
//     refined by a three-point parabola;
//  2. a raw maximum within 0.5/J of a larger one is merged into it;
//  3. the remaining maxima form the envelope; a peak is an envelope point not
//     below its predecessor or its successor (relative tolerance 1e-6, so
//     periodic signals still peak), and clearly higher than the previous
//     accepted peak.
// Returns fewer than `count` peaks if the horizon ends first.
// Requires count >= 1 and dt * J <= 0.05.
std::vector<Peak> extract_peaks(const ChainSpec& spec, Measure measure, double t_max, double dt,
                                int count);

// Steps 2 and 3 of extract_peaks on time-ordered raw maxima. A maximum with
// no successor is never confirmed.
std::vector<Peak> envelope_peaks(std::span<const Peak> raw_maxima, double merge_window, int count);

enum class PeakOrder { First = 1, Second = 2 };

struct PeakFit {
  PeakOrder order = PeakOrder::First;
  std::vector<std::pair<int, double>> samples;  // (N, peak value)
  std::vector<int> skipped;                     // N with no such peak
  double alpha = 0.0;                           // value = N^alpha e^beta
  double beta = 0.0;
  double r_squared = 0.0;
};

// Least squares of log(value) on log(N). Requires >= 5 samples, all > 0.
PeakFit fit_power_law(PeakOrder order, std::vector<std::pair<int, double>> samples);

// Peak values over the given chain lengths (each >= 3), parallel over N.
PeakFit fit_peak_scaling(const ChainSpec& spec_template, Measure measure, PeakOrder order,
                         std::span<const int> n_samples, const ScanGrid& grid,
                         const ExecPolicy& policy = ExecPolicy::serial());

}  // namespace spinfront
