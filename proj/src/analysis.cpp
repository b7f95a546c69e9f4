#include "spinfront/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "spinfront/errors.hpp"

namespace spinfront {

namespace {

constexpr int kMaxScanSites = 1000;
// Covers the parabolic refinement error, so equal maxima compare equal.
constexpr double kEnvelopeTolerance = 1e-6;
constexpr double kMergeWindowTimesJ = 0.5;

void require_grid(double t_max, double dt) {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw std::invalid_argument("dt must be finite and > 0");
  if (!(t_max >= 0.0) || !std::isfinite(t_max)) {
    throw std::invalid_argument("t_max must be finite and >= 0");
  }
}

std::size_t last_grid_index(double t_max, double dt) {
  return static_cast<std::size_t>(std::floor(t_max / dt + 1e-9));
}

// True if |measure| >= criterion. MI bounds QD and CC from above, and the
// two axis-aligned measurements bound CC from below, so the optimizer only runs
// when those bounds leave the answer open.
class CrossingTest {
 public:
  explicit CrossingTest(const EndPairState& state) : state_(state) {}

  bool crosses(Measure measure, double criterion) {
    const bool screen = criterion > 1e-9;
    switch (measure) {
      case Measure::CC:
        if (screen && mi() < criterion) return false;
        if (std::max(holevo_chi(state_, 0.0, 0.0),
                     holevo_chi(state_, 0.5 * std::numbers::pi, 0.0)) >= criterion) {
          return true;
        }
        return cc() >= criterion;
      case Measure::QD:
        if (screen && mi() < criterion) return false;
        return std::abs(quantum_discord(mi(), cc())) >= criterion;
      case Measure::MI:
        return mi() >= criterion;
      default:
        return std::abs(evaluate(measure, state_)) >= criterion;
    }
  }

 private:
  double mi() {
    if (!mi_) mi_ = mutual_information(state_);
    return *mi_;
  }
  double cc() {
    if (!cc_) cc_ = classical_correlation(state_);
    return *cc_;
  }

  EndPairState state_;
  std::optional<double> mi_;
  std::optional<double> cc_;
};

double bisect_crossing(const EndAmplitudeKernel& kernel, Measure measure, double criterion,
                       double lo, double hi, double tolerance) {
  while (hi - lo > tolerance) {
    const double mid = 0.5 * (lo + hi);
    const EndAmplitudes ends = kernel.at(mid);
    CrossingTest test(end_pair_state(ends.first, ends.last));
    (test.crosses(measure, criterion) ? hi : lo) = mid;
  }
  return hi;
}

std::vector<std::optional<double>> startup_times_for(const EndAmplitudeKernel& kernel,
                                                     std::span<const StartupTarget> targets,
                                                     double t_max, double dt) {
  std::vector<std::optional<double>> found(targets.size());
  std::size_t pending = targets.size();
  const std::size_t last = last_grid_index(t_max, dt);
  EndAmplitudeStepper stepper(kernel, dt);
  for (std::size_t i = 0; i <= last && pending > 0; ++i) {
    if (i > 0) stepper.advance();
    const EndAmplitudes ends = stepper.current();
    CrossingTest test(end_pair_state(ends.first, ends.last));
    for (std::size_t k = 0; k < targets.size(); ++k) {
      if (found[k] || !test.crosses(targets[k].measure, targets[k].criterion)) continue;
      const double t = static_cast<double>(i) * dt;
      found[k] = i == 0 ? 0.0
                        : bisect_crossing(kernel, targets[k].measure, targets[k].criterion,
                                          t - dt, t, dt / 1000.0);
      --pending;
    }
  }
  return found;
}

void require_targets(std::span<const StartupTarget> targets) {
  for (const auto& target : targets) {
    if (!(target.criterion > 0.0) || !std::isfinite(target.criterion)) {
      throw std::invalid_argument("start-up criterion must be finite and > 0");
    }
  }
}

double median(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  return n % 2 == 1 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

SegmentFit fit_segment(const std::vector<StartupEntry>& entries, std::size_t begin,
                       std::size_t end) {
  std::vector<double> x, y;
  for (std::size_t i = begin; i < end; ++i) {
    x.push_back(entries[i].n_sites);
    y.push_back(entries[i].startup_time);
  }
  const LineFit line = fit_line(x, y);
  return {begin, end, line.slope, line.intercept, line.r_squared};
}

// Vertex of the parabola through three equally spaced samples around index i.
Peak refine_peak(double t_mid, double dt, double y0, double y1, double y2) {
  const double curvature = y0 - 2.0 * y1 + y2;
  if (curvature >= 0.0) return {t_mid, y1};
  const double offset = 0.5 * (y0 - y2) / curvature;
  return {t_mid + offset * dt, y1 - 0.25 * (y0 - y2) * offset};
}

}  // namespace

double ScanGrid::t_max(int n_sites) const {
  return t_max_fixed ? *t_max_fixed : t_max_per_site * static_cast<double>(n_sites);
}

std::optional<double> startup_time(const ChainSpec& spec, Measure measure, double criterion,
                                   double t_max, double dt) {
  const StartupTarget target{measure, criterion};
  return startup_times(spec, std::span(&target, 1), t_max, dt).front();
}

std::vector<std::optional<double>> startup_times(const ChainSpec& spec,
                                                 std::span<const StartupTarget> targets,
                                                 double t_max, double dt) {
  validate(spec);
  require_grid(t_max, dt);
  require_targets(targets);
  return startup_times_for(EndAmplitudeKernel::for_chain(spec), targets, t_max, dt);
}

StartupScan scan_startup(const ChainSpec& spec_template, Measure measure, double criterion,
                         NRange n_range, const ScanGrid& grid, const ExecPolicy& policy) {
  const StartupTarget target{measure, criterion};
  return scan_startup(spec_template, std::span(&target, 1), n_range, grid, policy).front();
}

std::vector<StartupScan> scan_startup(const ChainSpec& spec_template,
                                      std::span<const StartupTarget> targets, NRange n_range,
                                      const ScanGrid& grid, const ExecPolicy& policy) {
  if (n_range.first < 2 || n_range.last > kMaxScanSites || n_range.first > n_range.last) {
    throw std::invalid_argument("chain range must satisfy 2 <= first <= last <= 1000");
  }
  require_targets(targets);
  const auto count = static_cast<std::size_t>(n_range.last - n_range.first + 1);
  std::vector<ChainSpec> specs(count, spec_template);
  for (std::size_t i = 0; i < count; ++i) {
    specs[i].n_sites = n_range.first + static_cast<int>(i);
    validate(specs[i]);
    require_grid(grid.t_max(specs[i].n_sites), grid.dt);
  }

  std::vector<std::vector<std::optional<double>>> per_chain(count);
  parallel_for(count, policy, [&](std::size_t i) {
    per_chain[i] = startup_times_for(EndAmplitudeKernel::for_chain(specs[i]), targets,
                                     grid.t_max(specs[i].n_sites), grid.dt);
  });

  std::vector<StartupScan> scans(targets.size());
  for (std::size_t k = 0; k < targets.size(); ++k) {
    scans[k].measure = targets[k].measure;
    scans[k].criterion = targets[k].criterion;
    for (std::size_t i = 0; i < count; ++i) {
      if (per_chain[i][k]) {
        scans[k].entries.push_back({specs[i].n_sites, *per_chain[i][k]});
      } else {
        scans[k].not_arrived.push_back(specs[i].n_sites);
      }
    }
  }
  return scans;
}

StartupScan detect_switch(StartupScan scan) {
  const auto& entries = scan.entries;
  const std::size_t n = entries.size();
  if (n < 8) throw std::invalid_argument("switch detection needs at least 8 start-up times");

  std::vector<double> forward(n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    forward[i] = entries[i + 1].startup_time - entries[i].startup_time;
  }
  scan.jump_threshold = 3.0 * median(forward);
  // A non-positive median makes "3x the median" meaningless; only increases
  // count as jumps.
  auto is_jump = [&](double f) { return f > scan.jump_threshold && f > 0.0; };
  scan.jumps.clear();
  for (std::size_t i = 0; i < forward.size(); ++i) {
    if (is_jump(forward[i])) scan.jumps.push_back(i + 1);
  }

  // Splitting after entry i leaves [0, i] and [i + 1, n).
  std::size_t best = 1;
  for (std::size_t i = 2; i + 2 < n; ++i) {
    if (forward[i] > forward[best]) best = i;
  }
  scan.switch_index.reset();
  scan.segment_fits.clear();
  if (is_jump(forward[best])) {
    scan.switch_index = best + 1;
    scan.segment_fits.push_back(fit_segment(entries, 0, best + 1));
    scan.segment_fits.push_back(fit_segment(entries, best + 1, n));
  } else {
    scan.segment_fits.push_back(fit_segment(entries, 0, n));
  }
  return scan;
}

LineFit fit_line(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw std::invalid_argument("line fit needs at least two (x, y) pairs");
  }
  const auto n = static_cast<double>(x.size());
  double mean_x = 0.0, mean_y = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mean_x += x[i];
    mean_y += y[i];
  }
  mean_x /= n;
  mean_y /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mean_x) * (x[i] - mean_x);
    sxy += (x[i] - mean_x) * (y[i] - mean_y);
    syy += (y[i] - mean_y) * (y[i] - mean_y);
  }
  if (sxx == 0.0) throw std::invalid_argument("line fit needs distinct x values");
  LineFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = mean_y - fit.slope * mean_x;
  double residual = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double e = y[i] - (fit.intercept + fit.slope * x[i]);
    residual += e * e;
  }
  fit.r_squared = syy > 0.0 ? 1.0 - residual / syy : (residual == 0.0 ? 1.0 : 0.0);
  return fit;
}

VelocityEstimate velocity(const StartupScan& scan, std::size_t segment) {
  if (segment >= scan.segment_fits.size()) throw std::out_of_range("no such segment");
  const SegmentFit& fit = scan.segment_fits[segment];
  VelocityEstimate v;
  if (!(fit.slope > 0.0)) {
    v.value = fit.slope == 0.0 ? std::numeric_limits<double>::infinity() : 1.0 / fit.slope;
    v.reliable = false;
    v.warning = "non-positive slope";
  } else {
    v.value = 1.0 / fit.slope;
    if (fit.r_squared < 0.98) {
      v.reliable = false;
      v.warning = "poor linear fit (r^2 < 0.98)";
    }
  }
  return v;
}

std::vector<Peak> envelope_peaks(std::span<const Peak> raw, double merge_window, int count) {
  // Merge: drop a maximum if a larger one (or an equal earlier one) is within
  // the window.
  std::vector<Peak> kept;
  for (std::size_t i = 0; i < raw.size(); ++i) {
    bool dominated = false;
    for (std::size_t j = i; j-- > 0 && raw[i].time - raw[j].time < merge_window;) {
      if (raw[j].value >= raw[i].value) dominated = true;
    }
    for (std::size_t j = i + 1; j < raw.size() && raw[j].time - raw[i].time < merge_window; ++j) {
      if (raw[j].value > raw[i].value) dominated = true;
    }
    if (!dominated) kept.push_back(raw[i]);
  }

  std::vector<Peak> peaks;
  double record = 0.0;
  for (std::size_t j = 0; j + 1 < kept.size() && static_cast<int>(peaks.size()) < count; ++j) {
    const double v = kept[j].value;
    const bool rises = j == 0 || v >= kept[j - 1].value * (1.0 - kEnvelopeTolerance);
    const bool falls = v >= kept[j + 1].value * (1.0 - kEnvelopeTolerance);
    if (rises && falls && v > record * (1.0 + kEnvelopeTolerance)) {
      peaks.push_back(kept[j]);
      record = v;
    }
  }
  return peaks;
}

std::vector<Peak> extract_peaks(const ChainSpec& spec, Measure measure, double t_max, double dt,
                                int count) {
  validate(spec);
  require_grid(t_max, dt);
  if (count < 1) throw std::invalid_argument("peak count must be >= 1");
  if (dt * spec.coupling > 0.05) {
    throw std::invalid_argument("dt must be <= 0.05/J to resolve the oscillations");
  }
  const double window = kMergeWindowTimesJ / spec.coupling;
  const double guard = 2.0 * window;
  const EndAmplitudeKernel kernel = EndAmplitudeKernel::for_chain(spec);
  const std::size_t last = last_grid_index(t_max, dt);

  auto value_at = [&](const EndAmplitudes& ends) {
    return std::abs(evaluate(measure, end_pair_state(ends.first, ends.last)));
  };

  std::vector<Peak> raw;
  EndAmplitudeStepper stepper(kernel, dt);
  double before = value_at(stepper.current());
  double here = before;
  for (std::size_t i = 1; i <= last; ++i) {
    stepper.advance();
    const double after = value_at(stepper.current());
    if (i >= 2 && here > before && here > after && here >= kPeakFloor) {
      raw.push_back(refine_peak(static_cast<double>(i - 1) * dt, dt, before, here, after));
      // Maxima older than the guard can no longer change status, so peaks
      // confirmed among them are final.
      const double settled = static_cast<double>(i) * dt - guard;
      const auto end = std::find_if(raw.begin(), raw.end(),
                                    [&](const Peak& p) { return p.time > settled; });
      auto peaks = envelope_peaks(std::span(raw.begin(), end), window, count);
      if (static_cast<int>(peaks.size()) >= count) return peaks;
    }
    before = here;
    here = after;
  }
  return envelope_peaks(raw, window, count);
}

PeakFit fit_power_law(PeakOrder order, std::vector<std::pair<int, double>> samples) {
  if (samples.size() < 5) throw NumericalError("peak scaling fit needs at least 5 points");
  std::sort(samples.begin(), samples.end());
  std::vector<double> x, y;
  for (const auto& [n, value] : samples) {
    if (!(value > 0.0) || n < 1) throw std::invalid_argument("peak values must be > 0");
    x.push_back(std::log(static_cast<double>(n)));
    y.push_back(std::log(value));
  }
  const LineFit line = fit_line(x, y);
  PeakFit fit;
  fit.order = order;
  fit.samples = std::move(samples);
  fit.alpha = line.slope;
  fit.beta = line.intercept;
  fit.r_squared = line.r_squared;
  return fit;
}

PeakFit fit_peak_scaling(const ChainSpec& spec_template, Measure measure, PeakOrder order,
                         std::span<const int> n_samples, const ScanGrid& grid,
                         const ExecPolicy& policy) {
  const int wanted = static_cast<int>(order);
  for (const int n : n_samples) {
    if (n < 3) throw std::invalid_argument("peak scaling needs chains with N >= 3");
  }
  std::vector<std::optional<double>> values(n_samples.size());
  parallel_for(n_samples.size(), policy, [&](std::size_t i) {
    ChainSpec spec = spec_template;
    spec.n_sites = n_samples[i];
    const auto peaks = extract_peaks(spec, measure, grid.t_max(spec.n_sites), grid.dt, wanted);
    if (static_cast<int>(peaks.size()) >= wanted) values[i] = peaks[wanted - 1].value;
  });

  std::vector<std::pair<int, double>> samples;
  std::vector<int> skipped;
  for (std::size_t i = 0; i < n_samples.size(); ++i) {
    if (values[i]) {
      samples.emplace_back(n_samples[i], *values[i]);
    } else {
      skipped.push_back(n_samples[i]);
    }
  }
  PeakFit fit = fit_power_law(order, std::move(samples));
  fit.skipped = std::move(skipped);
  return fit;
}

}  // namespace spinfront
