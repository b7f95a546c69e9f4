#include "spinfront/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <stdexcept>

#include <json.hpp>

#include "spinfront/errors.hpp"
#include "spinfront/full_chain.hpp"
#include "spinfront/kernels.hpp"

namespace spinfront {

using nlohmann::json;

namespace {

constexpr Measure kAllMeasures[] = {Measure::MI, Measure::QD,   Measure::CC,
                                    Measure::EoF, Measure::CFzz, Measure::CFxx};

double parse_real(std::string_view text) {
  double value = 0.0;
  const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || end != text.data() + text.size() || text.empty()) {
    throw ConfigError("not a number: '" + std::string(text) + "'");
  }
  return value;
}

int parse_int(std::string_view text) {
  int value = 0;
  const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || end != text.data() + text.size() || text.empty()) {
    throw ConfigError("not an integer: '" + std::string(text) + "'");
  }
  return value;
}

std::vector<std::string_view> split(std::string_view text, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = text.find(sep, start);
    parts.push_back(text.substr(start, pos == std::string_view::npos ? std::string_view::npos
                                                                      : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return parts;
}

std::vector<Measure> selected(const MeasureSet& set) {
  std::vector<Measure> out;
  for (Measure m : kAllMeasures) {
    if (set.contains(m)) out.push_back(m);
  }
  return out;
}

std::string format_short(double value) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", value);
  return buf;
}

json json_real(double value) { return std::isfinite(value) ? json(value) : json(nullptr); }

json config_json(const RunConfig& config) {
  json j;
  j["command"] = std::string(to_string(config.command));
  j["model"] = std::string(to_string(config.chain.model));
  j["n"] = config.lengths.to_string();
  j["coupling"] = config.chain.coupling;
  j["field"] = config.chain.field;
  j["measures"] = config.measures.to_string();
  j["delta"] = config.criteria;
  j["dt"] = config.dt;
  j["t_max"] = config.t_max ? json(*config.t_max) : json(nullptr);
  j["peaks"] = config.peaks;
  j["ratios"] = config.ratios;
  j["output"] = config.output;
  j["format"] = std::string(to_string(config.format));
  j["workers"] = config.workers;
  j["from_summary"] = config.from_summary;
  return j;
}

json summary_header(const RunConfig& config) {
  json j;
  j["tool"] = std::string(kToolName);
  j["version"] = std::string(kToolVersion);
  j["command"] = std::string(to_string(config.command));
  j["config"] = config_json(config);
  return j;
}

double t_max_for(const RunConfig& config, int n_sites) {
  return config.t_max ? *config.t_max
                      : ScanGrid{}.t_max_per_site * n_sites / config.chain.coupling;
}

ScanGrid scan_grid(const RunConfig& config) {
  ScanGrid grid;
  grid.dt = config.dt;
  grid.t_max_per_site = ScanGrid{}.t_max_per_site / config.chain.coupling;
  grid.t_max_fixed = config.t_max;
  return grid;
}

ExecPolicy policy_of(const RunConfig& config) { return ExecPolicy::parallel(config.workers); }

// Destination for one output file; "-" means the caller's stdout.
class Sink {
 public:
  Sink(const std::string& path, std::ostream& stdout_sink, RunResult& result) {
    if (path == "-" || path.empty()) {
      out_ = &stdout_sink;
      return;
    }
    file_.open(path, std::ios::binary | std::ios::trunc);
    if (!file_) throw ConfigError("cannot write output file '" + path + "'");
    out_ = &file_;
    result.files.push_back(path);
  }
  std::ostream& stream() { return *out_; }
  void finish(const std::string& path) {
    out_->flush();
    if (!*out_) throw ConfigError("failed writing '" + path + "'");
  }

 private:
  std::ofstream file_;
  std::ostream* out_ = nullptr;
};

void emit_table(const std::string& path, const Table& table, const RunConfig& config,
                OutputFormat format, std::ostream& stdout_sink, RunResult& result) {
  Sink sink(path, stdout_sink, result);
  write_table(sink.stream(), table, config, format);
  sink.finish(path);
}

void emit_json(const std::string& path, const json& doc, std::ostream& stdout_sink,
               RunResult& result) {
  Sink sink(path, stdout_sink, result);
  sink.stream() << doc.dump(2) << '\n';
  sink.finish(path);
}

std::string table_extension(OutputFormat format) {
  return format == OutputFormat::Csv ? ".csv" : ".json";
}

// ---- evolve ---------------------------------------------------------------

Table evolve_subspace(const RunConfig& config) {
  const ChainSpec& spec = config.chain;
  const double t_max = t_max_for(config, spec.n_sites);
  const std::size_t count = static_cast<std::size_t>(std::floor(t_max / config.dt + 1e-9)) + 1;
  const EndAmplitudeKernel kernel = EndAmplitudeKernel::for_chain(spec);
  const ExecPolicy policy = policy_of(config);
  const auto ends = end_amplitude_grid(kernel, config.dt, count, policy);
  std::vector<CorrelationSample> samples(count);
  parallel_for(count, policy, [&](std::size_t i) {
    samples[i] = measure_all(static_cast<double>(i) * config.dt,
                             end_pair_state(ends[i].first, ends[i].last), config.measures);
  });

  Table table;
  table.columns = {"time", "cf_zz", "cf_xx", "mi", "cc", "qd", "eof"};
  table.rows.reserve(count);
  for (const auto& s : samples) {
    table.rows.push_back({s.time, s.cf_zz, s.cf_xx, s.mi, s.cc, s.qd, s.eof});
  }
  return table;
}

Table evolve_exact(const RunConfig& config) {
  const ChainSpec& spec = config.chain;
  const int n = spec.n_sites;
  const double t_max = t_max_for(config, n);
  const std::size_t count = static_cast<std::size_t>(std::floor(t_max / config.dt + 1e-9)) + 1;
  const ExactPropagator propagator(n, spec.coupling, spec.field, HamiltonianForm::Ising);
  const std::uint32_t start = initial_index(n, InitialState::FirstSpinFlipped);

  Table table;
  table.columns = {"time", "subspace_weight", "re_a1", "im_a1", "re_an", "im_an"};
  table.rows.resize(count);
  parallel_for(count, policy_of(config), [&](std::size_t i) {
    const double t = static_cast<double>(i) * config.dt;
    const auto state = propagator.evolve_basis_state(start, t);
    double norm2 = 0.0;
    for (const auto& a : state) norm2 += std::norm(a);
    if (std::abs(std::sqrt(norm2) - 1.0) > 1e-10) {
      throw NumericalError("full evolution lost normalization");
    }
    const Complex a1 = state[single_flip_index(n, 1)];
    const Complex an = state[single_flip_index(n, n)];
    table.rows[i] = {t, single_flip_weight(state, n), a1.real(), a1.imag(), an.real(), an.imag()};
  });
  return table;
}

void run_evolve(const RunConfig& config, std::ostream& stdout_sink, RunResult& result) {
  const Table table =
      config.chain.model == Model::IsingFull ? evolve_exact(config) : evolve_subspace(config);
  emit_table(config.output, table, config, config.format, stdout_sink, result);
}

// ---- validate-rwa ---------------------------------------------------------

void run_validate_rwa(const RunConfig& config, std::ostream& stdout_sink, RunResult& result) {
  const int n = config.chain.n_sites;
  const auto rows = rwa_spectral_comparison(n, config.chain.coupling, config.ratios);
  const std::size_t dim = std::size_t{1} << n;
  Table table;
  table.columns = {"b_over_j", "overlap_ground", "overlap_first", "overlap_second"};
  for (std::size_t k = 0; k < dim; ++k) table.columns.push_back("e_full_" + std::to_string(k));
  for (std::size_t k = 0; k < dim; ++k) table.columns.push_back("e_rwa_" + std::to_string(k));
  for (const auto& row : rows) {
    std::vector<Cell> cells{row.field_ratio, row.overlaps[0], row.overlaps[1], row.overlaps[2]};
    for (double e : row.energies_full) cells.emplace_back(e);
    for (double e : row.energies_rwa) cells.emplace_back(e);
    table.rows.push_back(std::move(cells));
  }
  emit_table(config.output, table, config, config.format, stdout_sink, result);
}

// ---- scan / heisenberg ----------------------------------------------------

json scan_json(const StartupScan& scan) {
  json j;
  j["measure"] = std::string(to_string(scan.measure));
  j["criterion"] = scan.criterion;
  json entries = json::array();
  for (const auto& e : scan.entries) entries.push_back({e.n_sites, e.startup_time});
  j["entries"] = entries;
  j["not_arrived"] = scan.not_arrived;
  j["switch_index"] = scan.switch_index ? json(*scan.switch_index) : json(nullptr);
  j["switch_n"] =
      scan.switch_index ? json(scan.entries[*scan.switch_index].n_sites) : json(nullptr);
  j["jump_threshold"] = json_real(scan.jump_threshold);
  j["jumps"] = scan.jumps;
  json segments = json::array();
  for (std::size_t s = 0; s < scan.segment_fits.size(); ++s) {
    const SegmentFit& fit = scan.segment_fits[s];
    const VelocityEstimate v = velocity(scan, s);
    segments.push_back({{"begin", fit.begin},
                        {"end", fit.end},
                        {"n_first", scan.entries[fit.begin].n_sites},
                        {"n_last", scan.entries[fit.end - 1].n_sites},
                        {"slope", json_real(fit.slope)},
                        {"intercept", json_real(fit.intercept)},
                        {"r_squared", json_real(fit.r_squared)},
                        {"velocity", json_real(v.value)},
                        {"reliable", v.reliable},
                        {"warning", v.warning}});
  }
  j["segments"] = segments;
  return j;
}

// Fits a scan if it is long enough; notes why not otherwise.
StartupScan finish_scan(StartupScan scan, std::vector<std::string>& warnings) {
  const std::string label = std::string(to_string(scan.measure)) + " delta=" +
                            format_short(scan.criterion);
  if (!scan.not_arrived.empty()) {
    warnings.push_back(label + ": " + std::to_string(scan.not_arrived.size()) +
                       " chain(s) never reached the criterion");
  }
  if (scan.entries.empty()) {
    warnings.push_back(label + ": no chain reached the criterion");
    return scan;
  }
  if (scan.entries.size() < 8) return scan;  // too short for switch detection; not an error
  return detect_switch(std::move(scan));
}

json scan_summary(const RunConfig& config, const std::vector<StartupScan>& scans,
                  const std::vector<std::string>& warnings) {
  json doc = summary_header(config);
  json list = json::array();
  for (const auto& scan : scans) list.push_back(scan_json(scan));
  doc["scans"] = list;
  doc["warnings"] = warnings;
  return doc;
}

void run_scan(const RunConfig& config, std::ostream& stdout_sink, RunResult& result) {
  std::vector<StartupTarget> targets;
  for (Measure m : selected(config.measures)) {
    for (double delta : config.criteria) targets.push_back({m, delta});
  }
  const auto raw = scan_startup(config.chain, targets, {config.lengths.first, config.lengths.last},
                                scan_grid(config), policy_of(config));
  std::vector<StartupScan> scans;
  for (const auto& scan : raw) scans.push_back(finish_scan(scan, result.warnings));

  for (const auto& scan : scans) {
    Table table;
    table.columns = {"n_sites", "startup_time"};
    for (const auto& e : scan.entries) {
      table.rows.push_back({static_cast<long long>(e.n_sites), e.startup_time});
    }
    const std::string path = config.output + "." + std::string(to_string(scan.measure)) +
                             ".delta-" + format_short(scan.criterion) +
                             table_extension(config.format);
    emit_table(path, table, config, config.format, stdout_sink, result);
  }
  emit_json(config.output + ".summary.json", scan_summary(config, scans, result.warnings),
            stdout_sink, result);
}

// ---- peaks ----------------------------------------------------------------

struct ChainPeaks {
  Measure measure;
  int n_sites;
  std::vector<Peak> peaks;
};

json fit_json(Measure measure, const PeakFit& fit) {
  json samples = json::array();
  for (const auto& [n, v] : fit.samples) samples.push_back({n, v});
  return {{"measure", std::string(to_string(measure))},
          {"order", static_cast<int>(fit.order)},
          {"alpha", json_real(fit.alpha)},
          {"beta", json_real(fit.beta)},
          {"r_squared", json_real(fit.r_squared)},
          {"samples", samples},
          {"skipped", fit.skipped}};
}

// Power-law fits of every peak order up to min(requested, 2) per measure.
json peak_fits(const std::vector<ChainPeaks>& all, int requested,
               std::vector<std::string>& warnings) {
  std::vector<Measure> measures;
  for (const auto& c : all) {
    if (std::find(measures.begin(), measures.end(), c.measure) == measures.end()) {
      measures.push_back(c.measure);
    }
  }
  json fits = json::array();
  for (Measure m : measures) {
    for (int order = 1; order <= std::min(requested, 2); ++order) {
      std::vector<std::pair<int, double>> samples;
      std::vector<int> skipped;
      for (const auto& c : all) {
        if (c.measure != m) continue;
        if (static_cast<int>(c.peaks.size()) >= order && c.peaks[order - 1].value > 0.0) {
          samples.emplace_back(c.n_sites, c.peaks[order - 1].value);
        } else {
          skipped.push_back(c.n_sites);
        }
      }
      const std::string label = std::string(to_string(m)) + " peak " + std::to_string(order);
      if (!skipped.empty()) {
        warnings.push_back(label + ": missing for " + std::to_string(skipped.size()) +
                           " chain length(s)");
      }
      if (samples.size() < 5) {
        warnings.push_back(label + ": fewer than 5 points, no fit");
        continue;
      }
      PeakFit fit = fit_power_law(order == 1 ? PeakOrder::First : PeakOrder::Second,
                                  std::move(samples));
      fit.skipped = std::move(skipped);
      fits.push_back(fit_json(m, fit));
    }
  }
  return fits;
}

json peaks_summary(const RunConfig& config, const std::vector<ChainPeaks>& all, int requested,
                   std::vector<std::string>& warnings) {
  json doc = summary_header(config);
  json list = json::array();
  for (const auto& c : all) {
    json peaks = json::array();
    for (const auto& p : c.peaks) peaks.push_back({p.time, p.value});
    list.push_back({{"measure", std::string(to_string(c.measure))},
                    {"n_sites", c.n_sites},
                    {"peaks", peaks}});
  }
  doc["requested_peaks"] = requested;
  doc["peaks"] = list;
  doc["fits"] = peak_fits(all, requested, warnings);
  doc["warnings"] = warnings;
  return doc;
}

void run_peaks(const RunConfig& config, std::ostream& stdout_sink, RunResult& result) {
  const auto lengths = config.lengths.values();
  const auto measures = selected(config.measures);
  std::vector<ChainPeaks> all;
  for (Measure m : measures) {
    for (int n : lengths) all.push_back({m, n, {}});
  }
  parallel_for(all.size(), policy_of(config), [&](std::size_t i) {
    ChainSpec spec = config.chain;
    spec.n_sites = all[i].n_sites;
    all[i].peaks = extract_peaks(spec, all[i].measure, t_max_for(config, spec.n_sites),
                                 config.dt, config.peaks);
  });

  std::size_t short_runs = 0;
  Table table;
  table.columns = {"measure", "n_sites", "peak_index", "peak_time", "peak_value"};
  for (const auto& c : all) {
    if (static_cast<int>(c.peaks.size()) < config.peaks) ++short_runs;
    for (std::size_t k = 0; k < c.peaks.size(); ++k) {
      table.rows.push_back({std::string(to_string(c.measure)), static_cast<long long>(c.n_sites),
                            static_cast<long long>(k + 1), c.peaks[k].time, c.peaks[k].value});
    }
  }
  if (short_runs > 0) {
    result.warnings.push_back(std::to_string(short_runs) +
                              " run(s) found fewer peaks than requested");
  }
  emit_table(config.output + ".peaks" + table_extension(config.format), table, config,
             config.format, stdout_sink, result);
  const json doc = peaks_summary(config, all, config.peaks, result.warnings);
  emit_json(config.output + ".summary.json", doc, stdout_sink, result);
}

// ---- refit from a saved summary --------------------------------------------

void run_refit(const RunConfig& config, std::ostream& stdout_sink, RunResult& result) {
  std::ifstream in(config.from_summary, std::ios::binary);
  if (!in) throw ConfigError("cannot read summary '" + config.from_summary + "'");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError("summary '" + config.from_summary + "' is not valid JSON: " + e.what());
  }

  try {
    if (doc.contains("scans")) {
      std::vector<StartupScan> scans;
      for (const auto& item : doc.at("scans")) {
        StartupScan scan;
        scan.measure = parse_measure(item.at("measure").get<std::string>());
        scan.criterion = item.at("criterion").get<double>();
        for (const auto& e : item.at("entries")) {
          scan.entries.push_back({e.at(0).get<int>(), e.at(1).get<double>()});
        }
        scan.not_arrived = item.at("not_arrived").get<std::vector<int>>();
        scans.push_back(finish_scan(std::move(scan), result.warnings));
      }
      emit_json(config.output + ".summary.json", scan_summary(config, scans, result.warnings),
                stdout_sink, result);
    } else if (doc.contains("peaks")) {
      std::vector<ChainPeaks> all;
      const int requested = doc.at("requested_peaks").get<int>();
      for (const auto& item : doc.at("peaks")) {
        ChainPeaks c{parse_measure(item.at("measure").get<std::string>()),
                     item.at("n_sites").get<int>(),
                     {}};
        for (const auto& p : item.at("peaks")) {
          c.peaks.push_back({p.at(0).get<double>(), p.at(1).get<double>()});
        }
        all.push_back(std::move(c));
      }
      emit_json(config.output + ".summary.json",
                peaks_summary(config, all, requested, result.warnings), stdout_sink, result);
    } else {
      throw ConfigError("summary has neither 'scans' nor 'peaks'");
    }
  } catch (const json::exception& e) {
    throw ConfigError("malformed summary: " + std::string(e.what()));
  }
}

}  // namespace

std::string_view to_string(Command command) {
  switch (command) {
    case Command::Evolve:
      return "evolve";
    case Command::Scan:
      return "scan";
    case Command::Peaks:
      return "peaks";
    case Command::ValidateRwa:
      return "validate-rwa";
    case Command::Heisenberg:
      return "heisenberg";
  }
  return "?";
}

Command parse_command(std::string_view name) {
  for (Command c : {Command::Evolve, Command::Scan, Command::Peaks, Command::ValidateRwa,
                    Command::Heisenberg}) {
    if (to_string(c) == name) return c;
  }
  throw ConfigError("unknown command '" + std::string(name) + "'");
}

std::string_view to_string(OutputFormat format) {
  return format == OutputFormat::Csv ? "csv" : "json";
}

OutputFormat parse_format(std::string_view name) {
  if (name == "csv") return OutputFormat::Csv;
  if (name == "json") return OutputFormat::Json;
  throw ConfigError("unknown format '" + std::string(name) + "' (csv or json)");
}

std::vector<int> ChainLengths::values() const {
  std::vector<int> out;
  for (int n = first; n <= last; n += step) out.push_back(n);
  return out;
}

std::string ChainLengths::to_string() const {
  if (first == last) return std::to_string(first);
  std::string s = std::to_string(first) + ":" + std::to_string(last);
  if (step != 1) s += ":" + std::to_string(step);
  return s;
}

ChainLengths parse_chain_lengths(std::string_view text) {
  const auto parts = split(text, ':');
  if (parts.size() > 3) throw ConfigError("chain lengths: expected N, a:b or a:b:step");
  ChainLengths lengths;
  lengths.first = parse_int(parts[0]);
  lengths.last = parts.size() > 1 ? parse_int(parts[1]) : lengths.first;
  lengths.step = parts.size() > 2 ? parse_int(parts[2]) : 1;
  if (lengths.first < 2 || lengths.last < lengths.first || lengths.step < 1) {
    throw ConfigError("chain lengths '" + std::string(text) + "' must satisfy 2 <= a <= b, step >= 1");
  }
  return lengths;
}

std::vector<double> parse_ratio_range(std::string_view text) {
  const auto parts = split(text, ':');
  if (parts.size() == 1) return {parse_real(parts[0])};
  if (parts.size() != 3) throw ConfigError("ratios: expected lo:hi:count");
  const double lo = parse_real(parts[0]);
  const double hi = parse_real(parts[1]);
  const int count = parse_int(parts[2]);
  if (count < 2 || !(hi > lo)) throw ConfigError("ratios: need hi > lo and count >= 2");
  std::vector<double> out(count);
  for (int i = 0; i < count; ++i) {
    out[i] = i == count - 1 ? hi : lo + (hi - lo) * static_cast<double>(i) / (count - 1);
  }
  return out;
}

std::vector<double> parse_real_list(std::string_view text) {
  std::vector<double> out;
  for (const auto part : split(text, ',')) {
    if (!part.empty()) out.push_back(parse_real(part));
  }
  if (out.empty()) throw ConfigError("empty list");
  return out;
}

void validate(const RunConfig& config) {
  auto fail = [](const std::string& what) { throw ConfigError(what); };
  if (!(config.dt > 0.0) || !std::isfinite(config.dt)) fail("--dt must be > 0");
  if (config.t_max && (!(*config.t_max > 0.0) || !std::isfinite(*config.t_max))) {
    fail("--t-max must be > 0");
  }
  if (config.workers < 1) fail("--workers must be >= 1");
  if (config.output.empty()) fail("--output must not be empty");
  if (!config.from_summary.empty()) {
    if (config.command != Command::Scan && config.command != Command::Peaks &&
        config.command != Command::Heisenberg) {
      fail("--from-summary applies to scan, heisenberg and peaks");
    }
    if (config.output == "-") fail("--output prefix required with --from-summary");
    return;
  }

  ChainSpec chain = config.chain;
  chain.n_sites = config.lengths.first;
  try {
    validate(chain);
  } catch (const std::invalid_argument& e) {
    fail(e.what());
  }

  const bool single_chain =
      config.command == Command::Evolve || config.command == Command::ValidateRwa;
  if (single_chain && config.lengths.first != config.lengths.last) {
    fail("-N must be a single chain length for " + std::string(to_string(config.command)));
  }
  switch (config.command) {
    case Command::Evolve:
      if (config.chain.model == Model::IsingFull && config.lengths.first > kMaxFullSites) {
        fail("ising-full evolve is limited to N <= " + std::to_string(kMaxFullSites));
      }
      break;
    case Command::ValidateRwa:
      if (config.lengths.first > 12) fail("validate-rwa is limited to N <= 12");
      if (config.ratios.empty()) fail("--ratios is required for validate-rwa");
      for (double r : config.ratios) {
        if (!(r >= 0.0) || !std::isfinite(r)) fail("--ratios values must be >= 0");
      }
      break;
    case Command::Scan:
    case Command::Heisenberg:
      if (config.chain.model == Model::IsingFull) fail("scan needs ising-rwa or heisenberg");
      if (config.command == Command::Heisenberg &&
          config.chain.model != Model::HeisenbergUniform) {
        fail("heisenberg command requires the heisenberg model");
      }
      if (config.lengths.step != 1) fail("scan takes a contiguous range a:b");
      if (config.lengths.last > 1000) fail("scan range is limited to N <= 1000");
      if (config.criteria.empty()) fail("--delta needs at least one value");
      for (double d : config.criteria) {
        if (!(d > 0.0) || !std::isfinite(d)) fail("--delta values must be > 0");
      }
      if (config.output == "-") fail("--output prefix required for scan");
      break;
    case Command::Peaks:
      if (config.chain.model == Model::IsingFull) fail("peaks needs ising-rwa or heisenberg");
      if (config.lengths.first < 3) fail("peaks needs N >= 3");
      if (config.peaks < 1) fail("--peaks must be >= 1");
      if (config.dt * config.chain.coupling > 0.05) fail("peaks needs --dt <= 0.05/J");
      if (config.output == "-") fail("--output prefix required for peaks");
      break;
  }
}

std::string config_echo(const RunConfig& config) { return config_json(config).dump(); }

std::string format_real(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

void write_table(std::ostream& out, const Table& table, const RunConfig& config,
                 OutputFormat format) {
  if (format == OutputFormat::Json) {
    json doc = summary_header(config);
    doc["columns"] = table.columns;
    json rows = json::array();
    for (const auto& row : table.rows) {
      json r = json::array();
      for (const auto& cell : row) {
        std::visit(
            [&](const auto& v) {
              using T = std::decay_t<decltype(v)>;
              if constexpr (std::is_same_v<T, double>) {
                r.push_back(json_real(v));
              } else {
                r.push_back(v);
              }
            },
            cell);
      }
      rows.push_back(std::move(r));
    }
    doc["rows"] = std::move(rows);
    out << doc.dump() << '\n';
    return;
  }

  out << "# " << kToolName << ' ' << kToolVersion << '\n';
  out << "# command: " << to_string(config.command) << '\n';
  out << "# config: " << config_echo(config) << '\n';
  out << "# schema:";
  for (std::size_t c = 0; c < table.columns.size(); ++c) {
    out << (c == 0 ? " " : ",") << table.columns[c];
  }
  out << '\n';
  for (std::size_t c = 0; c < table.columns.size(); ++c) {
    out << (c == 0 ? "" : ",") << table.columns[c];
  }
  out << '\n';
  for (const auto& row : table.rows) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c > 0) out << ',';
      std::visit(
          [&](const auto& v) {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, double>) {
              out << format_real(v);
            } else {
              out << v;
            }
          },
          row[c]);
    }
    out << '\n';
  }
}

RunResult run(const RunConfig& requested, std::ostream& stdout_sink, std::ostream& log) {
  RunResult result;
  RunConfig config = requested;
  config.chain.n_sites = config.lengths.first;
  try {
    validate(config);
    if (!config.from_summary.empty()) {
      run_refit(config, stdout_sink, result);
    } else {
      switch (config.command) {
        case Command::Evolve:
          run_evolve(config, stdout_sink, result);
          break;
        case Command::ValidateRwa:
          run_validate_rwa(config, stdout_sink, result);
          break;
        case Command::Scan:
        case Command::Heisenberg:
          run_scan(config, stdout_sink, result);
          break;
        case Command::Peaks:
          run_peaks(config, stdout_sink, result);
          break;
      }
    }
  } catch (const NumericalError& e) {
    log << "error: numerical failure: " << e.what() << '\n';
    result.exit_code = kExitNumericalError;
    return result;
  } catch (const std::invalid_argument& e) {
    log << "error: " << e.what() << '\n';
    result.exit_code = kExitConfigError;
    return result;
  } catch (const std::out_of_range& e) {
    log << "error: " << e.what() << '\n';
    result.exit_code = kExitConfigError;
    return result;
  } catch (const std::exception& e) {
    log << "error: " << e.what() << '\n';
    result.exit_code = kExitNumericalError;
    return result;
  }
  for (const auto& w : result.warnings) log << "warning: " << w << '\n';
  if (!result.warnings.empty()) result.exit_code = kExitPartial;
  return result;
}

}  // namespace spinfront
