#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include <gtest/gtest.h>
#include <json.hpp>

#include "spinfront/io.hpp"

using namespace spinfront;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "spinfront_io_tests";
  fs::create_directories(dir);
  return dir / name;
}

RunConfig evolve_config(int n) {
  RunConfig c;
  c.command = Command::Evolve;
  c.lengths = {n, n, 1};
  c.t_max = 1.0;
  c.dt = 0.25;
  return c;
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  for (std::string line; std::getline(ss, line);) out.push_back(line);
  return out;
}

}  // namespace

TEST(Parsing, ChainLengths) {
  const ChainLengths one = parse_chain_lengths("20");
  EXPECT_EQ(one.values(), std::vector<int>{20});
  const ChainLengths range = parse_chain_lengths("2:5");
  EXPECT_EQ(range.values(), (std::vector<int>{2, 3, 4, 5}));
  const ChainLengths stepped = parse_chain_lengths("20:50:10");
  EXPECT_EQ(stepped.values(), (std::vector<int>{20, 30, 40, 50}));
  EXPECT_EQ(stepped.to_string(), "20:50:10");
  for (const char* bad : {"1", "5:3", "a", "2:3:0", "2:3:4:5", ""}) {
    EXPECT_THROW(parse_chain_lengths(bad), std::invalid_argument) << bad;
  }
}

TEST(Parsing, RatiosAndLists) {
  const auto r = parse_ratio_range("0.1:20:200");
  ASSERT_EQ(r.size(), 200u);
  EXPECT_EQ(r.front(), 0.1);
  EXPECT_EQ(r.back(), 20.0);
  EXPECT_EQ(parse_ratio_range("3"), std::vector<double>{3.0});
  EXPECT_THROW(parse_ratio_range("1:0:5"), std::invalid_argument);
  EXPECT_EQ(parse_real_list("1e-4,1e-5"), (std::vector<double>{1e-4, 1e-5}));
  EXPECT_THROW(parse_real_list("1e-4,x"), std::invalid_argument);
  EXPECT_EQ(parse_command("validate-rwa"), Command::ValidateRwa);
  EXPECT_THROW(parse_format("xml"), std::invalid_argument);
}

TEST(Formatting, SeventeenSignificantDigits) {
  EXPECT_EQ(format_real(0.1), "0.10000000000000001");
  EXPECT_EQ(format_real(2.0), "2");
  EXPECT_EQ(format_real(std::numeric_limits<double>::quiet_NaN()), "nan");
  EXPECT_EQ(format_real(-std::numeric_limits<double>::infinity()), "-inf");
  for (double v : {1.0 / 3.0, 6.02214076e23, -4.9e-300}) EXPECT_EQ(std::stod(format_real(v)), v);
}

TEST(Run, EvolveCsvSchema) {
  RunConfig c = evolve_config(20);
  c.measures = MeasureSet::parse("mi,qd,eof,cfzz");
  std::ostringstream out, log;
  const RunResult r = run(c, out, log);
  EXPECT_EQ(r.exit_code, kExitOk) << log.str();
  const auto lines = lines_of(out.str());
  ASSERT_EQ(lines.size(), 5u + 5u);
  EXPECT_EQ(lines[0], "# spinfront 1.0.0");
  EXPECT_EQ(lines[3], "# schema: time,cf_zz,cf_xx,mi,cc,qd,eof");
  EXPECT_EQ(lines[4], "time,cf_zz,cf_xx,mi,cc,qd,eof");
  EXPECT_NE(lines[2].find("\"measures\":\"mi,qd,eof,cfzz\""), std::string::npos);
  // cf_xx was not requested; cc is computed because qd needs it.
  EXPECT_NE(lines[6].find(",nan,"), std::string::npos);
  EXPECT_EQ(out.str().find('\r'), std::string::npos);
}

TEST(Run, EvolveJson) {
  RunConfig c = evolve_config(4);
  c.format = OutputFormat::Json;
  std::ostringstream out, log;
  ASSERT_EQ(run(c, out, log).exit_code, kExitOk);
  const auto doc = nlohmann::json::parse(out.str());
  EXPECT_EQ(doc["columns"].size(), 7u);
  EXPECT_EQ(doc["rows"].size(), 5u);
  EXPECT_EQ(doc["config"]["n"], "4");
}

TEST(Run, EvolveExactDumpsAmplitudes) {
  RunConfig c = evolve_config(5);
  c.chain.model = Model::IsingFull;
  c.chain.field = 20.0;
  std::ostringstream out, log;
  ASSERT_EQ(run(c, out, log).exit_code, kExitOk) << log.str();
  const auto lines = lines_of(out.str());
  EXPECT_EQ(lines[4], "time,subspace_weight,re_a1,im_a1,re_an,im_an");
  std::stringstream row(lines[5]);
  std::vector<double> v;
  for (std::string cell; std::getline(row, cell, ',');) v.push_back(std::stod(cell));
  ASSERT_EQ(v.size(), 6u);
  EXPECT_EQ(v[0], 0.0);
  EXPECT_NEAR(v[1], 1.0, 1e-12);
  EXPECT_NEAR(v[2], 1.0, 1e-12);
  EXPECT_NEAR(std::abs(v[4]) + std::abs(v[5]), 0.0, 1e-12);
}

TEST(Run, ValidateRwaRows) {
  RunConfig c;
  c.command = Command::ValidateRwa;
  c.lengths = {3, 3, 1};
  c.ratios = {0.5, 20.0};
  std::ostringstream out, log;
  ASSERT_EQ(run(c, out, log).exit_code, kExitOk) << log.str();
  const auto lines = lines_of(out.str());
  ASSERT_EQ(lines.size(), 7u);
  EXPECT_EQ(lines[4].rfind("b_over_j,overlap_ground,overlap_first,overlap_second,e_full_0", 0), 0u);
}

TEST(Run, ConfigErrorsExitWithTwo) {
  std::ostringstream out, log;
  RunConfig bad_dt = evolve_config(4);
  bad_dt.dt = -1.0;
  EXPECT_EQ(run(bad_dt, out, log).exit_code, kExitConfigError);

  RunConfig range = evolve_config(4);
  range.lengths = {4, 8, 1};
  EXPECT_EQ(run(range, out, log).exit_code, kExitConfigError);

  RunConfig scan;
  scan.command = Command::Scan;
  scan.lengths = {2, 10, 1};
  scan.output = scratch("x").string();
  scan.criteria = {};
  EXPECT_EQ(run(scan, out, log).exit_code, kExitConfigError);

  RunConfig unwritable = evolve_config(4);
  unwritable.output = "/nonexistent-dir/out.csv";
  EXPECT_EQ(run(unwritable, out, log).exit_code, kExitConfigError);
  EXPECT_NE(log.str().find("error:"), std::string::npos);
}

TEST(Run, PartialScanExitsWithFour) {
  RunConfig c;
  c.command = Command::Scan;
  c.lengths = {2, 30, 1};
  c.measures = MeasureSet::parse("mi");
  c.criteria = {1e-6};
  c.t_max = 5.0;
  c.output = scratch("partial").string();
  std::ostringstream out, log;
  const RunResult r = run(c, out, log);
  EXPECT_EQ(r.exit_code, kExitPartial);
  EXPECT_FALSE(r.warnings.empty());
  const auto doc = nlohmann::json::parse(slurp(c.output + ".summary.json"));
  EXPECT_FALSE(doc["scans"][0]["not_arrived"].empty());
}

TEST(Run, ScanIsReproducibleAndRoundTrips) {
  RunConfig c;
  c.command = Command::Scan;
  c.lengths = {2, 40, 1};
  c.measures = MeasureSet::parse("mi,eof");
  c.criteria = {1e-4, 1e-5};
  c.output = scratch("scan_a").string();
  std::ostringstream out, log;
  const RunResult first = run(c, out, log);
  ASSERT_EQ(first.exit_code, kExitOk) << log.str();
  EXPECT_EQ(first.files.size(), 5u);
  const std::string csv_a = slurp(c.output + ".mi.delta-0.0001.csv");
  const std::string summary_a = slurp(c.output + ".summary.json");

  c.workers = 3;
  ASSERT_EQ(run(c, out, log).exit_code, kExitOk);
  c.workers = 1;
  ASSERT_EQ(run(c, out, log).exit_code, kExitOk);
  EXPECT_EQ(slurp(c.output + ".mi.delta-0.0001.csv"), csv_a);
  EXPECT_EQ(slurp(c.output + ".summary.json"), summary_a);

  RunConfig refit;
  refit.command = Command::Scan;
  refit.from_summary = c.output + ".summary.json";
  refit.output = scratch("scan_b").string();
  ASSERT_EQ(run(refit, out, log).exit_code, kExitOk) << log.str();
  const auto original = nlohmann::json::parse(summary_a);
  const auto again = nlohmann::json::parse(slurp(refit.output + ".summary.json"));
  EXPECT_EQ(original["scans"], again["scans"]);
}

TEST(Run, PeaksWriteFitsAndRoundTrip) {
  RunConfig c;
  c.command = Command::Peaks;
  c.lengths = {20, 60, 10};
  c.measures = MeasureSet::parse("mi");
  c.output = scratch("peaks_a").string();
  std::ostringstream out, log;
  ASSERT_EQ(run(c, out, log).exit_code, kExitOk) << log.str();
  const auto doc = nlohmann::json::parse(slurp(c.output + ".summary.json"));
  ASSERT_EQ(doc["fits"].size(), 2u);
  EXPECT_LT(doc["fits"][0]["alpha"].get<double>(), -2.0);
  const auto rows = lines_of(slurp(c.output + ".peaks.csv"));
  EXPECT_EQ(rows[4], "measure,n_sites,peak_index,peak_time,peak_value");
  EXPECT_EQ(rows.size(), 5u + 10u);

  RunConfig refit;
  refit.command = Command::Peaks;
  refit.from_summary = c.output + ".summary.json";
  refit.output = scratch("peaks_b").string();
  ASSERT_EQ(run(refit, out, log).exit_code, kExitOk) << log.str();
  const auto again = nlohmann::json::parse(slurp(refit.output + ".summary.json"));
  EXPECT_EQ(doc["fits"], again["fits"]);
}

TEST(Run, RefitRejectsGarbage) {
  const fs::path path = scratch("garbage.json");
  std::ofstream(path) << "{not json";
  RunConfig c;
  c.command = Command::Scan;
  c.from_summary = path.string();
  c.output = scratch("garbage_out").string();
  std::ostringstream out, log;
  EXPECT_EQ(run(c, out, log).exit_code, kExitConfigError);
}
