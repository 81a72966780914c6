// Copyright (c) 2026 the corrugate authors
// SPDX-License-Identifier: Apache-2.0
//
// End-to-end checks of the command-line tool: exit codes, artifact layout,
// and config-file override semantics.  CORRUGATE_CLI points at the binary.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <sys/wait.h>
#include <unistd.h>

#include "doctest.h"
#include "json.hpp"

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct Cli {
  std::string binary;
  fs::path scratch;
  int counter = 0;

  Cli() {
    const char* env = std::getenv("CORRUGATE_CLI");
    REQUIRE_MESSAGE(env != nullptr, "CORRUGATE_CLI must point at the corrugate binary");
    binary = env;
    scratch = fs::temp_directory_path() / ("corrugate_cli_test_" + std::to_string(::getpid()));
    fs::remove_all(scratch);
    fs::create_directories(scratch);
  }
  ~Cli() { fs::remove_all(scratch); }

  struct Result {
    int exit_code;
    fs::path dir;
    std::string stderr_text;
  };

  Result run(const std::string& args, bool with_out_dir = true) {
    const fs::path dir = scratch / ("run" + std::to_string(counter++));
    fs::create_directories(dir);
    std::string cmd = binary + " " + args;
    if (with_out_dir) cmd += " --out-dir " + dir.string();
    cmd += " > " + (dir / "stdout.txt").string() + " 2> " + (dir / "stderr.txt").string();
    const int rc = std::system(cmd.c_str());
    std::ifstream err(dir / "stderr.txt");
    std::stringstream ss;
    ss << err.rdbuf();
    return {WIFEXITED(rc) ? WEXITSTATUS(rc) : -1, dir, ss.str()};
  }
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

const std::string kHelix = "--curve helix:a=0.1,b=0.05 --metric const:2";

}  // namespace

TEST_CASE("twist command: artifacts, defect column, manifest") {
  Cli cli;
  const auto res = cli.run("twist " + kHelix + " --n 64 --rows 256");
  CHECK(res.exit_code == 0);
  const std::string csv = slurp(res.dir / "twist.csv");
  CHECK(csv.rfind("u,f0_x,f0_y,f0_z,fn_x,fn_y,fn_z,isometry_defect\n", 0) == 0);
  // 256 data rows plus header
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 257);

  const json manifest = json::parse(slurp(res.dir / "twist_manifest.json"));
  CHECK(manifest["schema"] == 1);
  CHECK(manifest["command"] == "twist");
  for (const auto& f : manifest["outputs"]) {
    const fs::path p = res.dir / f.get<std::string>();
    CHECK(fs::exists(p));
    CHECK(fs::file_size(p) > 0);
  }
}

TEST_CASE("twist exits 2 when the curve is not short and names the location") {
  Cli cli;
  const auto res = cli.run("twist --curve helix:a=0.1,b=0.05 --metric const:0.001 --n 16");
  CHECK(res.exit_code == 2);
  CHECK(res.stderr_text.find("u=") != std::string::npos);
}

TEST_CASE("config parse failures exit 3") {
  Cli cli;
  CHECK(cli.run("twist --metric const:2 --n 16").exit_code == 3);          // missing curve
  CHECK(cli.run("twist --curve helix:a=0.1 --metric const:2").exit_code == 3);  // missing b
  CHECK(cli.run("c0rate " + kHelix + " --n-list 8,16").exit_code == 3);    // too few points
  CHECK(cli.run("clt " + kHelix + " --samples 1 --n 16").exit_code == 3);  // too few samples
  CHECK(cli.run("limit-sample " + kHelix + " --t-grid 0,0.5").exit_code == 3);  // t=0 rejected
  CHECK(cli.run("enumerate " + kHelix + " --n 24").exit_code == 3);        // over the 2^n cap
}

TEST_CASE("verify reports shortness and isometry") {
  Cli cli;
  const auto ok = cli.run("verify " + kHelix + " --n 32 --grid 512");
  CHECK(ok.exit_code == 0);
  const json rep = json::parse(slurp(ok.dir / "verify_report.json"));
  CHECK(rep["pass"] == true);
  CHECK(rep["shortness"]["is_strictly_short"] == true);
  CHECK(rep["isometry"]["max_relative_defect"].get<double>() <= 1e-10);

  const auto bad = cli.run("verify --curve line:dx=1,dy=0,dz=0 --metric const:1");
  CHECK(bad.exit_code == 2);
  const json rep2 = json::parse(slurp(bad.dir / "verify_report.json"));
  CHECK(rep2["pass"] == false);
}

TEST_CASE("c0rate fits the decay and refuses degenerate values") {
  Cli cli;
  const auto res = cli.run("c0rate " + kHelix + " --n-list 8,16,32,64,128,256");
  CHECK(res.exit_code == 0);
  const json fit = json::parse(slurp(res.dir / "c0rate_fit.json"));
  CHECK(fit["degenerate_values"] == false);
  CHECK(fit["slope"].get<double>() <= -0.85);
  CHECK(fit["slope"].get<double>() >= -1.15);

  // r == 0: every sup vanishes and the fit is refused, exit stays 0
  const auto zero =
      cli.run("c0rate --curve line:dx=0.5,dy=0,dz=0 --metric const:0.25 --n-list 8,16,32,64");
  CHECK(zero.exit_code == 0);
  const json nofit = json::parse(slurp(zero.dir / "c0rate_fit.json"));
  CHECK(nofit["degenerate_values"] == true);
  CHECK_FALSE(nofit.contains("slope"));
}

TEST_CASE("clt gates pass on a small seeded run and artifacts are complete") {
  Cli cli;
  const auto res = cli.run("clt " + kHelix + " --n 256 --samples 400 --seed 42 --workers 2");
  CHECK(res.exit_code == 0);
  const json cov = json::parse(slurp(res.dir / "clt_covariance.json"));
  CHECK(cov["all_pass"] == true);
  CHECK(cov["worst_standardized_deviation"].get<double>() <= 4.0);
  const json gof = json::parse(slurp(res.dir / "clt_gof.json"));
  CHECK(gof.size() == 4);
  bool gated_seen = false;
  for (const auto& entry : gof) {
    if (entry["gated"] == true) {
      gated_seen = true;
      CHECK(entry["t"].get<double>() == 1.0);
      CHECK(entry["p_value"].get<double>() >= 0.01);
    }
  }
  CHECK(gated_seen);
  // M x G rows plus header
  const std::string csv = slurp(res.dir / "clt_ensemble.csv");
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 400 * 4 + 1);
}

TEST_CASE("clt --enumerate cross-checks the exact law") {
  Cli cli;
  const auto res = cli.run("clt " + kHelix + " --enumerate --n 8 --t-grid 0.5,1 --workers 1");
  CHECK(res.exit_code == 0);
  const json rep = json::parse(slurp(res.dir / "clt_enumeration.json"));
  CHECK(rep["consistent"] == true);
  CHECK(rep["max_covariance_deviation_vs_forced_ensemble"].get<double>() <= 1e-12);
  CHECK(rep["outcomes"] == 256);
}

TEST_CASE("enumerate writes the full outcome table") {
  Cli cli;
  const auto res = cli.run("enumerate " + kHelix + " --n 6 --t-grid 0.5,1");
  CHECK(res.exit_code == 0);
  const std::string csv = slurp(res.dir / "enumerate_law.csv");
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 64 * 2 + 1);
  const json moments = json::parse(slurp(res.dir / "enumerate_moments.json"));
  CHECK(moments["outcomes"] == 64);
}

TEST_CASE("limit-sample embeds the oracle covariance and matches it") {
  Cli cli;
  const auto res = cli.run(
      "limit-sample --curve line:dx=0.5,dy=0,dz=0 --metric const:1.25 --t-grid 1 --samples 4000 "
      "--seed 3");
  CHECK(res.exit_code == 0);
  const json manifest = json::parse(slurp(res.dir / "limit_sample_manifest.json"));
  const double oracle_var = manifest["config"]["oracle_covariance"][2][2].get<double>();
  CHECK(oracle_var == doctest::Approx(1.0).epsilon(1e-9));

  // sample variance of the L_z column within 4 chi-square SEs of the oracle
  std::ifstream in(res.dir / "limit_sample.csv");
  std::string line;
  std::getline(in, line);  // header
  double sum = 0.0, sum2 = 0.0;
  int count = 0;
  while (std::getline(in, line)) {
    const auto pos = line.rfind(',');
    const double v = std::stod(line.substr(pos + 1));
    sum += v;
    sum2 += v * v;
    ++count;
  }
  CHECK(count == 4000);
  const double var = (sum2 - sum * sum / count) / (count - 1);
  CHECK(std::abs(var - oracle_var) <= 4.0 * oracle_var * std::sqrt(2.0 / count));
}

TEST_CASE("config file supplies defaults and flags override it") {
  Cli cli;
  const fs::path cfg_path = cli.scratch / "config.json";
  {
    std::ofstream cfg(cfg_path);
    cfg << R"({"curve":"helix:a=0.1,b=0.05","metric":"const:2","n":32,"rows":64})";
  }
  const auto a = cli.run("twist --config " + cfg_path.string());
  CHECK(a.exit_code == 0);
  const json ma = json::parse(slurp(a.dir / "twist_manifest.json"));
  CHECK(ma["config"]["n"] == 32);
  CHECK(ma["config"]["rows"] == 64);

  const auto b = cli.run("twist --config " + cfg_path.string() + " --n 16");
  CHECK(b.exit_code == 0);
  const json mb = json::parse(slurp(b.dir / "twist_manifest.json"));
  CHECK(mb["config"]["n"] == 16);   // flag wins
  CHECK(mb["config"]["rows"] == 64);  // config still supplies the rest
}

TEST_CASE("random twists are reproducible byte for byte") {
  Cli cli;
  const auto a = cli.run("twist " + kHelix + " --n 32 --random --seed 7 --rows 128");
  const auto b = cli.run("twist " + kHelix + " --n 32 --random --seed 7 --rows 128");
  CHECK(a.exit_code == 0);
  CHECK(b.exit_code == 0);
  CHECK(slurp(a.dir / "twist.csv") == slurp(b.dir / "twist.csv"));
  const auto c = cli.run("twist " + kHelix + " --n 32 --random --seed 8 --rows 128");
  CHECK(slurp(a.dir / "twist.csv") != slurp(c.dir / "twist.csv"));
}
