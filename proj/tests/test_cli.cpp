// End-to-end checks of the command line binary.  The build passes the
// binary location in ASCALE_CLI_PATH; without a cli target these cases
// compile away.

#include <cmath>
#include <cstdio>
#include <string>
#include <utility>
#include <vector>

#include "ascale/dataio.hpp"
#include "ascale/kv.hpp"
#include "ascale/scaling.hpp"
#include "doctest.h"
#include "support/helpers.hpp"

#ifdef ASCALE_CLI_PATH

#include <sys/wait.h>

namespace {

struct CliResult {
  int exit_code = -1;
  std::string out;
};

CliResult run_cli(const std::string& args) {
  const std::string cmd =
      std::string("'") + ASCALE_CLI_PATH + "' " + args + " 2>/dev/null";
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  CliResult res;
  char buf[4096];
  std::size_t got;
  while ((got = fread(buf, 1, sizeof(buf), pipe)) > 0)
    res.out.append(buf, got);
  const int status = pclose(pipe);
  res.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return res;
}

std::string quoted(const std::string& path) { return "'" + path + "'"; }

void write_toy_csv(const std::string& path) {
  std::string text = "a,b,label\n";
  for (int i = 0; i < 10; ++i) {
    text += std::to_string(i) + "," + std::to_string(2 * i + 3) + "," +
            std::to_string(i % 2) + "\n";
  }
  testsupport::write_file(path, text);
}

void write_regression_csv(const std::string& path) {
  ascale::RngStream rng(404, 0);
  std::string text = "x0,x1,y\n";
  for (int i = 0; i < 24; ++i) {
    const double a = rng.next_normal();
    const double b = rng.next_normal();
    const double y = 1.5 * a - 0.5 * b + 0.1 * rng.next_normal();
    text += ascale::format_double(a) + "," + ascale::format_double(b) + "," +
            ascale::format_double(y) + "\n";
  }
  testsupport::write_file(path, text);
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("help and usage errors") {
  CHECK(run_cli("--help").exit_code == 0);
  CHECK(run_cli("--help").out.find("scale") != std::string::npos);
  CHECK(run_cli("").exit_code == 2);            // a subcommand is required
  CHECK(run_cli("sim1 --bogus").exit_code == 2);
  CHECK(run_cli("frobnicate").exit_code == 2);
}

TEST_CASE("scale failures map to the documented exit codes") {
  testsupport::TempDir tmp("cli-err");
  const std::string missing = tmp.file("missing.csv");
  const std::string out = tmp.file("out.csv");
  CHECK(run_cli("scale --input " + quoted(missing) + " --output " +
                quoted(out) + " --scaler stand --target label")
            .exit_code == 1);

  const std::string in = tmp.file("in.csv");
  write_toy_csv(in);
  CHECK(run_cli("scale --input " + quoted(in) + " --output " + quoted(out) +
                " --scaler wizard --target label")
            .exit_code == 2);
  CHECK(run_cli("scale --input " + quoted(in) + " --output " + quoted(out) +
                " --scaler gas --gamma 7 --target label")
            .exit_code == 2);
}

TEST_CASE("scale writes the transformed csv and a scaler sidecar") {
  testsupport::TempDir tmp("cli-scale");
  const std::string in = tmp.file("in.csv");
  const std::string out = tmp.file("out.csv");
  write_toy_csv(in);

  const CliResult res =
      run_cli("scale --input " + quoted(in) + " --output " + quoted(out) +
              " --scaler stand --target label");
  REQUIRE(res.exit_code == 0);

  ascale::CsvOptions opts;
  opts.target = "label";
  const ascale::Dataset scaled = ascale::load_csv(out, opts);
  REQUIRE(scaled.n_features() == 2);
  REQUIRE(scaled.n_rows() == 10);
  for (std::size_t j = 0; j < 2; ++j) {
    double mean = 0.0;
    for (std::size_t i = 0; i < 10; ++i) mean += scaled.x(i, j);
    mean /= 10.0;
    double ss = 0.0;
    for (std::size_t i = 0; i < 10; ++i) {
      const double d = scaled.x(i, j) - mean;
      ss += d * d;
    }
    CHECK(std::abs(mean) < 1e-12);
    CHECK(std::abs(ss / 9.0 - 1.0) < 1e-12);
  }
  for (std::size_t i = 0; i < 10; ++i)
    CHECK(scaled.y[i] == static_cast<double>(i % 2));  // target untouched

  const ascale::KvRecord rec =
      ascale::KvRecord::parse(testsupport::read_file(out + ".scaler"));
  const ascale::FittedScaler fitted = ascale::FittedScaler::from_record(rec);
  CHECK(fitted.method == ascale::ScalerMethod::Standardization);
  REQUIRE(fitted.mu.size() == 2);
  CHECK(fitted.mu[0] == 4.5);
  CHECK(fitted.mu[1] == 12.0);
}

TEST_CASE("sim reports arrive on stdout and reproduce byte for byte") {
  const CliResult a = run_cli("sim2 --case 1 --reps 1 --seed 3");
  REQUIRE(a.exit_code == 0);
  CHECK(a.out.find("# Synthetic study 2") == 0);
  CHECK(a.out.find("case 1") != std::string::npos);
  CHECK(a.out.find("## fake") != std::string::npos);
  CHECK(a.out.find("## lost") != std::string::npos);
  CHECK(a.out.find("## prediction") != std::string::npos);

  const CliResult b = run_cli("sim2 --case 1 --reps 1 --seed 3");
  CHECK(a.out == b.out);

  testsupport::TempDir tmp("cli-sim");
  const std::string md = tmp.file("r.md");
  const std::string csv = tmp.file("r.csv");
  const CliResult c = run_cli("sim2 --case 1 --reps 1 --seed 3 --jobs 2" +
                              std::string(" --out-md ") + quoted(md) +
                              " --out-csv " + quoted(csv));
  REQUIRE(c.exit_code == 0);
  CHECK(c.out.empty());  // report went to the file instead
  CHECK(testsupport::read_file(md) == a.out);
  const std::string table = testsupport::read_file(csv);
  CHECK(table.find("metric,scaler,model,mean,sd,reps,note") == 0);
  CHECK(table.find("fake,Stand,Lasso,") != std::string::npos);
}

TEST_CASE("sim1 runs a single repetition end to end") {
  const CliResult res = run_cli("sim1 --reps 1 --seed 5");
  REQUIRE(res.exit_code == 0);
  CHECK(res.out.find("# Synthetic study 1") == 0);
  CHECK(res.out.find("## rpe") != std::string::npos);
  CHECK(res.out.find("| GAS |") != std::string::npos);
}

TEST_CASE("config file applies before explicit flags") {
  testsupport::TempDir tmp("cli-cfg");
  const std::string cfg = tmp.file("run.cfg");
  testsupport::write_file(cfg,
                          "# sim2 settings\n"
                          "base_seed = 3\n"
                          "reps = 1\n"
                          "sim2_case = 2\n");
  const CliResult from_cfg =
      run_cli("sim2 --config " + quoted(cfg) + " --case 1");
  REQUIRE(from_cfg.exit_code == 0);
  CHECK(from_cfg.out.find("case 1") != std::string::npos);  // flag wins
  const CliResult direct = run_cli("sim2 --case 1 --reps 1 --seed 3");
  CHECK(from_cfg.out == direct.out);

  const std::string broken = tmp.file("broken.cfg");
  testsupport::write_file(broken, "repz = 1\n");
  CHECK(run_cli("sim2 --config " + quoted(broken)).exit_code == 1);
}

TEST_CASE("gamma-cv prints the exponent and the score curve") {
  testsupport::TempDir tmp("cli-gcv");
  const std::string in = tmp.file("reg.csv");
  write_regression_csv(in);
  const CliResult res =
      run_cli("gamma-cv --input " + quoted(in) +
              " --target y --method gas --model lasso --grid 0,0.5,1"
              " --folds 4 --seed 2");
  REQUIRE(res.exit_code == 0);
  CHECK(res.out.find("gamma_star = ") == 0);
  CHECK(res.out.find("score 0 = ") != std::string::npos);
  CHECK(res.out.find("score 0.5 = ") != std::string::npos);
  CHECK(res.out.find("score 1 = ") != std::string::npos);

  CHECK(run_cli("gamma-cv --input " + quoted(in) +
                " --target y --method stand --model lasso")
            .exit_code == 2);
}

}  // TEST_SUITE

#endif  // ASCALE_CLI_PATH
