#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "sharpfront/cli.hpp"
#include "sharpfront/config.hpp"

using namespace sharpfront;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& name) {
  const fs::path d = fs::temp_directory_path() / ("sharpfront_test_" + name);
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

io::json read_json(const fs::path& p) { return io::json::parse(slurp(p)); }

int run_text(const std::string& text, const fs::path& out, std::ostream& log) {
  cli::RunContext ctx;
  ctx.out_dir = out.string();
  ctx.log = &log;
  const fs::path cfg = out / "run.ini";
  std::ofstream(cfg) << text;
  return cli::run_file(cfg.string(), ctx);
}

const char* kFisherSpeed = "[run]\ncommand = speed\n[model]\nm = 2\np = 2\nr = 0\n[kinetics]\nkind = fisher\n";

}  // namespace

TEST(Config, ParsesDefaultsAndHashIsStable) {
  const auto a = parse_config_text(kFisherSpeed);
  const auto b = parse_config_text(std::string(kFisherSpeed) + "[solver]\ntol = 1e-4\n");
  EXPECT_EQ(a.command, Command::Speed);
  EXPECT_EQ(a.hash(), b.hash());
  EXPECT_NE(a.hash(), parse_config_text(std::string(kFisherSpeed) + "[solver]\ntol = 1e-5\n").hash());
}

TEST(Config, UnknownKeysRejected) {
  EXPECT_THROW(parse_config_text(std::string(kFisherSpeed) + "[solver]\ntolerance = 1\n"), ConfigError);
  EXPECT_THROW(parse_config_text(std::string(kFisherSpeed) + "[extra]\nx = 1\n"), ConfigError);
  EXPECT_THROW(parse_config_text("[run]\ncommand = speed\n[kinetics]\nkind = fisher\np_tilde = 2\n"), ConfigError);
}

TEST(Config, RegimeViolationNamesConstraint) {
  try {
    parse_config_text("[run]\ncommand = speed\n[model]\nm = 1\np = 1.5\n");
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("m(p-1)"), std::string::npos);
  }
}

TEST(Config, BadValuesRejected) {
  EXPECT_THROW(parse_config_text("[run]\ncommand = fly\n"), ConfigError);
  EXPECT_THROW(parse_config_text("[run]\ncommand = speed\n[model]\nm = two\n"), ConfigError);
  EXPECT_THROW(parse_config_text("[run]\ncommand = sweep\n"), ConfigError);
  EXPECT_THROW(parse_config_text("[run]\ncommand = speed\n[kinetics]\nkind = nicholson_linear\np_tilde = 0.5\na = 1\nq_tilde = 1\n"),
               ConfigError);
  EXPECT_THROW(parse_config_text("[run]\ncommand = speed\n", "profile"), ConfigError);
  EXPECT_EQ(parse_config_text("[model]\nm = 2\n", "profile").command, Command::Profile);
}

TEST(Cli, SpeedWritesManifestWithCStar) {
  const auto dir = scratch_dir("speed");
  std::ostringstream log;
  ASSERT_EQ(run_text(kFisherSpeed, dir, log), 0) << log.str();
  const auto manifest = read_json(dir / "manifest.json");
  EXPECT_EQ(manifest["exit_code"], 0);
  EXPECT_EQ(manifest["config_hash"].get<std::string>().size(), 64u);
  for (const auto& e : manifest["outputs"]) EXPECT_TRUE(fs::exists(dir / e["path"].get<std::string>()));
  const auto speed = read_json(dir / "speed.json");
  EXPECT_NEAR(speed["c_star"].get<double>(), 1.0, 1e-3);
  EXPECT_TRUE(fs::exists(dir / "profile.csv"));
  EXPECT_TRUE(fs::exists(dir / "phase_curve.csv"));
  for (const auto& f : fs::directory_iterator(dir)) EXPECT_NE(f.path().extension(), ".tmp");
}

TEST(Cli, IdenticalConfigGivesIdenticalManifest) {
  const auto a = scratch_dir("det_a"), b = scratch_dir("det_b");
  std::ostringstream log;
  ASSERT_EQ(run_text(kFisherSpeed, a, log), 0);
  ASSERT_EQ(run_text(kFisherSpeed, b, log), 0);
  EXPECT_EQ(slurp(a / "manifest.json"), slurp(b / "manifest.json"));
}

TEST(Cli, FloatsUse17SignificantDigits) {
  const auto dir = scratch_dir("digits");
  std::ostringstream log;
  ASSERT_EQ(run_text(kFisherSpeed, dir, log), 0);
  const auto text = slurp(dir / "speed.json");
  const auto speed = read_json(dir / "speed.json");
  EXPECT_NE(text.find(io::fmt17(speed["c_star"].get<double>())), std::string::npos);
  EXPECT_EQ(io::fmt17(0.1), "0.10000000000000001");
}

TEST(Cli, SweepOverDelayIsStrictlyDecreasing) {
  const auto dir = scratch_dir("sweep");
  std::ostringstream log;
  const std::string cfg =
      "[run]\ncommand = sweep\n[model]\nm = 2\np = 2\n[kinetics]\nkind = nicholson_linear\np_tilde = 2\n"
      "delta = 1\na = 1\nq_tilde = 1\n[solver]\ntol = 1e-3\n[sweep]\nparameter = r\nvalues = 0, 0.25, 0.5, 1\n";
  cli::RunContext ctx;
  ctx.out_dir = dir.string();
  ctx.jobs = 2;
  ctx.log = &log;
  ASSERT_EQ(cli::run(parse_config_text(cfg), ctx), 0) << log.str();
  const auto sweep = read_json(dir / "sweep.json");
  EXPECT_TRUE(sweep["strictly_decreasing"].get<bool>());
  EXPECT_EQ(sweep["cells"].size(), 4u);
  std::istringstream csv(slurp(dir / "sweep.csv"));
  std::string line;
  std::getline(csv, line);
  EXPECT_EQ(line, "r,c_star,c_lo,c_hi,iterations");
}

TEST(Cli, ConfigErrorExitsOne) {
  const auto dir = scratch_dir("bad");
  std::ostringstream log;
  EXPECT_EQ(run_text("[run]\ncommand = speed\n[model]\nm = 0.5\np = 2\n", dir, log), 1);
  EXPECT_NE(log.str().find("m(p-1)"), std::string::npos);
}

TEST(Cli, ComputationErrorExitsTwoWithRecord) {
  const auto dir = scratch_dir("fail");
  std::ostringstream log;
  // domain too short: the front hits the right boundary
  const std::string cfg = std::string(kFisherSpeed) +
                          "[simulate]\nx_min = -2\nx_max = 10\nn_cells = 120\nt_end = 40\n";
  const std::string text = "[run]\ncommand = simulate\n" + cfg.substr(cfg.find("[model]"));
  EXPECT_EQ(run_text(text, dir, log), 2);
  const auto err = read_json(dir / "error.json");
  EXPECT_EQ(err["error"], "BoundaryContamination");
  EXPECT_EQ(read_json(dir / "manifest.json")["exit_code"], 2);
}

TEST(Cli, ValidateSubsetPasses) {
  const auto dir = scratch_dir("validate");
  std::ostringstream log;
  EXPECT_EQ(run_text("[run]\ncommand = validate\n[validate]\nsimulator = false\ncriteria = 1, 2, 5, 6\n", dir, log), 0);
  const auto v = read_json(dir / "validate.json");
  EXPECT_TRUE(v["all_passed"].get<bool>());
  EXPECT_EQ(v["criteria"].size(), 4u);
}

TEST(Cli, ValidateTightenedTolerance) {
  const auto dir = scratch_dir("validate_tight");
  std::ostringstream log;
  EXPECT_EQ(run_text("[run]\ncommand = validate\n[validate]\nsimulator = false\ntol_scale = 0.1\ncriteria = 1, 2, 6\n",
                     dir, log),
            0);
}

#ifdef SHARPFRONT_CLI_PATH
TEST(CliBinary, ExitCodes) {
  const auto dir = scratch_dir("binary");
  std::ofstream(dir / "bad.ini") << "[run]\ncommand = speed\n[model]\nm = 1\np = 2\n";
  std::ofstream(dir / "good.ini") << "[model]\nm = 2\np = 2\n";
  const std::string exe = SHARPFRONT_CLI_PATH;
  auto code = [](const std::string& cmd) {
    const int st = std::system((cmd + " 2>/dev/null").c_str());
    return WIFEXITED(st) ? WEXITSTATUS(st) : -1;
  };
  EXPECT_EQ(code(exe + " --config " + (dir / "bad.ini").string() + " --out " + (dir / "o1").string()), 1);
  EXPECT_EQ(code(exe + " speed --config " + (dir / "good.ini").string() + " --out " + (dir / "o2").string()), 0);
  EXPECT_TRUE(fs::exists(dir / "o2" / "manifest.json"));
  EXPECT_EQ(code(exe + " --out " + (dir / "o3").string()), 1);
}
#endif
