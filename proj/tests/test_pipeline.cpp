#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "support.hpp"

using namespace qhd;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("qhd_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(QHD_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST(Presets, ExpandToFixedParameterSets) {
  const ShockParams a = test::fig1a();
  EXPECT_EQ(a.gamma, 1.0);
  EXPECT_EQ(a.mu, 8.0);
  EXPECT_EQ(a.k, 1.0);
  EXPECT_EQ(a.s, 1.0);
  EXPECT_EQ(a.p_minus, 8.61);
  EXPECT_EQ(a.p_plus, 5.69);
  const ShockParams b = test::fig1b();
  EXPECT_EQ(b.gamma, 1.5);
  EXPECT_EQ(b.mu, 0.25);
  EXPECT_EQ(b.k, std::sqrt(2.0));
  EXPECT_EQ(b.p_minus, 4.63);
  EXPECT_EQ(b.p_plus, 3.5);
  const ShockParams c = test::sec53();
  EXPECT_EQ(c.A, 1.0);
  EXPECT_EQ(c.B, 1.1);
  EXPECT_EQ(c.k, std::sqrt(2.0));
  EXPECT_THROW(preset("fig9"), Error);
  EXPECT_EQ(preset_names().size(), 3u);
}

TEST(Config, JsonRoundTripKeepsFullPrecision) {
  for (const std::string& name : preset_names()) {
    const ShockParams p = preset(name).params;
    const io::json j = io::json::parse(io::params_to_json(p).dump());
    io::json states = {{"gamma", j["gamma"]}, {"mu", j["mu"]}, {"k", j["k"]}, {"s", j["s"]},
                       {"p_minus", j["p_minus"]}, {"p_plus", j["p_plus"]}};
    const ShockParams q = io::params_from_json(states);
    EXPECT_NEAR(q.A, p.A, 1e-15 * std::abs(p.A)) << name;
    EXPECT_NEAR(q.B, p.B, 1e-15 * std::abs(p.B)) << name;
    EXPECT_EQ(q.p_minus, p.p_minus);
    EXPECT_EQ(q.p_plus, p.p_plus);
  }
}

TEST(Config, RejectsAmbiguousOrIncompleteInput) {
  const io::json base = {{"gamma", 1.5}, {"mu", 1.0}, {"k", 1.0}, {"s", 1.0}};
  io::json both = base;
  both["p_minus"] = 2.0;
  both["A"] = 1.0;
  io::json neither = base;
  io::json bad = base;
  bad["A"] = "one";
  bad["B"] = 1.0;
  io::json missing = {{"gamma", 1.5}, {"A", 1.0}, {"B", 1.1}};
  for (const io::json& j : {both, neither, bad, missing}) {
    try {
      io::params_from_json(j);
      FAIL() << j.dump();
    } catch (const Error& e) {
      EXPECT_TRUE(e.is_config()) << j.dump();
    }
  }
}

TEST(Output, NumbersUseSeventeenDigits) {
  EXPECT_EQ(io::num(0.1), "0.10000000000000001");
  EXPECT_EQ(std::stod(io::num(std::numbers::pi)), std::numbers::pi);
  EXPECT_EQ(io::csv({"a", "b"}, {{1.0, 2.0}, {0.5, -0.25}}), "a,b\n1,0.5\n2,-0.25\n");
}

TEST(Output, ProfileCsvLayout) {
  const ProfileSolution& s = test::preset_profile("sec53");
  const std::string text = io::profile_csv(s);
  std::istringstream in(text);
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "y,P,Q,J");
  std::size_t rows = 0;
  while (std::getline(in, line)) ++rows;
  EXPECT_EQ(rows, s.size());
}

TEST(Cli, ProfileRunsAndIsDeterministic) {
  const fs::path a = scratch("det_a"), b = scratch("det_b");
  ASSERT_EQ(run_cli("profile --preset fig1b --out " + a.string()), 0);
  ASSERT_EQ(run_cli("profile --preset fig1b --out " + b.string()), 0);
  const std::string csv = slurp(a / "fig1b_profile.csv");
  EXPECT_FALSE(csv.empty());
  EXPECT_EQ(csv, slurp(b / "fig1b_profile.csv"));
  const io::json meta = io::read_json(a / "fig1b_profile.json");
  EXPECT_TRUE(meta.contains("existence"));
}

TEST(Cli, OutputDirectoryFromEnvironment) {
  const fs::path d = scratch("env");
  const std::string cmd = "QHD_OUTPUT_DIR=" + d.string() + " " + std::string(QHD_CLI_PATH) +
                          " profile --preset sec53 > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  ASSERT_TRUE(WIFEXITED(status));
  EXPECT_EQ(WEXITSTATUS(status), 0);
  EXPECT_TRUE(fs::exists(d / "sec53_profile.csv"));
}

TEST(Cli, ConfigErrorsExitWithCodeTwo) {
  const fs::path d = scratch("cfg");
  EXPECT_EQ(run_cli("profile --gamma 0.5 --out " + d.string()), 2);
  EXPECT_EQ(run_cli("stability --preset sec53 --nodes 32 --out " + d.string()), 2);
  EXPECT_EQ(run_cli("profile --preset nope --out " + d.string()), 2);
  EXPECT_EQ(run_cli("profile --no-such-flag"), 2);
  EXPECT_EQ(run_cli("profile --config /nonexistent/file.json --out " + d.string()), 2);
  EXPECT_EQ(run_cli("stability --preset sec53 --contour hexagon --out " + d.string()), 2);
}

TEST(Cli, ConfigFileWithOverrides) {
  const fs::path d = scratch("file");
  const fs::path cfg = d / "custom.json";
  io::write_json(cfg, {{"gamma", 1.5}, {"mu", 1.0}, {"k", std::sqrt(2.0)}, {"s", 1.0}, {"A", 1.0}, {"B", 1.1}});
  ASSERT_EQ(run_cli("profile --config " + cfg.string() + " --out " + d.string()), 0);
  const io::json meta = io::read_json(d / "custom_profile.json");
  EXPECT_NEAR(meta["params"]["B"].get<double>(), 1.1, 1e-15);
}

TEST(Cli, SmallContourStabilityVerdict) {
  const fs::path d = scratch("small");
  ASSERT_EQ(run_cli("stability --preset sec53 --contour small --nodes 200 --out " + d.string()), 0);
  const io::json v = io::read_json(d / "sec53_small_verdict.json");
  EXPECT_TRUE(v["pass"].get<bool>());
  EXPECT_GT(v["min_abs_E"].get<double>(), 0.0);
  EXPECT_TRUE(fs::exists(d / "sec53_small_trace.csv"));
}
