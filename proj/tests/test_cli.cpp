#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>

#include "haptivis/acoustic_field.hpp"
#include "haptivis/gesture_engine.hpp"
#include "haptivis/haptic_patterns.hpp"
#include "haptivis/scenario_harness.hpp"

using namespace haptivis;
namespace fs = std::filesystem;

namespace {

const std::string kRoot = HAPTIVIS_SOURCE_DIR;
const std::string kCli = HAPTIVIS_CLI;

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / ("haptivis_cli_" + std::to_string(::getpid()) + "_" +
                                        ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  // Runs the CLI with stdout and stderr captured; returns the exit code.
  int cli(const std::string& args) {
    const std::string cmd = "'" + kCli + "' " + args + " >'" + path("stdout") + "' 2>'" + path("stderr") + "'";
    const int rc = std::system(cmd.c_str());
    return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
  }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }
  std::string out() const { return read_text_file(path("stdout")); }
  std::string err() const { return read_text_file(path("stderr")); }

  fs::path dir_;
};

}  // namespace

TEST_F(Cli, PrintConfig) {
  EXPECT_EQ(cli("--print-config"), 0);
  EXPECT_EQ(parse_config(out()), RecognizerConfig{});
}

TEST_F(Cli, GoldenRunPasses) {
  EXPECT_EQ(cli("run '" + kRoot + "/corpus/golden_14_tasks.scn' --report '" + path("report") + "'"), 0);
  EXPECT_NE(out().find("golden_14_tasks: PASS"), std::string::npos) << out();
  EXPECT_EQ(read_text_file(path("report")), format_report(run(load_scenario(kRoot + "/corpus/golden_14_tasks.scn"))));
}

TEST_F(Cli, FailingRunExitsOne) {
  EXPECT_EQ(cli("run '" + kRoot + "/tests/data/temperature_ceiling.scn'"), 1);
  EXPECT_NE(out().find("step 6 (line 8) expect temperature=27"), std::string::npos) << out();
}

TEST_F(Cli, NavMethodAndConfig) {
  write_text_file(path("c.cfg"), format_config(RecognizerConfig{}));
  EXPECT_EQ(cli("run '" + kRoot + "/corpus/golden_14_tasks.scn' --config '" + path("c.cfg") + "' --nav-method finger"), 0);
  EXPECT_EQ(cli("run '" + kRoot + "/corpus/golden_14_tasks.scn' --nav-method radial"), 1);
  EXPECT_EQ(cli("run '" + kRoot + "/corpus/golden_14_tasks.scn' --nav-method sideways"), 2);
  write_text_file(path("bad.cfg"), "swipe_speed = fast\n");
  EXPECT_EQ(cli("run '" + kRoot + "/corpus/golden_14_tasks.scn' --config '" + path("bad.cfg") + "'"), 2);
}

TEST_F(Cli, UsageErrors) {
  EXPECT_EQ(cli(""), 2);
  EXPECT_EQ(cli("frobnicate"), 2);
  EXPECT_EQ(cli("run"), 2);
  EXPECT_EQ(cli("synth tap"), 2);
  EXPECT_EQ(cli("synth hop --out -"), 2);
  EXPECT_EQ(cli("field --focus 1,2 --out -"), 2);
  EXPECT_EQ(cli("field --focus 0,0,0.2 --plane w=1 --out -"), 2);
  EXPECT_EQ(cli("haptics wiggle --out -"), 2);
  EXPECT_EQ(cli("score --tol -1 a b"), 2);
  EXPECT_EQ(cli("--help"), 0);
}

TEST_F(Cli, InputErrors) {
  EXPECT_EQ(cli("run '" + path("missing.scn") + "'"), 2);
  write_text_file(path("bad.scn"), "1.0 expect temp=3\n");
  EXPECT_EQ(cli("run '" + path("bad.scn") + "'"), 2);
  EXPECT_NE(err().find("malformed predicate"), std::string::npos) << err();
}

TEST_F(Cli, SynthMatchesLibrary) {
  EXPECT_EQ(cli("synth pinch --disp -0.10,0,0 --out '" + path("w.traj") + "'"), 0);
  SynthSpec spec;
  spec.kind = SynthKind::Pinch;
  spec.pinch_disp = Vec3{-0.10, 0, 0};
  EXPECT_EQ(read_text_file(path("w.traj")), write_trajectory(synth_gesture(spec, 0.0, kDefaultHover)));
  // the checked-in corpus file is exactly this output
  EXPECT_EQ(read_text_file(path("w.traj")), read_text_file(kRoot + "/corpus/golden/pinch_west.traj"));
  EXPECT_EQ(cli("synth finger-pose --count 3 --out -"), 0);
  const auto fp = parse_trajectory(out());
  EXPECT_EQ(fp.frames[fp.size() / 2].fingers_extended, (std::array<bool, 5>{false, true, true, true, false}));
}

TEST_F(Cli, ScoreExitCodes) {
  write_text_file(path("labels"), "1.0 Tap\n2.0 Swipe\n");
  write_text_file(path("events"), "1.1 Tap\n2.0 Swipe\n3.0 Tap\n");
  EXPECT_EQ(cli("score '" + path("labels") + "' '" + path("labels") + "'"), 0);
  EXPECT_EQ(cli("score '" + path("labels") + "' '" + path("events") + "'"), 1);
  EXPECT_NE(out().find("precision 0.666667"), std::string::npos) << out();
  EXPECT_EQ(cli("score '" + path("labels") + "' '" + path("events") + "' --min-precision 0.6"), 0);
  EXPECT_EQ(cli("score '" + path("labels") + "' '" + path("events") + "' --tol 0.05 --min-precision 0"), 1);
  write_text_file(path("junk"), "1.0 Jump\n");
  EXPECT_EQ(cli("score '" + path("labels") + "' '" + path("junk") + "'"), 2);
}

TEST_F(Cli, FieldCsv) {
  EXPECT_EQ(cli("field --focus 0,0,0.2 --plane z=0.2 --res 5 --extent 0.1 --out '" + path("f.csv") + "'"), 0);
  const auto csv = read_text_file(path("f.csv"));
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 22);
  EXPECT_NE(err().find("argmax 0.000000,0.000000,0.200000"), std::string::npos) << err();
}

TEST_F(Cli, HapticsTimeline) {
  EXPECT_EQ(cli("haptics double-tap --rate 1000 --out '" + path("d.tl") + "'"), 0);
  Trajectory hand;
  hand.frames.push_back(HandFrame{});
  const auto want = render_sensation(sensation_from_name("double-tap", 0.5), 0.0, hand, 1000.0, 1.0);
  ASSERT_FALSE(want.empty());
  EXPECT_EQ(read_text_file(path("d.tl")), write_timeline(want));
  EXPECT_EQ(cli("haptics value-circle --level 0.5 --envelope AM --duration 0.1 --out -"), 0);
  EXPECT_NE(out().find("AM"), std::string::npos);
  EXPECT_EQ(cli("haptics value-circle --envelope XX --out -"), 2);
}

TEST_F(Cli, Transcript) {
  const std::string in = kRoot + "/tests/golden/wire/trigger.jsonl";
  EXPECT_EQ(cli("transcript '" + in + "' --out -"), 0);
  EXPECT_EQ(out(), read_text_file(kRoot + "/tests/golden/wire/trigger.transcript"));
}
