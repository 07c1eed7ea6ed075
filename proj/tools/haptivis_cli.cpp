// haptivis_cli: replay scenarios, score recognition, export synthetic
// trajectories, haptic timelines and acoustic field slices.
//
// exit codes: 0 pass, 1 fail, 2 usage or input error

#include <cstdio>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "haptivis/acoustic_field.hpp"
#include "haptivis/bridge_service.hpp"
#include "haptivis/scenario_harness.hpp"
#include "haptivis/synth.hpp"

using namespace haptivis;

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

Vec3 parse_vec(const std::string& s, const char* what) {
  Vec3 v;
  char tail = 0;
  if (std::sscanf(s.c_str(), "%lf,%lf,%lf%c", &v.x, &v.y, &v.z, &tail) != 3) {
    throw UsageError(std::string(what) + " must look like x,y,z (meters)");
  }
  return v;
}

void emit(const std::string& out, const std::string& text) {
  if (out.empty() || out == "-") std::cout << text;
  else write_text_file(out, text);
}

RecognizerConfig load_config(const std::string& path) {
  if (path.empty()) return {};
  try {
    return parse_config(read_text_file(path));
  } catch (const ParseError& e) {
    throw UsageError(path + ": " + e.what());
  }
}

int cmd_run(const std::string& scenario, const std::string& config, const std::string& nav,
            const std::string& report_path, bool timing) {
  RunOptions opt;
  if (!nav.empty()) {
    opt.nav_method = nav_method_from_string(nav);
    if (!opt.nav_method) throw UsageError("--nav-method must be finger or radial");
  }
  const Scenario sc = load_scenario(scenario);
  const Report rep = run(sc, load_config(config), opt);
  const std::string text = format_report(rep, timing);
  if (!report_path.empty()) write_text_file(report_path, text);
  std::printf("%s: %s (%zu steps, %zu events, %zu effects, mean %.3f ms max %.3f ms over %zu frames)\n",
              rep.name.c_str(), rep.pass ? "PASS" : "FAIL", rep.steps.size(), rep.events.size(),
              rep.effects.size(), rep.latency.mean_ms, rep.latency.max_ms, rep.latency.frames);
  for (const auto& s : rep.steps) {
    if (!s.ok) std::printf("  step %zu (line %zu) %s: %s\n", s.index, s.line, s.text.c_str(), s.message.c_str());
  }
  for (const auto& v : rep.violations) std::printf("  violation: %s\n", v.c_str());
  return rep.pass ? 0 : 1;
}

int cmd_score(const std::string& labels_path, const std::string& events_path, double tol, double min_p,
              double min_r) {
  const auto labels = parse_labels(read_text_file(labels_path));
  const auto events = parse_labels(read_text_file(events_path));
  const Score s = score(labels, events, tol);
  std::printf("labels %zu events %zu matched %zu\nprecision %.6f\nrecall %.6f\n", labels.size(), events.size(),
              s.matched, s.precision, s.recall);
  return s.precision >= min_p && s.recall >= min_r ? 0 : 1;
}

int cmd_synth(const std::string& kind, const std::string& out, double factor, int count, double start,
              const std::string& base, const std::string& disp, double duration, unsigned seed) {
  SynthSpec spec;
  try {
    spec.kind = synth_kind_from_string(kind);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  spec.factor = factor;
  spec.finger_count = count;
  if (!disp.empty()) spec.pinch_disp = parse_vec(disp, "--disp");
  spec.idle_duration = duration;
  spec.seed = seed;
  const Vec3 b = base.empty() ? kDefaultHover : parse_vec(base, "--base");
  emit(out, write_trajectory(synth_gesture(spec, start, b)));
  return 0;
}

int cmd_field(const std::string& focus, const std::string& plane, double res_mm, double extent,
              const std::string& out) {
  const Vec3 f = parse_vec(focus, "--focus");
  double offset = 0;
  char axis = 0;
  char tail = 0;
  if (std::sscanf(plane.c_str(), "%c=%lf%c", &axis, &offset, &tail) != 2 || (axis != 'x' && axis != 'y' && axis != 'z')) {
    throw UsageError("--plane must look like z=0.2 (axis x, y or z)");
  }
  if (!(res_mm > 0)) throw UsageError("--res must be positive (millimeters)");
  const TransducerArray array = make_grid_array();
  Plane p;
  switch (axis) {
    case 'x': p = square_plane(Axis::X, offset, f.y, f.z, extent, res_mm / 1000.0); break;
    case 'y': p = square_plane(Axis::Y, offset, f.x, f.z, extent, res_mm / 1000.0); break;
    default: p = square_plane(Axis::Z, offset, f.x, f.y, extent, res_mm / 1000.0); break;
  }
  const FieldGrid g = field_grid(array, solve_focus(array, f), p);
  emit(out, field_grid_csv(g));
  std::fprintf(stderr, "argmax %.6f,%.6f,%.6f |p| %.6g (%zux%zu)\n", g.argmax_point.x, g.argmax_point.y,
               g.argmax_point.z, g.at(g.argmax_row, g.argmax_col), g.u.size(), g.v.size());
  return 0;
}

int cmd_haptics(const std::string& name, const std::string& out, double level, double duration, double rate,
                const std::string& envelope, const std::string& hand) {
  Sensation s;
  try {
    s = sensation_from_name(name, level);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  if (envelope == "AM") s.envelope = EnvelopeMode::AM200Hz;
  else if (envelope != "STM") throw UsageError("--envelope must be AM or STM");
  if (!(rate >= 1000.0)) throw UsageError("--rate must be at least 1000 Hz");
  Trajectory traj;
  HandFrame f;
  if (!hand.empty()) f.palm_pos = parse_vec(hand, "--hand");
  traj.frames.push_back(f);
  emit(out, write_timeline(render_sensation(s, 0.0, traj, rate, duration)));
  return 0;
}

// Client messages, one JSON object per line, replayed through a fresh
// session. Output: "> msg" then "< reply" lines.
int cmd_transcript(const std::string& in, const std::string& out) {
  emit(out, transcript(read_text_file(in)));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"haptivis: gesture, haptics and infotainment pipeline tools"};
  app.require_subcommand(0, 1);
  bool print_config = false;
  app.add_flag("--print-config", print_config, "print the default recognizer config and exit");

  std::string scenario, config, nav, report;
  bool timing = false;
  auto* run_cmd = app.add_subcommand("run", "replay a scenario file");
  run_cmd->add_option("scenario", scenario)->required();
  run_cmd->add_option("--config", config, "recognizer config (key = value)");
  run_cmd->add_option("--nav-method", nav, "finger|radial");
  run_cmd->add_option("--report", report, "write the full report here");
  run_cmd->add_flag("--timing", timing, "include latency lines in the report");

  std::string labels, events;
  double tol = 0.25, min_p = 1.0, min_r = 1.0;
  auto* score_cmd = app.add_subcommand("score", "precision/recall of events against labels");
  score_cmd->add_option("labels", labels)->required();
  score_cmd->add_option("events", events)->required();
  score_cmd->add_option("--tol", tol, "matching tolerance, seconds")->capture_default_str();
  score_cmd->add_option("--min-precision", min_p)->capture_default_str();
  score_cmd->add_option("--min-recall", min_r)->capture_default_str();

  std::string kind, out, base, disp;
  double factor = 1.5, start = 0.0, idle_dur = 1.0;
  int count = 1;
  unsigned seed = 1;
  auto* synth_cmd = app.add_subcommand("synth", "write a canonical gesture trajectory");
  synth_cmd->add_option("kind", kind, "swipe-left|swipe-right|twist|tap|pinch|grab-release|finger-pose|idle")
      ->required();
  synth_cmd->add_option("--out", out, "trajectory file (- for stdout)")->required();
  synth_cmd->add_option("--factor", factor, "magnitude relative to thresholds")->capture_default_str();
  synth_cmd->add_option("--count", count, "finger-pose count 1..4")->capture_default_str();
  synth_cmd->add_option("--start", start, "first timestamp, seconds")->capture_default_str();
  synth_cmd->add_option("--base", base, "hover point x,y,z");
  synth_cmd->add_option("--disp", disp, "pinch displacement x,y,z");
  synth_cmd->add_option("--duration", idle_dur, "idle length, seconds")->capture_default_str();
  synth_cmd->add_option("--seed", seed, "idle jitter seed")->capture_default_str();

  std::string focus, plane = "z=0.2", field_out;
  double res = 1.0, extent = 0.1;
  auto* field_cmd = app.add_subcommand("field", "export |p| over a plane slice as CSV");
  field_cmd->add_option("--focus", focus, "x,y,z")->required();
  field_cmd->add_option("--plane", plane, "axis=offset, e.g. z=0.2")->capture_default_str();
  field_cmd->add_option("--res", res, "sample spacing, mm")->capture_default_str();
  field_cmd->add_option("--extent", extent, "side of the square slice, m")->capture_default_str();
  field_cmd->add_option("--out", field_out, "csv file (- for stdout)")->required();

  std::string sensation, hap_out, envelope = "STM", hand;
  double level = 0.5, duration = 1.0, rate = haptics::kDefaultSampleRate;
  auto* hap_cmd = app.add_subcommand("haptics", "write a focal-point timeline");
  hap_cmd->add_option("sensation", sensation,
                      "circle-tap|double-tap|scan-line-left|scan-line-right|finger-scan|open-circle|close-circle|"
                      "value-circle|anchor-circle")
      ->required();
  hap_cmd->add_option("--out", hap_out, "timeline file (- for stdout)")->required();
  hap_cmd->add_option("--level", level, "value-circle level 0..1")->capture_default_str();
  hap_cmd->add_option("--duration", duration, "length for continuous sensations, s")->capture_default_str();
  hap_cmd->add_option("--rate", rate, "samples per second")->capture_default_str();
  hap_cmd->add_option("--envelope", envelope, "AM|STM")->capture_default_str();
  hap_cmd->add_option("--hand", hand, "palm position x,y,z");

  std::string tin, tout;
  auto* tr_cmd = app.add_subcommand("transcript", "replay client messages through a bridge session");
  tr_cmd->add_option("input", tin, "one JSON client message per line")->required();
  tr_cmd->add_option("--out", tout, "transcript file (- for stdout)")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (print_config) {
      std::cout << format_config(RecognizerConfig{});
      return 0;
    }
    if (*run_cmd) return cmd_run(scenario, config, nav, report, timing);
    if (*score_cmd) return cmd_score(labels, events, tol, min_p, min_r);
    if (*synth_cmd) return cmd_synth(kind, out, factor, count, start, base, disp, idle_dur, seed);
    if (*field_cmd) return cmd_field(focus, plane, res, extent, field_out);
    if (*hap_cmd) return cmd_haptics(sensation, hap_out, level, duration, rate, envelope, hand);
    if (*tr_cmd) return cmd_transcript(tin, tout);
    std::cerr << app.help();
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
}
