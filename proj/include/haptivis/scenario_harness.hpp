#pragma once

// Scenario replay, expectation checking, recognition scoring and latency
// measurement on top of Pipeline.
//
// Scenario file: one step per line, `at action args`; `#` comments.
//   name <text>                 scenario name (no time)
//   seed <n>                    seed for idle jitter (no time)
//   <at> play <path>            trajectory file, re-timed to start at `at`
//   <at> idle <seconds>         jittered hover at the anchor point
//   <at> inject <stimulus>      IncomingCall | RouteSuggestion | CallerHangup
//   <at> nav finger|radial      switch navigation method
//   <at> expect k=v [k>=v ...]  predicates over snapshot fields
// Steps at time T run after every frame with t <= T has been processed.

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <limits>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "haptivis/pipeline.hpp"
#include "haptivis/synth.hpp"

namespace haptivis {

class ScenarioError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class CompareOp { Eq, Ne, Lt, Le, Gt, Ge };

struct Predicate {
  std::string key;
  CompareOp op = CompareOp::Eq;
  std::string value;
};

struct PlayStep {
  std::string path;
};
struct IdleStep {
  double duration = 1.0;
};
struct InjectStep {
  Stimulus stimulus;
};
struct NavStep {
  NavMethod method;
};
struct ExpectStep {
  std::vector<Predicate> predicates;
};

using StepAction = std::variant<PlayStep, IdleStep, InjectStep, NavStep, ExpectStep>;

struct ScenarioStep {
  double at = 0.0;
  StepAction action;
  std::size_t line = 0;
  std::string text;  ///< source text after the time field
};

struct Scenario {
  std::string name = "unnamed";
  std::uint32_t seed = 1;
  std::vector<ScenarioStep> steps;
  std::filesystem::path base_dir = ".";  ///< play paths resolve against this
};

namespace detail {

inline const char* op_text(CompareOp op) {
  switch (op) {
    case CompareOp::Eq: return "=";
    case CompareOp::Ne: return "!=";
    case CompareOp::Lt: return "<";
    case CompareOp::Le: return "<=";
    case CompareOp::Gt: return ">";
    case CompareOp::Ge: return ">=";
  }
  return "=";
}

inline bool is_snapshot_key(std::string_view key) { return snapshot_value(IvisState{}, key).has_value(); }

inline Predicate parse_predicate(std::string_view tok, std::size_t line) {
  // longest operators first
  static constexpr std::pair<std::string_view, CompareOp> ops[] = {
      {"!=", CompareOp::Ne}, {"<=", CompareOp::Le}, {">=", CompareOp::Ge},
      {"=", CompareOp::Eq},  {"<", CompareOp::Lt},  {">", CompareOp::Gt}};
  for (const auto& [text, op] : ops) {
    const auto at = tok.find(text);
    if (at == std::string_view::npos || at == 0) continue;
    Predicate p{std::string(tok.substr(0, at)), op, std::string(tok.substr(at + text.size()))};
    if (!is_snapshot_key(p.key)) throw ParseError(line, "malformed predicate: unknown state field '" + p.key + "'");
    if (p.value.empty()) throw ParseError(line, "malformed predicate: missing value in '" + std::string(tok) + "'");
    return p;
  }
  throw ParseError(line, "malformed predicate '" + std::string(tok) + "'");
}

inline bool parse_number(const std::string& s, double& out) {
  char* end = nullptr;
  out = std::strtod(s.c_str(), &end);
  return end != s.c_str() && *end == '\0';
}

}  // namespace detail

inline Scenario parse_scenario(std::string_view text, std::filesystem::path base_dir = ".") {
  Scenario sc;
  sc.base_dir = std::move(base_dir);
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  double last_at = 0.0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto tok = detail::split_ws(line);
    if (tok.empty() || tok[0].front() == '#') continue;
    if (tok[0] == "name") {
      sc.name.clear();
      for (std::size_t i = 1; i < tok.size(); ++i) sc.name += (i > 1 ? " " : "") + std::string(tok[i]);
      continue;
    }
    if (tok[0] == "seed") {
      if (tok.size() != 2) throw ParseError(line_no, "seed takes one integer");
      sc.seed = static_cast<std::uint32_t>(detail::parse_double(tok[1], line_no));
      continue;
    }
    if (tok.size() < 2) throw ParseError(line_no, "expected `at action args`");
    ScenarioStep step;
    step.line = line_no;
    step.at = detail::parse_double(tok[0], line_no);
    if (step.at < last_at) throw ParseError(line_no, "step times must be non-decreasing");
    last_at = step.at;
    const auto action = tok[1];
    auto need = [&](std::size_t n) {
      if (tok.size() != n) throw ParseError(line_no, std::string(action) + " takes " + std::to_string(n - 2) + " argument(s)");
    };
    if (action == "play") {
      need(3);
      step.action = PlayStep{std::string(tok[2])};
    } else if (action == "idle") {
      need(3);
      step.action = IdleStep{detail::parse_double(tok[2], line_no)};
    } else if (action == "inject") {
      need(3);
      auto s = stimulus_from_string(tok[2]);
      if (!s) throw ParseError(line_no, "unknown stimulus '" + std::string(tok[2]) + "'");
      step.action = InjectStep{*s};
    } else if (action == "nav") {
      need(3);
      auto m = nav_method_from_string(tok[2]);
      if (!m) throw ParseError(line_no, "nav method must be finger or radial");
      step.action = NavStep{*m};
    } else if (action == "expect") {
      if (tok.size() < 3) throw ParseError(line_no, "malformed predicate: expect needs at least one predicate");
      ExpectStep e;
      for (std::size_t i = 2; i < tok.size(); ++i) e.predicates.push_back(detail::parse_predicate(tok[i], line_no));
      step.action = std::move(e);
    } else {
      throw ParseError(line_no, "unknown action '" + std::string(action) + "'");
    }
    for (std::size_t i = 1; i < tok.size(); ++i) step.text += (i > 1 ? " " : "") + std::string(tok[i]);
    sc.steps.push_back(std::move(step));
  }
  return sc;
}

inline Scenario load_scenario(const std::string& path) {
  try {
    return parse_scenario(read_text_file(path), std::filesystem::path(path).parent_path());
  } catch (const ParseError& e) {
    throw ScenarioError(path + ": " + e.what());
  }
}

/// Evaluates one predicate; on failure `why` names the observed value.
inline bool evaluate(const Predicate& p, const IvisState& s, std::string& why) {
  const auto actual = snapshot_value(s, p.key);
  if (!actual) {
    why = "unknown field " + p.key;
    return false;
  }
  bool ok = false;
  double a = 0, b = 0;
  const bool numeric = detail::parse_number(*actual, a) && detail::parse_number(p.value, b);
  switch (p.op) {
    case CompareOp::Eq: ok = numeric ? a == b : *actual == p.value; break;
    case CompareOp::Ne: ok = numeric ? a != b : *actual != p.value; break;
    case CompareOp::Lt: ok = numeric && a < b; break;
    case CompareOp::Le: ok = numeric && a <= b; break;
    case CompareOp::Gt: ok = numeric && a > b; break;
    case CompareOp::Ge: ok = numeric && a >= b; break;
  }
  if (!ok) why = p.key + " is " + *actual + ", expected " + detail::op_text(p.op) + p.value;
  return ok;
}

struct StepOutcome {
  std::size_t index = 0;
  std::size_t line = 0;
  double at = 0.0;
  std::string text;
  bool ok = true;
  std::string message;
};

struct LatencyStats {
  std::size_t frames = 0;
  double mean_ms = 0.0;
  double max_ms = 0.0;
};

struct Report {
  std::string name;
  bool pass = true;
  std::vector<StepOutcome> steps;
  std::vector<GestureEvent> events;  ///< discrete events
  std::vector<TimedEffect> effects;
  std::vector<std::string> violations;
  IvisState final_state;
  LatencyStats latency;  ///< wall clock; excluded from deterministic output
};

inline std::string format_event(const GestureEvent& e) {
  char buf[160];
  int n = std::snprintf(buf, sizeof buf, "%.3f %s", e.t, to_string(e.kind));
  std::string s(buf, static_cast<std::size_t>(n));
  switch (e.kind) {
    case GestureKind::Swipe: s += std::string(" direction=") + to_string(e.direction); break;
    case GestureKind::FingerPose: s += " count=" + std::to_string(e.finger_count); break;
    case GestureKind::PinchMove:
      std::snprintf(buf, sizeof buf, " dx=%.4f dy=%.4f dz=%.4f", e.delta.x, e.delta.y, e.delta.z);
      s += buf;
      break;
    default: break;
  }
  std::snprintf(buf, sizeof buf, " pos=%.4f,%.4f,%.4f", e.pos.x, e.pos.y, e.pos.z);
  return s + buf;
}

/// Report text. Timing lines are emitted only with `include_timing`, so two
/// runs of the same scenario compare equal byte for byte without them.
inline std::string format_report(const Report& r, bool include_timing = false) {
  std::ostringstream out;
  out << "scenario " << r.name << '\n';
  out << "result " << (r.pass ? "PASS" : "FAIL") << '\n';
  char buf[64];
  for (const auto& s : r.steps) {
    std::snprintf(buf, sizeof buf, "%.3f", s.at);
    out << "step " << s.index << " line " << s.line << " at " << buf << ' ' << s.text << " : "
        << (s.ok ? "ok" : "FAIL") << (s.message.empty() ? "" : " (" + s.message + ")") << '\n';
  }
  for (const auto& v : r.violations) out << "violation " << v << '\n';
  for (const auto& e : r.events) out << "event " << format_event(e) << '\n';
  for (const auto& e : r.effects) out << "effect " << format_effect(e.t, e.effect) << '\n';
  out << "final\n" << format_snapshot(r.final_state);
  if (include_timing) {
    std::snprintf(buf, sizeof buf, "%.4f", r.latency.mean_ms);
    out << "latency_frames " << r.latency.frames << '\n' << "latency_mean_ms " << buf << '\n';
    std::snprintf(buf, sizeof buf, "%.4f", r.latency.max_ms);
    out << "latency_max_ms " << buf << '\n';
  }
  return out.str();
}

struct RunOptions {
  std::optional<NavMethod> nav_method;  ///< initial navigation method override
  IvisState initial{};
};

namespace detail {

struct Segment {
  Trajectory traj;
  KinematicTrack kin;
};

inline Segment load_segment(const Scenario& sc, const ScenarioStep& step, std::size_t idle_index) {
  Trajectory traj;
  if (const auto* play = std::get_if<PlayStep>(&step.action)) {
    std::filesystem::path p = play->path;
    if (p.is_relative()) p = sc.base_dir / p;
    traj = load_trajectory(p.string());
    if (traj.empty()) throw ScenarioError("line " + std::to_string(step.line) + ": empty trajectory " + p.string());
    traj = shifted(std::move(traj), step.at - traj.frames.front().t);
  } else if (const auto* idle = std::get_if<IdleStep>(&step.action)) {
    SynthSpec spec;
    spec.kind = SynthKind::Idle;
    spec.idle_duration = idle->duration;
    spec.seed = sc.seed + static_cast<std::uint32_t>(idle_index);
    traj = synth_gesture(spec, step.at, kDefaultHover);
  }
  Segment seg{std::move(traj), {}};
  seg.kin = derive_kinematics(seg.traj);
  return seg;
}

}  // namespace detail

/// Replays a scenario through a fresh pipeline. Deterministic in
/// (scenario, config, options) except for the latency figures.
inline Report run(const Scenario& sc, const RecognizerConfig& cfg = {}, const RunOptions& opt = {}) {
  IvisState initial = opt.initial;
  if (opt.nav_method) initial.nav_method = *opt.nav_method;
  Pipeline pipe(cfg, initial);
  Report rep;
  rep.name = sc.name;

  // Gather every frame up front so file errors surface before replay.
  struct FrameRef {
    const HandFrame* frame;
    const Kinematics* kin;
  };
  std::vector<detail::Segment> segments;
  std::size_t idle_index = 0;
  for (const auto& step : sc.steps) {
    if (std::holds_alternative<PlayStep>(step.action) || std::holds_alternative<IdleStep>(step.action)) {
      segments.push_back(detail::load_segment(sc, step, idle_index));
      if (std::holds_alternative<IdleStep>(step.action)) ++idle_index;
      if (segments.size() > 1) {
        const auto& prev = segments[segments.size() - 2].traj.frames.back();
        if (!(segments.back().traj.frames.front().t > prev.t)) {
          throw ScenarioError("line " + std::to_string(step.line) + ": trajectory overlaps the previous one");
        }
      }
    }
  }
  std::vector<FrameRef> frames;
  for (const auto& seg : segments) {
    for (std::size_t i = 0; i < seg.traj.size(); ++i) frames.push_back({&seg.traj.frames[i], &seg.kin.samples[i]});
  }

  double total_ms = 0.0;
  auto collect = [&rep](const FrameOutput& out) {
    for (const auto& e : out.events) {
      if (is_discrete(e.kind)) rep.events.push_back(e);
    }
    rep.effects.insert(rep.effects.end(), out.effects.begin(), out.effects.end());
  };
  std::size_t next_frame = 0;
  auto advance_to = [&](double t) {
    while (next_frame < frames.size() && frames[next_frame].frame->t <= t) {
      const auto t0 = std::chrono::steady_clock::now();
      const FrameOutput out = pipe.process(*frames[next_frame].frame, *frames[next_frame].kin);
      const double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
      total_ms += ms;
      rep.latency.max_ms = std::max(rep.latency.max_ms, ms);
      ++rep.latency.frames;
      collect(out);
      ++next_frame;
    }
  };

  for (std::size_t i = 0; i < sc.steps.size(); ++i) {
    const auto& step = sc.steps[i];
    advance_to(step.at);
    StepOutcome outcome{i + 1, step.line, step.at, step.text, true, {}};
    if (const auto* inj = std::get_if<InjectStep>(&step.action)) {
      collect(pipe.inject(inj->stimulus, step.at));
    } else if (const auto* nav = std::get_if<NavStep>(&step.action)) {
      collect(pipe.set_nav_method(nav->method, step.at));
    } else if (const auto* exp = std::get_if<ExpectStep>(&step.action)) {
      for (const auto& p : exp->predicates) {
        std::string why;
        if (!evaluate(p, pipe.state(), why)) {
          outcome.ok = false;
          outcome.message += (outcome.message.empty() ? "" : "; ") + why;
        }
      }
    }
    if (!outcome.ok) rep.pass = false;
    rep.steps.push_back(std::move(outcome));
  }
  advance_to(std::numeric_limits<double>::infinity());

  rep.violations = pipe.violations();
  if (!rep.violations.empty()) rep.pass = false;
  rep.final_state = pipe.state();
  if (rep.latency.frames > 0) rep.latency.mean_ms = total_ms / static_cast<double>(rep.latency.frames);
  return rep;
}

// ---------------------------------------------------------------------------
// Recognition scoring

struct Label {
  double t = 0.0;
  GestureKind kind = GestureKind::Tap;
};

struct Score {
  double precision = 1.0;
  double recall = 1.0;
  std::size_t matched = 0;
};

/// Greedy one-to-one matching of same-kind pairs within +-tolerance: per kind,
/// each label in time order takes the earliest free event still in reach.
/// On a line with one window width this is a maximum matching, so the count
/// does not depend on which list is called labels. Empty denominators score 1.0.
inline Score score(const std::vector<Label>& labels, const std::vector<Label>& events, double tolerance = 0.25) {
  if (tolerance < 0.0) throw std::invalid_argument("score: negative tolerance");
  auto sorted_times = [](const std::vector<Label>& in, GestureKind k) {
    std::vector<double> out;
    for (const auto& l : in) {
      if (l.kind == k) out.push_back(l.t);
    }
    std::sort(out.begin(), out.end());
    return out;
  };
  Score s;
  for (auto k : {GestureKind::Swipe, GestureKind::Twist, GestureKind::Tap, GestureKind::PinchEngage,
                 GestureKind::PinchMove, GestureKind::PinchRelease, GestureKind::GrabRelease, GestureKind::FingerPose}) {
    const auto lt = sorted_times(labels, k);
    const auto et = sorted_times(events, k);
    std::size_t j = 0;
    for (double t : lt) {
      while (j < et.size() && et[j] < t - tolerance) ++j;
      if (j < et.size() && et[j] <= t + tolerance) {
        ++s.matched;
        ++j;
      }
    }
  }
  s.precision = events.empty() ? 1.0 : double(s.matched) / double(events.size());
  s.recall = labels.empty() ? 1.0 : double(s.matched) / double(labels.size());
  return s;
}

inline std::vector<Label> to_labels(const std::vector<GestureEvent>& events) {
  std::vector<Label> out;
  for (const auto& e : events) out.push_back({e.t, e.kind});
  return out;
}

/// Reads `t kind [...]` lines (labels files and event logs alike). Lines
/// starting with "event " (report format) are accepted too.
inline std::vector<Label> parse_labels(std::string_view text) {
  std::vector<Label> out;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    auto tok = detail::split_ws(line);
    if (tok.empty() || tok[0].front() == '#') continue;
    if (tok[0] == "event") tok.erase(tok.begin());
    if (tok.size() < 2) throw ParseError(line_no, "expected `t kind`");
    Label l;
    l.t = detail::parse_double(tok[0], line_no);
    auto k = gesture_kind_from_string(tok[1]);
    if (!k) throw ParseError(line_no, "unknown gesture kind '" + std::string(tok[1]) + "'");
    l.kind = *k;
    if (!out.empty() && l.t < out.back().t) throw ParseError(line_no, "labels must be time-ordered");
    out.push_back(l);
  }
  return out;
}

}  // namespace haptivis
