// One PASS/FAIL line per acceptance criterion. Exit status 1 if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <sstream>
#include <string>

#include "haptivis/acoustic_field.hpp"
#include "haptivis/gesture_engine.hpp"
#include "haptivis/haptic_patterns.hpp"
#include "haptivis/scenario_harness.hpp"
#include "haptivis/synth.hpp"
#include "support/ivis_enumeration.hpp"

using namespace haptivis;

namespace {

// tolerances and budgets
constexpr double kCoherenceRelTol = 1e-9;
constexpr int kCoherenceFoci = 100;
constexpr int kRandomPhaseTrials = 1000;
constexpr double kCoherenceBudgetS = 30.0;
constexpr int kLocalizationFoci = 10;
constexpr double kGridStep = 0.001;
constexpr double kLocalizationBudgetS = 60.0;
constexpr int kVariationsPerKind = 20;
constexpr double kRadiusTol = 1e-6;
constexpr int kRadiusSamples = 100;
constexpr double kLatencyBudgetMs = 5.0;
constexpr double kLatencyStreamS = 60.0;

const std::string kRoot = HAPTIVIS_SOURCE_DIR;

int failures = 0;

void report(const char* name, bool ok, const std::string& detail) {
  std::printf("%s %s: %s\n", ok ? "PASS" : "FAIL", name, detail.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(const char* f, auto... args) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

std::vector<GestureEvent> recognize(const Trajectory& tr) {
  Recognizer r;
  return discrete_only(r.run(tr));
}

std::vector<GestureKind> kinds(const std::vector<GestureEvent>& ev) {
  std::vector<GestureKind> out;
  for (const auto& e : ev) out.push_back(e.kind);
  return out;
}

void focusing_coherence() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto a = make_grid_array();
  const InteractionBox box;
  std::mt19937_64 gen(2024);
  std::uniform_real_distribution<double> ux(box.x_min, box.x_max), uy(box.y_min, box.y_max),
      uz(std::max(0.1, box.z_min), std::min(0.4, box.z_max)), uphase(0.0, kTwoPi);
  double worst_rel = 0.0, worst_margin = 1e300;
  bool beats = true;
  PhaseSolution random;
  random.phases.resize(a.size());
  for (int i = 0; i < kCoherenceFoci; ++i) {
    const Vec3 f{ux(gen), uy(gen), uz(gen)};
    const double p = std::abs(pressure_at(a, solve_focus(a, f), f));
    double oracle = 0.0;
    for (std::size_t e = 0; e < a.size(); ++e) oracle += a.amplitudes[e] / distance(f, a.elements[e]);
    worst_rel = std::max(worst_rel, std::abs(p - oracle) / oracle);
    double best_random = 0.0;
    for (int k = 0; k < kRandomPhaseTrials; ++k) {
      for (auto& ph : random.phases) ph = uphase(gen);
      best_random = std::max(best_random, std::abs(pressure_at(a, random, f)));
    }
    if (!(p > best_random)) beats = false;
    worst_margin = std::min(worst_margin, p / best_random);
  }
  const double secs = seconds_since(t0);
  report("focusing coherence", worst_rel <= kCoherenceRelTol && beats && secs < kCoherenceBudgetS,
         fmt("%d foci, worst rel err %.3g (tol %.0e), min focus/random ratio %.2f, %.2f s (budget %.0f s)",
             kCoherenceFoci, worst_rel, kCoherenceRelTol, worst_margin, secs, kCoherenceBudgetS));
}

void focal_localization() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto a = make_grid_array();
  const double half = a.wavelength() / 2;
  std::mt19937_64 gen(7);
  std::uniform_real_distribution<double> uxy(-0.10, 0.10), uz(0.1, 0.4);
  double worst = 0.0;
  for (int i = 0; i < kLocalizationFoci; ++i) {
    const Vec3 f{uxy(gen), uxy(gen), uz(gen)};
    // 1 mm lattice through the focus; snap the centre so the focus is not
    // trivially a lattice point
    const double cx = std::round(f.x / kGridStep) * kGridStep + kGridStep / 3;
    const double cy = std::round(f.y / kGridStep) * kGridStep - kGridStep / 3;
    const auto g = field_grid(a, solve_focus(a, f), square_plane(Axis::Z, f.z, cx, cy, 0.06, kGridStep));
    worst = std::max(worst, distance(g.argmax_point, f));
  }
  const double secs = seconds_since(t0);
  report("focal localization", worst <= half && secs < kLocalizationBudgetS,
         fmt("%d foci, worst argmax offset %.2f mm (limit %.2f mm), %.2f s (budget %.0f s)", kLocalizationFoci,
             worst * 1000, half * 1000, secs, kLocalizationBudgetS));
}

void recognizer_suite() {
  const Vec3 bases[] = {{0, 0, 0.20}, {0.03, -0.04, 0.15}, {-0.03, 0.05, 0.30}, {0.02, 0.06, 0.25}};
  const double factors[] = {1.2, 1.4, 1.6, 1.8, 2.0};
  const Vec3 pinch_disps[] = {{0, 0, 0.05}, {-0.08, 0, 0}, {0.08, 0, 0}, {0, 0.08, 0}, {0, -0.08, 0}};
  std::size_t expected = 0, found = 0, cases = 0;
  std::string first_miss;
  for (auto k : kAllGestureSynthKinds) {
    int variations = 0;
    for (std::size_t b = 0; b < std::size(bases); ++b) {
      for (std::size_t fi = 0; fi < std::size(factors); ++fi) {
        SynthSpec s;
        s.kind = k;
        s.factor = factors[fi];
        s.finger_count = 1 + static_cast<int>((b + fi) % 4);
        if (k == SynthKind::Pinch) s.pinch_disp = pinch_disps[(b + fi) % std::size(pinch_disps)] * (factors[fi] / 1.5);
        const auto want = expected_events(k);
        const auto got = kinds(recognize(synth_gesture(s, 0.0, bases[b])));
        expected += want.size();
        // recall: every expected event appears, in order
        std::size_t j = 0;
        for (auto g : got) {
          if (j < want.size() && g == want[j]) ++j;
        }
        found += j;
        if (j < want.size() && first_miss.empty()) {
          first_miss = fmt(" first miss %s base %zu factor %.1f", to_string(k), b, factors[fi]);
        }
        ++variations;
        ++cases;
      }
    }
    if (variations < kVariationsPerKind) first_miss += " too few variations";
  }
  const double recall = expected ? static_cast<double>(found) / static_cast<double>(expected) : 0.0;

  std::size_t fp_idle = 0, fp_box = 0, idle_runs = 0, box_runs = 0;
  const Vec3 idle_bases[] = {{0, 0, 0.20}, {0.1, 0.1, 0.1}, {-0.12, 0.05, 0.40}, {0.0, -0.1, 0.3}};
  for (std::uint32_t seed = 1; seed <= 25; ++seed) {
    SynthSpec s;
    s.kind = SynthKind::Idle;
    s.seed = seed;
    s.idle_duration = 5.0;
    fp_idle += recognize(synth_gesture(s, 0.0, idle_bases[seed % std::size(idle_bases)])).size();
    ++idle_runs;
  }
  const Vec3 outside[] = {{0, 0, 0.02}, {0, 0, 0.60}, {0.50, 0, 0.25}, {-0.50, 0, 0.25}, {0, 0.30, 0.25}, {0, -0.30, 0.25}};
  for (const auto& base : outside) {
    for (auto k : kAllGestureSynthKinds) {
      for (double f : factors) {
        SynthSpec s;
        s.kind = k;
        s.factor = f;
        fp_box += recognize(synth_gesture(s, 0.0, base)).size();
        ++box_runs;
      }
    }
  }

  // adversarial: gestures of random kinds packed back to back
  std::mt19937 gen(99);
  std::uniform_int_distribution<std::size_t> pick(0, std::size(kAllGestureSynthKinds) - 1);
  std::uniform_real_distribution<double> gap(0.0, 1.0), fac(1.2, 2.0);
  std::size_t debounce_violations = 0, adversarial_events = 0;
  for (int trial = 0; trial < 100; ++trial) {
    Trajectory tr;
    double t = 0.0;
    for (int i = 0; i < 15; ++i) {
      SynthSpec s;
      s.kind = kAllGestureSynthKinds[pick(gen)];
      s.factor = fac(gen);
      s.finger_count = 1 + i % 4;
      append(tr, synth_gesture(s, t, kDefaultHover));
      t = tr.frames.back().t + 0.01 + gap(gen);
    }
    const auto ev = recognize(tr);
    adversarial_events += ev.size();
    for (std::size_t i = 0; i < ev.size(); ++i) {
      for (std::size_t j = 0; j < i; ++j) {
        if (family_of(ev[i].kind) != family_of(ev[j].kind) && ev[i].t - ev[j].t < 2.0 - 1e-9) ++debounce_violations;
      }
    }
  }

  const bool ok = recall == 1.0 && first_miss.empty() && fp_idle == 0 && fp_box == 0 && debounce_violations == 0;
  report("recognizer oracle suite", ok,
         fmt("%zu cases (%d+ per kind), recall %.4f, false positives idle %zu/%zu runs out-of-box %zu/%zu runs, "
             "cross-family events inside 2.0 s: %zu (of %zu events in 100 packed streams)",
             cases, kVariationsPerKind, recall, fp_idle, idle_runs, fp_box, box_runs, debounce_violations,
             adversarial_events) +
             first_miss);
}

void haptic_timing() {
  HandFrame h;
  h.palm_pos = {0.01, -0.02, 0.22};
  const Sensation open{SensationKind::OpenCircle};
  double worst_r = 0.0;
  bool present = true;
  for (int i = 0; i < kRadiusSamples; ++i) {
    const double t = haptics::kOpenCloseDuration * i / (kRadiusSamples - 1);
    const auto s = sample_focus(open, t, h);
    if (!s) {
      present = false;
      continue;
    }
    const Vec3 d = s->pos - h.palm_pos;
    const double want = 0.01 + (0.02 / 0.7) * t;
    worst_r = std::max(worst_r, std::abs(std::hypot(d.x, d.y, d.z) - want));
  }

  const Sensation dt{SensationKind::DoubleTap};
  std::size_t gap_errors = 0;
  for (int i = 0; i <= 7000; ++i) {
    const double t = i / 10000.0;
    const bool inside_gap = t > 0.3 && t < 0.4;
    if (sample_focus(dt, t, h).has_value() == inside_gap) ++gap_errors;
  }
  for (double t : {std::nextafter(0.3, 1.0), std::nextafter(0.4, 0.0)}) {
    if (sample_focus(dt, t, h)) ++gap_errors;
  }
  for (double t : {0.3, 0.4}) {
    if (!sample_focus(dt, t, h)) ++gap_errors;
  }

  const Sensation ct{SensationKind::CircleTap};
  double worst_period = 0.0, min_half = 1e300;
  for (int i = 0; i < 100; ++i) {
    const double t = i * 0.0037;
    const auto a = sample_focus(ct, t, h);
    const auto b = sample_focus(ct, t + 1.0 / 70.0, h);
    const auto c = sample_focus(ct, t + 0.5 / 70.0, h);
    if (!a || !b || !c) continue;
    worst_period = std::max(worst_period, distance(a->pos, b->pos));
    min_half = std::min(min_half, distance(a->pos, c->pos));
  }

  const bool ok = present && worst_r <= kRadiusTol && gap_errors == 0 && worst_period <= 1e-9 && min_half > 0.03;
  report("haptic timing", ok,
         fmt("OpenCircle worst radius err %.3g m at %d t (tol %.0e), DoubleTap gap mismatches %zu, "
             "CircleTap drift after 1/70 s %.3g m, half-period separation %.4f m",
             worst_r, kRadiusSamples, kRadiusTol, gap_errors, worst_period, min_half));
}

void ivis_invariants() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto res = haptivis::testing::enumerate_ivis();
  std::string detail = fmt("%zu states x alphabet = %zu transitions, %zu violations, %.2f s", res.states,
                           res.transitions, res.violations.size(), seconds_since(t0));
  if (!res.violations.empty()) detail += "; first: " + res.violations.front();
  report("IVIS invariant suite", res.violations.empty() && res.transitions > 0, detail);
}

void golden_scenario() {
  const std::string path = kRoot + "/corpus/golden_14_tasks.scn";
  const auto sc = load_scenario(path);
  const Report a = run(sc);
  const Report b = run(load_scenario(path));
  const bool same = format_report(a) == format_report(b);
  const bool snap = format_snapshot(a.final_state) == read_text_file(kRoot + "/corpus/golden_14_tasks.snapshot");
  std::size_t failed_steps = 0;
  for (const auto& s : a.steps) failed_steps += s.ok ? 0 : 1;
  report("golden scenario", a.pass && b.pass && same && snap,
         fmt("%zu steps (%zu failed), %zu events, %zu effects, rerun identical: %s, snapshot match: %s",
             a.steps.size(), failed_steps, a.events.size(), a.effects.size(), same ? "yes" : "no",
             snap ? "yes" : "no"));
}

void latency_budget() {
  // quiet stream: an idle hand for the whole window
  std::ostringstream quiet;
  quiet << "name latency_idle\nseed 5\n0 idle " << kLatencyStreamS << "\n";
  const Report idle = run(parse_scenario(quiet.str(), kRoot + "/corpus"));

  // busy stream: the golden gestures repeated with idle fill between them,
  // so haptics and phase solves run on most frames
  const char* clips[] = {"golden/finger_pose_2.traj", "golden/pinch_up.traj", "golden/swipe_right.traj",
                         "golden/twist.traj",         "golden/tap.traj",      "golden/grab_release.traj",
                         "golden/finger_pose_3.traj", "golden/pinch_west.traj"};
  std::ostringstream busy;
  busy << "name latency_busy\n";
  double t = 0.0;
  for (int i = 0; t + 3.0 <= kLatencyStreamS; ++i, t += 3.0) {
    busy << t << " play " << clips[i % std::size(clips)] << "\n";
    busy << t + 1.2 << " idle 1.78\n";
  }
  const Report load = run(parse_scenario(busy.str(), kRoot + "/corpus"));

  const bool ok = idle.latency.mean_ms < kLatencyBudgetMs && load.latency.mean_ms < kLatencyBudgetMs &&
                  idle.latency.frames >= static_cast<std::size_t>(kLatencyStreamS * 100) &&
                  load.latency.frames >= static_cast<std::size_t>(kLatencyStreamS * 90);
  report("latency budget", ok,
         fmt("idle stream %zu frames mean %.4f ms max %.3f ms; gesture stream %zu frames %zu events mean %.4f ms "
             "max %.3f ms (budget mean < %.0f ms)",
             idle.latency.frames, idle.latency.mean_ms, idle.latency.max_ms, load.latency.frames, load.events.size(),
             load.latency.mean_ms, load.latency.max_ms, kLatencyBudgetMs));
}

}  // namespace

int main() {
  focusing_coherence();
  focal_localization();
  recognizer_suite();
  haptic_timing();
  ivis_invariants();
  golden_scenario();
  latency_budget();
  std::printf("%d failed\n", failures);
  return failures == 0 ? 0 : 1;
}
