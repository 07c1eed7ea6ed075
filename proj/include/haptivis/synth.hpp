#pragma once

// Canonical synthetic gesture trajectories. Each generator is tuned against
// the recognizer thresholds so that, at the default config, the output yields
// exactly one gesture of the requested kind. These serve as the recognizer's
// test oracle and as scenario corpus material.

#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "haptivis/gesture_engine.hpp"
#include "haptivis/hand_stream.hpp"

namespace haptivis {

enum class SynthKind { SwipeLeft, SwipeRight, Twist, Tap, Pinch, GrabRelease, FingerPose, Idle };

inline constexpr SynthKind kAllGestureSynthKinds[] = {SynthKind::SwipeLeft, SynthKind::SwipeRight,
                                                      SynthKind::Twist,     SynthKind::Tap,
                                                      SynthKind::Pinch,     SynthKind::GrabRelease,
                                                      SynthKind::FingerPose};

inline const char* to_string(SynthKind k) {
  switch (k) {
    case SynthKind::SwipeLeft: return "swipe-left";
    case SynthKind::SwipeRight: return "swipe-right";
    case SynthKind::Twist: return "twist";
    case SynthKind::Tap: return "tap";
    case SynthKind::Pinch: return "pinch";
    case SynthKind::GrabRelease: return "grab-release";
    case SynthKind::FingerPose: return "finger-pose";
    case SynthKind::Idle: return "idle";
  }
  return "?";
}

inline SynthKind synth_kind_from_string(std::string_view s) {
  for (auto k : {SynthKind::SwipeLeft, SynthKind::SwipeRight, SynthKind::Twist, SynthKind::Tap, SynthKind::Pinch,
                 SynthKind::GrabRelease, SynthKind::FingerPose, SynthKind::Idle}) {
    if (s == to_string(k)) return k;
  }
  throw std::invalid_argument("unknown gesture kind '" + std::string(s) + "'");
}

struct SynthSpec {
  SynthKind kind = SynthKind::Idle;
  double factor = 1.5;                ///< motion magnitude relative to the recognizer thresholds
  int finger_count = 1;               ///< FingerPose
  std::optional<Vec3> pinch_disp;     ///< Pinch; default is straight up by factor x deadzone
  double idle_duration = 1.0;         ///< Idle, seconds
  std::uint32_t seed = 1;             ///< Idle jitter
  double jitter = 0.0004;             ///< Idle, per-axis half-width in meters
};

/// Discrete events a synth gesture must produce, in order.
inline std::vector<GestureKind> expected_events(SynthKind k) {
  switch (k) {
    case SynthKind::SwipeLeft:
    case SynthKind::SwipeRight: return {GestureKind::Swipe};
    case SynthKind::Twist: return {GestureKind::Twist};
    case SynthKind::Tap: return {GestureKind::Tap};
    case SynthKind::Pinch: return {GestureKind::PinchEngage, GestureKind::PinchRelease};
    case SynthKind::GrabRelease: return {GestureKind::GrabRelease};
    case SynthKind::FingerPose: return {GestureKind::FingerPose};
    case SynthKind::Idle: return {};
  }
  return {};
}

namespace detail {

inline constexpr double kSynthRate = 100.0;
inline constexpr double kLeadIn = 0.1;
inline constexpr double kLeadOut = 0.2;

// Smooth 0 -> 1 stroke with zero end velocities (raised-cosine speed).
inline double stroke(double u) {
  u = std::clamp(u, 0.0, 1.0);
  return u - std::sin(kTwoPi * u) / kTwoPi;
}

// 0 -> 1 -> 0 bump.
inline double bump(double u) {
  u = std::clamp(u, 0.0, 1.0);
  return 0.5 * (1.0 - std::cos(kTwoPi * u));
}

inline double ramp(double u) { return std::clamp(u, 0.0, 1.0); }

inline HandFrame open_hand(double t, const Vec3& pos) {
  HandFrame f;
  f.t = t;
  f.palm_pos = pos;
  return f;
}

// Frames at 100 Hz over [start, start + lead-in + active + lead-out]; `shape`
// edits a hovering open hand given u in [0,1] across the active span (u < 0
// and u > 1 in the lead-in/out).
template <typename Shape>
Trajectory generate(double start, const Vec3& base, double active, Shape&& shape) {
  Trajectory traj;
  traj.nominal_rate = kSynthRate;
  const double total = kLeadIn + active + kLeadOut;
  const auto n = static_cast<std::size_t>(std::llround(total * kSynthRate)) + 1;
  traj.frames.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double local = static_cast<double>(i) / kSynthRate;
    HandFrame f = open_hand(start + local, base);
    shape(f, (local - kLeadIn) / active);
    traj.frames.push_back(f);
  }
  return traj;
}

}  // namespace detail

inline Trajectory synth_gesture(const SynthSpec& spec, double start, const Vec3& base,
                                const RecognizerConfig& cfg = {}) {
  using namespace detail;
  const double f = spec.factor;
  if (!(f > 0.0)) throw std::invalid_argument("synth: factor must be positive");

  switch (spec.kind) {
    case SynthKind::SwipeLeft:
    case SynthKind::SwipeRight: {
      const double sign = spec.kind == SynthKind::SwipeRight ? 1.0 : -1.0;
      const double disp = f * cfg.swipe_min_disp;
      // Duration keeps the stroke inside the window with a peak speed of
      // 2 * disp / duration above f * swipe_min_speed.
      const double duration = std::min(0.6 * cfg.swipe_window, 2.0 * disp / (f * cfg.swipe_min_speed) * 0.9);
      return generate(start, base, duration, [&](HandFrame& fr, double u) {
        fr.palm_pos.x = base.x + sign * disp * (stroke(u) - 0.5);
      });
    }
    case SynthKind::Tap: {
      // z dip of depth A over T: downward acc 2*A*pi^2/T^2 and speed A*pi/T
      // peak a quarter period apart; A is sized so both thresholds are
      // exceeded together by about factor f.
      const double period = 0.2;
      const double depth = f * std::max(0.04 * cfg.tap_min_acc / 10.0, 0.04 * cfg.tap_min_speed / 0.3);
      return generate(start, base, period, [&](HandFrame& fr, double u) {
        fr.palm_pos.z = base.z - depth * bump(u);
      });
    }
    case SynthKind::Twist: {
      const double duration = std::min(1.2 / f, 0.8 * cfg.twist_window);
      return generate(start, base, duration, [&](HandFrame& fr, double u) {
        const double angle = kPi * bump(u);
        fr.palm_normal = {std::sin(angle), 0.0, -std::cos(angle)};
      });
    }
    case SynthKind::Pinch: {
      const Vec3 disp = spec.pinch_disp.value_or(Vec3{0.0, 0.0, f * cfg.radial_deadzone});
      // 0.1 s close, 0.4 s move, 0.1 s hold, 0.1 s open
      const double duration = 0.7;
      return generate(start, base, duration, [&](HandFrame& fr, double u) {
        const double s = u * duration;
        if (s < 0.0 || s > duration) {
          fr.pinch_strength = 0.0;
        } else if (s < 0.1) {
          fr.pinch_strength = ramp(s / 0.1);
        } else if (s < 0.6) {
          fr.pinch_strength = 1.0;
        } else {
          fr.pinch_strength = ramp((duration - s) / 0.1);
        }
        fr.palm_pos = base + disp * stroke((s - 0.1) / 0.4);
        fr.fingers_extended = {true, false, true, true, true};
      });
    }
    case SynthKind::GrabRelease: {
      const double duration = cfg.grab_release_window / f;
      return generate(start, base, duration, [&](HandFrame& fr, double u) {
        double g = 0.0;
        if (u >= 0.0 && u <= 1.0) {
          if (u < 0.25) g = u / 0.25;
          else if (u < 0.6) g = 1.0;
          else if (u < 0.85) g = (0.85 - u) / 0.25;
        }
        fr.grab_strength = std::clamp(g, 0.0, 1.0);
        if (fr.grab_strength > 0.5) fr.fingers_extended = {false, false, false, false, false};
      });
    }
    case SynthKind::FingerPose: {
      if (spec.finger_count < 1 || spec.finger_count > 4) {
        throw std::invalid_argument("synth: finger_count must be 1..4");
      }
      const double hold = f * cfg.pose_dwell;
      return generate(start, base, hold, [&](HandFrame& fr, double u) {
        if (u < 0.0 || u >= 1.0) return;
        fr.fingers_extended = {false, false, false, false, false};
        for (int i = 1; i <= spec.finger_count; ++i) fr.fingers_extended[static_cast<std::size_t>(i)] = true;
      });
    }
    case SynthKind::Idle: {
      std::mt19937 gen(spec.seed);
      // raw engine output keeps the stream identical across standard libraries
      auto uniform = [&gen]() { return static_cast<double>(gen()) / 4294967296.0 * 2.0 - 1.0; };
      Trajectory traj;
      const auto n = static_cast<std::size_t>(std::llround(spec.idle_duration * kSynthRate)) + 1;
      for (std::size_t i = 0; i < n; ++i) {
        Vec3 p = base;
        p.x += spec.jitter * uniform();
        p.y += spec.jitter * uniform();
        p.z += spec.jitter * uniform();
        traj.frames.push_back(open_hand(start + static_cast<double>(i) / kSynthRate, p));
      }
      return traj;
    }
  }
  throw std::invalid_argument("synth: unknown kind");
}

/// Default hover point: the anchor height, centered over the array.
inline constexpr Vec3 kDefaultHover{0.0, 0.0, 0.20};

}  // namespace haptivis
