#pragma once

// Stateful gesture recognizer: HandFrame stream in, GestureEvents out.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <deque>
#include <limits>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "haptivis/geometry.hpp"
#include "haptivis/hand_stream.hpp"

namespace haptivis {

/// Axis-aligned gesture acceptance volume (closed intervals).
struct InteractionBox {
  double x_min = -0.15, x_max = 0.15;
  double y_min = -0.15, y_max = 0.15;
  double z_min = 0.05, z_max = 0.45;

  double volume() const { return (x_max - x_min) * (y_max - y_min) * (z_max - z_min); }
  Vec3 center() const { return {(x_min + x_max) / 2, (y_min + y_max) / 2, (z_min + z_max) / 2}; }

  Vec3 clamp(const Vec3& p) const {
    return {std::clamp(p.x, x_min, x_max), std::clamp(p.y, y_min, y_max), std::clamp(p.z, z_min, z_max)};
  }

  friend bool operator==(const InteractionBox&, const InteractionBox&) = default;
};

inline bool contains(const InteractionBox& box, const Vec3& p) {
  return p.x >= box.x_min && p.x <= box.x_max && p.y >= box.y_min && p.y <= box.y_max && p.z >= box.z_min &&
         p.z <= box.z_max;
}

struct RecognizerConfig {
  double swipe_min_disp = 0.10;       ///< m, lateral displacement inside the window
  double swipe_min_speed = 0.6;       ///< m/s, peak lateral speed during the stroke
  double swipe_window = 0.5;          ///< s
  double tap_min_acc = 10.0;          ///< m/s^2, downward
  double tap_min_speed = 0.3;         ///< m/s, downward
  double twist_window = 1.5;          ///< s, down -> up -> down
  double twist_normal_thresh = 0.7;   ///< |palm_normal . z| needed on both sides
  double pinch_on = 0.8;
  double pinch_off = 0.5;
  double grab_on = 0.9;
  double grab_off = 0.3;
  double grab_release_window = 1.0;   ///< s, from grab onset to release
  double pose_dwell = 0.5;            ///< s a finger count must be held
  double radial_threshold = 0.08;     ///< m, horizontal travel needed to select
  double radial_deadzone = 0.04;      ///< m
  double debounce = 2.0;              ///< s, cross-kind refractory window
  InteractionBox box{};

  friend bool operator==(const RecognizerConfig&, const RecognizerConfig&) = default;
};

namespace detail {

template <typename F>
void for_each_config_field(RecognizerConfig& c, F&& f) {
  f("swipe_min_disp", c.swipe_min_disp);
  f("swipe_min_speed", c.swipe_min_speed);
  f("swipe_window", c.swipe_window);
  f("tap_min_acc", c.tap_min_acc);
  f("tap_min_speed", c.tap_min_speed);
  f("twist_window", c.twist_window);
  f("twist_normal_thresh", c.twist_normal_thresh);
  f("pinch_on", c.pinch_on);
  f("pinch_off", c.pinch_off);
  f("grab_on", c.grab_on);
  f("grab_off", c.grab_off);
  f("grab_release_window", c.grab_release_window);
  f("pose_dwell", c.pose_dwell);
  f("radial_threshold", c.radial_threshold);
  f("radial_deadzone", c.radial_deadzone);
  f("debounce", c.debounce);
  f("box_x_min", c.box.x_min);
  f("box_x_max", c.box.x_max);
  f("box_y_min", c.box.y_min);
  f("box_y_max", c.box.y_max);
  f("box_z_min", c.box.z_min);
  f("box_z_max", c.box.z_max);
}

}  // namespace detail

/// Empty when valid, else the first violated invariant.
inline std::string validate(const RecognizerConfig& c) {
  RecognizerConfig copy = c;
  std::string why;
  detail::for_each_config_field(copy, [&](const char* key, double& v) {
    if (!why.empty()) return;
    if (!std::isfinite(v)) why = std::string(key) + " is not finite";
    else if (std::string_view(key).substr(0, 4) != "box_" && !(v > 0.0)) why = std::string(key) + " must be positive";
  });
  if (!why.empty()) return why;
  if (!(c.pinch_off < c.pinch_on)) return "pinch_off must be below pinch_on";
  if (!(c.grab_off < c.grab_on)) return "grab_off must be below grab_on";
  if (!(c.radial_deadzone < c.radial_threshold)) return "radial_deadzone must be below radial_threshold";
  if (!(c.box.x_min < c.box.x_max && c.box.y_min < c.box.y_max && c.box.z_min < c.box.z_max)) {
    return "interaction box needs min < max on every axis";
  }
  return {};
}

/// Flat `key = value` text; `#` comments and blank lines ignored. Keys not
/// present keep their defaults.
inline RecognizerConfig parse_config(std::string_view text) {
  RecognizerConfig cfg;
  std::map<std::string, double*> fields;
  detail::for_each_config_field(cfg, [&](const char* key, double& v) { fields[key] = &v; });
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const auto eq = line.find('=');
    auto trim = [](std::string s) {
      const auto b = s.find_first_not_of(" \t\r");
      if (b == std::string::npos) return std::string{};
      const auto e = s.find_last_not_of(" \t\r");
      return s.substr(b, e - b + 1);
    };
    if (trim(line).empty()) continue;
    if (eq == std::string::npos) throw ParseError(line_no, "expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    auto it = fields.find(key);
    if (it == fields.end()) throw ParseError(line_no, "unknown config key '" + key + "'");
    *it->second = detail::parse_double(value, line_no);
  }
  if (auto why = validate(cfg); !why.empty()) throw ParseError(line_no, why);
  return cfg;
}

inline std::string format_config(const RecognizerConfig& c) {
  RecognizerConfig copy = c;
  std::string out;
  detail::for_each_config_field(copy, [&](const char* key, double& v) {
    out += key;
    out += " = ";
    char buf[32];
    // shortest text that reads back to the same double
    const auto r = std::to_chars(buf, buf + sizeof buf, v);
    out.append(buf, r.ptr);
    out += '\n';
  });
  return out;
}

// ---------------------------------------------------------------------------

enum class GestureKind { Swipe, Twist, Tap, PinchEngage, PinchMove, PinchRelease, GrabRelease, FingerPose };

enum class SwipeDirection { Left, Right };

inline const char* to_string(GestureKind k) {
  switch (k) {
    case GestureKind::Swipe: return "Swipe";
    case GestureKind::Twist: return "Twist";
    case GestureKind::Tap: return "Tap";
    case GestureKind::PinchEngage: return "PinchEngage";
    case GestureKind::PinchMove: return "PinchMove";
    case GestureKind::PinchRelease: return "PinchRelease";
    case GestureKind::GrabRelease: return "GrabRelease";
    case GestureKind::FingerPose: return "FingerPose";
  }
  return "?";
}

inline std::optional<GestureKind> gesture_kind_from_string(std::string_view s) {
  for (auto k : {GestureKind::Swipe, GestureKind::Twist, GestureKind::Tap, GestureKind::PinchEngage,
                 GestureKind::PinchMove, GestureKind::PinchRelease, GestureKind::GrabRelease,
                 GestureKind::FingerPose}) {
    if (s == to_string(k)) return k;
  }
  return std::nullopt;
}

inline const char* to_string(SwipeDirection d) { return d == SwipeDirection::Left ? "left" : "right"; }

/// Debounce families. The pinch cycle (engage, move, release) is one family.
enum class GestureFamily { Swipe, Twist, Tap, Pinch, GrabRelease, FingerPose };

inline GestureFamily family_of(GestureKind k) {
  switch (k) {
    case GestureKind::Swipe: return GestureFamily::Swipe;
    case GestureKind::Twist: return GestureFamily::Twist;
    case GestureKind::Tap: return GestureFamily::Tap;
    case GestureKind::PinchEngage:
    case GestureKind::PinchMove:
    case GestureKind::PinchRelease: return GestureFamily::Pinch;
    case GestureKind::GrabRelease: return GestureFamily::GrabRelease;
    case GestureKind::FingerPose: return GestureFamily::FingerPose;
  }
  return GestureFamily::Tap;
}

inline bool is_discrete(GestureKind k) { return k != GestureKind::PinchMove; }

struct GestureEvent {
  double t = 0.0;
  GestureKind kind = GestureKind::Tap;
  SwipeDirection direction = SwipeDirection::Right;  ///< Swipe only
  Vec3 delta{};                                      ///< PinchMove: palm displacement since engage
  int finger_count = 0;                              ///< FingerPose only, 1..4
  Vec3 pos{};                                        ///< palm position at trigger

  friend bool operator==(const GestureEvent&, const GestureEvent&) = default;
};

/// Non-thumb extended-finger count; none when the thumb is extended or no
/// finger is extended.
inline std::optional<int> classify_finger_count(const HandFrame& frame) {
  if (!frame.hand_present || frame.extended(Finger::Thumb)) return std::nullopt;
  int n = 0;
  for (auto f : {Finger::Index, Finger::Middle, Finger::Ring, Finger::Little}) n += frame.extended(f) ? 1 : 0;
  if (n == 0) return std::nullopt;
  return n;
}

enum class RadialDirection { None, W, N, S, E };

inline const char* to_string(RadialDirection d) {
  switch (d) {
    case RadialDirection::None: return "none";
    case RadialDirection::W: return "W";
    case RadialDirection::N: return "N";
    case RadialDirection::S: return "S";
    case RadialDirection::E: return "E";
  }
  return "none";
}

/// Dominant horizontal axis of a pinch displacement; ties go to x.
inline RadialDirection radial_direction(const Vec3& disp, double deadzone = 0.04) {
  if (std::hypot(disp.x, disp.y) < deadzone) return RadialDirection::None;
  if (std::abs(disp.x) >= std::abs(disp.y)) return disp.x < 0.0 ? RadialDirection::W : RadialDirection::E;
  return disp.y > 0.0 ? RadialDirection::N : RadialDirection::S;
}

class OutOfOrderFrame : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// One recognizer per input stream. step() is a deterministic fold over
/// frames; copying a Recognizer copies its full state.
class Recognizer {
 public:
  explicit Recognizer(RecognizerConfig cfg = {}) : cfg_(cfg) {
    if (auto why = validate(cfg_); !why.empty()) throw std::invalid_argument("RecognizerConfig: " + why);
  }

  const RecognizerConfig& config() const { return cfg_; }
  bool pinch_engaged() const { return pinch_.engaged; }

  std::vector<GestureEvent> step(const HandFrame& frame, const Kinematics& kin) {
    if (last_t_ && !(frame.t > *last_t_)) {
      throw OutOfOrderFrame("frame at t=" + std::to_string(frame.t) + " does not follow t=" +
                            std::to_string(*last_t_));
    }
    last_t_ = frame.t;
    std::vector<GestureEvent> out;

    if (!frame.hand_present) {
      if (pinch_.engaged) {
        out.push_back(make(frame.t, GestureKind::PinchRelease, cfg_.box.clamp(last_pos_)));
        note_discrete(GestureFamily::Pinch, frame.t);
      }
      reset_detectors();
      return out;
    }
    last_pos_ = frame.palm_pos;
    const bool inside = contains(cfg_.box, frame.palm_pos);

    step_pinch(frame, inside, out);
    step_grab(frame, inside, out);
    step_tap(frame, kin, inside, out);
    step_swipe(frame, kin, inside, out);
    step_twist(frame, inside, out);
    step_pose(frame, inside, out);
    return out;
  }

  /// Convenience: kinematics + fold over a whole trajectory.
  std::vector<GestureEvent> run(const Trajectory& traj) {
    std::vector<GestureEvent> out;
    if (traj.empty()) return out;
    const auto kin = derive_kinematics(traj);
    for (std::size_t i = 0; i < traj.size(); ++i) {
      auto ev = step(traj.frames[i], kin[i]);
      out.insert(out.end(), ev.begin(), ev.end());
    }
    return out;
  }

 private:
  struct SwipeSample {
    double t;
    double x;
    double vx;
  };

  struct PinchState {
    bool engaged = false;
    bool latched = false;  // crossed pinch_on and not yet back under pinch_off
    Vec3 engage_pos{};
  };

  static GestureEvent make(double t, GestureKind k, const Vec3& pos) {
    GestureEvent e;
    e.t = t;
    e.kind = k;
    e.pos = pos;
    return e;
  }

  bool suppressed(GestureFamily fam, double t) const {
    if (pinch_.engaged && fam != GestureFamily::Pinch) return true;
    return last_discrete_ && last_family_ != fam && t - *last_discrete_ < cfg_.debounce;
  }

  void note_discrete(GestureFamily fam, double t) {
    last_discrete_ = t;
    last_family_ = fam;
  }

  // Gate + debounce + emit for a discrete trigger; the trigger is consumed
  // either way.
  void fire(GestureEvent ev, bool inside, std::vector<GestureEvent>& out) {
    const auto fam = family_of(ev.kind);
    if (!inside || suppressed(fam, ev.t)) return;
    note_discrete(fam, ev.t);
    out.push_back(ev);
  }

  void step_pinch(const HandFrame& f, bool inside, std::vector<GestureEvent>& out) {
    const double s = f.pinch_strength;
    if (pinch_.engaged) {
      if (s < cfg_.pinch_off || !inside) {
        out.push_back(make(f.t, GestureKind::PinchRelease, cfg_.box.clamp(f.palm_pos)));
        note_discrete(GestureFamily::Pinch, f.t);
        pinch_.engaged = false;
        pinch_.latched = s >= cfg_.pinch_off;
        return;
      }
      auto ev = make(f.t, GestureKind::PinchMove, f.palm_pos);
      ev.delta = f.palm_pos - pinch_.engage_pos;
      out.push_back(ev);
      return;
    }
    if (pinch_.latched) {
      if (s < cfg_.pinch_off) pinch_.latched = false;
      return;
    }
    if (s >= cfg_.pinch_on) {
      pinch_.latched = true;
      if (!inside || suppressed(GestureFamily::Pinch, f.t)) return;
      pinch_.engaged = true;
      pinch_.engage_pos = f.palm_pos;
      note_discrete(GestureFamily::Pinch, f.t);
      out.push_back(make(f.t, GestureKind::PinchEngage, f.palm_pos));
    }
  }

  void step_grab(const HandFrame& f, bool inside, std::vector<GestureEvent>& out) {
    const double g = f.grab_strength;
    if (!grab_onset_) {
      if (g >= cfg_.grab_on && !grab_spent_) grab_onset_ = f.t;
      if (grab_spent_ && g < cfg_.grab_off) grab_spent_ = false;
      return;
    }
    if (g < cfg_.grab_off) {
      if (f.t - *grab_onset_ <= cfg_.grab_release_window) {
        fire(make(f.t, GestureKind::GrabRelease, f.palm_pos), inside, out);
      }
      grab_onset_.reset();
    } else if (f.t - *grab_onset_ > cfg_.grab_release_window) {
      // held too long: wait for the hand to open before arming again
      grab_onset_.reset();
      grab_spent_ = true;
    }
  }

  void step_tap(const HandFrame& f, const Kinematics& k, bool inside, std::vector<GestureEvent>& out) {
    const double down_speed = -k.vel.z;
    const double down_acc = -k.acc.z;
    if (!tap_armed_) {
      if (down_speed < 0.5 * cfg_.tap_min_speed) tap_armed_ = true;
      return;
    }
    if (down_acc >= cfg_.tap_min_acc && down_speed >= cfg_.tap_min_speed) {
      tap_armed_ = false;
      fire(make(f.t, GestureKind::Tap, f.palm_pos), inside, out);
    }
  }

  void step_swipe(const HandFrame& f, const Kinematics& k, bool inside, std::vector<GestureEvent>& out) {
    if (!swipe_armed_) {
      if (std::abs(k.vel.x) < 0.5 * cfg_.swipe_min_speed) swipe_armed_ = true;
      swipe_hist_.clear();
      return;
    }
    swipe_hist_.push_back({f.t, f.palm_pos.x, k.vel.x});
    while (!swipe_hist_.empty() && f.t - swipe_hist_.front().t > cfg_.swipe_window + 1e-9) swipe_hist_.pop_front();

    for (double sign : {1.0, -1.0}) {
      // Walk back from the newest sample tracking the peak directional speed.
      double peak = -std::numeric_limits<double>::infinity();
      for (auto it = swipe_hist_.rbegin(); it != swipe_hist_.rend(); ++it) {
        peak = std::max(peak, sign * it->vx);
        if (sign * (f.palm_pos.x - it->x) >= cfg_.swipe_min_disp && peak >= cfg_.swipe_min_speed) {
          swipe_armed_ = false;
          swipe_hist_.clear();
          auto ev = make(f.t, GestureKind::Swipe, f.palm_pos);
          ev.direction = sign > 0 ? SwipeDirection::Right : SwipeDirection::Left;
          fire(ev, inside, out);
          return;
        }
      }
    }
  }

  void step_twist(const HandFrame& f, bool inside, std::vector<GestureEvent>& out) {
    const double nz = f.palm_normal.z;
    const double thr = cfg_.twist_normal_thresh;
    if (twist_flipped_since_) {
      if (f.t - *twist_flipped_since_ > cfg_.twist_window) {
        twist_flipped_since_.reset();
        twist_last_down_.reset();
      } else if (nz < -thr) {
        twist_flipped_since_.reset();
        twist_last_down_ = f.t;
        fire(make(f.t, GestureKind::Twist, f.palm_pos), inside, out);
        return;
      }
    }
    if (nz < -thr) {
      twist_last_down_ = f.t;
    } else if (nz > thr && !twist_flipped_since_ && twist_last_down_ &&
               f.t - *twist_last_down_ <= cfg_.twist_window) {
      twist_flipped_since_ = *twist_last_down_;
    }
  }

  void step_pose(const HandFrame& f, bool inside, std::vector<GestureEvent>& out) {
    const auto count = classify_finger_count(f);
    if (count != pose_count_) {
      pose_count_ = count;
      pose_since_ = f.t;
      pose_fired_ = false;
    }
    if (!pose_count_ || pose_fired_) return;
    if (f.t - pose_since_ + 1e-9 >= cfg_.pose_dwell) {
      pose_fired_ = true;
      auto ev = make(f.t, GestureKind::FingerPose, f.palm_pos);
      ev.finger_count = *pose_count_;
      fire(ev, inside, out);
    }
  }

  void reset_detectors() {
    pinch_ = {};
    grab_onset_.reset();
    grab_spent_ = false;
    tap_armed_ = true;
    swipe_armed_ = true;
    swipe_hist_.clear();
    twist_last_down_.reset();
    twist_flipped_since_.reset();
    pose_count_.reset();
    pose_fired_ = false;
  }

  RecognizerConfig cfg_;
  std::optional<double> last_t_;
  Vec3 last_pos_{};

  std::optional<double> last_discrete_;
  GestureFamily last_family_ = GestureFamily::Tap;

  PinchState pinch_;
  std::optional<double> grab_onset_;
  bool grab_spent_ = false;
  bool tap_armed_ = true;
  bool swipe_armed_ = true;
  std::deque<SwipeSample> swipe_hist_;
  std::optional<double> twist_last_down_;
  std::optional<double> twist_flipped_since_;
  std::optional<int> pose_count_;
  double pose_since_ = 0.0;
  bool pose_fired_ = false;
};

/// Discrete events only (drops PinchMove).
inline std::vector<GestureEvent> discrete_only(const std::vector<GestureEvent>& events) {
  std::vector<GestureEvent> out;
  std::copy_if(events.begin(), events.end(), std::back_inserter(out),
               [](const GestureEvent& e) { return is_discrete(e.kind); });
  return out;
}

}  // namespace haptivis
