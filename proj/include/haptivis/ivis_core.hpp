#pragma once

// Infotainment state machine: four flat modes, two navigation methods,
// call/route modals and value adjustment. dispatch() and inject() are pure
// transition functions returning the next state plus the effects to render.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "haptivis/gesture_engine.hpp"
#include "haptivis/haptic_patterns.hpp"

namespace haptivis {

enum class Mode { Media, Temperature, Fan, Navigation };
enum class NavMethod { FingerPose, Radial3D };
enum class Modal { None, IncomingCall, ActiveCall, RouteSuggestion };
enum class Stimulus { IncomingCall, RouteSuggestion, CallerHangup };

inline constexpr Mode kAllModes[] = {Mode::Media, Mode::Temperature, Mode::Fan, Mode::Navigation};

inline const char* to_string(Mode m) {
  switch (m) {
    case Mode::Media: return "Media";
    case Mode::Temperature: return "Temperature";
    case Mode::Fan: return "Fan";
    case Mode::Navigation: return "Navigation";
  }
  return "?";
}

inline const char* to_string(NavMethod m) { return m == NavMethod::FingerPose ? "finger" : "radial"; }

inline const char* to_string(Modal m) {
  switch (m) {
    case Modal::None: return "none";
    case Modal::IncomingCall: return "IncomingCall";
    case Modal::ActiveCall: return "ActiveCall";
    case Modal::RouteSuggestion: return "RouteSuggestion";
  }
  return "?";
}

inline const char* to_string(Stimulus s) {
  switch (s) {
    case Stimulus::IncomingCall: return "IncomingCall";
    case Stimulus::RouteSuggestion: return "RouteSuggestion";
    case Stimulus::CallerHangup: return "CallerHangup";
  }
  return "?";
}

inline std::optional<Stimulus> stimulus_from_string(std::string_view s) {
  for (auto k : {Stimulus::IncomingCall, Stimulus::RouteSuggestion, Stimulus::CallerHangup}) {
    if (s == to_string(k)) return k;
  }
  return std::nullopt;
}

inline std::optional<NavMethod> nav_method_from_string(std::string_view s) {
  if (s == "finger" || s == "FingerPose") return NavMethod::FingerPose;
  if (s == "radial" || s == "Radial3D") return NavMethod::Radial3D;
  return std::nullopt;
}

/// Finger count 1..4 and radial W/N/S/E both map onto the same mode order.
inline Mode mode_for_finger_count(int n) { return kAllModes[static_cast<std::size_t>(std::clamp(n, 1, 4) - 1)]; }

inline std::optional<Mode> mode_for_direction(RadialDirection d) {
  switch (d) {
    case RadialDirection::W: return Mode::Media;
    case RadialDirection::N: return Mode::Temperature;
    case RadialDirection::S: return Mode::Fan;
    case RadialDirection::E: return Mode::Navigation;
    case RadialDirection::None: return std::nullopt;
  }
  return std::nullopt;
}

struct MediaState {
  bool playing = true;
  int track_index = 0;
  int volume = 50;  ///< 0..100

  friend bool operator==(const MediaState&, const MediaState&) = default;
};

/// What the currently held pinch is doing.
enum class PinchPurpose { None, Undecided, Value, Radial };

struct PinchTracking {
  PinchPurpose purpose = PinchPurpose::None;
  double dz_applied = 0.0;  ///< vertical travel already converted into value steps
  Vec3 last_delta{};

  friend bool operator==(const PinchTracking&, const PinchTracking&) = default;
};

struct IvisState {
  Mode mode = Mode::Media;
  NavMethod nav_method = NavMethod::FingerPose;
  MediaState media{};
  double temperature = 21.0;  ///< deg C, 16..26 in 0.5 steps
  int fan = 3;                ///< 1..5
  int nav_zoom = 5;           ///< 1..10
  Modal modal = Modal::None;
  /// Present while the radial menu is open; holds the live highlight.
  std::optional<RadialDirection> radial_overlay;
  std::vector<Stimulus> queued;  ///< stimuli waiting behind the active modal
  PinchTracking pinch{};

  friend bool operator==(const IvisState&, const IvisState&) = default;
};

namespace ivis {

inline constexpr double kTempMin = 16.0;
inline constexpr double kTempMax = 26.0;
inline constexpr int kFanMin = 1;
inline constexpr int kFanMax = 5;
inline constexpr int kZoomMin = 1;
inline constexpr int kZoomMax = 10;
inline constexpr double kVolumeGain = 400.0;  ///< volume units per meter
inline constexpr double kTempGain = 50.0;     ///< deg C per meter
inline constexpr double kLevelGain = 20.0;    ///< fan / zoom levels per meter

}  // namespace ivis

/// Empty when every state invariant holds.
inline std::string check_invariants(const IvisState& s) {
  if (!(s.temperature >= ivis::kTempMin && s.temperature <= ivis::kTempMax)) return "temperature out of range";
  if (std::fmod(s.temperature * 2.0, 1.0) != 0.0) return "temperature not a multiple of 0.5";
  if (s.fan < ivis::kFanMin || s.fan > ivis::kFanMax) return "fan out of range";
  if (s.media.volume < 0 || s.media.volume > 100) return "volume out of range";
  if (s.media.track_index < 0) return "negative track index";
  if (s.nav_zoom < ivis::kZoomMin || s.nav_zoom > ivis::kZoomMax) return "zoom out of range";
  if (s.radial_overlay && s.nav_method != NavMethod::Radial3D) return "radial overlay outside Radial3D";
  if (s.radial_overlay && s.pinch.purpose != PinchPurpose::Undecided && s.pinch.purpose != PinchPurpose::Radial) {
    return "radial overlay without a radial pinch";
  }
  for (auto q : s.queued) {
    if (q == Stimulus::CallerHangup) return "hangup queued";
  }
  return {};
}

// ---------------------------------------------------------------------------
// Effects

struct ScreenUpdate {
  std::string focused;
  std::vector<std::string> dimmed;
  friend bool operator==(const ScreenUpdate&, const ScreenUpdate&) = default;
};
struct AudioSpeech {
  std::string label;
  friend bool operator==(const AudioSpeech&, const AudioSpeech&) = default;
};
struct AudioDing {
  friend bool operator==(const AudioDing&, const AudioDing&) = default;
};
struct HapticTrigger {
  Sensation sensation;
  friend bool operator==(const HapticTrigger&, const HapticTrigger&) = default;
};
enum class PhoneActionKind { Answer, Decline, End };
struct PhoneAction {
  PhoneActionKind action;
  friend bool operator==(const PhoneAction&, const PhoneAction&) = default;
};
enum class RouteActionKind { Accept, Decline };
struct RouteAction {
  RouteActionKind action;
  friend bool operator==(const RouteAction&, const RouteAction&) = default;
};

using Effect = std::variant<ScreenUpdate, AudioSpeech, AudioDing, HapticTrigger, PhoneAction, RouteAction>;

inline const char* to_string(PhoneActionKind a) {
  switch (a) {
    case PhoneActionKind::Answer: return "answer";
    case PhoneActionKind::Decline: return "decline";
    case PhoneActionKind::End: return "end";
  }
  return "?";
}

inline const char* to_string(RouteActionKind a) { return a == RouteActionKind::Accept ? "accept" : "decline"; }

inline const char* effect_kind(const Effect& e) {
  return std::visit(
      [](const auto& v) -> const char* {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, ScreenUpdate>) return "ScreenUpdate";
        else if constexpr (std::is_same_v<T, AudioSpeech>) return "AudioSpeech";
        else if constexpr (std::is_same_v<T, AudioDing>) return "AudioDing";
        else if constexpr (std::is_same_v<T, HapticTrigger>) return "HapticTrigger";
        else if constexpr (std::is_same_v<T, PhoneAction>) return "PhoneAction";
        else return "RouteAction";
      },
      e);
}

inline std::string effect_payload(const Effect& e) {
  return std::visit(
      [](const auto& v) -> std::string {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, ScreenUpdate>) {
          std::string s = "focused=" + v.focused + " dimmed=";
          for (std::size_t i = 0; i < v.dimmed.size(); ++i) s += (i ? "," : "") + v.dimmed[i];
          return s;
        } else if constexpr (std::is_same_v<T, AudioSpeech>) {
          return v.label;
        } else if constexpr (std::is_same_v<T, AudioDing>) {
          return "-";
        } else if constexpr (std::is_same_v<T, HapticTrigger>) {
          std::string s = to_string(v.sensation.kind);
          if (v.sensation.kind == SensationKind::ScanLine) s += std::string(" direction=") + to_string(v.sensation.direction);
          if (v.sensation.kind == SensationKind::ValueCircle) {
            char buf[32];
            std::snprintf(buf, sizeof buf, " level=%.4f", v.sensation.level);
            s += buf;
          }
          return s;
        } else if constexpr (std::is_same_v<T, PhoneAction>) {
          return to_string(v.action);
        } else {
          return to_string(v.action);
        }
      },
      e);
}

/// `t kind payload`
inline std::string format_effect(double t, const Effect& e) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", t);
  return std::string(buf) + " " + effect_kind(e) + " " + effect_payload(e);
}

template <typename T>
bool has_effect(const std::vector<Effect>& effects, const T& wanted) {
  return std::any_of(effects.begin(), effects.end(), [&](const Effect& e) {
    const auto* p = std::get_if<T>(&e);
    return p && *p == wanted;
  });
}

template <typename T>
bool has_effect_kind(const std::vector<Effect>& effects) {
  return std::any_of(effects.begin(), effects.end(), [](const Effect& e) { return std::holds_alternative<T>(e); });
}

inline bool has_haptic(const std::vector<Effect>& effects, SensationKind k) {
  return std::any_of(effects.begin(), effects.end(), [k](const Effect& e) {
    const auto* p = std::get_if<HapticTrigger>(&e);
    return p && p->sensation.kind == k;
  });
}

// ---------------------------------------------------------------------------
// Value adjustment

inline double round_to_half(double v) { return std::round(v * 2.0) / 2.0; }

/// New value after a vertical pinch travel of `dz` meters in `mode`.
inline double adjust_value(Mode mode, double current, double dz) {
  switch (mode) {
    case Mode::Media: return std::clamp(std::round(current + ivis::kVolumeGain * dz), 0.0, 100.0);
    case Mode::Temperature: return round_to_half(std::clamp(current + ivis::kTempGain * dz, ivis::kTempMin, ivis::kTempMax));
    case Mode::Fan:
      return std::clamp(current + std::round(ivis::kLevelGain * dz), double(ivis::kFanMin), double(ivis::kFanMax));
    case Mode::Navigation:
      return std::clamp(current + std::round(ivis::kLevelGain * dz), double(ivis::kZoomMin), double(ivis::kZoomMax));
  }
  throw std::invalid_argument("adjust_value: unknown mode");
}

namespace detail {

// Vertical travel worth one step of the mode's value.
inline double step_travel(Mode mode) {
  switch (mode) {
    case Mode::Media: return 1.0 / ivis::kVolumeGain;
    case Mode::Temperature: return 0.5 / ivis::kTempGain;
    case Mode::Fan:
    case Mode::Navigation: return 1.0 / ivis::kLevelGain;
  }
  return 1.0;
}

inline double mode_value(const IvisState& s, Mode m) {
  switch (m) {
    case Mode::Media: return s.media.volume;
    case Mode::Temperature: return s.temperature;
    case Mode::Fan: return s.fan;
    case Mode::Navigation: return s.nav_zoom;
  }
  return 0.0;
}

inline void set_mode_value(IvisState& s, Mode m, double v) {
  switch (m) {
    case Mode::Media: s.media.volume = static_cast<int>(std::lround(v)); break;
    case Mode::Temperature: s.temperature = v; break;
    case Mode::Fan: s.fan = static_cast<int>(std::lround(v)); break;
    case Mode::Navigation: s.nav_zoom = static_cast<int>(std::lround(v)); break;
  }
}

}  // namespace detail

/// Normalized 0..1 position of the mode's value within its range.
inline double value_level(const IvisState& s, Mode m) {
  switch (m) {
    case Mode::Media: return s.media.volume / 100.0;
    case Mode::Temperature: return (s.temperature - ivis::kTempMin) / (ivis::kTempMax - ivis::kTempMin);
    case Mode::Fan: return double(s.fan - ivis::kFanMin) / (ivis::kFanMax - ivis::kFanMin);
    case Mode::Navigation: return double(s.nav_zoom - ivis::kZoomMin) / (ivis::kZoomMax - ivis::kZoomMin);
  }
  return 0.0;
}

// ---------------------------------------------------------------------------
// Transitions

struct IvisConfig {
  double radial_threshold = 0.08;
  double radial_deadzone = 0.04;

  static IvisConfig from(const RecognizerConfig& rc) { return {rc.radial_threshold, rc.radial_deadzone}; }
};

struct Transition {
  IvisState state;
  std::vector<Effect> effects;
};

inline ScreenUpdate screen_for(const IvisState& s) {
  ScreenUpdate u;
  std::optional<Mode> focused_mode;
  if (s.modal != Modal::None) u.focused = to_string(s.modal);
  else if (s.radial_overlay) u.focused = "RadialMenu";
  else {
    u.focused = to_string(s.mode);
    focused_mode = s.mode;
  }
  for (auto m : kAllModes) {
    if (m != focused_mode) u.dimmed.emplace_back(to_string(m));
  }
  return u;
}

namespace detail {

inline HapticTrigger haptic(SensationKind k) { return HapticTrigger{Sensation{k}}; }

inline HapticTrigger value_haptic(const IvisState& s) {
  Sensation sen{SensationKind::ValueCircle};
  sen.level = std::clamp(value_level(s, s.mode), 0.0, 1.0);
  return HapticTrigger{sen};
}

inline void drop_pinch(IvisState& s) {
  s.pinch = {};
  s.radial_overlay.reset();
}

// After a modal resolves, the oldest queued stimulus takes its place.
inline void surface_queue(IvisState& s) {
  if (s.modal != Modal::None || s.queued.empty()) return;
  const Stimulus next = s.queued.front();
  s.queued.erase(s.queued.begin());
  s.modal = next == Stimulus::IncomingCall ? Modal::IncomingCall : Modal::RouteSuggestion;
}

inline void close_modal(IvisState& s, std::vector<Effect>& fx) {
  s.modal = Modal::None;
  surface_queue(s);
  fx.emplace_back(screen_for(s));
}

inline Transition dispatch_modal(IvisState s, const GestureEvent& ev) {
  std::vector<Effect> fx;
  if (ev.kind == GestureKind::PinchRelease || ev.kind == GestureKind::PinchEngage) drop_pinch(s);
  switch (s.modal) {
    case Modal::IncomingCall:
      if (ev.kind == GestureKind::Tap) {
        s.modal = Modal::ActiveCall;
        fx.emplace_back(PhoneAction{PhoneActionKind::Answer});
        fx.emplace_back(AudioSpeech{"Call answered"});
        fx.emplace_back(haptic(SensationKind::OpenCircle));
        fx.emplace_back(screen_for(s));
      } else if (ev.kind == GestureKind::GrabRelease) {
        fx.emplace_back(PhoneAction{PhoneActionKind::Decline});
        fx.emplace_back(AudioSpeech{"Call declined"});
        fx.emplace_back(haptic(SensationKind::CloseCircle));
        close_modal(s, fx);
      }
      break;
    case Modal::ActiveCall:
      if (ev.kind == GestureKind::GrabRelease) {
        fx.emplace_back(PhoneAction{PhoneActionKind::End});
        fx.emplace_back(AudioSpeech{"Call ended"});
        fx.emplace_back(haptic(SensationKind::CloseCircle));
        close_modal(s, fx);
      }
      break;
    case Modal::RouteSuggestion:
      if (ev.kind == GestureKind::Tap) {
        fx.emplace_back(RouteAction{RouteActionKind::Accept});
        fx.emplace_back(AudioSpeech{"Route accepted"});
        fx.emplace_back(haptic(SensationKind::OpenCircle));
        close_modal(s, fx);
      } else if (ev.kind == GestureKind::GrabRelease) {
        fx.emplace_back(RouteAction{RouteActionKind::Decline});
        fx.emplace_back(AudioSpeech{"Route declined"});
        fx.emplace_back(haptic(SensationKind::CloseCircle));
        close_modal(s, fx);
      }
      break;
    case Modal::None: break;
  }
  return {std::move(s), std::move(fx)};
}

// Converts pending vertical travel into whole value steps.
inline void apply_value_travel(IvisState& s, double dz, std::vector<Effect>& fx) {
  const double q = step_travel(s.mode);
  const double pending = dz - s.pinch.dz_applied;
  const double steps = std::round(pending / q);
  if (steps == 0.0) return;
  s.pinch.dz_applied += steps * q;
  const double before = mode_value(s, s.mode);
  const double after = adjust_value(s.mode, before, steps * q);
  if (after == before) return;
  set_mode_value(s, s.mode, after);
  fx.emplace_back(screen_for(s));
  fx.emplace_back(value_haptic(s));
}

inline Transition dispatch_pinch(IvisState s, const GestureEvent& ev, const IvisConfig& cfg) {
  std::vector<Effect> fx;
  switch (ev.kind) {
    case GestureKind::PinchEngage:
      s.pinch = {};
      if (s.nav_method == NavMethod::Radial3D) {
        s.pinch.purpose = PinchPurpose::Undecided;
        s.radial_overlay = RadialDirection::None;
        fx.emplace_back(screen_for(s));
      } else {
        s.pinch.purpose = PinchPurpose::Value;
        fx.emplace_back(value_haptic(s));
      }
      break;

    case GestureKind::PinchMove: {
      const Vec3 d = ev.delta;
      s.pinch.last_delta = d;
      if (s.pinch.purpose == PinchPurpose::Undecided) {
        const double horizontal = std::hypot(d.x, d.y);
        const double vertical = std::abs(d.z);
        if (vertical >= cfg.radial_deadzone && vertical >= horizontal) {
          s.pinch.purpose = PinchPurpose::Value;
          s.radial_overlay.reset();
          fx.emplace_back(screen_for(s));
          fx.emplace_back(value_haptic(s));
        } else if (horizontal >= cfg.radial_deadzone) {
          s.pinch.purpose = PinchPurpose::Radial;
        }
      }
      if (s.pinch.purpose == PinchPurpose::Value) {
        apply_value_travel(s, d.z, fx);
      } else if (s.pinch.purpose == PinchPurpose::Radial) {
        const RadialDirection dir = radial_direction(d, cfg.radial_deadzone);
        if (s.radial_overlay != dir) {
          s.radial_overlay = dir;
          fx.emplace_back(screen_for(s));
          if (auto m = mode_for_direction(dir)) fx.emplace_back(AudioSpeech{to_string(*m)});
        }
      }
      break;
    }

    case GestureKind::PinchRelease: {
      const PinchPurpose purpose = s.pinch.purpose;
      const Vec3 d = s.pinch.last_delta;
      const bool was_open = s.radial_overlay.has_value();
      drop_pinch(s);
      if (purpose == PinchPurpose::Radial || purpose == PinchPurpose::Undecided) {
        const RadialDirection dir = radial_direction(d, cfg.radial_deadzone);
        const auto m = mode_for_direction(dir);
        if (m && std::hypot(d.x, d.y) >= cfg.radial_threshold) {
          s.mode = *m;
          fx.emplace_back(screen_for(s));
          fx.emplace_back(AudioDing{});
          fx.emplace_back(haptic(SensationKind::OpenCircle));
        } else if (was_open) {
          fx.emplace_back(screen_for(s));
        }
      }
      break;
    }
    default: break;
  }
  return {std::move(s), std::move(fx)};
}

}  // namespace detail

/// Routes one gesture event. Total over (state, event); unmapped pairs return
/// the state unchanged with no effects.
inline Transition dispatch(const IvisState& state, const GestureEvent& ev, const IvisConfig& cfg = {}) {
  using namespace detail;
  if (state.modal != Modal::None) return dispatch_modal(state, ev);

  switch (ev.kind) {
    case GestureKind::PinchEngage:
    case GestureKind::PinchMove:
    case GestureKind::PinchRelease:
      return dispatch_pinch(state, ev, cfg);
    default: break;
  }

  IvisState s = state;
  std::vector<Effect> fx;
  switch (ev.kind) {
    case GestureKind::FingerPose:
      if (s.nav_method == NavMethod::FingerPose && ev.finger_count >= 1 && ev.finger_count <= 4) {
        s.mode = mode_for_finger_count(ev.finger_count);
        fx.emplace_back(screen_for(s));
        fx.emplace_back(AudioSpeech{to_string(s.mode)});
        fx.emplace_back(haptic(SensationKind::FingerScan));
      }
      break;
    case GestureKind::Swipe:
      if (s.mode == Mode::Media) {
        s.media.track_index += 1;
        fx.emplace_back(screen_for(s));
        Sensation line{SensationKind::ScanLine};
        line.direction = ev.direction == SwipeDirection::Left ? LineDirection::Left : LineDirection::Right;
        fx.emplace_back(HapticTrigger{line});
      }
      break;
    case GestureKind::Twist:
      if (s.mode == Mode::Media) {
        s.media.track_index = std::max(0, s.media.track_index - 1);
        fx.emplace_back(screen_for(s));
        Sensation line{SensationKind::ScanLine};
        line.direction = LineDirection::Left;
        fx.emplace_back(HapticTrigger{line});
      }
      break;
    case GestureKind::Tap:
      if (s.mode == Mode::Media) {
        s.media.playing = !s.media.playing;
        fx.emplace_back(screen_for(s));
        fx.emplace_back(haptic(SensationKind::OpenCircle));
      }
      break;
    case GestureKind::GrabRelease:
    default:
      break;
  }
  return {std::move(s), std::move(fx)};
}

/// Applies an externally triggered stimulus (call, route suggestion, hangup).
inline Transition inject(const IvisState& state, Stimulus stim) {
  IvisState s = state;
  std::vector<Effect> fx;
  switch (stim) {
    case Stimulus::IncomingCall:
    case Stimulus::RouteSuggestion:
      if (s.modal != Modal::None) {
        s.queued.push_back(stim);
        break;
      }
      detail::drop_pinch(s);
      s.modal = stim == Stimulus::IncomingCall ? Modal::IncomingCall : Modal::RouteSuggestion;
      fx.emplace_back(screen_for(s));
      break;
    case Stimulus::CallerHangup:
      if (s.modal == Modal::IncomingCall || s.modal == Modal::ActiveCall) {
        detail::close_modal(s, fx);
      } else {
        auto it = std::find(s.queued.begin(), s.queued.end(), Stimulus::IncomingCall);
        if (it != s.queued.end()) s.queued.erase(it);
      }
      break;
  }
  return {std::move(s), std::move(fx)};
}

/// Keyboard-shortcut switch between the two navigation methods.
inline Transition set_nav_method(const IvisState& state, NavMethod method) {
  IvisState s = state;
  std::vector<Effect> fx;
  if (s.nav_method == method) return {std::move(s), std::move(fx)};
  s.nav_method = method;
  // an open radial menu cannot survive the switch; a value pinch keeps going
  if (s.radial_overlay) detail::drop_pinch(s);
  fx.emplace_back(screen_for(s));
  return {std::move(s), std::move(fx)};
}

// ---------------------------------------------------------------------------
// Snapshot text: flat key=value, one per line.

inline std::string format_temperature(double t) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%.1f", t);
  return buf;
}

inline std::vector<std::pair<std::string, std::string>> snapshot_fields(const IvisState& s) {
  std::string queue;
  for (std::size_t i = 0; i < s.queued.size(); ++i) queue += (i ? "," : "") + std::string(to_string(s.queued[i]));
  const char* purpose = "none";
  switch (s.pinch.purpose) {
    case PinchPurpose::None: purpose = "none"; break;
    case PinchPurpose::Undecided: purpose = "undecided"; break;
    case PinchPurpose::Value: purpose = "value"; break;
    case PinchPurpose::Radial: purpose = "radial"; break;
  }
  return {
      {"mode", to_string(s.mode)},
      {"nav_method", to_string(s.nav_method)},
      {"playing", s.media.playing ? "1" : "0"},
      {"track_index", std::to_string(s.media.track_index)},
      {"volume", std::to_string(s.media.volume)},
      {"temperature", format_temperature(s.temperature)},
      {"fan", std::to_string(s.fan)},
      {"nav_zoom", std::to_string(s.nav_zoom)},
      {"modal", to_string(s.modal)},
      {"radial_overlay", s.radial_overlay ? "open" : "closed"},
      {"radial_highlight", s.radial_overlay ? to_string(*s.radial_overlay) : "none"},
      {"queue", queue.empty() ? "-" : queue},
      {"pinch", purpose},
  };
}

inline std::string format_snapshot(const IvisState& s) {
  std::string out;
  for (const auto& [k, v] : snapshot_fields(s)) out += k + "=" + v + "\n";
  return out;
}

inline std::optional<std::string> snapshot_value(const IvisState& s, std::string_view key) {
  for (auto& [k, v] : snapshot_fields(s)) {
    if (k == key) return v;
  }
  return std::nullopt;
}

}  // namespace haptivis
