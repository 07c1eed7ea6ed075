#pragma once

// Exhaustive small-state check of the IVIS transition functions. Shared by
// the unit suite and the acceptance binary.

#include <algorithm>
#include <cmath>
#include <set>
#include <string>
#include <vector>

#include "haptivis/ivis_core.hpp"

namespace haptivis::testing {

struct EnumerationResult {
  std::size_t states = 0;
  std::size_t transitions = 0;
  std::vector<std::string> violations;
};

/// Gesture alphabet: every kind, with PinchMove deltas covering the deadzone,
/// both axes, both signs and strokes long enough to hit any clamp.
inline std::vector<GestureEvent> event_alphabet() {
  std::vector<GestureEvent> out;
  auto add = [&out](GestureKind k) -> GestureEvent& {
    out.push_back({});
    out.back().kind = k;
    out.back().t = 10.0;
    return out.back();
  };
  add(GestureKind::Swipe).direction = SwipeDirection::Left;
  add(GestureKind::Swipe).direction = SwipeDirection::Right;
  add(GestureKind::Twist);
  add(GestureKind::Tap);
  add(GestureKind::PinchEngage);
  for (Vec3 d : {Vec3{0, 0, 0.01}, Vec3{0, 0, -0.01}, Vec3{0, 0, 0.3}, Vec3{0, 0, -0.3}, Vec3{-0.1, 0, 0},
                 Vec3{0.1, 0, 0}, Vec3{0, 0.1, 0}, Vec3{0, -0.1, 0}, Vec3{0.02, 0.01, 0}, Vec3{0.05, 0, 0.05}}) {
    add(GestureKind::PinchMove).delta = d;
  }
  add(GestureKind::PinchRelease);
  add(GestureKind::GrabRelease);
  for (int n = 1; n <= 4; ++n) add(GestureKind::FingerPose).finger_count = n;
  return out;
}

/// Discrete parts of the state at their boundaries and one interior value.
inline std::vector<IvisState> state_space() {
  std::vector<IvisState> out;
  const Modal modals[] = {Modal::None, Modal::IncomingCall, Modal::ActiveCall, Modal::RouteSuggestion};
  for (auto mode : kAllModes)
    for (auto nav : {NavMethod::FingerPose, NavMethod::Radial3D})
      for (auto modal : modals)
        for (bool playing : {false, true})
          for (int track : {0, 3})
            for (int volume : {0, 50, 100})
              for (double temp : {16.0, 21.0, 26.0})
                for (int fan : {1, 3, 5})
                  for (int zoom : {1, 5, 10})
                    for (int pinch = 0; pinch < 4; ++pinch)
                      for (int queue = 0; queue < 3; ++queue) {
                        IvisState s;
                        s.mode = mode;
                        s.nav_method = nav;
                        s.modal = modal;
                        s.media = {playing, track, volume};
                        s.temperature = temp;
                        s.fan = fan;
                        s.nav_zoom = zoom;
                        // modals drop any pinch and only they hold a queue
                        if (modal != Modal::None && pinch != 0) continue;
                        if (modal == Modal::None && queue != 0) continue;
                        if (queue == 1) s.queued = {Stimulus::RouteSuggestion};
                        if (queue == 2) s.queued = {Stimulus::IncomingCall, Stimulus::RouteSuggestion};
                        switch (pinch) {
                          case 0: break;
                          case 1: s.pinch.purpose = PinchPurpose::Value; break;
                          case 2:
                            if (nav != NavMethod::Radial3D) continue;
                            s.pinch.purpose = PinchPurpose::Undecided;
                            s.radial_overlay = RadialDirection::None;
                            break;
                          case 3:
                            if (nav != NavMethod::Radial3D) continue;
                            s.pinch.purpose = PinchPurpose::Radial;
                            s.pinch.last_delta = {0.1, 0, 0};
                            s.radial_overlay = RadialDirection::E;
                            break;
                        }
                        out.push_back(s);
                      }
  return out;
}

namespace detail {

inline std::string describe(const IvisState& s) {
  std::string out;
  for (const auto& [k, v] : snapshot_fields(s)) out += k + "=" + v + " ";
  return out;
}

inline std::string screen_part(const IvisState& s) {
  std::string out;
  for (const auto& [k, v] : snapshot_fields(s)) {
    if (k != "pinch" && k != "queue") out += k + "=" + v + ";";
  }
  return out;
}

inline bool at_bound(const IvisState& s, Mode m, bool upper) {
  switch (m) {
    case Mode::Media: return s.media.volume == (upper ? 100 : 0);
    case Mode::Temperature: return s.temperature == (upper ? ivis::kTempMax : ivis::kTempMin);
    case Mode::Fan: return s.fan == (upper ? ivis::kFanMax : ivis::kFanMin);
    case Mode::Navigation: return s.nav_zoom == (upper ? ivis::kZoomMax : ivis::kZoomMin);
  }
  return false;
}

}  // namespace detail

inline void check_transition(const IvisState& before, const std::string& what, const Transition& tr, const GestureEvent* ev,
                             EnumerationResult& res) {
  auto fail = [&](const std::string& why) {
    if (res.violations.size() < 50) res.violations.push_back(why + " | " + what + " | " + detail::describe(before));
  };
  const IvisState& after = tr.state;
  const auto& fx = tr.effects;
  if (auto why = check_invariants(after); !why.empty()) fail("invariant: " + why);

  // modal priority
  if (before.modal != Modal::None && ev) {
    if (after.mode != before.mode || after.media.volume != before.media.volume ||
        after.temperature != before.temperature || after.fan != before.fan || after.nav_zoom != before.nav_zoom) {
      fail("modal priority");
    }
  }

  // haptic pairing
  const bool accept = has_effect(fx, PhoneAction{PhoneActionKind::Answer}) || has_effect(fx, RouteAction{RouteActionKind::Accept});
  const bool decline = has_effect(fx, PhoneAction{PhoneActionKind::Decline}) ||
                       has_effect(fx, RouteAction{RouteActionKind::Decline}) ||
                       has_effect(fx, PhoneAction{PhoneActionKind::End});
  if (accept && !has_haptic(fx, SensationKind::OpenCircle)) fail("accept without OpenCircle");
  if (decline && !has_haptic(fx, SensationKind::CloseCircle)) fail("decline without CloseCircle");
  if (ev && ev->kind == GestureKind::Tap && before.modal != Modal::None && before.modal != Modal::ActiveCall && !accept) {
    fail("tap on a modal did not accept");
  }
  if (ev && ev->kind == GestureKind::GrabRelease && before.modal != Modal::None && !decline) {
    fail("grab-release on a modal did not decline");
  }

  // audio rules
  if (ev && ev->kind == GestureKind::FingerPose && has_effect_kind<AudioDing>(fx)) fail("finger pose emitted a ding");
  if (ev && ev->kind == GestureKind::PinchRelease && before.modal == Modal::None &&
      before.nav_method == NavMethod::Radial3D && before.radial_overlay) {
    const Vec3 d = before.pinch.last_delta;
    const auto m = mode_for_direction(radial_direction(d));
    const bool selects = m && std::hypot(d.x, d.y) >= 0.08;
    if (selects != has_effect_kind<AudioDing>(fx)) fail("radial selection and ding disagree");
    if (selects && after.mode != *m) fail("radial selection did not switch mode");
  }

  // any visible change comes with a ScreenUpdate whose dimming matches
  if (detail::screen_part(before) != detail::screen_part(after)) {
    const ScreenUpdate expected = screen_for(after);
    if (!has_effect(fx, expected)) {
      // intermediate updates are fine as long as the last one shows the end state
      const ScreenUpdate* last = nullptr;
      for (const auto& e : fx) {
        if (const auto* u = std::get_if<ScreenUpdate>(&e)) last = u;
      }
      if (!last || !(*last == expected)) fail("visible change without a matching ScreenUpdate");
    }
  }
  for (const auto& e : fx) {
    if (const auto* u = std::get_if<ScreenUpdate>(&e)) {
      std::set<std::string> dimmed(u->dimmed.begin(), u->dimmed.end());
      if (dimmed.count(u->focused)) fail("focused region is dimmed");
      const bool mode_focused = std::any_of(std::begin(kAllModes), std::end(kAllModes),
                                            [&](Mode m) { return u->focused == to_string(m); });
      if (dimmed.size() != (mode_focused ? 3u : 4u)) fail("wrong number of dimmed regions");
    }
  }
}

/// Runs every (state, event) and (state, stimulus) pair.
inline EnumerationResult enumerate_ivis() {
  EnumerationResult res;
  const auto states = state_space();
  const auto alphabet = event_alphabet();
  res.states = states.size();
  for (const auto& s : states) {
    if (auto why = check_invariants(s); !why.empty()) {
      res.violations.push_back("enumerated state breaks invariants: " + why);
      continue;
    }
    for (const auto& ev : alphabet) {
      ++res.transitions;
      Transition tr;
      try {
        tr = dispatch(s, ev);
      } catch (const std::exception& e) {
        res.violations.push_back(std::string("dispatch threw: ") + e.what());
        continue;
      }
      const std::string what = std::string("event ") + to_string(ev.kind);
      check_transition(s, what, tr, &ev, res);

      // clamp idempotence: a value stroke past a bound, then the same stroke again
      if (ev.kind == GestureKind::PinchMove && s.modal == Modal::None && s.pinch.purpose == PinchPurpose::Value &&
          ev.delta.z != 0.0 && detail::at_bound(s, s.mode, ev.delta.z > 0)) {
        if (!(tr.state.mode == s.mode && haptivis::detail::mode_value(tr.state, s.mode) == haptivis::detail::mode_value(s, s.mode))) {
          res.violations.push_back("value moved past its bound | " + detail::describe(s));
        }
        const auto again = dispatch(tr.state, ev);
        if (haptivis::detail::mode_value(again.state, s.mode) != haptivis::detail::mode_value(s, s.mode)) {
          res.violations.push_back("clamp not idempotent | " + detail::describe(s));
        }
      }
    }
    for (auto stim : {Stimulus::IncomingCall, Stimulus::RouteSuggestion, Stimulus::CallerHangup}) {
      ++res.transitions;
      check_transition(s, std::string("inject ") + to_string(stim), inject(s, stim), nullptr, res);
    }
    for (auto m : {NavMethod::FingerPose, NavMethod::Radial3D}) {
      ++res.transitions;
      check_transition(s, std::string("nav ") + to_string(m), set_nav_method(s, m), nullptr, res);
    }
  }
  return res;
}

}  // namespace haptivis::testing
