#pragma once

// Per-frame composition of the whole chain:
//   frame -> kinematics -> recognizer -> IVIS dispatch -> haptic focus -> phase solve
// One Pipeline per session; it owns every piece of mutable state.

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "haptivis/acoustic_field.hpp"
#include "haptivis/gesture_engine.hpp"
#include "haptivis/haptic_patterns.hpp"
#include "haptivis/hand_stream.hpp"
#include "haptivis/ivis_core.hpp"

namespace haptivis {

struct TimedEffect {
  double t = 0.0;
  Effect effect;
};

struct FrameOutput {
  std::vector<GestureEvent> events;
  std::vector<TimedEffect> effects;
  std::optional<FocalSample> focal;  ///< absolute time
  bool state_changed = false;
};

class Pipeline {
 public:
  explicit Pipeline(RecognizerConfig cfg = {}, IvisState initial = {}, TransducerArray array = make_grid_array())
      : recognizer_(cfg), ivis_cfg_(IvisConfig::from(cfg)), state_(std::move(initial)), array_(std::move(array)) {}

  const IvisState& state() const { return state_; }
  const RecognizerConfig& config() const { return recognizer_.config(); }
  const TransducerArray& array() const { return array_; }
  const std::vector<std::string>& violations() const { return violations_; }
  const PhaseSolution& last_phases() const { return phases_; }

  FrameOutput process(const HandFrame& frame, const Kinematics& kin) {
    FrameOutput out;
    out.events = recognizer_.step(frame, kin);
    for (const auto& ev : out.events) {
      if (!contains(recognizer_.config().box, ev.pos)) {
        violations_.push_back("event " + std::string(to_string(ev.kind)) + " outside the interaction box");
      }
      apply(dispatch(state_, ev, ivis_cfg_), frame.t, out);
      if (ev.kind == GestureKind::PinchRelease && active_ && active_->sensation.kind == SensationKind::ValueCircle) {
        active_.reset();
      }
    }
    render_focus(frame, out);
    return out;
  }

  FrameOutput inject(Stimulus stim, double t) {
    FrameOutput out;
    apply(haptivis::inject(state_, stim), t, out);
    return out;
  }

  FrameOutput set_nav_method(NavMethod method, double t) {
    FrameOutput out;
    apply(haptivis::set_nav_method(state_, method), t, out);
    return out;
  }

 private:
  struct ActiveSensation {
    Sensation sensation;
    double start;
  };

  void apply(Transition tr, double t, FrameOutput& out) {
    if (auto why = check_invariants(tr.state); !why.empty()) violations_.push_back(why);
    if (!(tr.state == state_)) out.state_changed = true;
    state_ = std::move(tr.state);
    for (auto& e : tr.effects) {
      if (const auto* h = std::get_if<HapticTrigger>(&e)) {
        // a level update keeps the running circle's clock
        const bool same_value_circle = h->sensation.kind == SensationKind::ValueCircle && active_ &&
                                       active_->sensation.kind == SensationKind::ValueCircle;
        active_ = ActiveSensation{h->sensation, same_value_circle ? active_->start : t};
      }
      out.effects.push_back({t, std::move(e)});
    }
  }

  void render_focus(const HandFrame& frame, FrameOutput& out) {
    std::optional<FocalSample> fs;
    if (active_ && frame.hand_present) {
      fs = sample_focus(active_->sensation, frame.t - active_->start, frame);
      if (!fs && active_->sensation.duration() && frame.t - active_->start > *active_->sensation.duration()) {
        active_.reset();
      }
    }
    if (!fs && !active_) {
      // idle: the world-fixed anchor circle marks the sweet spot
      fs = sample_focus(Sensation{SensationKind::AnchorCircle}, frame.t, frame);
    }
    if (fs) {
      fs->t = frame.t;
      try {
        phases_ = solve_focus(array_, fs->pos);
      } catch (const FocusError&) {
        return;  // hand resting on an emitter: nothing to focus
      }
      out.focal = fs;
    }
  }

  Recognizer recognizer_;
  IvisConfig ivis_cfg_;
  IvisState state_;
  TransducerArray array_;
  std::optional<ActiveSensation> active_;
  PhaseSolution phases_;
  std::vector<std::string> violations_;
};

}  // namespace haptivis
