#pragma once

// Transport-independent session logic for the live bridge. Each client
// message (a JSON object with a "type" field) yields one or more server
// messages. See docs/wire.md for the schema.

#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "haptivis/pipeline.hpp"

namespace haptivis {

using json = nlohmann::json;

// ---------------------------------------------------------------------------
// JSON encodings

inline json vec_json(const Vec3& v) { return json::array({v.x, v.y, v.z}); }

inline json to_json(const IvisState& s) {
  json j;
  j["mode"] = to_string(s.mode);
  j["nav_method"] = to_string(s.nav_method);
  j["playing"] = s.media.playing;
  j["track_index"] = s.media.track_index;
  j["volume"] = s.media.volume;
  j["temperature"] = s.temperature;
  j["fan"] = s.fan;
  j["nav_zoom"] = s.nav_zoom;
  j["modal"] = to_string(s.modal);
  j["radial_overlay"] = s.radial_overlay ? json{{"highlight", to_string(*s.radial_overlay)}} : json(nullptr);
  json q = json::array();
  for (auto st : s.queued) q.push_back(to_string(st));
  j["queue"] = q;
  return j;
}

inline json to_json(const GestureEvent& e) {
  json j{{"t", e.t}, {"kind", to_string(e.kind)}, {"pos", vec_json(e.pos)}};
  if (e.kind == GestureKind::Swipe) j["direction"] = to_string(e.direction);
  if (e.kind == GestureKind::FingerPose) j["count"] = e.finger_count;
  if (e.kind == GestureKind::PinchMove) {
    j["dx"] = e.delta.x;
    j["dy"] = e.delta.y;
    j["dz"] = e.delta.z;
  }
  return j;
}

inline json to_json(const Sensation& s) {
  json j{{"kind", to_string(s.kind)}, {"envelope", to_string(s.envelope)}};
  if (s.kind == SensationKind::ScanLine) j["direction"] = to_string(s.direction);
  if (s.kind == SensationKind::ValueCircle) j["level"] = s.level;
  return j;
}

inline json to_json(const Effect& e) {
  json j{{"kind", effect_kind(e)}};
  std::visit(
      [&j](const auto& v) {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, ScreenUpdate>) {
          j["focused"] = v.focused;
          j["dimmed"] = v.dimmed;
        } else if constexpr (std::is_same_v<T, AudioSpeech>) {
          j["label"] = v.label;
        } else if constexpr (std::is_same_v<T, HapticTrigger>) {
          j["sensation"] = to_json(v.sensation);
        } else if constexpr (std::is_same_v<T, PhoneAction> || std::is_same_v<T, RouteAction>) {
          j["action"] = to_string(v.action);
        }
      },
      e);
  return j;
}

inline json to_json(const FocalSample& s) {
  return {{"t", s.t}, {"pos", vec_json(s.pos)}, {"intensity", s.intensity}, {"envelope", to_string(s.envelope)}};
}

// ---------------------------------------------------------------------------

class BridgeSession {
 public:
  static constexpr double kFramePeriod = 0.01;  ///< virtual-control pacing, 100 Hz

  explicit BridgeSession(RecognizerConfig cfg = {}) : cfg_(cfg) {}

  bool started() const { return pipeline_.has_value(); }
  const IvisState* state() const { return pipeline_ ? &pipeline_->state() : nullptr; }

  /// One client message in, the server messages it produces out (never empty).
  std::vector<json> handle(const json& msg) {
    try {
      if (!msg.is_object() || !msg.contains("type") || !msg["type"].is_string()) {
        return {error("parse", "message must be an object with a string \"type\"")};
      }
      const std::string type = msg["type"];
      if (type == "hello") return on_hello(msg);
      if (!pipeline_) return {error("no_hello", "send hello first")};
      if (type == "frame") return on_frame(parse_frame(msg));
      if (type == "virtual_control") return on_frame(parse_virtual_control(msg));
      if (type == "trigger") return on_trigger(msg);
      if (type == "set_nav_method") return on_set_nav(msg);
      return {error("parse", "unknown message type '" + type + "'")};
    } catch (const json::exception& e) {
      return {error("parse", e.what())};
    } catch (const PayloadError& e) {
      return {error("parse", e.what())};
    } catch (const OutOfOrderFrame& e) {
      return {error("out_of_order", e.what())};
    }
  }

  /// Text-in/text-out wrapper used by the socket server and transcripts.
  std::vector<std::string> handle_text(const std::string& text) {
    std::vector<json> replies;
    json msg = json::parse(text, nullptr, false);
    if (msg.is_discarded()) replies = {error("parse", "invalid JSON")};
    else replies = handle(msg);
    std::vector<std::string> out;
    out.reserve(replies.size());
    for (const auto& r : replies) out.push_back(r.dump());
    return out;
  }

 private:
  struct PayloadError : std::runtime_error {
    using std::runtime_error::runtime_error;
  };

  static json error(const std::string& code, const std::string& detail) {
    return {{"type", "error"}, {"code", code}, {"detail", detail}};
  }

  json snapshot() const { return {{"type", "snapshot"}, {"state", to_json(pipeline_->state())}}; }

  static double number(const json& msg, const char* key) {
    if (!msg.contains(key) || !msg[key].is_number()) throw PayloadError(std::string("missing number '") + key + "'");
    return msg[key].get<double>();
  }

  static Vec3 vec(const json& msg, const char* key) {
    if (!msg.contains(key) || !msg[key].is_array() || msg[key].size() != 3) {
      throw PayloadError(std::string("'") + key + "' must be [x, y, z]");
    }
    const auto& a = msg[key];
    for (const auto& v : a) {
      if (!v.is_number()) throw PayloadError(std::string("'") + key + "' must hold numbers");
    }
    return {a[0].get<double>(), a[1].get<double>(), a[2].get<double>()};
  }

  static std::array<bool, 5> fingers(const json& msg) {
    if (!msg.contains("fingers") || !msg["fingers"].is_array() || msg["fingers"].size() != 5) {
      throw PayloadError("'fingers' must hold 5 flags");
    }
    std::array<bool, 5> out{};
    for (std::size_t i = 0; i < 5; ++i) {
      const auto& v = msg["fingers"][i];
      if (v.is_boolean()) out[i] = v.get<bool>();
      else if (v.is_number_integer() && (v.get<int>() == 0 || v.get<int>() == 1)) out[i] = v.get<int>() == 1;
      else throw PayloadError("'fingers' must hold 5 flags");
    }
    return out;
  }

  static void check(const HandFrame& f) {
    if (auto why = validate(f); !why.empty()) throw PayloadError(why);
  }

  HandFrame parse_frame(const json& msg) const {
    HandFrame f;
    f.t = number(msg, "t");
    f.hand_present = msg.value("hand_present", true);
    f.palm_pos = vec(msg, "palm_pos");
    f.palm_normal = vec(msg, "palm_normal");
    f.pinch_strength = number(msg, "pinch");
    f.grab_strength = number(msg, "grab");
    f.fingers_extended = fingers(msg);
    f.confidence = msg.contains("confidence") ? number(msg, "confidence") : 1.0;
    check(f);
    return f;
  }

  HandFrame parse_virtual_control(const json& msg) const {
    HandFrame f;
    f.t = last_t_ ? *last_t_ + kFramePeriod : 0.0;
    f.palm_pos = {number(msg, "x"), number(msg, "y"), number(msg, "z")};
    if (msg.contains("normal")) f.palm_normal = normalized(vec(msg, "normal"));
    f.pinch_strength = number(msg, "pinch");
    f.grab_strength = number(msg, "grab");
    f.fingers_extended = fingers(msg);
    check(f);
    return f;
  }

  std::vector<json> on_hello(const json& msg) {
    IvisState initial;
    if (msg.contains("nav_method")) {
      const auto m = msg["nav_method"].is_string() ? nav_method_from_string(msg["nav_method"].get<std::string>())
                                                   : std::nullopt;
      if (!m) return {error("parse", "nav_method must be finger or radial")};
      initial.nav_method = *m;
    }
    pipeline_.emplace(cfg_, initial);
    kin_ = StreamingKinematics{};
    last_t_.reset();
    return {snapshot()};
  }

  std::vector<json> on_frame(const HandFrame& f) {
    if (last_t_ && !(f.t > *last_t_)) {
      throw OutOfOrderFrame("frame at t=" + std::to_string(f.t) + " does not follow t=" + std::to_string(*last_t_));
    }
    last_t_ = f.t;
    std::vector<json> out;
    bool changed = false;
    for (const auto& ready : kin_.push(f)) {
      const FrameOutput fo = pipeline_->process(ready.frame, ready.kin);
      append(fo, out);
      changed = changed || fo.state_changed;
    }
    if (changed || out.empty()) out.push_back(snapshot());
    return out;
  }

  std::vector<json> on_trigger(const json& msg) {
    const auto stim = msg.contains("stimulus") && msg["stimulus"].is_string()
                          ? stimulus_from_string(msg["stimulus"].get<std::string>())
                          : std::nullopt;
    if (!stim) return {error("parse", "stimulus must be IncomingCall, RouteSuggestion or CallerHangup")};
    std::vector<json> out;
    append(pipeline_->inject(*stim, last_t_.value_or(0.0)), out);
    out.push_back(snapshot());
    return out;
  }

  std::vector<json> on_set_nav(const json& msg) {
    const auto m = msg.contains("method") && msg["method"].is_string()
                       ? nav_method_from_string(msg["method"].get<std::string>())
                       : std::nullopt;
    if (!m) return {error("parse", "method must be finger or radial")};
    std::vector<json> out;
    append(pipeline_->set_nav_method(*m, last_t_.value_or(0.0)), out);
    out.push_back(snapshot());
    return out;
  }

  static void append(const FrameOutput& fo, std::vector<json>& out) {
    for (const auto& e : fo.events) out.push_back({{"type", "event"}, {"event", to_json(e)}});
    for (const auto& e : fo.effects) out.push_back({{"type", "effect"}, {"t", e.t}, {"effect", to_json(e.effect)}});
    if (fo.focal) out.push_back({{"type", "focal"}, {"sample", to_json(*fo.focal)}});
  }

  RecognizerConfig cfg_;
  std::optional<Pipeline> pipeline_;
  StreamingKinematics kin_;
  std::optional<double> last_t_;
};

/// Replays client messages (one JSON object per line; blank lines and `#`
/// comments skipped) through a fresh session. Output lines are `> message`
/// followed by one `< reply` per server message.
inline std::string transcript(std::string_view input, RecognizerConfig cfg = {}) {
  BridgeSession session(cfg);
  std::istringstream lines{std::string(input)};
  std::string line, text;
  while (std::getline(lines, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    text += "> " + line + "\n";
    for (const auto& r : session.handle_text(line)) text += "< " + r + "\n";
  }
  return text;
}

}  // namespace haptivis
