#pragma once

// Mid-air haptic sensations rendered as single-focus paths.
//
// Circle-family sensations trace a circle in the palm plane at a 70 Hz
// repetition rate. That path rate is independent of the 200 Hz AM envelope
// applied downstream by the acoustic renderer.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "haptivis/geometry.hpp"
#include "haptivis/hand_stream.hpp"

namespace haptivis {

enum class SensationKind { CircleTap, DoubleTap, ScanLine, FingerScan, OpenCircle, CloseCircle, ValueCircle, AnchorCircle };

enum class EnvelopeMode { AM200Hz, STM };

enum class LineDirection { Left, Right };

inline const char* to_string(SensationKind k) {
  switch (k) {
    case SensationKind::CircleTap: return "CircleTap";
    case SensationKind::DoubleTap: return "DoubleTap";
    case SensationKind::ScanLine: return "ScanLine";
    case SensationKind::FingerScan: return "FingerScan";
    case SensationKind::OpenCircle: return "OpenCircle";
    case SensationKind::CloseCircle: return "CloseCircle";
    case SensationKind::ValueCircle: return "ValueCircle";
    case SensationKind::AnchorCircle: return "AnchorCircle";
  }
  return "?";
}

inline const char* to_string(EnvelopeMode m) { return m == EnvelopeMode::AM200Hz ? "AM" : "STM"; }

inline const char* to_string(LineDirection d) { return d == LineDirection::Left ? "left" : "right"; }

namespace haptics {

inline constexpr double kCircleRate = 70.0;       ///< Hz, path repetition
inline constexpr double kCircleRadius = 0.02;     ///< m, 4 cm diameter
inline constexpr double kTapDuration = 0.5;       ///< s
inline constexpr double kDoubleTapOn = 0.3;       ///< s per tap
inline constexpr double kDoubleTapGap = 0.1;      ///< s
inline constexpr double kOpenCloseDuration = 0.7; ///< s
inline constexpr double kOpenCloseMin = 0.01;     ///< m
inline constexpr double kOpenCloseMax = 0.03;     ///< m
inline constexpr double kSweepDuration = 0.4;     ///< s, ScanLine / FingerScan
inline constexpr double kScanLineLength = 0.08;   ///< m
inline constexpr double kFingerBaseOffset = 0.045;///< m from palm center toward the fingers
inline constexpr double kFingerSpan = 0.06;       ///< m, index to little
inline constexpr double kFingerLineLength = 0.02; ///< m
inline constexpr Vec3 kAnchorCenter{0.0, 0.0, 0.20};
inline constexpr double kAnchorIntensity = 0.2;
inline constexpr double kDefaultSampleRate = 4000.0;

}  // namespace haptics

struct Sensation {
  SensationKind kind = SensationKind::CircleTap;
  LineDirection direction = LineDirection::Right;  ///< ScanLine
  double level = 0.0;                              ///< ValueCircle, 0..1
  EnvelopeMode envelope = EnvelopeMode::STM;

  bool world_fixed() const { return kind == SensationKind::AnchorCircle; }

  /// Length of the sensation; nullopt for continuous ones.
  std::optional<double> duration() const {
    switch (kind) {
      case SensationKind::CircleTap: return haptics::kTapDuration;
      case SensationKind::DoubleTap: return 2 * haptics::kDoubleTapOn + haptics::kDoubleTapGap;
      case SensationKind::ScanLine:
      case SensationKind::FingerScan: return haptics::kSweepDuration;
      case SensationKind::OpenCircle:
      case SensationKind::CloseCircle: return haptics::kOpenCloseDuration;
      case SensationKind::ValueCircle:
      case SensationKind::AnchorCircle: return std::nullopt;
    }
    return std::nullopt;
  }

  friend bool operator==(const Sensation&, const Sensation&) = default;
};

struct FocalSample {
  double t = 0.0;
  Vec3 pos{};
  double intensity = 0.0;
  EnvelopeMode envelope = EnvelopeMode::STM;

  friend bool operator==(const FocalSample&, const FocalSample&) = default;
};

struct ValueCircleParams {
  double radius;
  double intensity;
};

/// Level-coupled circle size and strength for value adjustment feedback.
inline ValueCircleParams value_circle_params(double level) {
  if (!(level >= 0.0 && level <= 1.0)) throw std::invalid_argument("value_circle_params: level outside [0,1]");
  return {0.01 + 0.02 * level, 0.3 + 0.7 * level};
}

/// In-plane orthonormal axes for a palm with the given normal. For a level
/// palm (normal along +-z) these are the world x and y axes.
struct PalmBasis {
  Vec3 u;  ///< lateral
  Vec3 v;  ///< toward the fingers
};

inline PalmBasis palm_basis(const Vec3& normal) {
  const Vec3 n = normalized(normal);
  Vec3 u = Vec3{1, 0, 0} - n * n.x;
  if (norm(u) < 1e-6) u = Vec3{0, 1, 0} - n * n.y;
  u = normalized(u);
  Vec3 v = Vec3{0, 1, 0} - n * n.y - u * u.y;
  if (norm(v) < 1e-6) v = cross(u, n);
  v = normalized(v);
  return {u, v};
}

namespace detail {

// Triangle wave in [-1, 1] with the given rate; starts at -1.
inline double triangle(double t, double rate) {
  double phase = t * rate;
  phase -= std::floor(phase);
  return phase < 0.5 ? -1.0 + 4.0 * phase : 3.0 - 4.0 * phase;
}

inline Vec3 circle_point(const Vec3& center, const PalmBasis& b, double radius, double t) {
  const double theta = kTwoPi * haptics::kCircleRate * t;
  return center + b.u * (radius * std::cos(theta)) + b.v * (radius * std::sin(theta));
}

}  // namespace detail

/// Focal sample of `s` at `t` seconds after its trigger, resolved against the
/// hand pose `hand`. Returns nullopt past the end of a finite sensation or
/// inside an inactive window.
inline std::optional<FocalSample> sample_focus(const Sensation& s, double t, const HandFrame& hand,
                                               double sample_rate = haptics::kDefaultSampleRate) {
  using namespace haptics;
  if (!(t >= 0.0)) throw std::invalid_argument("sample_focus: negative t");
  if (!(sample_rate >= 1000.0)) throw std::invalid_argument("sample_focus: sample_rate below 1000 Hz");
  if (auto d = s.duration(); d && t > *d) return std::nullopt;

  const PalmBasis basis = s.world_fixed() ? PalmBasis{{1, 0, 0}, {0, 1, 0}} : palm_basis(hand.palm_normal);
  const Vec3 center = s.world_fixed() ? kAnchorCenter : hand.palm_pos;

  FocalSample out;
  out.t = t;
  out.intensity = 1.0;
  out.envelope = s.envelope;

  switch (s.kind) {
    case SensationKind::CircleTap:
      out.pos = detail::circle_point(center, basis, kCircleRadius, t);
      break;
    case SensationKind::DoubleTap:
      if (t > kDoubleTapOn && t < kDoubleTapOn + kDoubleTapGap) return std::nullopt;
      out.pos = detail::circle_point(center, basis, kCircleRadius, t);
      break;
    case SensationKind::OpenCircle: {
      const double r = kOpenCloseMin + (kOpenCloseMax - kOpenCloseMin) / kOpenCloseDuration * t;
      out.pos = detail::circle_point(center, basis, r, t);
      break;
    }
    case SensationKind::CloseCircle: {
      const double r = kOpenCloseMax - (kOpenCloseMax - kOpenCloseMin) / kOpenCloseDuration * t;
      out.pos = detail::circle_point(center, basis, r, t);
      break;
    }
    case SensationKind::ValueCircle: {
      const auto p = value_circle_params(s.level);
      out.pos = detail::circle_point(center, basis, p.radius, t);
      out.intensity = p.intensity;
      break;
    }
    case SensationKind::AnchorCircle:
      out.pos = detail::circle_point(center, basis, kCircleRadius, t);
      out.intensity = kAnchorIntensity;
      break;
    case SensationKind::ScanLine: {
      // a line across the palm, perpendicular to the swipe, moving with it
      const double sign = s.direction == LineDirection::Right ? 1.0 : -1.0;
      const double along = sign * kScanLineLength * (t / kSweepDuration - 0.5);
      const double across = 0.5 * kScanLineLength * detail::triangle(t, kCircleRate);
      out.pos = center + basis.u * along + basis.v * across;
      break;
    }
    case SensationKind::FingerScan: {
      const double along = kFingerSpan * (t / kSweepDuration - 0.5);
      const double across = kFingerBaseOffset + 0.5 * kFingerLineLength * detail::triangle(t, kCircleRate);
      out.pos = center + basis.u * along + basis.v * across;
      break;
    }
    default:
      throw std::invalid_argument("sample_focus: unknown sensation kind");
  }
  return out;
}

/// Latest frame at or before `t` (first frame if `t` precedes the stream).
inline const HandFrame& hand_at(const Trajectory& traj, double t) {
  if (traj.empty()) throw std::invalid_argument("hand_at: empty trajectory");
  auto it = std::upper_bound(traj.frames.begin(), traj.frames.end(), t,
                             [](double v, const HandFrame& f) { return v < f.t; });
  return it == traj.frames.begin() ? *it : *(it - 1);
}

/// Uniformly sampled timeline of `s` triggered at `t0`. Continuous
/// sensations are rendered for `continuous_duration` seconds. Sample times are
/// absolute (t0 + k / rate); samples in inactive windows are skipped.
inline std::vector<FocalSample> render_sensation(const Sensation& s, double t0, const Trajectory& hand,
                                                 double sample_rate = haptics::kDefaultSampleRate,
                                                 double continuous_duration = 1.0) {
  const double span = s.duration().value_or(continuous_duration);
  const auto n = static_cast<std::size_t>(std::floor(span * sample_rate + 1e-9)) + 1;
  std::vector<FocalSample> out;
  out.reserve(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double local = static_cast<double>(k) / sample_rate;
    if (auto fs = sample_focus(s, local, hand_at(hand, t0 + local), sample_rate)) {
      fs->t = t0 + local;
      out.push_back(*fs);
    }
  }
  return out;
}

inline std::string format_focal_sample(const FocalSample& s) {
  char buf[192];
  std::snprintf(buf, sizeof buf, "%.17g %.17g %.17g %.17g %.17g %s", s.t, s.pos.x, s.pos.y, s.pos.z, s.intensity,
                to_string(s.envelope));
  return buf;
}

/// `t x y z intensity mode` per line.
inline std::string write_timeline(const std::vector<FocalSample>& samples) {
  std::string out = "# t x y z intensity mode\n";
  for (const auto& s : samples) {
    out += format_focal_sample(s);
    out += '\n';
  }
  return out;
}

inline std::vector<FocalSample> parse_timeline(std::string_view text) {
  std::vector<FocalSample> out;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    const std::string_view line = text.substr(pos, nl - pos);
    pos = nl + 1;
    ++line_no;
    const auto tok = detail::split_ws(line);
    if (tok.empty() || tok[0].front() == '#') continue;
    if (tok.size() != 6) throw ParseError(line_no, "expected 6 fields: t x y z intensity mode");
    FocalSample s;
    s.t = detail::parse_double(tok[0], line_no);
    s.pos = {detail::parse_double(tok[1], line_no), detail::parse_double(tok[2], line_no),
             detail::parse_double(tok[3], line_no)};
    s.intensity = detail::parse_double(tok[4], line_no);
    if (s.intensity < 0.0 || s.intensity > 1.0) throw ParseError(line_no, "range: intensity outside [0,1]");
    if (tok[5] == "AM") s.envelope = EnvelopeMode::AM200Hz;
    else if (tok[5] == "STM") s.envelope = EnvelopeMode::STM;
    else throw ParseError(line_no, "mode must be AM or STM");
    out.push_back(s);
  }
  return out;
}

/// CLI names: circle-tap, double-tap, scan-line-left, scan-line-right,
/// finger-scan, open-circle, close-circle, value-circle, anchor-circle.
inline Sensation sensation_from_name(std::string_view name, double level = 0.5) {
  Sensation s;
  if (name == "circle-tap") s.kind = SensationKind::CircleTap;
  else if (name == "double-tap") s.kind = SensationKind::DoubleTap;
  else if (name == "scan-line-left") { s.kind = SensationKind::ScanLine; s.direction = LineDirection::Left; }
  else if (name == "scan-line-right" || name == "scan-line") s.kind = SensationKind::ScanLine;
  else if (name == "finger-scan") s.kind = SensationKind::FingerScan;
  else if (name == "open-circle") s.kind = SensationKind::OpenCircle;
  else if (name == "close-circle") s.kind = SensationKind::CloseCircle;
  else if (name == "value-circle") { s.kind = SensationKind::ValueCircle; s.level = level; }
  else if (name == "anchor-circle") s.kind = SensationKind::AnchorCircle;
  else throw std::invalid_argument("unknown sensation '" + std::string(name) + "'");
  return s;
}

}  // namespace haptivis
