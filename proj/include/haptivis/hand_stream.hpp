#pragma once

// Hand-tracking frame model, trajectory file I/O and kinematic derivation.

#include <array>
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "haptivis/geometry.hpp"

namespace haptivis {

/// Thrown for malformed or invariant-violating input text.
class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

enum class Finger : std::size_t { Thumb = 0, Index, Middle, Ring, Little };

/// One tracked-hand sample.
struct HandFrame {
  double t = 0.0;
  bool hand_present = true;
  Vec3 palm_pos{0.0, 0.0, 0.20};
  Vec3 palm_normal{0.0, 0.0, -1.0};
  double pinch_strength = 0.0;
  double grab_strength = 0.0;
  std::array<bool, 5> fingers_extended{true, true, true, true, true};
  double confidence = 1.0;

  bool extended(Finger f) const { return fingers_extended[static_cast<std::size_t>(f)]; }

  friend bool operator==(const HandFrame&, const HandFrame&) = default;
};

/// Returns an empty string when the frame satisfies its invariants,
/// otherwise a short reason ("range", "non-finite", "normal").
inline std::string validate(const HandFrame& f) {
  const bool finite = std::isfinite(f.t) && is_finite(f.palm_pos) && is_finite(f.palm_normal) &&
                      std::isfinite(f.pinch_strength) && std::isfinite(f.grab_strength) &&
                      std::isfinite(f.confidence);
  if (!finite) return "non-finite field";
  auto unit = [](double v) { return v >= 0.0 && v <= 1.0; };
  if (!unit(f.pinch_strength) || !unit(f.grab_strength) || !unit(f.confidence)) {
    return "range: strength or confidence outside [0,1]";
  }
  if (f.hand_present && std::abs(norm(f.palm_normal) - 1.0) > 1e-6) {
    return "range: palm_normal is not a unit vector";
  }
  return {};
}

struct Trajectory {
  std::vector<HandFrame> frames;
  double nominal_rate = 100.0;

  bool empty() const { return frames.empty(); }
  std::size_t size() const { return frames.size(); }
};

/// Appends `tail` to `head`; throws std::invalid_argument if `tail` does not
/// start strictly after the last frame of `head`.
inline void append(Trajectory& head, const Trajectory& tail) {
  if (!head.frames.empty() && !tail.frames.empty() && tail.frames.front().t <= head.frames.back().t) {
    throw std::invalid_argument("append: non-monotone timestamp");
  }
  head.frames.insert(head.frames.end(), tail.frames.begin(), tail.frames.end());
}

inline Trajectory shifted(Trajectory traj, double dt) {
  for (auto& f : traj.frames) f.t += dt;
  return traj;
}

// ---------------------------------------------------------------------------
// Text format: one frame per line,
//   t hand_present px py pz nx ny nz pinch grab f0 f1 f2 f3 f4 conf
// space separated, '#' lines ignored.

namespace detail {

inline double parse_double(std::string_view tok, std::size_t line) {
  std::string s(tok);
  char* end = nullptr;
  errno = 0;
  const double v = std::strtod(s.c_str(), &end);
  if (end == s.c_str() || *end != '\0' || errno == ERANGE) {
    throw ParseError(line, "bad number '" + s + "'");
  }
  if (!std::isfinite(v)) throw ParseError(line, "non-finite field");
  return v;
}

inline bool parse_flag(std::string_view tok, std::size_t line) {
  if (tok == "1") return true;
  if (tok == "0") return false;
  throw ParseError(line, "flag must be 0 or 1, got '" + std::string(tok) + "'");
}

inline std::vector<std::string_view> split_ws(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t' || s[i] == '\r')) ++i;
    const std::size_t b = i;
    while (i < s.size() && s[i] != ' ' && s[i] != '\t' && s[i] != '\r') ++i;
    if (i > b) out.push_back(s.substr(b, i - b));
  }
  return out;
}

inline std::string fmt_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace detail

inline constexpr std::size_t kTrajectoryFieldCount = 16;

inline HandFrame parse_frame_record(std::string_view line_text, std::size_t line) {
  const auto tok = detail::split_ws(line_text);
  if (tok.size() != kTrajectoryFieldCount) {
    throw ParseError(line, "missing field: expected 16 fields, got " + std::to_string(tok.size()));
  }
  HandFrame f;
  f.t = detail::parse_double(tok[0], line);
  f.hand_present = detail::parse_flag(tok[1], line);
  f.palm_pos = {detail::parse_double(tok[2], line), detail::parse_double(tok[3], line),
                detail::parse_double(tok[4], line)};
  f.palm_normal = {detail::parse_double(tok[5], line), detail::parse_double(tok[6], line),
                   detail::parse_double(tok[7], line)};
  f.pinch_strength = detail::parse_double(tok[8], line);
  f.grab_strength = detail::parse_double(tok[9], line);
  for (std::size_t i = 0; i < 5; ++i) f.fingers_extended[i] = detail::parse_flag(tok[10 + i], line);
  f.confidence = detail::parse_double(tok[15], line);
  if (auto why = validate(f); !why.empty()) throw ParseError(line, why);
  return f;
}

/// Parses a whole trajectory; any invalid line rejects the input.
inline Trajectory parse_trajectory(std::string_view text, double nominal_rate = 100.0) {
  if (!(nominal_rate > 0.0)) throw std::invalid_argument("nominal_rate must be positive");
  Trajectory traj;
  traj.nominal_rate = nominal_rate;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    std::string_view line = text.substr(pos, nl - pos);
    pos = nl + 1;
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string_view::npos || line[first] == '#') {
      if (nl == text.size()) break;
      continue;
    }
    HandFrame f = parse_frame_record(line, line_no);
    if (!traj.frames.empty() && !(f.t > traj.frames.back().t)) {
      throw ParseError(line_no, "non-monotone timestamp");
    }
    traj.frames.push_back(f);
    if (nl == text.size()) break;
  }
  return traj;
}

inline std::string format_frame_record(const HandFrame& f) {
  using detail::fmt_double;
  std::string s;
  s.reserve(256);
  auto put = [&s](const std::string& tok) {
    if (!s.empty()) s += ' ';
    s += tok;
  };
  put(fmt_double(f.t));
  put(f.hand_present ? "1" : "0");
  put(fmt_double(f.palm_pos.x));
  put(fmt_double(f.palm_pos.y));
  put(fmt_double(f.palm_pos.z));
  put(fmt_double(f.palm_normal.x));
  put(fmt_double(f.palm_normal.y));
  put(fmt_double(f.palm_normal.z));
  put(fmt_double(f.pinch_strength));
  put(fmt_double(f.grab_strength));
  for (bool e : f.fingers_extended) put(e ? "1" : "0");
  put(fmt_double(f.confidence));
  return s;
}

inline std::string write_trajectory(const Trajectory& traj) {
  std::string out = "# t hand_present px py pz nx ny nz pinch grab f0 f1 f2 f3 f4 conf\n";
  for (const auto& f : traj.frames) {
    out += format_frame_record(f);
    out += '\n';
  }
  return out;
}

inline std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << text;
}

inline Trajectory load_trajectory(const std::string& path) {
  try {
    return parse_trajectory(read_text_file(path));
  } catch (const ParseError& e) {
    throw std::runtime_error(path + ": " + e.what());
  }
}

// ---------------------------------------------------------------------------
// Kinematics

struct Kinematics {
  Vec3 vel;
  Vec3 acc;

  friend bool operator==(const Kinematics&, const Kinematics&) = default;
};

struct KinematicTrack {
  std::vector<Kinematics> samples;

  std::size_t size() const { return samples.size(); }
  const Kinematics& operator[](std::size_t i) const { return samples[i]; }
};

namespace detail {

// Three-point derivatives at the middle of (p0,t0),(p1,t1),(p2,t2); valid for
// non-uniform spacing.
inline Kinematics three_point(const HandFrame& a, const HandFrame& b, const HandFrame& c) {
  const double h1 = b.t - a.t;
  const double h2 = c.t - b.t;
  Kinematics k;
  // weighted one-sided slopes; exact for quadratics at any spacing
  k.vel = (c.palm_pos - b.palm_pos) * (h1 / (h2 * (h1 + h2))) + (b.palm_pos - a.palm_pos) * (h2 / (h1 * (h1 + h2)));
  k.acc = ((c.palm_pos - b.palm_pos) / h2 - (b.palm_pos - a.palm_pos) / h1) * (2.0 / (h1 + h2));
  return k;
}

}  // namespace detail

namespace detail {

// One run of consecutive hand-present frames, treated as its own trajectory.
inline void derive_run(const HandFrame* fr, std::size_t n, Kinematics* out) {
  if (n < 2) return;
  if (n == 2) {
    const Vec3 v = (fr[1].palm_pos - fr[0].palm_pos) / (fr[1].t - fr[0].t);
    out[0].vel = v;
    out[1].vel = v;
    return;
  }
  for (std::size_t i = 1; i + 1 < n; ++i) out[i] = three_point(fr[i - 1], fr[i], fr[i + 1]);
  out[0].vel = (fr[1].palm_pos - fr[0].palm_pos) / (fr[1].t - fr[0].t);
  out[0].acc = out[1].acc;
  out[n - 1].vel = (fr[n - 1].palm_pos - fr[n - 2].palm_pos) / (fr[n - 1].t - fr[n - 2].t);
  out[n - 1].acc = out[n - 2].acc;
}

}  // namespace detail

/// Central-difference velocity and acceleration per frame, computed within
/// each run of consecutive hand-present frames so a tracking dropout never
/// reads as motion. Run ends use one-sided velocity and the acceleration of
/// the adjacent interior frame; a lone frame and absent frames yield zeros.
inline KinematicTrack derive_kinematics(const Trajectory& traj) {
  const auto& fr = traj.frames;
  if (fr.empty()) throw std::invalid_argument("derive_kinematics: empty trajectory");
  KinematicTrack out;
  out.samples.resize(fr.size());
  std::size_t i = 0;
  while (i < fr.size()) {
    if (!fr[i].hand_present) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < fr.size() && fr[j].hand_present) ++j;
    detail::derive_run(&fr[i], j - i, &out.samples[i]);
    i = j;
  }
  return out;
}

/// Incremental counterpart of derive_kinematics for live streams. Each pushed
/// frame releases the frames whose derivatives are now known (one frame of
/// lag inside a run; an absent frame closes the run and is released at once).
/// Results match derive_kinematics for every frame; the last one is released
/// only by flush().
class StreamingKinematics {
 public:
  struct Ready {
    HandFrame frame;
    Kinematics kin;
  };

  std::vector<Ready> push(const HandFrame& f) {
    if (last_t_ && !(f.t > *last_t_)) {
      throw std::invalid_argument("StreamingKinematics: non-monotone timestamp");
    }
    last_t_ = f.t;
    if (!f.hand_present) {
      std::vector<Ready> out = flush();
      out.push_back({f, Kinematics{}});
      return out;
    }
    std::vector<Ready> out;
    window_[0] = window_[1];
    window_[1] = window_[2];
    window_[2] = f;
    ++count_;
    if (count_ == 3) {
      const Kinematics mid = detail::three_point(window_[0], window_[1], window_[2]);
      Kinematics first;
      first.vel = (window_[1].palm_pos - window_[0].palm_pos) / (window_[1].t - window_[0].t);
      first.acc = mid.acc;
      out.push_back({window_[0], first});
      out.push_back({window_[1], mid});
      last_acc_ = mid.acc;
    } else if (count_ > 3) {
      const Kinematics mid = detail::three_point(window_[0], window_[1], window_[2]);
      out.push_back({window_[1], mid});
      last_acc_ = mid.acc;
    }
    return out;
  }

  /// Releases whatever is still pending in the current run using the
  /// end-of-run rules.
  std::vector<Ready> flush() {
    std::vector<Ready> out;
    if (count_ == 1) {
      out.push_back({window_[2], Kinematics{}});
    } else if (count_ == 2) {
      const Vec3 v = (window_[2].palm_pos - window_[1].palm_pos) / (window_[2].t - window_[1].t);
      out.push_back({window_[1], Kinematics{v, {}}});
      out.push_back({window_[2], Kinematics{v, {}}});
    } else if (count_ >= 3) {
      const Vec3 v = (window_[2].palm_pos - window_[1].palm_pos) / (window_[2].t - window_[1].t);
      out.push_back({window_[2], Kinematics{v, last_acc_}});
    }
    count_ = 0;
    return out;
  }

  /// Frames held in the current run.
  std::size_t pushed() const { return count_; }

 private:
  std::array<HandFrame, 3> window_{};
  std::size_t count_ = 0;
  Vec3 last_acc_{};
  std::optional<double> last_t_;
};

}  // namespace haptivis
