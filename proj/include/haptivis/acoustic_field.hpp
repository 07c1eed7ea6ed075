#pragma once

// Simulated ultrasonic phased array: time-of-flight focusing, monopole
// pressure superposition and drive envelopes.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <stdexcept>
#include <string>
#include <vector>

#include "haptivis/geometry.hpp"
#include "haptivis/haptic_patterns.hpp"

namespace haptivis {

struct TransducerArray {
  std::vector<Vec3> elements;
  std::vector<double> amplitudes;  ///< one per element
  double carrier_freq = 40000.0;   ///< Hz
  double speed_of_sound = 343.0;   ///< m/s

  double wavelength() const { return speed_of_sound / carrier_freq; }
  double wavenumber() const { return kTwoPi * carrier_freq / speed_of_sound; }
  std::size_t size() const { return elements.size(); }
};

/// Empty when valid.
inline std::string validate(const TransducerArray& a) {
  if (a.elements.empty()) return "array has no elements";
  if (a.amplitudes.size() != a.elements.size()) return "one amplitude per element required";
  if (!(a.carrier_freq > 0.0)) return "carrier_freq must be positive";
  if (!(a.speed_of_sound > 0.0)) return "speed_of_sound must be positive";
  return {};
}

/// rows x cols grid on the z = 0 plane centered on the origin.
inline TransducerArray make_grid_array(std::size_t rows = 16, std::size_t cols = 16, double pitch = 0.010) {
  TransducerArray a;
  a.elements.reserve(rows * cols);
  const double x0 = -0.5 * pitch * static_cast<double>(cols - 1);
  const double y0 = -0.5 * pitch * static_cast<double>(rows - 1);
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      a.elements.push_back({x0 + pitch * static_cast<double>(c), y0 + pitch * static_cast<double>(r), 0.0});
    }
  }
  a.amplitudes.assign(a.elements.size(), 1.0);
  return a;
}

struct PhaseSolution {
  std::vector<double> phases;  ///< radians in [0, 2pi)
};

/// Reduces an angle into [0, 2pi).
inline double wrap_phase(double phi) {
  double w = std::fmod(phi, kTwoPi);
  if (w < 0.0) w += kTwoPi;
  if (w >= kTwoPi) w = 0.0;
  return w;
}

class FocusError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

namespace detail {

inline constexpr double kCoincident = 1e-12;

inline void check_array(const TransducerArray& a) {
  if (auto why = validate(a); !why.empty()) throw std::invalid_argument("TransducerArray: " + why);
}

}  // namespace detail

/// Time-of-flight phases: phi_i = -k r_i, shifted so element 0 sits at 0.
/// Every element's emission then arrives at `focal` with the same phase.
inline PhaseSolution solve_focus(const TransducerArray& array, const Vec3& focal) {
  detail::check_array(array);
  const double k = array.wavenumber();
  PhaseSolution sol;
  sol.phases.resize(array.size());
  double r0 = 0.0;
  for (std::size_t i = 0; i < array.size(); ++i) {
    const double r = distance(focal, array.elements[i]);
    if (r < detail::kCoincident) throw FocusError("solve_focus: focal point coincides with element " + std::to_string(i));
    if (i == 0) r0 = r;
    sol.phases[i] = wrap_phase(-k * (r - r0));
  }
  return sol;
}

/// Monopole superposition: sum_i (A_i / r_i) exp(i (k r_i + phi_i)).
inline std::complex<double> pressure_at(const TransducerArray& array, const PhaseSolution& phases, const Vec3& q) {
  detail::check_array(array);
  if (phases.phases.size() != array.size()) throw std::invalid_argument("pressure_at: phase count mismatch");
  const double k = array.wavenumber();
  std::complex<double> p{0.0, 0.0};
  for (std::size_t i = 0; i < array.size(); ++i) {
    const double r = distance(q, array.elements[i]);
    if (r < detail::kCoincident) throw FocusError("pressure_at: query point coincides with element " + std::to_string(i));
    p += std::polar(array.amplitudes[i] / r, k * r + phases.phases[i]);
  }
  return p;
}

enum class Axis { X, Y, Z };

/// Axis-aligned sampling rectangle. For a Z plane the in-plane axes are
/// (u, v) = (x, y); for Y, (x, z); for X, (y, z).
struct Plane {
  Axis normal = Axis::Z;
  double offset = 0.20;
  double u_min = -0.05, u_max = 0.05;
  double v_min = -0.05, v_max = 0.05;
  std::size_t u_count = 101;
  std::size_t v_count = 101;

  Vec3 point(double u, double v) const {
    switch (normal) {
      case Axis::X: return {offset, u, v};
      case Axis::Y: return {u, offset, v};
      case Axis::Z: return {u, v, offset};
    }
    return {u, v, offset};
  }
};

/// Square plane of side `extent` centered on (cu, cv) with samples every
/// `spacing` meters.
inline Plane square_plane(Axis normal, double offset, double cu, double cv, double extent, double spacing) {
  if (!(spacing > 0.0) || !(extent > 0.0)) throw std::invalid_argument("square_plane: extent and spacing must be positive");
  Plane p;
  p.normal = normal;
  p.offset = offset;
  p.u_min = cu - extent / 2;
  p.u_max = cu + extent / 2;
  p.v_min = cv - extent / 2;
  p.v_max = cv + extent / 2;
  p.u_count = p.v_count = static_cast<std::size_t>(std::llround(extent / spacing)) + 1;
  return p;
}

struct FieldGrid {
  std::vector<double> u;       ///< column coordinates
  std::vector<double> v;       ///< row coordinates
  std::vector<double> values;  ///< |p|, row-major (v.size() rows x u.size() cols)
  std::size_t argmax_row = 0;
  std::size_t argmax_col = 0;
  Vec3 argmax_point{};

  double at(std::size_t row, std::size_t col) const { return values[row * u.size() + col]; }
};

inline FieldGrid field_grid(const TransducerArray& array, const PhaseSolution& phases, const Plane& plane) {
  if (plane.u_count < 2 || plane.v_count < 2) throw std::invalid_argument("field_grid: resolution below 2x2");
  if (!(plane.u_min < plane.u_max) || !(plane.v_min < plane.v_max)) throw std::invalid_argument("field_grid: degenerate plane");
  FieldGrid g;
  g.u.resize(plane.u_count);
  g.v.resize(plane.v_count);
  for (std::size_t i = 0; i < plane.u_count; ++i) {
    g.u[i] = plane.u_min + (plane.u_max - plane.u_min) * static_cast<double>(i) / static_cast<double>(plane.u_count - 1);
  }
  for (std::size_t j = 0; j < plane.v_count; ++j) {
    g.v[j] = plane.v_min + (plane.v_max - plane.v_min) * static_cast<double>(j) / static_cast<double>(plane.v_count - 1);
  }
  g.values.resize(plane.u_count * plane.v_count);
  double best = -1.0;
  for (std::size_t row = 0; row < plane.v_count; ++row) {
    for (std::size_t col = 0; col < plane.u_count; ++col) {
      const double mag = std::abs(pressure_at(array, phases, plane.point(g.u[col], g.v[row])));
      g.values[row * plane.u_count + col] = mag;
      if (mag > best) {
        best = mag;
        g.argmax_row = row;
        g.argmax_col = col;
      }
    }
  }
  g.argmax_point = plane.point(g.u[g.argmax_col], g.v[g.argmax_row]);
  return g;
}

/// First row: blank cell then column coordinates; each following row: its
/// coordinate then |p| values.
inline std::string field_grid_csv(const FieldGrid& g) {
  std::string out;
  char buf[32];
  for (double u : g.u) {
    std::snprintf(buf, sizeof buf, ",%.10g", u);
    out += buf;
  }
  out += '\n';
  for (std::size_t row = 0; row < g.v.size(); ++row) {
    std::snprintf(buf, sizeof buf, "%.10g", g.v[row]);
    out += buf;
    for (std::size_t col = 0; col < g.u.size(); ++col) {
      std::snprintf(buf, sizeof buf, ",%.10g", g.at(row, col));
      out += buf;
    }
    out += '\n';
  }
  return out;
}

inline constexpr double kAmRate = 200.0;  ///< Hz

/// Raised-cosine on/off envelope at 200 Hz; 0 at t = 0, 1 at t = 2.5 ms.
inline double am_envelope(double t) { return 0.5 * (1.0 - std::cos(kTwoPi * kAmRate * t)); }

struct DriveFrame {
  double t = 0.0;
  PhaseSolution phases;
  double drive = 0.0;  ///< 0..1
};

/// One phase solution per focal sample. AM samples are scaled by the 200 Hz
/// envelope; STM samples are driven at their intensity.
inline std::vector<DriveFrame> render_timeline(const TransducerArray& array, const std::vector<FocalSample>& samples) {
  std::vector<DriveFrame> out;
  out.reserve(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (i > 0 && samples[i].t < samples[i - 1].t) {
      throw std::invalid_argument("render_timeline: sample " + std::to_string(i) + " is out of order");
    }
    const auto& s = samples[i];
    DriveFrame f;
    f.t = s.t;
    f.phases = solve_focus(array, s.pos);
    f.drive = s.intensity * (s.envelope == EnvelopeMode::AM200Hz ? am_envelope(s.t) : 1.0);
    out.push_back(std::move(f));
  }
  return out;
}

}  // namespace haptivis
