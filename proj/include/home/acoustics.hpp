#pragma once

#include <array>
#include <span>
#include <string>
#include <vector>

#include "home/render.hpp"
#include "home/scene.hpp"

namespace home {

using BandArray = std::array<double, kBandCount>;

/// Per-band air attenuation in nepers per meter (amplitude), from the
/// ISO 9613-1 pure-tone model evaluated at the band centers. Valid for
/// -20..50 C, 50..110 kPa, 0..100 % relative humidity; throws RangeError
/// otherwise. Non-decreasing with band frequency.
BandArray derive_air_absorption(double temperature_c, double pressure_kpa, double humidity_pct);

/// The shipped reference row at 20 C, 101.325 kPa, 50 % RH.
BandArray reference_air_absorption();

struct AcousticConfig {
  int max_order = 2;
  double sample_rate = 16000;
  double speed_of_sound = 343;
  BandArray air_absorption = reference_air_absorption();
  double object_surface_min_volume = 0.5;  // m^3 of AABB before an object reflects

  void validate() const;
};

struct AcousticPath {
  std::vector<std::string> reflection_sequence;  // surface ids, source side first
  std::vector<MaterialId> reflection_materials;
  std::vector<Vec3> points;  // source, reflection points..., listener
  double length = 0;
  BandArray band_gain{};
  Vec3 arrival_direction;  // unit, from the listener toward where the sound arrives from

  int order() const { return static_cast<int>(reflection_sequence.size()); }
};

/// gain_b = (1/length) * prod sqrt(1 - absorption_b) * exp(-alpha_b * length).
BandArray band_attenuation(const AcousticPath& path, const MaterialTable& materials, const AcousticConfig& cfg);

/// Specular paths up to cfg.max_order by image-source enumeration over the
/// scene's planar surfaces, each segment checked for occlusion. Band gains
/// are filled in. Throws DegenerateGeometry when the source lies on a
/// reflecting surface.
std::vector<AcousticPath> trace_paths(const RayScene& scene, Vec3 source, Vec3 listener, const AcousticConfig& cfg);
std::vector<AcousticPath> trace_paths(const House& house, Vec3 source, Vec3 listener, const AcousticConfig& cfg);

struct ListenerRig {
  Vec3 head;
  double yaw = 0;
  double ear_offset = 0.09;

  Vec3 left_axis() const { return {-std::sin(yaw), std::cos(yaw), 0}; }
  Vec3 left_ear() const { return head + left_axis() * ear_offset; }
  Vec3 right_ear() const { return head - left_axis() * ear_offset; }
};

struct ImpulseResponse {
  std::vector<double> left, right;
  double sample_rate = 16000;
  bool empty = false;  // built from zero paths

  friend bool operator==(const ImpulseResponse&, const ImpulseResponse&) = default;
};

inline constexpr int kFilterTaps = 32;

/// Linear-phase 4-band FIR bank (rows: bands low to high) for a sample
/// rate. Crossovers sit at the geometric means of adjacent band centers;
/// the rows sum to a half-sample-delay interpolator with unit DC gain.
const std::array<std::array<double, kFilterTaps>, kBandCount>& band_filter_bank(double sample_rate);

/// Stereo IR: per ear and path, the band gains shaped by the FIR bank,
/// scaled by the cosine pan (1 + cos theta) / 2, deposited at the
/// ear-specific delay with two-tap linear interpolation.
ImpulseResponse build_ir(std::span<const AcousticPath> paths, const ListenerRig& rig, const AcousticConfig& cfg);

struct StereoFrame {
  std::vector<float> left, right;
  friend bool operator==(const StereoFrame&, const StereoFrame&) = default;
};

/// Value of a source signal at an absolute sample index (zero before index 0).
double signal_sample(const SignalSpec& signal, std::int64_t index, double sample_rate);

struct SourceFeed {
  const SignalSpec* signal;
  double gain = 1.0;
  const ImpulseResponse* ir;
};

/// Samples [t0, t0 + frame_len) of the sum over sources of signal * IR.
/// Each frame convolves the IR with the signal history it needs, so output
/// is continuous across consecutive frames. Throws RateMismatch when IRs
/// disagree on sample rate.
StereoFrame render_frame(std::span<const SourceFeed> sources, std::size_t frame_len, std::int64_t t0);

}  // namespace home
