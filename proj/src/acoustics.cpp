#include "home/acoustics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <sstream>

#include "home/errors.hpp"
#include "home/rng.hpp"

namespace home {

BandArray derive_air_absorption(double temperature_c, double pressure_kpa, double humidity_pct) {
  if (!(temperature_c >= -20 && temperature_c <= 50)) throw Error(ErrorCode::RangeError, "temperature outside -20..50 C");
  if (!(pressure_kpa >= 50 && pressure_kpa <= 110)) throw Error(ErrorCode::RangeError, "pressure outside 50..110 kPa");
  if (!(humidity_pct >= 0 && humidity_pct <= 100)) throw Error(ErrorCode::RangeError, "humidity outside 0..100 %");

  constexpr double kRefPressure = 101.325;
  constexpr double kRefTemp = 293.15;
  constexpr double kTriplePoint = 273.16;
  const double T = temperature_c + 273.15;
  const double pa = pressure_kpa / kRefPressure;
  const double psat = std::pow(10.0, -6.8346 * std::pow(kTriplePoint / T, 1.261) + 4.6151);
  const double h = humidity_pct * psat / pa;  // molar concentration of water vapour, %
  const double fr_o = pa * (24.0 + 4.04e4 * h * (0.02 + h) / (0.391 + h));
  const double fr_n = pa * std::pow(T / kRefTemp, -0.5) * (9.0 + 280.0 * h * std::exp(-4.170 * (std::pow(T / kRefTemp, -1.0 / 3.0) - 1.0)));

  BandArray alpha{};
  double running = 0;
  for (std::size_t b = 0; b < kBandCount; ++b) {
    const double f = kBandCenters[b];
    const double f2 = f * f;
    const double db_per_m =
        8.686 * f2 *
        (1.84e-11 / pa * std::sqrt(T / kRefTemp) +
         std::pow(T / kRefTemp, -2.5) *
             (0.01275 * std::exp(-2239.1 / T) / (fr_o + f2 / fr_o) + 0.1068 * std::exp(-3352.0 / T) / (fr_n + f2 / fr_n)));
    const double nepers = db_per_m * std::log(10.0) / 20.0;
    running = std::max(running, nepers);
    alpha[b] = running;
  }
  return alpha;
}

BandArray reference_air_absorption() {
  static const BandArray row = [] {
    for (const auto& line : detail::data_lines(detail::embedded_file("air_absorption_reference.txt"))) {
      std::istringstream in(line);
      double t, p, h;
      BandArray a{};
      in >> t >> p >> h;
      for (auto& v : a) in >> v;
      if (in) return a;
    }
    throw Error(ErrorCode::IoError, "air_absorption_reference.txt has no data row");
  }();
  return row;
}

void AcousticConfig::validate() const {
  if (max_order < 0) throw Error(ErrorCode::ConfigError, "max_order must be >= 0");
  if (sample_rate < 8000) throw Error(ErrorCode::ConfigError, "sample_rate must be >= 8000");
  if (!(speed_of_sound > 0)) throw Error(ErrorCode::ConfigError, "speed_of_sound must be positive");
  for (double a : air_absorption)
    if (!(a >= 0)) throw Error(ErrorCode::ConfigError, "air absorption must be >= 0");
}

BandArray band_attenuation(const AcousticPath& path, const MaterialTable& materials, const AcousticConfig& cfg) {
  BandArray g{};
  for (std::size_t b = 0; b < kBandCount; ++b) {
    double v = 1.0 / path.length;
    for (MaterialId m : path.reflection_materials) v *= std::sqrt(1.0 - materials[m].absorption[b]);
    v *= std::exp(-cfg.air_absorption[b] * path.length);
    g[b] = v;
  }
  return g;
}

namespace {

bool point_in_triangle(Vec3 p, const std::array<Vec3, 3>& t, Vec3 n) {
  constexpr double eps = -1e-10;
  return dot(cross(t[1] - t[0], p - t[0]), n) >= eps && dot(cross(t[2] - t[1], p - t[1]), n) >= eps &&
         dot(cross(t[0] - t[2], p - t[2]), n) >= eps;
}

bool point_on_surface(Vec3 p, const PlanarSurface& s) {
  // triangles may be wound either way relative to the stored normal
  for (const auto& t : s.triangles) {
    const Vec3 tn = cross(t[1] - t[0], t[2] - t[0]);
    if (point_in_triangle(p, t, dot(tn, s.normal) >= 0 ? s.normal : -s.normal)) return true;
  }
  return false;
}

double plane_distance(const PlanarSurface& s, Vec3 p) { return dot(s.normal, p) - s.offset; }

struct Tracer {
  const RayScene& scene;
  const std::vector<PlanarSurface>& surfaces;
  Vec3 source, listener;
  const AcousticConfig& cfg;
  std::vector<AcousticPath> out;

  std::vector<int> seq;
  std::vector<Vec3> images;  // images[0] = source

  void validate_current() {
    const int k = static_cast<int>(seq.size());
    std::vector<Vec3> rev{listener};
    Vec3 p = listener;
    for (int j = k; j >= 1; --j) {
      const PlanarSurface& s = surfaces[static_cast<std::size_t>(seq[j - 1])];
      const Vec3 img = images[static_cast<std::size_t>(j)];
      const double dp = plane_distance(s, p), di = plane_distance(s, img);
      if (!(dp > 1e-12) || !(di < -1e-12)) return;
      const double t = dp / (dp - di);
      const Vec3 r = p + (img - p) * t;
      if (!point_on_surface(r, s)) return;
      rev.push_back(r);
      p = r;
    }
    rev.push_back(source);
    std::reverse(rev.begin(), rev.end());
    for (std::size_t i = 0; i + 1 < rev.size(); ++i)
      if (scene.occluded(rev[i], rev[i + 1], 1e-6)) return;

    AcousticPath path;
    for (int id : seq) {
      path.reflection_sequence.push_back(surfaces[static_cast<std::size_t>(id)].id);
      path.reflection_materials.push_back(surfaces[static_cast<std::size_t>(id)].material);
    }
    path.length = length(listener - images[static_cast<std::size_t>(k)]);
    path.arrival_direction = normalize(rev[rev.size() - 2] - listener);
    path.points = std::move(rev);
    path.band_gain = band_attenuation(path, scene.house().materials, cfg);
    out.push_back(std::move(path));
  }

  void recurse() {
    validate_current();
    if (static_cast<int>(seq.size()) >= cfg.max_order) return;
    const Vec3 img = images.back();
    for (std::size_t s = 0; s < surfaces.size(); ++s) {
      if (!seq.empty() && seq.back() == static_cast<int>(s)) continue;
      const double d = plane_distance(surfaces[s], img);
      if (!(d > 1e-12)) continue;  // image must face the reflecting side
      seq.push_back(static_cast<int>(s));
      images.push_back(img - surfaces[s].normal * (2 * d));
      recurse();
      images.pop_back();
      seq.pop_back();
    }
  }
};

}  // namespace

std::vector<AcousticPath> trace_paths(const RayScene& scene, Vec3 source, Vec3 listener, const AcousticConfig& cfg) {
  cfg.validate();
  if (length(source - listener) <= 0) throw Error(ErrorCode::DegenerateGeometry, "source coincides with listener");
  const auto& surfaces = scene.geometry().surfaces;
  for (const auto& s : surfaces)
    if (std::abs(plane_distance(s, source)) < 1e-9 && point_on_surface(source, s))
      throw Error(ErrorCode::DegenerateGeometry, "source lies on reflecting surface " + s.id);

  Tracer tracer{scene, surfaces, source, listener, cfg, {}, {}, {source}};
  tracer.recurse();
  return std::move(tracer.out);
}

std::vector<AcousticPath> trace_paths(const House& house, Vec3 source, Vec3 listener, const AcousticConfig& cfg) {
  RayScene scene(house, 0.5, cfg.object_surface_min_volume);
  return trace_paths(scene, source, listener, cfg);
}

namespace {

std::array<double, kFilterTaps> windowed_lowpass(double cutoff_hz, double sample_rate) {
  std::array<double, kFilterTaps> h{};
  const double wc = std::min(1.0, 2.0 * cutoff_hz / sample_rate);  // normalized to Nyquist
  constexpr double center = (kFilterTaps - 1) / 2.0;
  for (int k = 0; k < kFilterTaps; ++k) {
    const double x = k - center;
    const double sinc = wc * (x == 0 ? 1.0 : std::sin(kPi * wc * x) / (kPi * wc * x));
    const double window = 0.54 - 0.46 * std::cos(2 * kPi * k / (kFilterTaps - 1));  // Hamming
    h[static_cast<std::size_t>(k)] = sinc * window;
  }
  return h;
}

}  // namespace

const std::array<std::array<double, kFilterTaps>, kBandCount>& band_filter_bank(double sample_rate) {
  using Bank = std::array<std::array<double, kFilterTaps>, kBandCount>;
  static std::mutex mu;
  static std::map<double, Bank> cache;
  std::lock_guard lock(mu);
  auto it = cache.find(sample_rate);
  if (it != cache.end()) return it->second;

  std::array<std::array<double, kFilterTaps>, kBandCount + 1> lp{};
  for (std::size_t b = 0; b + 1 < kBandCount; ++b)
    lp[b + 1] = windowed_lowpass(std::sqrt(kBandCenters[b] * kBandCenters[b + 1]), sample_rate);
  lp[kBandCount] = windowed_lowpass(sample_rate / 2, sample_rate);
  double dc = 0;
  for (double v : lp[kBandCount]) dc += v;

  Bank bank{};
  for (std::size_t b = 0; b < kBandCount; ++b)
    for (int k = 0; k < kFilterTaps; ++k) bank[b][k] = (lp[b + 1][k] - lp[b][k]) / dc;
  return cache.emplace(sample_rate, bank).first->second;
}

ImpulseResponse build_ir(std::span<const AcousticPath> paths, const ListenerRig& rig, const AcousticConfig& cfg) {
  ImpulseResponse ir;
  ir.sample_rate = cfg.sample_rate;
  if (paths.empty()) {
    ir.left.assign(1, 0.0);
    ir.right.assign(1, 0.0);
    ir.empty = true;
    return ir;
  }
  const auto& bank = band_filter_bank(cfg.sample_rate);
  const Vec3 ears[2] = {rig.left_ear(), rig.right_ear()};
  const Vec3 axes[2] = {rig.left_axis(), -rig.left_axis()};

  struct Tap {
    double delay;
    std::array<double, kFilterTaps> kernel;
  };
  std::vector<Tap> taps[2];
  double max_delay = 0;
  for (const AcousticPath& p : paths) {
    if (!std::isfinite(p.length)) throw Error(ErrorCode::DegenerateGeometry, "non-finite path length");
    const Vec3 last = p.points.size() >= 2 ? p.points[p.points.size() - 2] : rig.head + p.arrival_direction;
    const double head_leg = length(last - rig.head);
    for (int e = 0; e < 2; ++e) {
      const double ear_length = p.length - head_leg + length(last - ears[e]);
      const double delay = ear_length / cfg.speed_of_sound * cfg.sample_rate;
      const double pan = (1.0 + dot(p.arrival_direction, axes[e])) / 2.0;
      Tap tap{delay, {}};
      for (std::size_t b = 0; b < kBandCount; ++b)
        for (int k = 0; k < kFilterTaps; ++k) tap.kernel[k] += p.band_gain[b] * pan * bank[b][k];
      taps[e].push_back(tap);
      max_delay = std::max(max_delay, delay);
    }
  }
  const auto len = static_cast<std::size_t>(std::floor(max_delay)) + kFilterTaps + 1;
  ir.left.assign(len, 0.0);
  ir.right.assign(len, 0.0);
  for (int e = 0; e < 2; ++e) {
    auto& out = e == 0 ? ir.left : ir.right;
    for (const Tap& tap : taps[e]) {
      const auto n0 = static_cast<std::size_t>(std::floor(tap.delay));
      const double frac = tap.delay - static_cast<double>(n0);
      for (int k = 0; k < kFilterTaps; ++k) {
        out[n0 + static_cast<std::size_t>(k)] += (1.0 - frac) * tap.kernel[k];
        out[n0 + static_cast<std::size_t>(k) + 1] += frac * tap.kernel[k];
      }
    }
  }
  return ir;
}

double signal_sample(const SignalSpec& signal, std::int64_t index, double sample_rate) {
  if (index < 0) return 0.0;
  switch (signal.kind) {
    case SignalSpec::Kind::sine:
      return std::sin(2 * kPi * signal.frequency * static_cast<double>(index) / sample_rate);
    case SignalSpec::Kind::noise: {
      const std::uint64_t r = mix64(signal.seed * 0x9e3779b97f4a7c15ull ^ static_cast<std::uint64_t>(index));
      return static_cast<double>(r >> 11) * 0x1.0p-52 - 1.0;
    }
    case SignalSpec::Kind::sample:
      return static_cast<std::size_t>(index) < signal.samples.size() ? signal.samples[static_cast<std::size_t>(index)]
                                                                      : 0.0;
  }
  return 0.0;
}

StereoFrame render_frame(std::span<const SourceFeed> sources, std::size_t frame_len, std::int64_t t0) {
  StereoFrame frame;
  frame.left.assign(frame_len, 0.0f);
  frame.right.assign(frame_len, 0.0f);
  if (sources.empty()) return frame;
  const double rate = sources.front().ir->sample_rate;
  for (const auto& s : sources) {
    if (s.ir->sample_rate != rate) throw Error(ErrorCode::RateMismatch, "impulse responses disagree on sample rate");
    if (s.signal->kind == SignalSpec::Kind::sample && s.signal->sample_rate != rate)
      throw Error(ErrorCode::RateMismatch, "sample signal rate differs from the IR rate");
  }

  std::vector<double> acc_l(frame_len, 0.0), acc_r(frame_len, 0.0);
  for (const auto& s : sources) {
    const auto& ir = *s.ir;
    const std::size_t m = ir.left.size();
    // signal history x[t0 - m + 1 .. t0 + frame_len)
    std::vector<double> x(frame_len + m - 1);
    const std::int64_t first = t0 - static_cast<std::int64_t>(m) + 1;
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = s.gain * signal_sample(*s.signal, first + static_cast<std::int64_t>(i), rate);
    for (std::size_t n = 0; n < frame_len; ++n) {
      double l = 0, r = 0;
      const double* xp = x.data() + n + m - 1;  // x at absolute index t0 + n
      for (std::size_t k = 0; k < m; ++k) {
        l += ir.left[k] * xp[-static_cast<std::ptrdiff_t>(k)];
        r += ir.right[k] * xp[-static_cast<std::ptrdiff_t>(k)];
      }
      acc_l[n] += l;
      acc_r[n] += r;
    }
  }
  for (std::size_t n = 0; n < frame_len; ++n) {
    frame.left[n] = static_cast<float>(acc_l[n]);
    frame.right[n] = static_cast<float>(acc_r[n]);
  }
  return frame;
}

}  // namespace home
