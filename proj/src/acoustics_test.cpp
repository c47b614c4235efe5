#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "home/acoustics.hpp"
#include "home/errors.hpp"
#include "home/generator.hpp"
#include "oracles.hpp"
#include "scenes.hpp"

using namespace home;

namespace {

std::vector<double> lengths(const std::vector<AcousticPath>& paths) {
  std::vector<double> l;
  for (const auto& p : paths) l.push_back(p.length);
  std::sort(l.begin(), l.end());
  return l;
}

AcousticConfig order(int n) {
  AcousticConfig c;
  c.max_order = n;
  return c;
}

}  // namespace

TEST(AirAbsorption, ReferenceRowIsTheModelAtStandardConditions) {
  EXPECT_EQ(reference_air_absorption(), derive_air_absorption(20, 101.325, 50));
}

TEST(AirAbsorption, IncreasesWithFrequency) {
  for (double t : {-20.0, 0.0, 20.0, 50.0})
    for (double h : {0.0, 10.0, 50.0, 100.0}) {
      const auto a = derive_air_absorption(t, 101.325, h);
      for (std::size_t b = 1; b < kBandCount; ++b) EXPECT_GE(a[b], a[b - 1]);
    }
}

TEST(AirAbsorption, KnownMagnitude) {
  // about 0.0027 dB/m at 500 Hz and 0.1 dB/m at 8 kHz for 20 C, 50 % RH
  const auto a = derive_air_absorption(20, 101.325, 50);
  const double to_db = 20 / std::log(10.0);
  EXPECT_NEAR(a[1] * to_db, 0.0027, 0.0005);
  EXPECT_NEAR(a[3] * to_db, 0.105, 0.01);
}

TEST(AirAbsorption, OutOfRangeInputs) {
  for (auto [t, p, h] : {std::tuple{60.0, 101.325, 50.0}, {20.0, 30.0, 50.0}, {20.0, 101.325, 120.0}}) {
    try {
      derive_air_absorption(t, p, h);
      FAIL();
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::RangeError);
    }
  }
}

TEST(ImageSource, ShoeboxFirstOrderHasSevenPaths) {
  const House h = fixture::shoebox(4, 3, 2.5);
  const auto paths = trace_paths(h, {1.0, 1.2, 1.1}, {2.9, 2.1, 1.4}, order(1));
  EXPECT_EQ(paths.size(), 7u);
}

TEST(ImageSource, ShoeboxMatchesClosedForm) {
  const House h = fixture::shoebox(4, 3, 2.5);
  const Vec3 s{1.0, 1.2, 1.1}, l{2.9, 2.1, 1.4};
  for (int n = 0; n <= 3; ++n) {
    const auto got = lengths(trace_paths(h, s, l, order(n)));
    const auto want = fixture::shoebox_image_lengths({4, 3, 2.5}, s, l, n);
    ASSERT_EQ(got.size(), want.size()) << "order " << n;
    for (std::size_t i = 0; i < got.size(); ++i) EXPECT_NEAR(got[i], want[i], 1e-9);
  }
}

TEST(ImageSource, Reciprocity) {
  const House h = generate_house(2);
  const Vec3 a = h.sound_sources[0].position;
  const Vec3 b = a + Vec3{0.7, -0.4, 0.5};
  const auto ab = lengths(trace_paths(h, a, b, order(2)));
  const auto ba = lengths(trace_paths(h, b, a, order(2)));
  ASSERT_EQ(ab.size(), ba.size());
  for (std::size_t i = 0; i < ab.size(); ++i) EXPECT_NEAR(ab[i], ba[i], 1e-9);
}

TEST(ImageSource, ReflectionPointsLieOnTheirSurfaces) {
  const House h = fixture::shoebox(4, 3, 2.5);
  for (const auto& p : trace_paths(h, {1, 1, 1}, {3, 2, 2}, order(2))) {
    ASSERT_EQ(p.points.size(), p.reflection_sequence.size() + 2);
    double len = 0;
    for (std::size_t i = 0; i + 1 < p.points.size(); ++i) len += length(p.points[i + 1] - p.points[i]);
    EXPECT_NEAR(len, p.length, 1e-9);
  }
}

TEST(ImageSource, OccluderRemovesDirectPath) {
  House h = fixture::shoebox(6, 4, 3);
  h.objects.push_back(fixture::box_object("wall", "r0", {3, 2, 1.5}, {0.1, 1.9, 1.4}));
  validate_house(h);
  EXPECT_EQ(trace_paths(h, {1, 2, 1}, {5, 2, 1}, order(0)).size(), 0u);
}

TEST(ImageSource, HigherOrderIsSuperset) {
  const House h = generate_house(3);
  const Vec3 s = h.sound_sources[0].position, l = s + Vec3{1.0, 0.5, 0.3};
  const auto p1 = trace_paths(h, s, l, order(1)), p2 = trace_paths(h, s, l, order(2));
  EXPECT_GE(p2.size(), p1.size());
  double e1 = 0, e2 = 0;
  for (const auto& p : p1) e1 += p.band_gain[1] * p.band_gain[1];
  for (const auto& p : p2) e2 += p.band_gain[1] * p.band_gain[1];
  EXPECT_GE(e2, e1);
}

TEST(ImageSource, SourceOnSurfaceIsDegenerate) {
  const House h = fixture::shoebox(4, 3, 2.5);
  try {
    trace_paths(h, {1, 1, 0}, {2, 2, 1}, order(1));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DegenerateGeometry);
  }
}

TEST(BandAttenuation, MatchesFormula) {
  const House h = fixture::shoebox(4, 3, 2.5);
  const auto paths = trace_paths(h, {1, 1, 1}, {3, 2, 2}, order(1));
  const AcousticConfig cfg;
  for (const auto& p : paths)
    for (std::size_t b = 0; b < kBandCount; ++b) {
      double want = 1.0 / p.length * std::exp(-cfg.air_absorption[b] * p.length);
      for (MaterialId m : p.reflection_materials) want *= std::sqrt(1 - h.materials[m].absorption[b]);
      EXPECT_NEAR(p.band_gain[b], want, 1e-15);
    }
}

TEST(FilterBank, SumsToUnitDcAndIsLinearPhase) {
  const auto& bank = band_filter_bank(16000);
  double dc = 0;
  for (const auto& row : bank) {
    for (int k = 0; k < kFilterTaps; ++k) EXPECT_NEAR(row[k], row[kFilterTaps - 1 - k], 1e-15);
    dc += std::accumulate(row.begin(), row.end(), 0.0);
  }
  EXPECT_NEAR(dc, 1.0, 1e-12);
}

TEST(BuildIr, FrontalSourceIsSymmetric) {
  const House h = fixture::free_field();
  ListenerRig rig;
  rig.head = {0, 0, 1.6};
  const AcousticConfig cfg;
  const auto paths = trace_paths(h, {2, 0, 1.6}, rig.head, cfg);
  ASSERT_EQ(paths.size(), 1u);
  const ImpulseResponse ir = build_ir(paths, rig, cfg);
  EXPECT_EQ(ir.left, ir.right);
}

TEST(BuildIr, LateralSourceLeadsAndIsLouderOnItsSide) {
  const House h = fixture::free_field();
  ListenerRig rig;
  rig.head = {0, 0, 1.6};
  const AcousticConfig cfg;
  const auto paths = trace_paths(h, {0, 2, 1.6}, rig.head, cfg);  // +y is the left side at yaw 0
  const ImpulseResponse ir = build_ir(paths, rig, cfg);
  double el = 0, er = 0;
  for (double v : ir.left) el += v * v;
  for (double v : ir.right) er += v * v;
  EXPECT_GT(el, 10 * er);
  auto first = [](const std::vector<double>& x) {
    return std::find_if(x.begin(), x.end(), [](double v) { return std::abs(v) > 1e-9; }) - x.begin();
  };
  EXPECT_LE(first(ir.left), first(ir.right));
}

TEST(BuildIr, DelayMatchesDistance) {
  const House h = fixture::free_field();
  ListenerRig rig;
  rig.head = {0, 0, 0};
  const AcousticConfig cfg;
  const auto paths = trace_paths(h, {3.43, 0, 0}, rig.head, cfg);
  const ImpulseResponse ir = build_ir(paths, rig, cfg);
  // 10 ms at 16 kHz plus the FIR's 15.5-sample group delay
  const auto peak = std::max_element(ir.left.begin(), ir.left.end()) - ir.left.begin();
  EXPECT_NEAR(static_cast<double>(peak), 160.0 + 15.5, 1.0);
}

TEST(BuildIr, NoPathsGivesSilentEmptyIr) {
  const ImpulseResponse ir = build_ir({}, ListenerRig{}, AcousticConfig{});
  EXPECT_TRUE(ir.empty);
  EXPECT_EQ(ir.left, std::vector<double>{0.0});
}

TEST(RenderFrame, UnitImpulseReproducesIr) {
  const House h = fixture::shoebox(4, 3, 2.5);
  const AcousticConfig cfg;
  const auto paths = trace_paths(h, {1, 1, 1}, {3, 2, 2}, cfg);
  ListenerRig rig;
  rig.head = {3, 2, 2};
  const ImpulseResponse ir = build_ir(paths, rig, cfg);
  SignalSpec impulse;
  impulse.kind = SignalSpec::Kind::sample;
  impulse.samples = {1.0f};
  impulse.sample_rate = cfg.sample_rate;
  const SourceFeed feed{&impulse, 1.0, &ir};
  const StereoFrame f = render_frame(std::span(&feed, 1), ir.left.size(), 0);
  for (std::size_t i = 0; i < ir.left.size(); ++i) {
    EXPECT_EQ(f.left[i], static_cast<float>(ir.left[i]));
    EXPECT_EQ(f.right[i], static_cast<float>(ir.right[i]));
  }
}

TEST(RenderFrame, ConsecutiveFramesAreContinuous) {
  const House h = fixture::shoebox(4, 3, 2.5);
  const AcousticConfig cfg;
  ListenerRig rig;
  rig.head = {3, 2, 1.5};
  const ImpulseResponse ir = build_ir(trace_paths(h, {1, 1, 1}, rig.head, cfg), rig, cfg);
  SignalSpec noise;
  noise.kind = SignalSpec::Kind::noise;
  noise.seed = 5;
  const SourceFeed feed{&noise, 0.5, &ir};
  const StereoFrame whole = render_frame(std::span(&feed, 1), 3200, 0);
  const StereoFrame a = render_frame(std::span(&feed, 1), 1600, 0);
  const StereoFrame b = render_frame(std::span(&feed, 1), 1600, 1600);
  for (std::size_t i = 0; i < 1600; ++i) {
    EXPECT_EQ(whole.left[i], a.left[i]);
    EXPECT_EQ(whole.left[1600 + i], b.left[i]);
  }
}

TEST(RenderFrame, MixedRatesRejected) {
  ImpulseResponse a, b;
  a.left = a.right = b.left = b.right = {1.0};
  b.sample_rate = 22050;
  SignalSpec s;
  const SourceFeed feeds[2] = {{&s, 1.0, &a}, {&s, 1.0, &b}};
  try {
    render_frame(feeds, 10, 0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::RateMismatch);
  }
}

TEST(RenderFrame, InverseDistanceLaw) {
  const House h = fixture::free_field();
  const AcousticConfig cfg;
  SignalSpec tone;
  tone.frequency = 500;
  auto level = [&](double d) {
    ListenerRig rig;
    rig.head = {0, 0, 0};
    const ImpulseResponse ir = build_ir(trace_paths(h, {d, 0, 0}, rig.head, cfg), rig, cfg);
    const SourceFeed feed{&tone, 1.0, &ir};
    return fixture::rms(render_frame(std::span(&feed, 1), 1600, 16000).left);
  };
  EXPECT_NEAR(level(1.0) / level(2.0), 2.0, 0.02);
}
