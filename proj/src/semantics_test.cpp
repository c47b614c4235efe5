#include <gtest/gtest.h>

#include "home/errors.hpp"
#include "home/generator.hpp"
#include "home/geometry.hpp"
#include "home/rng.hpp"
#include "home/semantics.hpp"
#include "oracles.hpp"
#include "scenes.hpp"

using namespace home;

namespace {
const ColorPalette& basic() { return ColorPalette::shipped(ColorGranularity::basic); }
}  // namespace

TEST(Palette, ShippedSizes) {
  EXPECT_EQ(basic().size(), 16u);
  EXPECT_EQ(ColorPalette::shipped(ColorGranularity::intermediate).size(), 130u);
  EXPECT_EQ(ColorPalette::shipped(ColorGranularity::detailed).size(), 949u);
}

TEST(Palette, EveryEntryIsAFixedPoint) {
  for (auto g : {ColorGranularity::basic, ColorGranularity::intermediate, ColorGranularity::detailed}) {
    const auto& p = ColorPalette::shipped(g);
    for (std::size_t i = 0; i < p.size(); ++i) EXPECT_EQ(quantize_color(p[i].rgb, p), p[i].name);
  }
}

TEST(Palette, NearestNeighbor) {
  EXPECT_EQ(quantize_color({255, 0, 0}, basic()), "red");
  EXPECT_EQ(quantize_color({250, 5, 5}, basic()), "red");
}

TEST(Palette, TiesGoToLowerIndex) {
  const ColorPalette p(ColorGranularity::basic, {{"a", {0, 0, 0}}, {"b", {2, 0, 0}}});
  EXPECT_EQ(quantize_color({1, 0, 0}, p), "a");
}

TEST(Palette, DuplicateNamesRejected) {
  EXPECT_THROW(ColorPalette(ColorGranularity::basic, {{"a", {0, 0, 0}}, {"a", {2, 0, 0}}}), Error);
}

TEST(DominantColor, SolidLayer) {
  const auto o = fixture::box_object("o", "r0", {0, 0, 0}, {0.5, 0.5, 0.5}, false, "wood", {0, 0, 255});
  EXPECT_EQ(dominant_color(o, basic()), "blue");
}

TEST(DominantColor, AreaWeighting) {
  // 5 m^2 red vs 1 m^2 green on a unit cube
  auto o = fixture::box_object("o", "r0", {0, 0, 0}, {0.5, 0.5, 0.5}, false, "wood", {255, 0, 0});
  o.material_layers.push_back({o.material_layers[0].material, Texture::solid({0, 160, 0})});
  o.mesh.triangle_material[10] = o.mesh.triangle_material[11] = 1;
  EXPECT_EQ(dominant_color(o, basic()), "red");
  // green as a 1-texel layer over 5 faces beats a 4-texel red/green grid on one face
  for (auto& l : o.mesh.triangle_material) l = static_cast<std::uint16_t>(1 - l);
  EXPECT_EQ(dominant_color(o, basic()), "green");
}

TEST(DominantColor, EqualAreaTieGoesToEarlierPaletteEntry) {
  auto o = fixture::box_object("o", "r0", {0, 0, 0}, {0.5, 0.5, 0.5}, false, "wood", {0, 160, 0});
  o.material_layers[0].texture = {2, 1, {{0, 160, 0}, {255, 0, 0}}};  // green and red texels, equal weight
  EXPECT_EQ(dominant_color(o, basic()), "red");  // red precedes green in the basic palette
}

TEST(DominantMaterial, LargestAreaWins) {
  auto o = fixture::box_object("o", "r0", {0, 0, 0}, {0.5, 0.5, 0.5}, false, "textile");
  o.material_layers.push_back({*MaterialTable::standard().find("metal"), Texture::solid({1, 1, 1})});
  o.mesh.triangle_material[0] = o.mesh.triangle_material[1] = 1;
  EXPECT_EQ(MaterialTable::standard()[dominant_material(o)].name, "textile");
}

TEST(DominantMaterial, TieGoesToLowerLayer) {
  auto o = fixture::box_object("o", "r0", {0, 0, 0}, {0.5, 0.5, 0.5}, false, "metal");
  o.material_layers.push_back({*MaterialTable::standard().find("glass"), Texture::solid({1, 1, 1})});
  for (std::size_t t = 0; t < 6; ++t) o.mesh.triangle_material[t] = 1;  // -x,+x,-y faces
  EXPECT_EQ(MaterialTable::standard()[dominant_material(o)].name, "metal");
}

TEST(DominantMaterial, AgreesWithAreaArgmaxOnGeneratedObjects) {
  const House h = generate_house(6);
  for (const auto& o : h.objects) {
    const auto areas = surface_area_by_layer(o.mesh);
    int best = -1;
    double best_a = -1;
    for (const auto& [l, a] : areas)
      if (a > best_a) best_a = a, best = l;
    EXPECT_EQ(dominant_material(o), o.material_layers[static_cast<std::size_t>(best)].material);
  }
}

TEST(SizeClass, ClosedMiddleInterval) {
  CategoryVolumeStats stats;
  std::vector<double> v;
  for (int i = 1; i <= 100; ++i) v.push_back(i);
  const FineCategoryId cat{10};
  stats.add(cat, CategoryVolumeStats::summarize(v));
  const auto* e = stats.find(cat);
  EXPECT_EQ(size_class(0.5, cat, stats).size, SizeClass::small);
  EXPECT_EQ(size_class(e->p33, cat, stats).size, SizeClass::medium);
  EXPECT_EQ(size_class(e->p67, cat, stats).size, SizeClass::medium);
  EXPECT_EQ(size_class(std::nextafter(e->p67, 1e9), cat, stats).size, SizeClass::large);
  EXPECT_DOUBLE_EQ(e->p33, fixture::sorted_percentile(v, 0.33));
}

TEST(SizeClass, SparseCategoryFallsBack) {
  CategoryVolumeStats stats;
  stats.add(FineCategoryId{10}, CategoryVolumeStats::summarize({2.0}));
  const auto r = size_class(100.0, FineCategoryId{10}, stats);
  EXPECT_EQ(r.size, SizeClass::medium);
  EXPECT_TRUE(r.fallback);
  EXPECT_TRUE(size_class(1.0, FineCategoryId{11}, stats).fallback);
}

TEST(SizeClass, MonotoneUnderScaling) {
  const House h = generate_house(8);
  const auto& stats = CategoryVolumeStats::shipped();
  for (const auto& o : h.objects) {
    auto big = o;
    big.mesh = scaled(o.mesh, 1.5);
    EXPECT_GE(static_cast<int>(size_class(big, stats).size), static_cast<int>(size_class(o, stats).size));
  }
}

TEST(VolumeStats, TextRoundTripAndShippedTableIsMonotone) {
  const auto stats = CategoryVolumeStats::from_generated(5);
  const auto back = CategoryVolumeStats::parse(stats.to_text());
  ASSERT_EQ(back.entries().size(), stats.entries().size());
  for (const auto& [id, e] : stats.entries()) {
    EXPECT_EQ(back.entries().at(id).p33, e.p33);
    EXPECT_EQ(back.entries().at(id).p67, e.p67);
  }
  EXPECT_FALSE(CategoryVolumeStats::shipped().entries().empty());
  for (const auto& [id, e] : CategoryVolumeStats::shipped().entries()) EXPECT_LE(e.p33, e.p67);
}

TEST(VolumeStats, MalformedTextRejected) {
  EXPECT_THROW(CategoryVolumeStats::parse("5\tmug\t3\n"), Error);
  EXPECT_THROW(CategoryVolumeStats::parse("5\tmug\t3\t2.0\t1.0\n"), Error);
}

TEST(Describe, Template) {
  SemanticRecord r;
  r.size = SizeClass::large;
  r.color[0] = "brown";
  r.material = "wood";
  r.fine_category = "table";
  r.room_kind = "kitchen";
  EXPECT_EQ(describe(r), "a large brown wood table in the kitchen");
  r.size = SizeClass::small;
  r.color[0] = "white";
  r.material = "ceramic";
  r.fine_category = "mortar and pestle";
  EXPECT_EQ(describe(r), "a small white ceramic mortar and pestle in the kitchen");
  EXPECT_EQ(describe(r), describe(r));
}

TEST(Records, CompleteForEveryGeneratedObject) {
  for (std::uint64_t s = 0; s < 5; ++s) {
    const House h = generate_house(s);
    for (const auto& o : h.objects) {
      const SemanticRecord r = make_record(h, o);
      EXPECT_EQ(r.object_id, o.id);
      for (const auto& c : r.color) EXPECT_FALSE(c.empty());
      EXPECT_FALSE(r.category.empty());
      EXPECT_FALSE(r.fine_category.empty());
      EXPECT_TRUE(MaterialTable::standard().find(r.material).has_value());
      EXPECT_FALSE(r.room_id.empty());
      EXPECT_EQ(r.description, describe(r));
      EXPECT_NE(record_to_json_line(r).find("\"description\""), std::string::npos);
    }
  }
}

TEST(Legend, StructureOnlyHouse) {
  const auto legend = segmentation_legend(fixture::shoebox(3, 3, 2.5));
  EXPECT_EQ(legend.size(), 3u);
  EXPECT_EQ(legend.at(kFineWall.value), "wall");
  EXPECT_EQ(legend.at(kFineFloor.value), "floor");
}

TEST(Legend, BoundedByTaxonomy) {
  const auto legend = segmentation_legend(generate_house(1));
  EXPECT_LE(legend.size(), kFineCategoryCount);
}

TEST(SizeClass, MatchesSortOracleOnRandomSets) {
  Rng rng(99);
  for (int set = 0; set < 200; ++set) {
    std::vector<double> v(static_cast<std::size_t>(rng.range(3, 60)));
    for (auto& x : v) x = rng.uniform(0.001, 5.0);
    CategoryVolumeStats stats;
    stats.add(FineCategoryId{20}, CategoryVolumeStats::summarize(v));
    const double p33 = fixture::sorted_percentile(v, 0.33), p67 = fixture::sorted_percentile(v, 0.67);
    for (int q = 0; q < 20; ++q) {
      const double x = rng.uniform(0, 5.5);
      const SizeClass want = x < p33 ? SizeClass::small : x > p67 ? SizeClass::large : SizeClass::medium;
      EXPECT_EQ(size_class(x, FineCategoryId{20}, stats).size, want);
    }
  }
}
