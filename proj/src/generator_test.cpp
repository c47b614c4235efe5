#include <gtest/gtest.h>

#include <set>

#include "home/errors.hpp"
#include "home/generator.hpp"
#include "home/geometry.hpp"
#include "home/scene_io.hpp"

using namespace home;

TEST(Generator, PureFunctionOfSeed) {
  EXPECT_EQ(generate_house(11), generate_house(11));
  EXPECT_NE(generate_house(11), generate_house(12));
}

TEST(Generator, HousesValidate) {
  for (std::uint64_t s = 0; s < 30; ++s) EXPECT_NO_THROW(validate_house(generate_house(s))) << s;
}

TEST(Generator, RespectsRanges) {
  GeneratorParams p;
  p.room_count = {2, 4};
  p.objects_per_room = {5, 8};
  for (std::uint64_t s = 0; s < 20; ++s) {
    const House h = generate_house(s, p);
    EXPECT_GE(h.rooms.size(), 2u);
    EXPECT_LE(h.rooms.size(), 4u);
    for (const Room& r : h.rooms) {
      const auto n = std::count_if(h.objects.begin(), h.objects.end(), [&](const SceneObject& o) { return o.room_id == r.id; });
      EXPECT_LE(n, 8);
    }
  }
}

TEST(Generator, ImpossibleRangesRejected) {
  GeneratorParams p;
  p.room_count = {5, 2};
  EXPECT_THROW(generate_house(0, p), Error);
  p.room_count = {0, 0};
  EXPECT_THROW(generate_house(0, p), Error);
  p.room_count = {3, 3};
  p.objects_per_room = {500, 500};
  try {
    generate_house(0, p);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ParamError);
  }
}

TEST(Generator, StaticObjectsDoNotOverlap) {
  for (std::uint64_t s = 0; s < 10; ++s) {
    const House h = generate_house(s);
    for (std::size_t i = 0; i < h.objects.size(); ++i)
      for (std::size_t j = i + 1; j < h.objects.size(); ++j) {
        AABB a = object_aabb(h.objects[i]), b = object_aabb(h.objects[j]);
        EXPECT_FALSE(a.overlaps(b)) << h.objects[i].id << " " << h.objects[j].id << " seed " << s;
      }
  }
}

TEST(Generator, FirstRoomsAreLivingRoomAndKitchen) {
  const House h = generate_house(5);
  EXPECT_EQ(name_of(h.rooms[0].kind), "living_room");
  EXPECT_EQ(name_of(h.rooms[1].kind), "kitchen");
  EXPECT_EQ(h.lights.size(), h.rooms.size());
  EXPECT_EQ(h.sound_sources.size(), 1u);
}
