#include <gtest/gtest.h>

#include <cmath>

#include "home/errors.hpp"
#include "home/generator.hpp"
#include "home/physics.hpp"
#include "home/rng.hpp"
#include "scenes.hpp"

using namespace home;

namespace {

RigidBody free_box(Vec3 center, Vec3 half, double mass) {
  RigidBody b;
  b.object_id = "b";
  b.position = center;
  b.half_extents = half;
  b.mass = mass;
  return b;
}

PhysicsWorld ground_world(double dt) {
  PhysicsConfig cfg;
  cfg.dt = dt;
  PhysicsWorld w(House{}, cfg);
  w.add_ground_plane(0);
  return w;
}

/// Time of first contact for a box whose bottom starts at height h.
double contact_time(double h, double dt) {
  PhysicsWorld w = ground_world(dt);
  const auto i = w.add_body(free_box({0, 0, h + 0.1}, {0.1, 0.1, 0.1}, 1));
  while (!w.bodies()[i].supported) w.step();
  return w.time();
}

}  // namespace

TEST(MakeBody, MassFromDensityAndVolume) {
  const auto o = fixture::box_object("o", "r0", {0, 0, 0.5}, {0.5, 0.5, 0.5}, true, "wood");
  EXPECT_NEAR(make_body(o, BodyRepresentation::box, MaterialTable::standard()).mass, 700, 1e-9);
  const auto small = fixture::box_object("s", "r0", {0, 0, 0.05}, {0.05, 0.05, 0.05}, true, "wood");
  EXPECT_NEAR(make_body(small, BodyRepresentation::box, MaterialTable::standard()).mass, 0.7, 1e-9);
}

TEST(MakeBody, StaticObjectHasInfiniteMass) {
  const auto o = fixture::box_object("o", "r0", {0, 0, 0.5}, {0.5, 0.5, 0.5}, false);
  const RigidBody b = make_body(o, BodyRepresentation::box, MaterialTable::standard());
  EXPECT_TRUE(b.is_static);
  EXPECT_TRUE(std::isinf(b.mass));
  EXPECT_EQ(b.inverse_mass(), 0);
}

TEST(MakeBody, OpenMeshFallsBackToBox) {
  auto o = fixture::box_object("o", "r0", {0, 0, 0.5}, {0.5, 0.5, 0.5}, true);
  o.mesh.triangles.pop_back();
  o.mesh.triangle_material.pop_back();
  const RigidBody b = make_body(o, BodyRepresentation::mesh, MaterialTable::standard());
  EXPECT_EQ(b.representation, BodyRepresentation::box);
  EXPECT_TRUE(b.representation_fallback);
  EXPECT_NEAR(b.mass, 700, 1e-9);
}

TEST(Step, RestingBodyStaysPut) {
  PhysicsWorld w = ground_world(1.0 / 120);
  const auto i = w.add_body(free_box({1, 2, 0.25}, {0.25, 0.25, 0.25}, 3));
  const Vec3 before = w.bodies()[i].position;
  w.step();
  EXPECT_NEAR(length(w.bodies()[i].position - before), 0, 1e-9);
}

TEST(Step, FreeFallContactTime) {
  for (double h : {0.5, 1.0, 2.0}) {
    const double dt = 1e-3;
    EXPECT_NEAR(contact_time(h, dt), std::sqrt(2 * h / 9.81), 2 * dt) << h;
  }
}

TEST(Step, SettlesAtHalfExtent) {
  PhysicsWorld w = ground_world(1e-3);
  const auto i = w.add_body(free_box({0, 0, 1.0}, {0.1, 0.1, 0.15}, 1));
  for (int k = 0; k < 2000; ++k) w.step();
  EXPECT_NEAR(w.bodies()[i].position.z, 0.15, 1e-3);
}

TEST(Step, ZeroGravityKeepsVelocity) {
  PhysicsConfig cfg;
  cfg.gravity = {0, 0, 0};
  PhysicsWorld w(House{}, cfg);
  const auto i = w.add_body(free_box({0, 0, 5}, {0.1, 0.1, 0.1}, 1));
  w.bodies()[i].velocity = {1, -2, 0.5};
  for (int k = 0; k < 100; ++k) w.step();
  EXPECT_EQ(w.bodies()[i].velocity, (Vec3{1, -2, 0.5}));
}

TEST(Step, TimeAdvancesByWholeSteps) {
  PhysicsWorld w = ground_world(0.01);
  for (int k = 0; k < 7; ++k) w.step();
  EXPECT_EQ(w.step_count(), 7u);
  EXPECT_EQ(w.time(), 7 * 0.01);
}

TEST(Step, NoTunnelingThroughFloor) {
  Rng rng(1);
  for (int trial = 0; trial < 300; ++trial) {
    PhysicsWorld w = ground_world(1e-3);
    const double hz = rng.uniform(0.01, 0.3);
    const auto i = w.add_body(free_box({0, 0, hz + rng.uniform(0, 3)}, {0.1, 0.1, hz}, 1));
    w.bodies()[i].velocity = {0, 0, -rng.uniform(0, 5)};
    for (int k = 0; k < 1000 && !w.bodies()[i].asleep; ++k) {
      w.step();
      ASSERT_GE(w.bodies()[i].position.z - hz, -1e-3);
    }
  }
}

TEST(Push, ImpulseMomentum) {
  PhysicsConfig cfg;
  cfg.gravity = {0, 0, 0};
  PhysicsWorld w(House{}, cfg);
  const auto i = w.add_body(free_box({0, 0, 5}, {0.1, 0.1, 0.1}, 2));
  w.apply_push(i, {2, 0, 0});
  EXPECT_EQ(w.bodies()[i].velocity, (Vec3{1, 0, 0}));
  w.apply_push(i, {0, 0, 0});
  EXPECT_EQ(w.bodies()[i].velocity, (Vec3{1, 0, 0}));
}

TEST(Push, WakesSleepingBody) {
  PhysicsWorld w = ground_world(1.0 / 120);
  const auto i = w.add_body(free_box({0, 0, 0.1}, {0.1, 0.1, 0.1}, 1));
  for (int k = 0; k < 120; ++k) w.step();
  ASSERT_TRUE(w.bodies()[i].asleep);
  w.apply_push(i, {0.5, 0, 0});
  EXPECT_FALSE(w.bodies()[i].asleep);
}

TEST(Push, Errors) {
  House h = fixture::shoebox(4, 4, 3);
  h.objects.push_back(fixture::box_object("table", "r0", {2, 2, 0.4}, {0.5, 0.5, 0.4}, false));
  validate_house(h);
  PhysicsWorld w(h);
  try {
    apply_push(w, "table", {1, 0, 0});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::StaticObject);
  }
  try {
    apply_push(w, "ghost", {1, 0, 0});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::UnknownObject);
  }
}

TEST(Friction, SlidingBodyStops) {
  PhysicsWorld w = ground_world(1.0 / 120);
  const auto i = w.add_body(free_box({0, 0, 0.1}, {0.1, 0.1, 0.1}, 1));
  w.apply_push(i, {1, 0, 0});
  for (int k = 0; k < 240; ++k) w.step();
  // Coulomb deceleration mu*g stops 1 m/s within 1/(0.5*9.81) s and 1/(2*0.5*9.81) m
  EXPECT_EQ(w.bodies()[i].velocity.x, 0);
  EXPECT_NEAR(w.bodies()[i].position.x, 1.0 / (2 * 0.5 * 9.81), 0.02);
}

TEST(Sleep, RestingBodyIsByteStable) {
  PhysicsWorld w = ground_world(1.0 / 120);
  const auto i = w.add_body(free_box({0, 0, 0.5}, {0.1, 0.1, 0.1}, 1));
  for (int k = 0; k < 600; ++k) w.step();
  ASSERT_TRUE(w.bodies()[i].asleep);
  const RigidBody snapshot = w.bodies()[i];
  for (int k = 0; k < 10000; ++k) w.step();
  EXPECT_EQ(w.bodies()[i], snapshot);
}

TEST(Collisions, WallsStopPushedBodies) {
  House h = fixture::shoebox(4, 4, 3);
  h.objects.push_back(fixture::box_object("crate", "r0", {2, 2, 0.2}, {0.2, 0.2, 0.2}, true, "cardboard"));
  validate_house(h);
  PhysicsWorld w(h);
  w.apply_push(0, Vec3{100, 0, 0} * w.bodies()[0].mass);
  for (int k = 0; k < 240; ++k) w.step();
  EXPECT_LE(w.bodies()[0].box().max.x, 4.0 + 1e-9);
}

TEST(Collisions, StackedBoxesDoNotInterpenetrate) {
  PhysicsWorld w = ground_world(1.0 / 120);
  const auto a = w.add_body(free_box({0, 0, 0.1}, {0.1, 0.1, 0.1}, 1));
  const auto b = w.add_body(free_box({0.05, 0, 0.6}, {0.1, 0.1, 0.1}, 1));
  for (int k = 0; k < 240; ++k) {
    w.step();
    const AABB ba = w.bodies()[a].box(), bb = w.bodies()[b].box();
    const double pen = std::min({ba.max.x - bb.min.x, bb.max.x - ba.min.x, ba.max.y - bb.min.y,
                                 bb.max.y - ba.min.y, ba.max.z - bb.min.z, bb.max.z - ba.min.z});
    if (ba.overlaps(bb)) EXPECT_LE(pen, 1e-3);
  }
  EXPECT_NEAR(w.bodies()[b].position.z, 0.3, 1e-3);
}

TEST(Collisions, BodyLandsOnStaticTable) {
  House h = fixture::shoebox(4, 4, 3);
  h.objects.push_back(fixture::box_object("table", "r0", {2, 2, 0.4}, {0.5, 0.5, 0.4}, false));
  h.objects.push_back(fixture::box_object("mug", "r0", {2, 2, 1.5}, {0.05, 0.05, 0.05}, true, "ceramic"));
  validate_house(h);
  PhysicsWorld w(h);
  for (int k = 0; k < 240; ++k) w.step();
  EXPECT_NEAR(w.bodies()[1].position.z, 0.85, 1e-9);
}

class Interaction : public ::testing::Test {
 protected:
  void SetUp() override {
    house = fixture::shoebox(8, 8, 3);
    house.objects.push_back(fixture::box_object("mug", "r0", {3, 2, 0.05}, {0.05, 0.05, 0.05}, true, "ceramic"));
    house.objects.push_back(fixture::box_object("sofa", "r0", {5, 5, 0.4}, {1, 0.5, 0.4}, true, "textile"));
    house.objects.push_back(fixture::box_object("far", "r0", {7, 7, 0.05}, {0.05, 0.05, 0.05}, true, "ceramic"));
    validate_house(house);
    world = PhysicsWorld(house);
    pose.position = {2, 2, 0};
    pose.yaw = 0;
  }
  House house;
  PhysicsWorld world;
  AgentPose pose;
};

TEST_F(Interaction, PickMovesObjectToHoldPoint) {
  world.pick(0, pose, 0);
  EXPECT_TRUE(world.bodies()[0].held);
  EXPECT_NEAR(length(world.bodies()[0].position - Vec3{2.5, 2, 1.4}), 0, 1e-12);
  pose.position = {3, 3, 0};
  pose.yaw = kPi / 2;
  world.update_held(0, pose);
  EXPECT_NEAR(length(world.bodies()[0].position - Vec3{3, 3.5, 1.4}), 0, 1e-12);
  for (int k = 0; k < 50; ++k) world.step();  // held objects do not fall
  EXPECT_NEAR(world.bodies()[0].position.z, 1.4, 1e-12);
}

TEST_F(Interaction, PickErrors) {
  auto code = [&](auto f) {
    try {
      f();
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::IoError;
  };
  EXPECT_EQ(code([&] { world.pick(0, pose, 2); }), ErrorCode::OutOfReach);
  pose.yaw = kPi;  // mug is behind
  EXPECT_EQ(code([&] { world.pick(0, pose, 0); }), ErrorCode::OutOfReach);
  pose.yaw = 0;
  pose.position = {5, 4, 0};
  pose.yaw = kPi / 2;
  EXPECT_EQ(code([&] { world.pick(0, pose, 1); }), ErrorCode::TooHeavy);
  pose.position = {2, 2, 0};
  pose.yaw = 0;
  world.pick(0, pose, 0);
  EXPECT_EQ(code([&] { world.pick(0, pose, 0); }), ErrorCode::HandsFull);
  EXPECT_EQ(code([&] { world.drop(1, pose); }), ErrorCode::NothingHeld);
}

TEST_F(Interaction, DropFallsAndSettlesThenCanBePickedAgain) {
  world.pick(0, pose, 0);
  world.drop(0, pose);
  EXPECT_FALSE(world.bodies()[0].held);
  for (int k = 0; k < 240; ++k) world.step();
  EXPECT_NEAR(world.bodies()[0].position.z, 0.05, 1e-3);
  EXPECT_NO_THROW(world.pick(0, pose, 0));
}

TEST(Determinism, IdenticalWorldsStayIdentical) {
  const House h = generate_house(12);
  PhysicsWorld a(h), b(h);
  for (std::size_t i = 0; i < a.bodies().size(); ++i)
    if (!a.bodies()[i].is_static) {
      a.apply_push(i, {0.3, 0.1, 0.0});
      b.apply_push(i, {0.3, 0.1, 0.0});
    }
  for (int k = 0; k < 500; ++k) {
    a.step();
    b.step();
  }
  EXPECT_EQ(a.bodies(), b.bodies());
}
