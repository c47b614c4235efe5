#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "home/scene.hpp"

namespace home {

struct PhysicsConfig {
  double dt = 1.0 / 120.0;
  Vec3 gravity{0, 0, -9.81};
  double restitution = 0.0;
  double friction = 0.5;
  double sleep_speed = 0.01;  // m/s
  double sleep_time = 0.5;    // s
  double slop = 1e-3;         // m
  double reach = 1.5;         // m, horizontal
  double reach_angle = deg_to_rad(60.0);
  double carry_limit = 30.0;  // kg
  double eye_height = 1.6;
  double hold_forward = 0.5;
  double hold_below_eye = 0.2;

  void validate() const;
};

enum class BodyRepresentation : std::uint8_t { box, mesh };

struct RigidBody {
  std::string object_id;
  std::size_t object_index = 0;
  BodyRepresentation representation = BodyRepresentation::box;
  bool representation_fallback = false;  // mesh requested but not watertight
  Vec3 position;                         // AABB center, world
  double yaw = 0;
  Vec3 velocity;
  Vec3 half_extents;
  Vec3 anchor_offset;  // object translation minus AABB center
  double mass = 0;
  bool is_static = false;  // infinite mass
  bool asleep = false;
  double still_time = 0;
  bool held = false;
  bool supported = false;  // resting on something after the last step

  AABB box() const { return {position - half_extents, position + half_extents}; }
  double inverse_mass() const { return is_static ? 0.0 : 1.0 / mass; }
  friend bool operator==(const RigidBody&, const RigidBody&) = default;
};

/// mass = density(dominant material) * mesh volume; static objects get an
/// infinite-mass body. A mesh request on a non-watertight mesh falls back to
/// the box representation (volume of the AABB) with the fallback flag set.
RigidBody make_body(const SceneObject& obj, BodyRepresentation rep, const MaterialTable& materials);

struct AgentPose {
  Vec3 position;  // feet
  double yaw = 0;
  Vec3 velocity;
};

struct HeldSlot {
  std::uint32_t agent = 0;
  std::optional<std::size_t> body;  // index into PhysicsWorld::bodies
  Vec3 offset;                      // in the agent frame: forward, left, up from the feet
  friend bool operator==(const HeldSlot&, const HeldSlot&) = default;
};

class PhysicsWorld {
 public:
  PhysicsWorld() = default;
  explicit PhysicsWorld(const House& house, PhysicsConfig cfg = {},
                        BodyRepresentation rep = BodyRepresentation::box);

  const PhysicsConfig& config() const { return cfg_; }
  std::vector<RigidBody>& bodies() { return bodies_; }
  const std::vector<RigidBody>& bodies() const { return bodies_; }
  std::uint64_t step_count() const { return steps_; }
  double time() const { return static_cast<double>(steps_) * cfg_.dt; }

  /// Body index for an object id.
  std::optional<std::size_t> find(std::string_view object_id) const;
  /// Object translation matching the body's current position.
  Vec3 object_translation(std::size_t body) const;

  /// Adds an infinite horizontal plane (used by tests and open scenes).
  void add_ground_plane(double z) { planes_.push_back(z); }
  /// Adds a dynamic body not tied to any scene object.
  std::size_t add_body(RigidBody body);

  void step();

  void apply_push(std::size_t body, Vec3 impulse);
  void pick(std::uint32_t agent, const AgentPose& pose, std::size_t body);
  /// Returns the dropped body index.
  std::size_t drop(std::uint32_t agent, const AgentPose& pose);
  /// Moves every held body to its agent's hold point.
  void update_held(std::uint32_t agent, const AgentPose& pose);
  std::optional<std::size_t> held_by(std::uint32_t agent) const;
  Vec3 hold_point(const AgentPose& pose) const;

 private:
  struct Floor {
    std::vector<Vec2> polygon;
    double z;
  };
  struct WallPiece {
    Vec2 a, b;
    Vec2 normal;  // unit
    double z0, z1;
  };

  void resolve_static(RigidBody& b, Vec3 prev) const;
  void resolve_pairs();
  void wake(std::size_t body);

  PhysicsConfig cfg_;
  std::vector<RigidBody> bodies_;
  std::vector<Floor> floors_;
  std::vector<double> planes_;
  std::vector<WallPiece> walls_;
  std::vector<HeldSlot> held_;
  std::uint64_t steps_ = 0;
};

void step_world(PhysicsWorld& world);
void apply_push(PhysicsWorld& world, std::string_view object_id, Vec3 impulse);

}  // namespace home
