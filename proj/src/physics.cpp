#include "home/physics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "home/errors.hpp"
#include "home/geometry.hpp"
#include "home/semantics.hpp"

namespace home {

void PhysicsConfig::validate() const {
  if (!(dt > 0)) throw Error(ErrorCode::ConfigError, "physics.dt must be positive");
  if (!(friction >= 0)) throw Error(ErrorCode::ConfigError, "physics.friction must be >= 0");
  if (!(reach > 0)) throw Error(ErrorCode::ConfigError, "physics.reach must be positive");
  if (!(carry_limit > 0)) throw Error(ErrorCode::ConfigError, "physics.carry_limit must be positive");
  if (restitution < 0 || restitution > 1) throw Error(ErrorCode::ConfigError, "physics.restitution must be in [0,1]");
}

RigidBody make_body(const SceneObject& obj, BodyRepresentation rep, const MaterialTable& materials) {
  RigidBody b;
  b.object_id = obj.id;
  b.representation = rep;
  const AABB box = object_aabb(obj);
  b.position = box.center();
  b.half_extents = box.half_extents();
  b.anchor_offset = obj.transform.translation - b.position;
  b.yaw = std::atan2(obj.transform.rotation.m[3], obj.transform.rotation.m[0]);
  if (!obj.dynamic) {
    b.is_static = true;
    b.mass = std::numeric_limits<double>::infinity();
    return b;
  }
  double volume;
  if (is_watertight(obj.mesh)) {
    volume = mesh_volume(obj.mesh);
  } else {
    if (rep == BodyRepresentation::mesh) {
      b.representation = BodyRepresentation::box;
      b.representation_fallback = true;
    }
    volume = box.volume();
  }
  b.mass = materials[dominant_material(obj)].density * volume;
  if (!(b.mass > 0)) throw Error(ErrorCode::DegenerateGeometry, "object " + obj.id + " has zero mass");
  return b;
}

PhysicsWorld::PhysicsWorld(const House& house, PhysicsConfig cfg, BodyRepresentation rep) : cfg_(cfg) {
  cfg_.validate();
  for (std::size_t i = 0; i < house.objects.size(); ++i) {
    RigidBody b = make_body(house.objects[i], rep, house.materials);
    b.object_index = i;
    bodies_.push_back(std::move(b));
  }
  for (const Room& room : house.rooms) {
    floors_.push_back({room.floor_polygon, room.elevation});
    const std::size_t n = room.floor_polygon.size();
    for (std::size_t e = 0; e < n; ++e) {
      const Vec2 a = room.floor_polygon[e], b = room.floor_polygon[(e + 1) % n];
      const Vec2 d = b - a;
      const double len = length(d);
      if (len <= 0) continue;
      const Vec2 u = d * (1.0 / len);
      const Vec2 normal{-u.y, u.x};
      const double z0 = room.elevation, z1 = room.elevation + room.wall_height;
      std::vector<Door> doors;
      for (const Door& door : room.doors)
        if (door.edge == e) doors.push_back(door);
      std::sort(doors.begin(), doors.end(), [](const Door& x, const Door& y) { return x.offset < y.offset; });
      double cursor = 0;
      for (const Door& door : doors) {
        if (door.offset > cursor) walls_.push_back({a + u * cursor, a + u * door.offset, normal, z0, z1});
        walls_.push_back({a + u * door.offset, a + u * (door.offset + door.width), normal, z0 + door.height, z1});
        cursor = door.offset + door.width;
      }
      if (cursor < len) walls_.push_back({a + u * cursor, b, normal, z0, z1});
    }
  }
}

std::optional<std::size_t> PhysicsWorld::find(std::string_view object_id) const {
  for (std::size_t i = 0; i < bodies_.size(); ++i)
    if (bodies_[i].object_id == object_id) return i;
  return std::nullopt;
}

Vec3 PhysicsWorld::object_translation(std::size_t body) const {
  return bodies_.at(body).position + bodies_.at(body).anchor_offset;
}

std::size_t PhysicsWorld::add_body(RigidBody body) {
  body.object_index = bodies_.size();
  bodies_.push_back(std::move(body));
  return bodies_.size() - 1;
}

void PhysicsWorld::resolve_static(RigidBody& b, Vec3 prev) const {
  const Vec3 h = b.half_extents;
  auto land = [&](double z) {
    b.position.z = z + h.z;
    if (b.velocity.z < 0) b.velocity.z = 0;
    b.supported = true;
  };
  // floors: swept along the fall, so fast bodies cannot pass through
  for (const Floor& f : floors_)
    if (b.position.z - h.z < f.z && prev.z - h.z >= f.z - cfg_.slop && point_in_polygon(f.polygon, xy(b.position)))
      land(f.z);
  for (double z : planes_)
    if (b.position.z - h.z < z && prev.z - h.z >= z - cfg_.slop) land(z);

  for (const WallPiece& w : walls_) {
    if (b.position.z + h.z <= w.z0 || b.position.z - h.z >= w.z1) continue;
    const Vec2 u = w.b - w.a;
    const double len = length(u);
    const Vec2 ud = u * (1.0 / len);
    const double ru = std::abs(ud.x) * h.x + std::abs(ud.y) * h.y;
    const double t = dot(ud, xy(b.position) - w.a);
    if (t + ru <= 0 || t - ru >= len) continue;
    const double rn = std::abs(w.normal.x) * h.x + std::abs(w.normal.y) * h.y;
    const double side = dot(w.normal, xy(prev) - w.a) >= 0 ? 1.0 : -1.0;
    const double d = side * dot(w.normal, xy(b.position) - w.a);
    if (d >= rn) continue;
    const Vec2 push = w.normal * (side * (rn - d));
    b.position.x += push.x;
    b.position.y += push.y;
    const double vn = side * (w.normal.x * b.velocity.x + w.normal.y * b.velocity.y);
    if (vn < 0) {
      b.velocity.x -= side * w.normal.x * vn;
      b.velocity.y -= side * w.normal.y * vn;
    }
  }

  for (const RigidBody& s : bodies_) {
    if (!s.is_static) continue;
    const AABB sb = s.box();
    const AABB bb = b.box();
    if (!bb.overlaps(sb)) continue;
    if (prev.z - h.z >= sb.max.z - cfg_.slop) {
      land(sb.max.z);
      continue;
    }
    const double pen[3] = {std::min(bb.max.x - sb.min.x, sb.max.x - bb.min.x),
                           std::min(bb.max.y - sb.min.y, sb.max.y - bb.min.y),
                           std::min(bb.max.z - sb.min.z, sb.max.z - bb.min.z)};
    int axis = pen[0] <= pen[1] ? 0 : 1;
    if (pen[2] < pen[axis]) axis = 2;
    const double dir = b.position[axis] >= s.position[axis] ? 1.0 : -1.0;
    b.position[axis] += dir * pen[axis];
    if (b.velocity[axis] * dir < 0) b.velocity[axis] = 0;
    if (axis == 2 && dir > 0) b.supported = true;
  }
}

void PhysicsWorld::resolve_pairs() {
  for (std::size_t i = 0; i < bodies_.size(); ++i) {
    RigidBody& a = bodies_[i];
    if (a.is_static || a.held) continue;
    for (std::size_t j = i + 1; j < bodies_.size(); ++j) {
      RigidBody& b = bodies_[j];
      if (b.is_static || b.held || (a.asleep && b.asleep)) continue;
      const AABB ab = a.box(), bb = b.box();
      if (!ab.overlaps(bb)) continue;
      const double pen[3] = {std::min(ab.max.x - bb.min.x, bb.max.x - ab.min.x),
                             std::min(ab.max.y - bb.min.y, bb.max.y - ab.min.y),
                             std::min(ab.max.z - bb.min.z, bb.max.z - ab.min.z)};
      int axis = pen[0] <= pen[1] ? 0 : 1;
      if (pen[2] < pen[axis]) axis = 2;
      const double dir = a.position[axis] >= b.position[axis] ? 1.0 : -1.0;  // pushes a along +dir
      // a body that is asleep or resting underneath acts as immovable
      double wa = a.inverse_mass(), wb = b.inverse_mass();
      if (a.asleep || (axis == 2 && dir < 0 && a.supported)) wa = 0;
      if (b.asleep || (axis == 2 && dir > 0 && b.supported)) wb = 0;
      if (wa == 0 && wb == 0) {
        if (a.asleep) wb = 1;
        else wa = 1;
      }
      const double share_a = wa / (wa + wb);
      a.position[axis] += dir * pen[axis] * share_a;
      b.position[axis] -= dir * pen[axis] * (1 - share_a);
      const double rel = (a.velocity[axis] - b.velocity[axis]) * dir;
      if (rel < 0) {
        const double common = (a.velocity[axis] * wb + b.velocity[axis] * wa) / (wa + wb);
        a.velocity[axis] = common;
        b.velocity[axis] = common;
      }
      if (axis == 2) {
        if (dir > 0 && wa > 0) a.supported = true;
        if (dir < 0 && wb > 0) b.supported = true;
      }
    }
  }
}

void PhysicsWorld::step() {
  const double dt = cfg_.dt;
  for (RigidBody& b : bodies_) {
    if (b.is_static || b.held || b.asleep) continue;
    const Vec3 prev = b.position;
    b.velocity = b.velocity + cfg_.gravity * dt;
    b.position = b.position + b.velocity * dt;
    b.supported = false;
    resolve_static(b, prev);
  }
  resolve_pairs();
  const double g = length(cfg_.gravity);
  for (RigidBody& b : bodies_) {
    if (b.is_static || b.held || b.asleep) continue;
    if (b.supported) {
      const double vt = std::hypot(b.velocity.x, b.velocity.y);
      if (vt > 0) {
        const double k = std::max(0.0, vt - cfg_.friction * g * dt) / vt;
        b.velocity.x *= k;
        b.velocity.y *= k;
      }
    }
    if (length(b.velocity) < cfg_.sleep_speed) {
      b.still_time += dt;
      if (b.still_time >= cfg_.sleep_time - 1e-12) {
        b.asleep = true;
        b.velocity = {};
      }
    } else {
      b.still_time = 0;
    }
  }
  ++steps_;
}

void PhysicsWorld::wake(std::size_t body) {
  bodies_[body].asleep = false;
  bodies_[body].still_time = 0;
}

void PhysicsWorld::apply_push(std::size_t body, Vec3 impulse) {
  if (body >= bodies_.size()) throw Error(ErrorCode::UnknownObject, "body " + std::to_string(body));
  RigidBody& b = bodies_[body];
  if (b.is_static) throw Error(ErrorCode::StaticObject, b.object_id);
  if (b.held) throw Error(ErrorCode::StaticObject, b.object_id + " is held");
  b.velocity = b.velocity + impulse * (1.0 / b.mass);
  wake(body);
}

Vec3 PhysicsWorld::hold_point(const AgentPose& pose) const {
  return pose.position + Vec3{std::cos(pose.yaw) * cfg_.hold_forward, std::sin(pose.yaw) * cfg_.hold_forward,
                              cfg_.eye_height - cfg_.hold_below_eye};
}

std::optional<std::size_t> PhysicsWorld::held_by(std::uint32_t agent) const {
  for (const HeldSlot& s : held_)
    if (s.agent == agent) return s.body;
  return std::nullopt;
}

void PhysicsWorld::pick(std::uint32_t agent, const AgentPose& pose, std::size_t body) {
  if (body >= bodies_.size()) throw Error(ErrorCode::UnknownObject, "body " + std::to_string(body));
  RigidBody& b = bodies_[body];
  if (b.is_static) throw Error(ErrorCode::StaticObject, b.object_id);
  if (held_by(agent)) throw Error(ErrorCode::HandsFull, "agent " + std::to_string(agent));
  if (b.held) throw Error(ErrorCode::OutOfReach, b.object_id + " is held by another agent");
  const Vec2 d = xy(b.position) - xy(pose.position);
  const double dist = length(d);
  if (dist > cfg_.reach) throw Error(ErrorCode::OutOfReach, b.object_id);
  if (dist > 1e-9) {
    const double c = dot(d * (1.0 / dist), Vec2{std::cos(pose.yaw), std::sin(pose.yaw)});
    if (c < std::cos(cfg_.reach_angle) - 1e-12) throw Error(ErrorCode::OutOfReach, b.object_id + " outside reach cone");
  }
  if (b.mass > cfg_.carry_limit) throw Error(ErrorCode::TooHeavy, b.object_id);
  b.held = true;
  b.asleep = false;
  b.still_time = 0;
  b.velocity = {};
  b.position = hold_point(pose);
  held_.push_back({agent, body, {cfg_.hold_forward, 0, cfg_.eye_height - cfg_.hold_below_eye}});
  // anything resting on or under it must re-settle
  for (std::size_t i = 0; i < bodies_.size(); ++i)
    if (!bodies_[i].is_static && !bodies_[i].held) wake(i);
}

std::size_t PhysicsWorld::drop(std::uint32_t agent, const AgentPose& pose) {
  const auto it = std::find_if(held_.begin(), held_.end(), [&](const HeldSlot& s) { return s.agent == agent; });
  if (it == held_.end()) throw Error(ErrorCode::NothingHeld, "agent " + std::to_string(agent));
  const std::size_t index = *it->body;
  held_.erase(it);
  RigidBody& b = bodies_[index];
  b.held = false;
  b.asleep = false;
  b.still_time = 0;
  b.velocity = pose.velocity;
  // settle back to the agent's side of any wall between the agent and the hold point
  const Vec3 hp = hold_point(pose);
  b.position = hp;
  resolve_static(b, {pose.position.x, pose.position.y, hp.z});
  return index;
}

void PhysicsWorld::update_held(std::uint32_t agent, const AgentPose& pose) {
  for (const HeldSlot& s : held_)
    if (s.agent == agent && s.body) bodies_[*s.body].position = hold_point(pose);
}

void step_world(PhysicsWorld& world) { world.step(); }

void apply_push(PhysicsWorld& world, std::string_view object_id, Vec3 impulse) {
  const auto idx = world.find(object_id);
  if (!idx) throw Error(ErrorCode::UnknownObject, std::string(object_id));
  world.apply_push(*idx, impulse);
}

}  // namespace home
