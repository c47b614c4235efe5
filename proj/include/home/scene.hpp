#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "home/math.hpp"
#include "home/taxonomy.hpp"

namespace home {

struct AABB {
  Vec3 min, max;

  static AABB empty() {
    constexpr double inf = 1e300;
    return {{inf, inf, inf}, {-inf, -inf, -inf}};
  }

  bool valid() const { return min.x <= max.x && min.y <= max.y && min.z <= max.z; }
  Vec3 center() const { return (min + max) * 0.5; }
  Vec3 half_extents() const { return (max - min) * 0.5; }
  Vec3 size() const { return max - min; }
  double volume() const {
    const Vec3 s = size();
    return s.x * s.y * s.z;
  }
  void expand(Vec3 p) {
    min = home::min(min, p);
    max = home::max(max, p);
  }
  void expand(const AABB& o) {
    min = home::min(min, o.min);
    max = home::max(max, o.max);
  }
  bool contains(Vec3 p, double eps = 0) const {
    return p.x >= min.x - eps && p.y >= min.y - eps && p.z >= min.z - eps && p.x <= max.x + eps &&
           p.y <= max.y + eps && p.z <= max.z + eps;
  }
  bool contains(const AABB& o, double eps = 0) const { return contains(o.min, eps) && contains(o.max, eps); }
  bool overlaps(const AABB& o) const {
    return min.x < o.max.x && o.min.x < max.x && min.y < o.max.y && o.min.y < max.y && min.z < o.max.z &&
           o.min.z < max.z;
  }
  friend bool operator==(const AABB&, const AABB&) = default;
};

using Triangle = std::array<std::uint32_t, 3>;

struct TriMesh {
  std::vector<Vec3> vertices;           // object-local, meters
  std::vector<Triangle> triangles;      // counter-clockwise seen from outside
  std::vector<std::uint16_t> triangle_material;  // layer index per triangle
  bool watertight = false;              // recorded by validation

  friend bool operator==(const TriMesh&, const TriMesh&) = default;
};

using Rgb = std::array<std::uint8_t, 3>;

/// Solid color (1x1) or a small row-major RGB grid.
struct Texture {
  int width = 1;
  int height = 1;
  std::vector<Rgb> texels{Rgb{128, 128, 128}};

  static Texture solid(Rgb c) { return {1, 1, {c}}; }
  friend bool operator==(const Texture&, const Texture&) = default;
};

struct MaterialLayer {
  MaterialId material;
  Texture texture;
  friend bool operator==(const MaterialLayer&, const MaterialLayer&) = default;
};

struct SceneObject {
  std::string id;
  std::string room_id;
  CategoryId category;
  FineCategoryId fine_category;
  TriMesh mesh;
  Transform transform;
  std::vector<MaterialLayer> material_layers;
  bool dynamic = false;

  friend bool operator==(const SceneObject&, const SceneObject&) = default;
};

/// Opening cut into the wall along floor-polygon edge `edge` (from vertex
/// `edge` to `edge + 1`), starting `offset` meters from the edge start.
struct Door {
  std::uint32_t edge = 0;
  double offset = 0;
  double width = 1.0;
  double height = 2.1;
  friend bool operator==(const Door&, const Door&) = default;
};

struct Room {
  std::string id;
  RoomKind kind;
  std::vector<Vec2> floor_polygon;  // counter-clockwise, meters
  double elevation = 0;             // floor height; nonzero for upper storeys
  double wall_height = 2.7;
  MaterialId wall_material;
  MaterialId floor_material;
  std::vector<Door> doors;

  friend bool operator==(const Room&, const Room&) = default;
};

struct PointLight {
  Vec3 position;
  double intensity = 1.0;
  friend bool operator==(const PointLight&, const PointLight&) = default;
};

struct SignalSpec {
  enum class Kind { sine, noise, sample };
  Kind kind = Kind::sine;
  double frequency = 440.0;           // sine
  std::uint64_t seed = 0;             // noise
  std::string path;                   // sample: relative to the scene document
  std::vector<float> samples;         // sample: decoded mono samples
  double sample_rate = 16000.0;       // sample: rate of `samples`

  friend bool operator==(const SignalSpec&, const SignalSpec&) = default;
};

struct SoundSource {
  std::string id;
  Vec3 position;
  SignalSpec signal;
  double reference_gain = 1.0;  // linear amplitude at 1 m
  friend bool operator==(const SoundSource&, const SoundSource&) = default;
};

struct House {
  std::string id;
  std::vector<Room> rooms;
  std::vector<SceneObject> objects;
  std::vector<PointLight> lights;
  std::vector<SoundSource> sound_sources;
  AABB bounds;
  MaterialTable materials = MaterialTable::standard();

  const Room* find_room(std::string_view room_id) const;
  const SceneObject* find_object(std::string_view object_id) const;

  friend bool operator==(const House&, const House&) = default;
};

}  // namespace home
