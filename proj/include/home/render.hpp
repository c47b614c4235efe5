#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "home/scene.hpp"

namespace home {

enum class SurfaceKind : std::uint8_t { object, wall, floor, ceiling };

/// World-space triangle of house structure (walls, floors, ceilings).
struct StructureTriangle {
  Vec3 a, b, c;
  Vec3 normal;  // unit, facing into the room
  SurfaceKind kind;
  std::int32_t room;
  std::int32_t surface;  // index into house_surfaces()
};

/// A planar reflector: one wall edge (all its pieces around door gaps), a
/// floor, a ceiling, or one planar face group of a large object. One-sided:
/// only the half-space its normal points into reflects.
struct PlanarSurface {
  std::string id;  // e.g. "r0/wall2", "r0/floor", "o12/face3"
  Vec3 normal;     // unit
  double offset;   // plane: dot(normal, p) = offset
  std::vector<std::array<Vec3, 3>> triangles;
  MaterialId material;
  SurfaceKind kind;
};

struct HouseGeometry {
  std::vector<StructureTriangle> structure;
  std::vector<PlanarSurface> surfaces;
};

/// Tessellates rooms into wall/floor/ceiling triangles and collects the
/// planar reflectors used by the acoustic engine. Objects whose AABB volume
/// reaches `object_surface_min_volume` contribute their planar faces.
HouseGeometry build_house_geometry(const House& house, double object_surface_min_volume = 0.5);

struct Hit {
  double t = 0;
  Vec3 point;
  Vec3 normal;  // unit, geometric, facing against the incoming ray
  SurfaceKind kind = SurfaceKind::object;
  std::int32_t object = -1;  // index into House::objects, or -1 for structure
  std::int32_t room = -1;    // room index for structure hits
  int layer = 0;             // material layer (objects)
  double u = 0, v = 0;       // barycentric coordinates within the hit triangle
};

/// Ray-query acceleration over a house: a uniform grid over the house bounds
/// holding structure triangles and static objects; dynamic objects are tested
/// individually so they can be moved without rebuilding the grid.
class RayScene {
 public:
  explicit RayScene(const House& house, double cell_size = 0.5, double object_surface_min_volume = 0.5);

  const House& house() const { return *house_; }
  const HouseGeometry& geometry() const { return geometry_; }

  /// Nearest hit with t in (t_min, t_max).
  std::optional<Hit> cast(Vec3 origin, Vec3 direction, double t_min = 1e-9,
                          double t_max = std::numeric_limits<double>::infinity()) const;

  /// True if anything blocks the open segment between `from` and `to`,
  /// ignoring `eps` meters at both ends.
  bool occluded(Vec3 from, Vec3 to, double eps = 1e-6) const;

  /// Relocates a dynamic object (e.g. pushed, carried or falling).
  void set_object_transform(std::size_t object_index, const Transform& transform);
  const Transform& object_transform(std::size_t object_index) const { return instances_[object_index].transform; }

 private:
  struct Instance {
    Transform transform;
    AABB local_box;
    AABB world_box;
    bool in_grid = false;
  };

  bool test_instance(std::size_t index, Vec3 origin, Vec3 dir, double t_min, double& t_best, Hit* hit) const;
  bool test_structure(std::size_t index, Vec3 origin, Vec3 dir, double t_min, double& t_best, Hit* hit) const;
  bool traverse(Vec3 origin, Vec3 dir, double t_min, double t_max, Hit* hit, bool any) const;

  const House* house_;
  HouseGeometry geometry_;
  std::vector<Instance> instances_;
  std::vector<std::uint32_t> loose_instances_;  // dynamic objects, tested per ray

  AABB grid_box_;
  int dims_[3] = {1, 1, 1};
  Vec3 cell_;
  std::vector<std::uint32_t> cell_start_;  // CSR offsets, size = cells + 1
  std::vector<std::uint32_t> cell_items_;  // high bit set = object instance
};

/// Convenience for one-off queries; builds a RayScene per call.
std::optional<Hit> ray_cast(const House& house, Vec3 origin, Vec3 direction);

struct Camera {
  Vec3 position;
  double yaw = 0;    // about +z; 0 looks along +x
  double pitch = 0;  // positive looks up
  double vertical_fov = deg_to_rad(60.0);
  int width = 64;
  int height = 64;

  Vec3 forward() const;
  /// Unit direction of the primary ray through the center of pixel (row, col); row 0 is the top.
  Vec3 pixel_direction(int row, int col) const;
};

inline constexpr std::uint16_t kBackgroundLabel = 0xFFFF;
inline constexpr Rgb kBackgroundColor{20, 20, 30};
inline constexpr double kAmbient = 0.1;

struct FrameBundle {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> rgb;            // row-major, 3 bytes per pixel
  std::vector<float> depth;                 // meters; +inf where nothing was hit
  std::vector<std::uint16_t> segmentation;  // fine-category id or kBackgroundLabel
  std::vector<std::int32_t> instance;       // object index, -1 for structure/background

  friend bool operator==(const FrameBundle&, const FrameBundle&) = default;
};

struct RenderOptions {
  bool lights_enabled = true;
  int threads = 1;  // scanline split; output identical for any value
};

/// Primary ray per pixel center. Throws CameraOutOfBounds if the camera is
/// outside the house bounds.
FrameBundle render(const RayScene& scene, const Camera& camera, const RenderOptions& options = {});
FrameBundle render(const House& house, const Camera& camera, bool lights_enabled = true);

/// Surface color in [0,1]^3 of a hit (texel lookup for objects, material tint for structure).
Vec3 albedo_at(const RayScene& scene, const Hit& hit);

/// albedo * (ambient + sum over unshadowed lights of max(0, n.l) * I / (1 + d^2)), clamped to [0,1].
Vec3 shade(const Hit& hit, std::span<const PointLight> lights, const RayScene& scene);

}  // namespace home
