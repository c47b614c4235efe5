#include "home/render.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <thread>

#include "home/errors.hpp"
#include "home/geometry.hpp"

namespace home {

namespace {

constexpr std::uint32_t kInstanceBit = 0x80000000u;

// Two-sided Moller-Trumbore. Returns t (or -1) and barycentrics.
inline double intersect_triangle(Vec3 o, Vec3 d, Vec3 a, Vec3 b, Vec3 c, double& u, double& v) {
  const Vec3 e1 = b - a, e2 = c - a;
  const Vec3 p = cross(d, e2);
  const double det = dot(e1, p);
  if (std::abs(det) < 1e-15) return -1;
  const double inv = 1.0 / det;
  const Vec3 s = o - a;
  u = dot(s, p) * inv;
  if (u < 0 || u > 1) return -1;
  const Vec3 q = cross(s, e1);
  v = dot(d, q) * inv;
  if (v < 0 || u + v > 1) return -1;
  return dot(e2, q) * inv;
}

// Slab test; returns false if the ray misses [t0, t1].
inline bool intersect_box(const AABB& box, Vec3 o, Vec3 d, double& t0, double& t1) {
  for (int i = 0; i < 3; ++i) {
    if (std::abs(d[i]) < 1e-300) {
      if (o[i] < box.min[i] || o[i] > box.max[i]) return false;
      continue;
    }
    const double inv = 1.0 / d[i];
    double ta = (box.min[i] - o[i]) * inv, tb = (box.max[i] - o[i]) * inv;
    if (ta > tb) std::swap(ta, tb);
    t0 = std::max(t0, ta);
    t1 = std::min(t1, tb);
    if (t0 > t1) return false;
  }
  return true;
}

struct WallPiece {
  double s0, s1, z0, z1;
};

void add_rect(HouseGeometry& g, Vec3 a, Vec3 u, Vec3 n, const WallPiece& p, std::int32_t room, std::int32_t surface) {
  const Vec3 z{0, 0, 1};
  const Vec3 p00 = a + u * p.s0 + z * p.z0, p10 = a + u * p.s1 + z * p.z0;
  const Vec3 p11 = a + u * p.s1 + z * p.z1, p01 = a + u * p.s0 + z * p.z1;
  g.structure.push_back({p00, p11, p10, n, SurfaceKind::wall, room, surface});
  g.structure.push_back({p00, p01, p11, n, SurfaceKind::wall, room, surface});
  g.surfaces[surface].triangles.push_back({p00, p11, p10});
  g.surfaces[surface].triangles.push_back({p00, p01, p11});
}

}  // namespace

HouseGeometry build_house_geometry(const House& house, double object_surface_min_volume) {
  HouseGeometry g;
  for (std::size_t ri = 0; ri < house.rooms.size(); ++ri) {
    const Room& room = house.rooms[ri];
    const auto room_index = static_cast<std::int32_t>(ri);
    const double z0 = room.elevation, z1 = room.elevation + room.wall_height;
    const auto& poly = room.floor_polygon;

    const auto tris = triangulate(poly);
    {
      PlanarSurface floor{room.id + "/floor", {0, 0, 1}, z0, {}, room.floor_material, SurfaceKind::floor};
      PlanarSurface ceiling{room.id + "/ceiling", {0, 0, -1}, -z1, {}, room.wall_material, SurfaceKind::ceiling};
      const auto fi = static_cast<std::int32_t>(g.surfaces.size());
      for (const auto& t : tris) {
        const Vec3 a{poly[t[0]].x, poly[t[0]].y, z0}, b{poly[t[1]].x, poly[t[1]].y, z0},
            c{poly[t[2]].x, poly[t[2]].y, z0};
        g.structure.push_back({a, b, c, {0, 0, 1}, SurfaceKind::floor, room_index, fi});
        floor.triangles.push_back({a, b, c});
        const Vec3 za{0, 0, z1 - z0};
        g.structure.push_back({a + za, c + za, b + za, {0, 0, -1}, SurfaceKind::ceiling, room_index, fi + 1});
        ceiling.triangles.push_back({a + za, c + za, b + za});
      }
      g.surfaces.push_back(std::move(floor));
      g.surfaces.push_back(std::move(ceiling));
    }

    for (std::size_t e = 0; e < poly.size(); ++e) {
      const Vec2 a2 = poly[e], b2 = poly[(e + 1) % poly.size()];
      const double len = length(b2 - a2);
      const Vec3 u{(b2.x - a2.x) / len, (b2.y - a2.y) / len, 0};
      const Vec3 n{-u.y, u.x, 0};  // interior side of a counter-clockwise polygon
      const Vec3 a{a2.x, a2.y, 0};
      const auto si = static_cast<std::int32_t>(g.surfaces.size());
      g.surfaces.push_back({room.id + "/wall" + std::to_string(e), n, dot(n, a), {}, room.wall_material, SurfaceKind::wall});

      std::vector<Door> doors;
      for (const Door& d : room.doors)
        if (d.edge == e) doors.push_back(d);
      std::sort(doors.begin(), doors.end(), [](const Door& x, const Door& y) { return x.offset < y.offset; });
      double s = 0;
      for (const Door& d : doors) {
        if (d.offset > s) add_rect(g, a, u, n, {s, d.offset, z0, z1}, room_index, si);
        if (z0 + d.height < z1) add_rect(g, a, u, n, {d.offset, d.offset + d.width, z0 + d.height, z1}, room_index, si);
        s = std::max(s, d.offset + d.width);
      }
      if (s < len) add_rect(g, a, u, n, {s, len, z0, z1}, room_index, si);
    }
  }

  // planar face groups of large objects
  for (std::size_t oi = 0; oi < house.objects.size(); ++oi) {
    const SceneObject& obj = house.objects[oi];
    if (object_aabb(obj).volume() < object_surface_min_volume) continue;
    struct Group {
      Vec3 normal;
      double offset;
      std::vector<std::array<Vec3, 3>> tris;
      std::map<int, double> layer_area;
    };
    std::vector<Group> groups;
    for (std::size_t ti = 0; ti < obj.mesh.triangles.size(); ++ti) {
      const auto& t = obj.mesh.triangles[ti];
      const Vec3 a = obj.transform.apply(obj.mesh.vertices[t[0]]);
      const Vec3 b = obj.transform.apply(obj.mesh.vertices[t[1]]);
      const Vec3 c = obj.transform.apply(obj.mesh.vertices[t[2]]);
      const Vec3 n = normalize(cross(b - a, c - a));
      const double off = dot(n, a);
      auto it = std::find_if(groups.begin(), groups.end(), [&](const Group& gr) {
        return dot(gr.normal, n) > 1 - 1e-9 && std::abs(gr.offset - off) < 1e-9;
      });
      if (it == groups.end()) {
        groups.push_back({n, off, {}, {}});
        it = groups.end() - 1;
      }
      it->tris.push_back({a, b, c});
      it->layer_area[obj.mesh.triangle_material[ti]] += triangle_area(a, b, c);
    }
    for (std::size_t k = 0; k < groups.size(); ++k) {
      auto& gr = groups[k];
      int layer = 0;
      double best = -1;
      for (const auto& [l, area] : gr.layer_area)
        if (area > best) best = area, layer = l;
      g.surfaces.push_back({obj.id + "/face" + std::to_string(k), gr.normal, gr.offset, std::move(gr.tris),
                            obj.material_layers[static_cast<std::size_t>(layer)].material, SurfaceKind::object});
    }
  }
  return g;
}

RayScene::RayScene(const House& house, double cell_size, double object_surface_min_volume)
    : house_(&house), geometry_(build_house_geometry(house, object_surface_min_volume)) {
  instances_.resize(house.objects.size());
  for (std::size_t i = 0; i < house.objects.size(); ++i) {
    const auto& obj = house.objects[i];
    Instance& inst = instances_[i];
    inst.transform = obj.transform;
    inst.local_box = AABB::empty();
    for (const Vec3& v : obj.mesh.vertices) inst.local_box.expand(v);
    inst.world_box = object_aabb(obj);
    inst.in_grid = !obj.dynamic;
    if (obj.dynamic) loose_instances_.push_back(static_cast<std::uint32_t>(i));
  }

  grid_box_ = house.bounds;
  grid_box_.min -= Vec3{1e-3, 1e-3, 1e-3};
  grid_box_.max += Vec3{1e-3, 1e-3, 1e-3};
  const Vec3 size = grid_box_.size();
  for (int i = 0; i < 3; ++i) {
    dims_[i] = std::clamp(static_cast<int>(std::ceil(size[i] / cell_size)), 1, 128);
    cell_[i] = size[i] / dims_[i];
  }

  const std::size_t n_cells = static_cast<std::size_t>(dims_[0]) * dims_[1] * dims_[2];
  std::vector<std::vector<std::uint32_t>> cells(n_cells);
  auto insert = [&](const AABB& box, std::uint32_t item) {
    int lo[3], hi[3];
    for (int i = 0; i < 3; ++i) {
      lo[i] = std::clamp(static_cast<int>(std::floor((box.min[i] - grid_box_.min[i]) / cell_[i])), 0, dims_[i] - 1);
      hi[i] = std::clamp(static_cast<int>(std::floor((box.max[i] - grid_box_.min[i]) / cell_[i])), 0, dims_[i] - 1);
    }
    for (int z = lo[2]; z <= hi[2]; ++z)
      for (int y = lo[1]; y <= hi[1]; ++y)
        for (int x = lo[0]; x <= hi[0]; ++x)
          cells[(static_cast<std::size_t>(z) * dims_[1] + y) * dims_[0] + x].push_back(item);
  };
  for (std::size_t i = 0; i < geometry_.structure.size(); ++i) {
    const auto& t = geometry_.structure[i];
    AABB b = AABB::empty();
    b.expand(t.a);
    b.expand(t.b);
    b.expand(t.c);
    insert(b, static_cast<std::uint32_t>(i));
  }
  for (std::size_t i = 0; i < instances_.size(); ++i)
    if (instances_[i].in_grid) insert(instances_[i].world_box, static_cast<std::uint32_t>(i) | kInstanceBit);

  cell_start_.assign(n_cells + 1, 0);
  for (std::size_t c = 0; c < n_cells; ++c) cell_start_[c + 1] = cell_start_[c] + static_cast<std::uint32_t>(cells[c].size());
  cell_items_.reserve(cell_start_.back());
  for (auto& c : cells) cell_items_.insert(cell_items_.end(), c.begin(), c.end());
}

void RayScene::set_object_transform(std::size_t index, const Transform& transform) {
  Instance& inst = instances_.at(index);
  if (inst.in_grid) throw Error(ErrorCode::StaticObject, "static objects cannot be moved");
  inst.transform = transform;
  AABB box = AABB::empty();
  for (const Vec3& v : house_->objects[index].mesh.vertices) box.expand(transform.apply(v));
  inst.world_box = box;
}

bool RayScene::test_instance(std::size_t index, Vec3 origin, Vec3 dir, double t_min, double& t_best, Hit* hit) const {
  const Instance& inst = instances_[index];
  double t0 = t_min, t1 = t_best;
  if (!intersect_box(inst.world_box, origin, dir, t0, t1)) return false;
  const Vec3 lo = inst.transform.inverse_apply(origin);
  const Vec3 ld = inst.transform.inverse_apply_dir(dir);
  const TriMesh& mesh = house_->objects[index].mesh;
  bool found = false;
  for (std::size_t ti = 0; ti < mesh.triangles.size(); ++ti) {
    const auto& tr = mesh.triangles[ti];
    double u = 0, v = 0;
    const Vec3 a = mesh.vertices[tr[0]], b = mesh.vertices[tr[1]], c = mesh.vertices[tr[2]];
    const double t = intersect_triangle(lo, ld, a, b, c, u, v);
    if (t > t_min && t < t_best) {
      t_best = t;
      found = true;
      if (hit) {
        hit->t = t;
        hit->kind = SurfaceKind::object;
        hit->object = static_cast<std::int32_t>(index);
        hit->room = -1;
        hit->layer = mesh.triangle_material[ti];
        hit->u = u;
        hit->v = v;
        hit->normal = normalize(inst.transform.apply_dir(cross(b - a, c - a)));
      } else {
        return true;
      }
    }
  }
  return found;
}

bool RayScene::test_structure(std::size_t index, Vec3 origin, Vec3 dir, double t_min, double& t_best, Hit* hit) const {
  const auto& tri = geometry_.structure[index];
  double u = 0, v = 0;
  const double t = intersect_triangle(origin, dir, tri.a, tri.b, tri.c, u, v);
  if (!(t > t_min && t < t_best)) return false;
  t_best = t;
  if (hit) {
    hit->t = t;
    hit->kind = tri.kind;
    hit->object = -1;
    hit->room = tri.room;
    hit->layer = 0;
    hit->u = u;
    hit->v = v;
    hit->normal = tri.normal;
  }
  return true;
}

bool RayScene::traverse(Vec3 origin, Vec3 dir, double t_min, double t_max, Hit* hit, bool any) const {
  double t_best = t_max;
  bool found = false;

  for (auto idx : loose_instances_) {
    if (test_instance(idx, origin, dir, t_min, t_best, hit)) {
      found = true;
      if (any) return true;
    }
  }

  double t0 = t_min, t1 = t_best;
  if (!intersect_box(grid_box_, origin, dir, t0, t1)) return found;

  const Vec3 start = origin + dir * t0;
  int cell[3], step[3];
  double t_next[3], t_delta[3];
  for (int i = 0; i < 3; ++i) {
    cell[i] = std::clamp(static_cast<int>(std::floor((start[i] - grid_box_.min[i]) / cell_[i])), 0, dims_[i] - 1);
    if (dir[i] > 0) {
      step[i] = 1;
      t_delta[i] = cell_[i] / dir[i];
      t_next[i] = (grid_box_.min[i] + (cell[i] + 1) * cell_[i] - origin[i]) / dir[i];
    } else if (dir[i] < 0) {
      step[i] = -1;
      t_delta[i] = -cell_[i] / dir[i];
      t_next[i] = (grid_box_.min[i] + cell[i] * cell_[i] - origin[i]) / dir[i];
    } else {
      step[i] = 0;
      t_delta[i] = std::numeric_limits<double>::infinity();
      t_next[i] = std::numeric_limits<double>::infinity();
    }
  }

  while (true) {
    const std::size_t c = (static_cast<std::size_t>(cell[2]) * dims_[1] + cell[1]) * dims_[0] + cell[0];
    for (std::uint32_t k = cell_start_[c]; k < cell_start_[c + 1]; ++k) {
      const std::uint32_t item = cell_items_[k];
      const bool hit_now = (item & kInstanceBit)
                               ? test_instance(item & ~kInstanceBit, origin, dir, t_min, t_best, hit)
                               : test_structure(item, origin, dir, t_min, t_best, hit);
      if (hit_now) {
        found = true;
        if (any) return true;
      }
    }
    const int axis = (t_next[0] < t_next[1]) ? (t_next[0] < t_next[2] ? 0 : 2) : (t_next[1] < t_next[2] ? 1 : 2);
    const double cell_exit = t_next[axis];
    if (found && t_best <= cell_exit) break;
    if (cell_exit > t1) break;
    cell[axis] += step[axis];
    if (cell[axis] < 0 || cell[axis] >= dims_[axis]) break;
    t_next[axis] += t_delta[axis];
  }
  return found;
}

std::optional<Hit> RayScene::cast(Vec3 origin, Vec3 direction, double t_min, double t_max) const {
  Hit hit;
  if (!traverse(origin, direction, t_min, t_max, &hit, false)) return std::nullopt;
  hit.point = origin + direction * hit.t;
  if (dot(hit.normal, direction) > 0) hit.normal = -hit.normal;
  return hit;
}

bool RayScene::occluded(Vec3 from, Vec3 to, double eps) const {
  const Vec3 d = to - from;
  const double len = length(d);
  if (len <= 2 * eps) return false;
  return traverse(from, d / len, eps, len - eps, nullptr, true);
}

std::optional<Hit> ray_cast(const House& house, Vec3 origin, Vec3 direction) {
  RayScene scene(house);
  return scene.cast(origin, direction);
}

Vec3 Camera::forward() const {
  return {std::cos(pitch) * std::cos(yaw), std::cos(pitch) * std::sin(yaw), std::sin(pitch)};
}

Vec3 Camera::pixel_direction(int row, int col) const {
  const Vec3 f = forward();
  const Vec3 right{std::sin(yaw), -std::cos(yaw), 0};
  const Vec3 up = cross(right, f);
  const double tan_half = std::tan(vertical_fov / 2);
  const double aspect = static_cast<double>(width) / height;
  const double x = (2.0 * (col + 0.5) / width - 1.0) * tan_half * aspect;
  const double y = (1.0 - 2.0 * (row + 0.5) / height) * tan_half;
  return normalize(f + right * x + up * y);
}

namespace {

Vec3 structure_tint(const std::string& material) {
  static const std::map<std::string, Vec3> tints = {
      {"plaster", {0.88, 0.86, 0.82}}, {"brick", {0.66, 0.36, 0.28}},   {"concrete", {0.62, 0.62, 0.6}},
      {"wood", {0.55, 0.38, 0.22}},    {"tile", {0.82, 0.82, 0.8}},     {"carpet", {0.45, 0.3, 0.3}},
      {"laminate", {0.7, 0.58, 0.42}}, {"marble", {0.92, 0.9, 0.88}},   {"stone", {0.5, 0.5, 0.48}},
  };
  auto it = tints.find(material);
  return it != tints.end() ? it->second : Vec3{0.7, 0.7, 0.7};
}

}  // namespace

Vec3 albedo_at(const RayScene& scene, const Hit& hit) {
  const House& house = scene.house();
  if (hit.object < 0) {
    const Room& room = house.rooms[static_cast<std::size_t>(hit.room)];
    const MaterialId m = hit.kind == SurfaceKind::floor ? room.floor_material : room.wall_material;
    return structure_tint(house.materials[m].name);
  }
  const SceneObject& obj = house.objects[static_cast<std::size_t>(hit.object)];
  const Texture& tex = obj.material_layers[static_cast<std::size_t>(hit.layer)].texture;
  const int col = std::clamp(static_cast<int>(hit.u * tex.width), 0, tex.width - 1);
  const int row = std::clamp(static_cast<int>(hit.v * tex.height), 0, tex.height - 1);
  const Rgb c = tex.texels[static_cast<std::size_t>(row) * tex.width + col];
  return {c[0] / 255.0, c[1] / 255.0, c[2] / 255.0};
}

Vec3 shade(const Hit& hit, std::span<const PointLight> lights, const RayScene& scene) {
  const Vec3 albedo = albedo_at(scene, hit);
  double light = kAmbient;
  for (const PointLight& l : lights) {
    Vec3 to_light = l.position - hit.point;
    const double d = length(to_light);
    if (d <= 0) continue;
    to_light = to_light / d;
    const double ndl = dot(hit.normal, to_light);
    if (ndl <= 0) continue;
    if (scene.occluded(hit.point, l.position, 1e-6)) continue;
    light += ndl * l.intensity / (1 + d * d);
  }
  return {std::clamp(albedo.x * light, 0.0, 1.0), std::clamp(albedo.y * light, 0.0, 1.0),
          std::clamp(albedo.z * light, 0.0, 1.0)};
}

FrameBundle render(const RayScene& scene, const Camera& camera, const RenderOptions& options) {
  const House& house = scene.house();
  if (!house.bounds.contains(camera.position))
    throw Error(ErrorCode::CameraOutOfBounds, "camera position outside house bounds");
  if (camera.width < 1 || camera.height < 1 || !(camera.vertical_fov > 0 && camera.vertical_fov < kPi))
    throw Error(ErrorCode::ParamError, "invalid camera intrinsics");

  FrameBundle f;
  f.width = camera.width;
  f.height = camera.height;
  const std::size_t n = static_cast<std::size_t>(camera.width) * camera.height;
  f.rgb.resize(n * 3);
  f.depth.resize(n);
  f.segmentation.resize(n);
  f.instance.resize(n);

  auto render_rows = [&](int row_begin, int row_end) {
    for (int r = row_begin; r < row_end; ++r) {
      for (int c = 0; c < camera.width; ++c) {
        const std::size_t i = static_cast<std::size_t>(r) * camera.width + c;
        const Vec3 dir = camera.pixel_direction(r, c);
        const auto hit = scene.cast(camera.position, dir);
        if (!hit) {
          f.rgb[i * 3] = kBackgroundColor[0];
          f.rgb[i * 3 + 1] = kBackgroundColor[1];
          f.rgb[i * 3 + 2] = kBackgroundColor[2];
          f.depth[i] = std::numeric_limits<float>::infinity();
          f.segmentation[i] = kBackgroundLabel;
          f.instance[i] = -1;
          continue;
        }
        const Vec3 color = options.lights_enabled ? shade(*hit, house.lights, scene) : albedo_at(scene, *hit);
        f.rgb[i * 3] = static_cast<std::uint8_t>(std::lround(color.x * 255.0));
        f.rgb[i * 3 + 1] = static_cast<std::uint8_t>(std::lround(color.y * 255.0));
        f.rgb[i * 3 + 2] = static_cast<std::uint8_t>(std::lround(color.z * 255.0));
        f.depth[i] = static_cast<float>(hit->t);
        if (hit->object >= 0) {
          f.segmentation[i] = house.objects[static_cast<std::size_t>(hit->object)].fine_category.value;
          f.instance[i] = hit->object;
        } else {
          f.segmentation[i] = (hit->kind == SurfaceKind::floor     ? kFineFloor
                               : hit->kind == SurfaceKind::ceiling ? kFineCeiling
                                                                   : kFineWall)
                                  .value;
          f.instance[i] = -1;
        }
      }
    }
  };

  const int threads = std::clamp(options.threads, 1, camera.height);
  if (threads == 1) {
    render_rows(0, camera.height);
  } else {
    std::vector<std::thread> pool;
    for (int k = 0; k < threads; ++k)
      pool.emplace_back(render_rows, camera.height * k / threads, camera.height * (k + 1) / threads);
    for (auto& t : pool) t.join();
  }
  return f;
}

FrameBundle render(const House& house, const Camera& camera, bool lights_enabled) {
  RayScene scene(house);
  return render(scene, camera, RenderOptions{lights_enabled, 1});
}

}  // namespace home
