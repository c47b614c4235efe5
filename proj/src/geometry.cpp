#include "home/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include "home/errors.hpp"

namespace home {

AABB object_aabb(const SceneObject& obj) {
  AABB box = AABB::empty();
  for (const Vec3& v : obj.mesh.vertices) box.expand(obj.transform.apply(v));
  return box;
}

double triangle_area(Vec3 a, Vec3 b, Vec3 c) { return 0.5 * length(cross(b - a, c - a)); }

double mesh_area(const TriMesh& mesh) {
  double total = 0;
  for (const auto& t : mesh.triangles)
    total += triangle_area(mesh.vertices[t[0]], mesh.vertices[t[1]], mesh.vertices[t[2]]);
  return total;
}

bool is_watertight(const TriMesh& mesh) {
  if (mesh.triangles.empty()) return false;
  // directed edge -> count; closed and consistently wound iff every directed
  // edge appears once and its reverse appears once
  std::unordered_map<std::uint64_t, int> directed;
  directed.reserve(mesh.triangles.size() * 3);
  auto key = [](std::uint32_t a, std::uint32_t b) { return (std::uint64_t{a} << 32) | b; };
  for (const auto& t : mesh.triangles) {
    for (int i = 0; i < 3; ++i) {
      const std::uint32_t a = t[i], b = t[(i + 1) % 3];
      if (a == b) return false;
      if (++directed[key(a, b)] > 1) return false;
    }
  }
  for (const auto& [k, n] : directed) {
    const auto a = static_cast<std::uint32_t>(k >> 32), b = static_cast<std::uint32_t>(k);
    if (!directed.contains(key(b, a))) return false;
  }
  return true;
}

double mesh_volume(const TriMesh& mesh) {
  if (!is_watertight(mesh)) throw Error(ErrorCode::NotWatertight, "mesh_volume requires a closed mesh");
  double six_v = 0;
  for (const auto& t : mesh.triangles) {
    const Vec3 a = mesh.vertices[t[0]], b = mesh.vertices[t[1]], c = mesh.vertices[t[2]];
    six_v += dot(a, cross(b, c));
  }
  return std::abs(six_v) / 6.0;
}

std::map<int, double> surface_area_by_layer(const TriMesh& mesh) {
  std::map<int, double> out;
  for (std::size_t i = 0; i < mesh.triangles.size(); ++i) {
    const auto& t = mesh.triangles[i];
    const int layer = i < mesh.triangle_material.size() ? mesh.triangle_material[i] : 0;
    out[layer] += triangle_area(mesh.vertices[t[0]], mesh.vertices[t[1]], mesh.vertices[t[2]]);
  }
  return out;
}

TriMesh scaled(const TriMesh& mesh, double s) {
  TriMesh out = mesh;
  for (auto& v : out.vertices) v *= s;
  return out;
}

void append_box(TriMesh& mesh, Vec3 lo, Vec3 hi, std::uint16_t layer) {
  const auto base = static_cast<std::uint32_t>(mesh.vertices.size());
  for (int i = 0; i < 8; ++i)
    mesh.vertices.push_back({(i & 1) ? hi.x : lo.x, (i & 2) ? hi.y : lo.y, (i & 4) ? hi.z : lo.z});
  // corner index bits: x=1, y=2, z=4
  static constexpr std::uint32_t faces[6][4] = {
      {0, 4, 6, 2},  // -x
      {1, 3, 7, 5},  // +x
      {0, 1, 5, 4},  // -y
      {2, 6, 7, 3},  // +y
      {0, 2, 3, 1},  // -z
      {4, 5, 7, 6},  // +z
  };
  for (const auto& f : faces) {
    mesh.triangles.push_back({base + f[0], base + f[1], base + f[2]});
    mesh.triangles.push_back({base + f[0], base + f[2], base + f[3]});
    mesh.triangle_material.push_back(layer);
    mesh.triangle_material.push_back(layer);
  }
}

TriMesh make_box_mesh(Vec3 half_extents) {
  TriMesh mesh;
  append_box(mesh, -half_extents, half_extents, 0);
  mesh.watertight = true;
  return mesh;
}

double signed_area(std::span<const Vec2> polygon) {
  double a = 0;
  for (std::size_t i = 0; i < polygon.size(); ++i)
    a += cross(polygon[i], polygon[(i + 1) % polygon.size()]);
  return 0.5 * a;
}

namespace {

int orientation(Vec2 a, Vec2 b, Vec2 c) {
  const double v = cross(b - a, c - a);
  return v > 0 ? 1 : (v < 0 ? -1 : 0);
}

bool on_segment(Vec2 a, Vec2 b, Vec2 p) {
  return std::min(a.x, b.x) <= p.x && p.x <= std::max(a.x, b.x) && std::min(a.y, b.y) <= p.y &&
         p.y <= std::max(a.y, b.y);
}

bool segments_intersect(Vec2 p1, Vec2 p2, Vec2 q1, Vec2 q2) {
  const int o1 = orientation(p1, p2, q1), o2 = orientation(p1, p2, q2);
  const int o3 = orientation(q1, q2, p1), o4 = orientation(q1, q2, p2);
  if (o1 != o2 && o3 != o4) return true;
  if (o1 == 0 && on_segment(p1, p2, q1)) return true;
  if (o2 == 0 && on_segment(p1, p2, q2)) return true;
  if (o3 == 0 && on_segment(q1, q2, p1)) return true;
  if (o4 == 0 && on_segment(q1, q2, p2)) return true;
  return false;
}

double point_segment_distance(Vec2 p, Vec2 a, Vec2 b) {
  const Vec2 ab = b - a;
  const double len2 = dot(ab, ab);
  double t = len2 > 0 ? dot(p - a, ab) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  return length(p - (a + ab * t));
}

}  // namespace

bool is_simple_polygon(std::span<const Vec2> polygon) {
  const std::size_t n = polygon.size();
  if (n < 3) return false;
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2 a0 = polygon[i], a1 = polygon[(i + 1) % n];
    if (a0 == a1) return false;
    for (std::size_t j = i + 1; j < n; ++j) {
      const bool adjacent = j == i + 1 || (i == 0 && j == n - 1);
      const Vec2 b0 = polygon[j], b1 = polygon[(j + 1) % n];
      if (adjacent) {
        // neighbours share one vertex; they must not fold back onto each other
        const Vec2 shared = (j == i + 1) ? a1 : a0;
        const Vec2 other_a = (j == i + 1) ? a0 : a1;
        const Vec2 other_b = (j == i + 1) ? b1 : b0;
        if (orientation(other_a, shared, other_b) == 0 && dot(other_a - shared, other_b - shared) > 0)
          return false;
        continue;
      }
      if (segments_intersect(a0, a1, b0, b1)) return false;
    }
  }
  return true;
}

bool point_in_polygon(std::span<const Vec2> polygon, Vec2 p) {
  bool inside = false;
  const std::size_t n = polygon.size();
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const Vec2 a = polygon[i], b = polygon[j];
    if ((a.y > p.y) != (b.y > p.y)) {
      const double x = (b.x - a.x) * (p.y - a.y) / (b.y - a.y) + a.x;
      if (p.x < x) inside = !inside;
    }
  }
  return inside;
}

std::vector<std::array<std::uint32_t, 3>> triangulate(std::span<const Vec2> polygon) {
  std::vector<std::array<std::uint32_t, 3>> out;
  std::vector<std::uint32_t> idx(polygon.size());
  for (std::uint32_t i = 0; i < idx.size(); ++i) idx[i] = i;

  auto inside_triangle = [](Vec2 p, Vec2 a, Vec2 b, Vec2 c) {
    return cross(b - a, p - a) >= 0 && cross(c - b, p - b) >= 0 && cross(a - c, p - c) >= 0;
  };

  std::size_t guard = 0;
  while (idx.size() > 3 && guard < polygon.size() * polygon.size()) {
    ++guard;
    bool clipped = false;
    for (std::size_t i = 0; i < idx.size(); ++i) {
      const std::uint32_t ia = idx[(i + idx.size() - 1) % idx.size()], ib = idx[i],
                          ic = idx[(i + 1) % idx.size()];
      const Vec2 a = polygon[ia], b = polygon[ib], c = polygon[ic];
      if (cross(b - a, c - b) <= 0) continue;  // reflex or collinear
      bool ear = true;
      for (std::uint32_t k : idx) {
        if (k == ia || k == ib || k == ic) continue;
        if (inside_triangle(polygon[k], a, b, c)) {
          ear = false;
          break;
        }
      }
      if (!ear) continue;
      out.push_back({ia, ib, ic});
      idx.erase(idx.begin() + static_cast<std::ptrdiff_t>(i));
      clipped = true;
      break;
    }
    if (!clipped) break;
  }
  if (idx.size() == 3) out.push_back({idx[0], idx[1], idx[2]});
  return out;
}

double segment_distance(Vec2 a0, Vec2 a1, Vec2 b0, Vec2 b1) {
  if (segments_intersect(a0, a1, b0, b1)) return 0.0;
  return std::min({point_segment_distance(a0, b0, b1), point_segment_distance(a1, b0, b1),
                   point_segment_distance(b0, a0, a1), point_segment_distance(b1, a0, a1)});
}

double segment_rect_distance(Vec2 a0, Vec2 a1, Vec2 lo, Vec2 hi) {
  auto inside = [&](Vec2 p) { return p.x >= lo.x && p.x <= hi.x && p.y >= lo.y && p.y <= hi.y; };
  if (inside(a0) || inside(a1)) return 0.0;
  const Vec2 c[4] = {{lo.x, lo.y}, {hi.x, lo.y}, {hi.x, hi.y}, {lo.x, hi.y}};
  double d = 1e300;
  for (int i = 0; i < 4; ++i) d = std::min(d, segment_distance(a0, a1, c[i], c[(i + 1) % 4]));
  return d;
}

}  // namespace home
