#pragma once

#include <map>
#include <span>
#include <vector>

#include "home/scene.hpp"

namespace home {

/// Tight world-space box around the transformed mesh vertices.
AABB object_aabb(const SceneObject& obj);

/// Absolute signed-tetrahedron volume. Throws NotWatertight unless the mesh
/// passes `is_watertight`.
double mesh_volume(const TriMesh& mesh);

/// Triangle area summed per material layer index.
std::map<int, double> surface_area_by_layer(const TriMesh& mesh);

double mesh_area(const TriMesh& mesh);
double triangle_area(Vec3 a, Vec3 b, Vec3 c);

/// Every edge used by exactly two triangles, once in each direction.
bool is_watertight(const TriMesh& mesh);

TriMesh scaled(const TriMesh& mesh, double s);

/// Axis-aligned box centered at the origin with 12 outward-wound triangles.
/// Faces are ordered -x, +x, -y, +y, -z, +z (two triangles each); all use layer 0.
TriMesh make_box_mesh(Vec3 half_extents);

/// Appends a box spanning [lo, hi] to `mesh` using layer `layer`.
void append_box(TriMesh& mesh, Vec3 lo, Vec3 hi, std::uint16_t layer);

// --- 2D polygon helpers (floor plans) ---

double signed_area(std::span<const Vec2> polygon);
bool is_simple_polygon(std::span<const Vec2> polygon);
bool point_in_polygon(std::span<const Vec2> polygon, Vec2 p);

/// Ear-clipping triangulation of a simple counter-clockwise polygon; returns
/// index triples into `polygon`.
std::vector<std::array<std::uint32_t, 3>> triangulate(std::span<const Vec2> polygon);

/// Shortest distance between segments [a0,a1] and [b0,b1].
double segment_distance(Vec2 a0, Vec2 a1, Vec2 b0, Vec2 b1);

/// Shortest distance between segment [a0,a1] and the rectangle [lo,hi]
/// (zero if they touch or intersect).
double segment_rect_distance(Vec2 a0, Vec2 a1, Vec2 lo, Vec2 hi);

}  // namespace home
