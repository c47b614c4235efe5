#include <gtest/gtest.h>

#include <cmath>

#include "home/errors.hpp"
#include "home/geometry.hpp"

using namespace home;

TEST(Mesh, UnitCubeVolumeAndArea) {
  const TriMesh m = make_box_mesh({0.5, 0.5, 0.5});
  EXPECT_TRUE(is_watertight(m));
  EXPECT_NEAR(mesh_volume(m), 1.0, 1e-12);
  EXPECT_NEAR(mesh_area(m), 6.0, 1e-12);
}

TEST(Mesh, VolumeScalesCubically) {
  const TriMesh m = make_box_mesh({0.5, 1.0, 1.5});
  EXPECT_NEAR(mesh_volume(scaled(m, 2.0)), 8 * mesh_volume(m), 1e-9);
}

TEST(Mesh, OpenMeshIsNotWatertight) {
  TriMesh m = make_box_mesh({1, 1, 1});
  m.triangles.pop_back();
  m.triangle_material.pop_back();
  EXPECT_FALSE(is_watertight(m));
  try {
    mesh_volume(m);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NotWatertight);
  }
}

TEST(Mesh, AreaByLayer) {
  TriMesh m = make_box_mesh({0.5, 0.5, 0.5});
  m.triangle_material[10] = m.triangle_material[11] = 1;  // top face
  const auto a = surface_area_by_layer(m);
  EXPECT_NEAR(a.at(0), 5.0, 1e-12);
  EXPECT_NEAR(a.at(1), 1.0, 1e-12);
}

TEST(Mesh, OutwardWinding) {
  const TriMesh m = make_box_mesh({1, 2, 3});
  for (const auto& t : m.triangles) {
    const Vec3 a = m.vertices[t[0]], b = m.vertices[t[1]], c = m.vertices[t[2]];
    const Vec3 n = cross(b - a, c - a);
    EXPECT_GT(dot(n, (a + b + c) / 3.0), 0);
  }
}

TEST(Aabb, ObjectBoxFollowsTransform) {
  SceneObject o;
  o.mesh = make_box_mesh({1, 0.5, 0.25});
  o.transform.rotation = Mat3::from_yaw(kPi / 2);
  o.transform.translation = {3, 4, 5};
  const AABB b = object_aabb(o);
  EXPECT_NEAR(b.min.x, 2.5, 1e-12);
  EXPECT_NEAR(b.max.y, 5.0, 1e-12);
  EXPECT_NEAR(b.min.z, 4.75, 1e-12);
}

TEST(Polygon, AreaContainmentTriangulation) {
  const std::vector<Vec2> l{{0, 0}, {2, 0}, {2, 1}, {1, 1}, {1, 2}, {0, 2}};
  EXPECT_NEAR(signed_area(l), 3.0, 1e-12);
  EXPECT_TRUE(is_simple_polygon(l));
  EXPECT_TRUE(point_in_polygon(l, {0.5, 1.5}));
  EXPECT_FALSE(point_in_polygon(l, {1.5, 1.5}));
  const auto tris = triangulate(l);
  EXPECT_EQ(tris.size(), 4u);
  double area = 0;
  for (const auto& t : tris) area += signed_area(std::vector<Vec2>{l[t[0]], l[t[1]], l[t[2]]});
  EXPECT_NEAR(area, 3.0, 1e-12);
}

TEST(Polygon, SelfIntersectingIsNotSimple) {
  EXPECT_FALSE(is_simple_polygon(std::vector<Vec2>{{0, 0}, {1, 1}, {1, 0}, {0, 1}}));
}

TEST(Distance, Segments) {
  EXPECT_NEAR(segment_distance({0, 0}, {1, 0}, {0, 1}, {1, 1}), 1.0, 1e-12);
  EXPECT_NEAR(segment_distance({0, 0}, {1, 1}, {0, 1}, {1, 0}), 0.0, 1e-12);
  EXPECT_NEAR(segment_distance({0, 0}, {0, 0}, {3, 4}, {3, 4}), 5.0, 1e-12);
}

TEST(Distance, SegmentRect) {
  EXPECT_NEAR(segment_rect_distance({-2, 0.5}, {-1, 0.5}, {0, 0}, {1, 1}), 1.0, 1e-12);
  EXPECT_NEAR(segment_rect_distance({-1, 0.5}, {2, 0.5}, {0, 0}, {1, 1}), 0.0, 1e-12);
  EXPECT_NEAR(segment_rect_distance({0.5, 0.5}, {0.5, 0.5}, {0, 0}, {1, 1}), 0.0, 1e-12);
  EXPECT_NEAR(segment_rect_distance({2, 2}, {2, 2}, {0, 0}, {1, 1}), std::sqrt(2.0), 1e-12);
}
