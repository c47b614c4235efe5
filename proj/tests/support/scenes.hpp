#pragma once

// Small analytic scenes shared by the unit, integration and acceptance tests.

#include <string>

#include "home/geometry.hpp"
#include "home/scene.hpp"
#include "home/scene_io.hpp"

namespace home::fixture {

inline Room box_room(std::string id, double x0, double y0, double x1, double y1, double height,
                     const char* kind = "living_room") {
  Room r;
  r.id = std::move(id);
  r.kind = RoomKind{*room_kinds().find(kind)};
  r.floor_polygon = {{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}};
  r.wall_height = height;
  r.wall_material = *MaterialTable::standard().find("plaster");
  r.floor_material = *MaterialTable::standard().find("wood");
  return r;
}

inline SceneObject box_object(std::string id, std::string room, Vec3 center, Vec3 half, bool dynamic = false,
                              const char* material = "wood", Rgb color = {139, 69, 19},
                              const char* fine = "table") {
  SceneObject o;
  o.id = std::move(id);
  o.room_id = std::move(room);
  o.fine_category = FineCategoryId{*fine_categories().find(fine)};
  o.category = fine_category_parent(o.fine_category);
  o.mesh = make_box_mesh(half);
  o.mesh.watertight = true;
  o.transform.translation = center;
  o.material_layers = {{*MaterialTable::standard().find(material), Texture::solid(color)}};
  o.dynamic = dynamic;
  return o;
}

/// Closed empty room [0,lx]x[0,ly]x[0,lz]; validated.
inline House shoebox(double lx, double ly, double lz) {
  House h;
  h.id = "shoebox";
  h.rooms.push_back(box_room("r0", 0, 0, lx, ly, lz));
  h.bounds = {{0, 0, 0}, {lx, ly, lz}};
  validate_house(h);
  return h;
}

/// No reflecting geometry at all.
inline House free_field() {
  House h;
  h.id = "free";
  h.bounds = {{-100, -100, -100}, {100, 100, 100}};
  return h;
}

}  // namespace home::fixture
