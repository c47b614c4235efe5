#include "home/generator.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "home/errors.hpp"
#include "home/geometry.hpp"
#include "home/rng.hpp"
#include "home/scene_io.hpp"

namespace home {

namespace {

enum class Shape { box, topped, table, stack };
enum class SizeClass { large, medium, small };

struct Prototype {
  const char* fine;
  Shape shape;
  SizeClass size;
  Vec3 lo, hi;  // full extents range (meters)
  const char* material;
  const char* second_material;  // top/second layer for topped, table, stack
  Rgb color;
  bool dynamic;
};

// clang-format off
const std::vector<Prototype> kGeneric = {
  {"box", Shape::box, SizeClass::small, {0.2, 0.2, 0.15}, {0.5, 0.4, 0.4}, "cardboard", nullptr, {170, 130, 80}, true},
  {"basket", Shape::box, SizeClass::small, {0.3, 0.3, 0.2}, {0.45, 0.45, 0.35}, "wicker", nullptr, {180, 140, 90}, true},
  {"potted plant", Shape::stack, SizeClass::medium, {0.3, 0.3, 0.5}, {0.5, 0.5, 1.2}, "ceramic", "wood", {60, 140, 50}, false},
  {"ball", Shape::box, SizeClass::small, {0.15, 0.15, 0.15}, {0.25, 0.25, 0.25}, "rubber", nullptr, {220, 40, 40}, true},
  {"backpack", Shape::box, SizeClass::small, {0.3, 0.2, 0.4}, {0.35, 0.25, 0.5}, "textile", nullptr, {40, 60, 120}, true},
  {"suitcase", Shape::box, SizeClass::small, {0.4, 0.2, 0.55}, {0.5, 0.3, 0.7}, "plastic", nullptr, {30, 30, 30}, true},
  {"umbrella", Shape::box, SizeClass::small, {0.08, 0.08, 0.8}, {0.1, 0.1, 0.95}, "textile", nullptr, {20, 20, 90}, true},
  {"candle", Shape::box, SizeClass::small, {0.06, 0.06, 0.1}, {0.1, 0.1, 0.25}, "plastic", nullptr, {245, 240, 220}, true},
  {"globe", Shape::stack, SizeClass::small, {0.25, 0.25, 0.35}, {0.35, 0.35, 0.5}, "plastic", "metal", {40, 90, 180}, true},
  {"trash can", Shape::box, SizeClass::small, {0.25, 0.25, 0.35}, {0.4, 0.4, 0.7}, "plastic", nullptr, {90, 90, 90}, true},
  {"floor lamp", Shape::stack, SizeClass::medium, {0.3, 0.3, 1.4}, {0.4, 0.4, 1.8}, "metal", "textile", {230, 220, 190}, false},
  {"chair", Shape::topped, SizeClass::medium, {0.42, 0.42, 0.8}, {0.55, 0.55, 1.0}, "wood", "textile", {120, 75, 40}, false},
  {"side table", Shape::table, SizeClass::medium, {0.4, 0.4, 0.45}, {0.6, 0.6, 0.65}, "wood", "wood", {110, 70, 35}, false},
  {"shoes", Shape::box, SizeClass::small, {0.25, 0.1, 0.1}, {0.32, 0.14, 0.14}, "leather", nullptr, {60, 35, 20}, true},
  {"boots", Shape::box, SizeClass::small, {0.28, 0.12, 0.3}, {0.34, 0.15, 0.45}, "leather", nullptr, {40, 25, 15}, true},
  {"doll", Shape::box, SizeClass::small, {0.1, 0.08, 0.25}, {0.15, 0.1, 0.4}, "plastic", nullptr, {240, 180, 190}, true},
  {"toy car", Shape::box, SizeClass::small, {0.15, 0.08, 0.06}, {0.3, 0.15, 0.12}, "plastic", nullptr, {200, 30, 30}, true},
  {"building blocks", Shape::box, SizeClass::small, {0.2, 0.2, 0.1}, {0.3, 0.3, 0.2}, "wood", nullptr, {230, 200, 40}, true},
  {"books", Shape::box, SizeClass::small, {0.2, 0.15, 0.1}, {0.3, 0.25, 0.3}, "paper", nullptr, {150, 40, 40}, true},
  {"cushion", Shape::box, SizeClass::small, {0.35, 0.35, 0.12}, {0.5, 0.5, 0.2}, "textile", nullptr, {200, 160, 60}, true},
  {"coat stand", Shape::stack, SizeClass::medium, {0.4, 0.4, 1.6}, {0.5, 0.5, 1.9}, "wood", "metal", {90, 60, 30}, false},
};

const std::vector<Prototype> kKitchen = {
  {"refrigerator", Shape::box, SizeClass::large, {0.6, 0.6, 1.6}, {0.8, 0.75, 1.9}, "metal", nullptr, {235, 235, 235}, false},
  {"kitchen cabinet", Shape::topped, SizeClass::large, {1.2, 0.55, 0.85}, {2.2, 0.65, 0.95}, "wood", "stone", {200, 190, 170}, false},
  {"gas cooker", Shape::topped, SizeClass::medium, {0.55, 0.55, 0.85}, {0.65, 0.65, 0.95}, "metal", "glass", {200, 200, 205}, false},
  {"dining table", Shape::table, SizeClass::large, {1.2, 0.8, 0.72}, {1.8, 1.0, 0.78}, "wood", "wood", {140, 90, 45}, false},
  {"dining chair", Shape::topped, SizeClass::medium, {0.42, 0.42, 0.85}, {0.5, 0.5, 1.0}, "wood", "leather", {120, 80, 45}, false},
  {"microwave", Shape::box, SizeClass::small, {0.45, 0.35, 0.26}, {0.55, 0.42, 0.32}, "metal", nullptr, {40, 40, 40}, true},
  {"mug", Shape::box, SizeClass::small, {0.08, 0.08, 0.09}, {0.1, 0.1, 0.12}, "ceramic", nullptr, {250, 250, 250}, true},
  {"plate", Shape::box, SizeClass::small, {0.2, 0.2, 0.02}, {0.28, 0.28, 0.03}, "ceramic", nullptr, {245, 245, 240}, true},
  {"bowl", Shape::box, SizeClass::small, {0.14, 0.14, 0.06}, {0.2, 0.2, 0.1}, "ceramic", nullptr, {230, 230, 250}, true},
  {"pot", Shape::box, SizeClass::small, {0.2, 0.2, 0.15}, {0.3, 0.3, 0.25}, "metal", nullptr, {170, 170, 175}, true},
  {"kettle", Shape::box, SizeClass::small, {0.18, 0.15, 0.2}, {0.22, 0.18, 0.26}, "metal", nullptr, {190, 190, 195}, true},
  {"mortar and pestle", Shape::box, SizeClass::small, {0.1, 0.1, 0.08}, {0.15, 0.15, 0.12}, "stone", nullptr, {210, 205, 200}, true},
  {"teapot", Shape::box, SizeClass::small, {0.15, 0.12, 0.12}, {0.22, 0.16, 0.18}, "ceramic", nullptr, {250, 250, 250}, true},
  {"toaster", Shape::box, SizeClass::small, {0.25, 0.15, 0.18}, {0.3, 0.2, 0.22}, "metal", nullptr, {180, 30, 30}, true},
  {"cutting board", Shape::box, SizeClass::small, {0.3, 0.2, 0.02}, {0.45, 0.3, 0.03}, "wood", nullptr, {190, 150, 100}, true},
  {"knife block", Shape::box, SizeClass::small, {0.1, 0.15, 0.2}, {0.14, 0.2, 0.28}, "wood", nullptr, {100, 60, 30}, true},
};

const std::vector<Prototype> kLiving = {
  {"sofa", Shape::stack, SizeClass::large, {1.8, 0.85, 0.8}, {2.3, 1.0, 0.95}, "textile", "textile", {110, 110, 120}, false},
  {"armchair", Shape::stack, SizeClass::medium, {0.75, 0.75, 0.8}, {0.95, 0.9, 1.0}, "textile", "leather", {150, 80, 50}, false},
  {"coffee table", Shape::table, SizeClass::medium, {0.8, 0.5, 0.4}, {1.2, 0.7, 0.5}, "wood", "glass", {120, 80, 40}, false},
  {"television", Shape::topped, SizeClass::medium, {0.9, 0.1, 0.55}, {1.3, 0.15, 0.8}, "plastic", "glass", {15, 15, 15}, false},
  {"tv stand", Shape::box, SizeClass::medium, {1.0, 0.4, 0.45}, {1.6, 0.5, 0.6}, "wood", nullptr, {90, 60, 40}, false},
  {"rug", Shape::box, SizeClass::large, {1.5, 1.0, 0.01}, {2.4, 1.8, 0.02}, "carpet", nullptr, {160, 40, 50}, false},
  {"vase", Shape::box, SizeClass::small, {0.12, 0.12, 0.25}, {0.2, 0.2, 0.45}, "glass", nullptr, {90, 160, 200}, true},
  {"xbox", Shape::box, SizeClass::small, {0.27, 0.27, 0.06}, {0.3, 0.3, 0.08}, "plastic", nullptr, {20, 20, 20}, true},
  {"accordion", Shape::box, SizeClass::small, {0.35, 0.2, 0.3}, {0.45, 0.25, 0.4}, "wood", nullptr, {150, 20, 30}, true},
  {"guitar", Shape::box, SizeClass::small, {0.35, 0.1, 0.95}, {0.4, 0.12, 1.05}, "wood", nullptr, {170, 100, 40}, true},
  {"speaker", Shape::box, SizeClass::small, {0.2, 0.2, 0.3}, {0.3, 0.3, 0.5}, "wood", nullptr, {30, 30, 30}, true},
  {"bookshelf", Shape::box, SizeClass::large, {0.8, 0.3, 1.6}, {1.2, 0.4, 2.0}, "wood", nullptr, {130, 90, 50}, false},
};

const std::vector<Prototype> kBedroom = {
  {"double bed", Shape::stack, SizeClass::large, {1.9, 1.4, 0.45}, {2.1, 1.8, 0.6}, "wood", "textile", {230, 230, 235}, false},
  {"single bed", Shape::stack, SizeClass::large, {1.9, 0.9, 0.45}, {2.1, 1.1, 0.6}, "wood", "textile", {200, 210, 230}, false},
  {"wardrobe", Shape::box, SizeClass::large, {1.0, 0.55, 1.8}, {1.6, 0.65, 2.1}, "wood", nullptr, {160, 120, 80}, false},
  {"dresser", Shape::topped, SizeClass::medium, {0.8, 0.45, 0.8}, {1.2, 0.55, 1.0}, "wood", "marble", {150, 100, 60}, false},
  {"bedside table", Shape::table, SizeClass::medium, {0.4, 0.4, 0.5}, {0.5, 0.5, 0.6}, "wood", "wood", {140, 95, 55}, false},
  {"table lamp", Shape::stack, SizeClass::small, {0.2, 0.2, 0.35}, {0.3, 0.3, 0.5}, "ceramic", "textile", {240, 230, 200}, true},
  {"pillow", Shape::box, SizeClass::small, {0.5, 0.35, 0.12}, {0.65, 0.45, 0.18}, "textile", nullptr, {240, 240, 240}, true},
  {"alarm clock", Shape::box, SizeClass::small, {0.1, 0.06, 0.08}, {0.15, 0.08, 0.12}, "plastic", nullptr, {20, 20, 20}, true},
  {"slippers", Shape::box, SizeClass::small, {0.25, 0.2, 0.06}, {0.3, 0.25, 0.08}, "textile", nullptr, {230, 150, 180}, true},
  {"teddy bear", Shape::box, SizeClass::small, {0.2, 0.15, 0.3}, {0.3, 0.2, 0.45}, "textile", nullptr, {140, 90, 50}, true},
};

const std::vector<Prototype> kBathroom = {
  {"bathtub", Shape::box, SizeClass::large, {1.5, 0.7, 0.5}, {1.8, 0.8, 0.6}, "ceramic", nullptr, {250, 250, 250}, false},
  {"toilet", Shape::stack, SizeClass::medium, {0.4, 0.65, 0.4}, {0.45, 0.75, 0.8}, "ceramic", "plastic", {250, 250, 250}, false},
  {"sink", Shape::topped, SizeClass::medium, {0.5, 0.45, 0.8}, {0.7, 0.55, 0.9}, "ceramic", "metal", {245, 245, 245}, false},
  {"towel", Shape::box, SizeClass::small, {0.3, 0.2, 0.05}, {0.5, 0.3, 0.08}, "textile", nullptr, {70, 150, 200}, true},
  {"soap dispenser", Shape::box, SizeClass::small, {0.06, 0.06, 0.15}, {0.08, 0.08, 0.2}, "plastic", nullptr, {250, 200, 220}, true},
  {"toothbrush holder", Shape::box, SizeClass::small, {0.06, 0.06, 0.1}, {0.08, 0.08, 0.12}, "ceramic", nullptr, {200, 230, 240}, true},
  {"towel rack", Shape::box, SizeClass::medium, {0.5, 0.3, 0.9}, {0.7, 0.4, 1.1}, "metal", nullptr, {200, 200, 200}, false},
  {"hair dryer", Shape::box, SizeClass::small, {0.2, 0.08, 0.2}, {0.25, 0.1, 0.25}, "plastic", nullptr, {20, 20, 20}, true},
};

const std::vector<Prototype> kOffice = {
  {"desk", Shape::table, SizeClass::large, {1.2, 0.6, 0.72}, {1.6, 0.8, 0.78}, "wood", "laminate", {180, 160, 130}, false},
  {"office chair", Shape::stack, SizeClass::medium, {0.55, 0.55, 0.9}, {0.65, 0.65, 1.15}, "plastic", "textile", {20, 20, 25}, false},
  {"desktop computer", Shape::box, SizeClass::small, {0.18, 0.4, 0.4}, {0.22, 0.48, 0.48}, "metal", nullptr, {30, 30, 30}, false},
  {"keyboard", Shape::box, SizeClass::small, {0.42, 0.13, 0.02}, {0.46, 0.16, 0.04}, "plastic", nullptr, {20, 20, 20}, true},
  {"laptop", Shape::box, SizeClass::small, {0.3, 0.22, 0.02}, {0.36, 0.25, 0.03}, "metal", nullptr, {160, 160, 165}, true},
  {"file cabinet", Shape::box, SizeClass::medium, {0.4, 0.6, 0.7}, {0.5, 0.7, 1.3}, "metal", nullptr, {120, 120, 125}, false},
  {"printer", Shape::box, SizeClass::small, {0.4, 0.35, 0.2}, {0.5, 0.45, 0.3}, "plastic", nullptr, {230, 230, 230}, true},
  {"bookshelf", Shape::box, SizeClass::large, {0.8, 0.3, 1.6}, {1.2, 0.4, 2.0}, "wood", nullptr, {130, 90, 50}, false},
  {"wall clock", Shape::box, SizeClass::small, {0.25, 0.05, 0.25}, {0.35, 0.06, 0.35}, "plastic", nullptr, {245, 245, 245}, true},
};
// clang-format on

const std::vector<Prototype>& prototypes_for(const std::string& kind) {
  if (kind == "kitchen") return kKitchen;
  if (kind == "living_room" || kind == "hall" || kind == "lobby") return kLiving;
  if (kind == "bedroom" || kind == "child_room" || kind == "guest_room") return kBedroom;
  if (kind == "bathroom" || kind == "toilet") return kBathroom;
  if (kind == "office" || kind == "storage") return kOffice;
  return kLiving;
}

const char* kRoomKindPool[] = {"bedroom", "bathroom", "dining_room", "office", "child_room",
                               "guest_room", "hallway", "toilet", "storage", "gym", "entryway"};

FineCategoryId fine_id(const char* name) {
  auto id = fine_categories().find(name);
  if (!id) throw Error(ErrorCode::IoError, std::string("generator prototype not in taxonomy: ") + name);
  return FineCategoryId{*id};
}

MaterialId material_id(const char* name) {
  auto id = MaterialTable::standard().find(name);
  if (!id) throw Error(ErrorCode::IoError, std::string("generator material not in table: ") + name);
  return *id;
}

std::uint8_t jitter(Rng& rng, std::uint8_t c) {
  return static_cast<std::uint8_t>(std::clamp<std::int64_t>(c + rng.range(-12, 12), 0, 255));
}

Texture make_texture(Rng& rng, Rgb base, bool patterned) {
  Rgb c{jitter(rng, base[0]), jitter(rng, base[1]), jitter(rng, base[2])};
  if (!patterned) return Texture::solid(c);
  Texture t;
  t.width = 2;
  t.height = 2;
  const Rgb dark{static_cast<std::uint8_t>(c[0] * 3 / 4), static_cast<std::uint8_t>(c[1] * 3 / 4),
                 static_cast<std::uint8_t>(c[2] * 3 / 4)};
  t.texels = {c, dark, dark, c};
  return t;
}

/// Mesh centered on its bounding-box center, sized `size`.
TriMesh make_mesh(Shape shape, Vec3 size) {
  const Vec3 h = size * 0.5;
  TriMesh m;
  switch (shape) {
    case Shape::box:
      append_box(m, -h, h, 0);
      break;
    case Shape::topped: {
      // body box with a distinct top face
      append_box(m, -h, h, 0);
      m.triangle_material[10] = 1;
      m.triangle_material[11] = 1;
      break;
    }
    case Shape::table: {
      const double top = std::min(0.05, size.z * 0.15);
      const double leg = std::min({0.06, size.x * 0.15, size.y * 0.15});
      append_box(m, {-h.x, -h.y, h.z - top}, h, 1);
      const double lz = h.z - top;
      for (int i = 0; i < 4; ++i) {
        const double sx = (i & 1) ? 1 : -1, sy = (i & 2) ? 1 : -1;
        const Vec3 c{sx * (h.x - leg), sy * (h.y - leg), 0};
        // legs stop just below the top slab so the pieces stay disjoint closed shells
        append_box(m, {c.x - leg * 0.5, c.y - leg * 0.5, -h.z}, {c.x + leg * 0.5, c.y + leg * 0.5, lz - 1e-3}, 0);
      }
      break;
    }
    case Shape::stack: {
      const double split = -h.z + size.z * 0.55;
      append_box(m, {-h.x, -h.y, -h.z}, {h.x, h.y, split}, 0);
      append_box(m, {-h.x * 0.8, -h.y * 0.8, split + 1e-3}, {h.x * 0.8, h.y * 0.8, h.z}, 1);
      break;
    }
  }
  m.watertight = true;
  return m;
}

struct Footprint {
  Vec2 lo, hi;
  bool overlaps(const Footprint& o, double margin) const {
    return lo.x - margin < o.hi.x && o.lo.x - margin < hi.x && lo.y - margin < o.hi.y && o.lo.y - margin < hi.y;
  }
};

struct Cell {
  double x0, y0, x1, y1;
  int col, row;
};

void add_door(Room& room, const Cell& cell, int edge, double world_lo, double width) {
  Door d;
  d.edge = static_cast<std::uint32_t>(edge);
  d.width = width;
  d.height = 2.1;
  switch (edge) {
    case 0: d.offset = world_lo - cell.x0; break;            // bottom, runs +x
    case 1: d.offset = world_lo - cell.y0; break;            // right, runs +y
    case 2: d.offset = cell.x1 - (world_lo + width); break;  // top, runs -x
    case 3: d.offset = cell.y1 - (world_lo + width); break;  // left, runs -y
  }
  room.doors.push_back(d);
}

}  // namespace

House generate_house(std::uint64_t seed, const GeneratorParams& params) {
  if (params.room_count.min < 1 || params.room_count.min > params.room_count.max)
    throw Error(ErrorCode::ParamError, "room_count range must satisfy 1 <= min <= max");
  if (params.objects_per_room.min < 0 || params.objects_per_room.min > params.objects_per_room.max)
    throw Error(ErrorCode::ParamError, "objects_per_room range must satisfy 0 <= min <= max");
  if (params.room_count.max > 64 || params.objects_per_room.max > 200)
    throw Error(ErrorCode::ParamError, "ranges exceed generator capacity (64 rooms, 200 objects per room)");

  Rng rng(mix64(seed));
  House house;
  house.id = "gen-" + std::to_string(seed);

  const int n_rooms = static_cast<int>(rng.range(params.room_count.min, params.room_count.max));
  const int cols = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(n_rooms))));
  const int rows = (n_rooms + cols - 1) / cols;
  std::vector<double> xs{0}, ys{0};
  for (int c = 0; c < cols; ++c) xs.push_back(xs.back() + std::round(rng.uniform(4.0, 6.5) * 10) / 10);
  for (int r = 0; r < rows; ++r) ys.push_back(ys.back() + std::round(rng.uniform(4.0, 6.5) * 10) / 10);
  const double wall_height = std::round(rng.uniform(2.6, 3.0) * 10) / 10;

  // snake order keeps consecutive rooms adjacent
  std::vector<Cell> cells;
  for (int r = 0; r < rows && static_cast<int>(cells.size()) < n_rooms; ++r)
    for (int k = 0; k < cols && static_cast<int>(cells.size()) < n_rooms; ++k) {
      const int c = (r % 2 == 0) ? k : cols - 1 - k;
      cells.push_back({xs[c], ys[r], xs[c + 1], ys[r + 1], c, r});
    }

  const MaterialId wall_materials[] = {material_id("plaster"), material_id("brick"), material_id("concrete")};
  const MaterialId floor_materials[] = {material_id("wood"), material_id("tile"), material_id("carpet"),
                                        material_id("laminate"), material_id("marble")};

  for (int i = 0; i < n_rooms; ++i) {
    const Cell& cell = cells[i];
    Room room;
    room.id = "r" + std::to_string(i);
    const char* kind = i == 0 ? "living_room"
                       : i == 1 ? "kitchen"
                                : kRoomKindPool[rng.range(0, std::size(kRoomKindPool) - 1)];
    room.kind = RoomKind{*room_kinds().find(kind)};
    room.floor_polygon = {{cell.x0, cell.y0}, {cell.x1, cell.y0}, {cell.x1, cell.y1}, {cell.x0, cell.y1}};
    room.wall_height = wall_height;
    room.wall_material = wall_materials[rng.range(0, 2)];
    room.floor_material = floor_materials[rng.range(0, 4)];
    house.rooms.push_back(std::move(room));
  }

  // doors between snake neighbours
  const double door_width = 1.0;
  for (int i = 0; i + 1 < n_rooms; ++i) {
    const Cell &a = cells[i], &b = cells[i + 1];
    if (a.row == b.row) {
      const bool b_right = b.col > a.col;
      const double lo = std::max(a.y0, b.y0) + rng.uniform(0.5, (a.y1 - a.y0) - door_width - 0.5);
      add_door(house.rooms[i], a, b_right ? 1 : 3, lo, door_width);
      add_door(house.rooms[i + 1], b, b_right ? 3 : 1, lo, door_width);
    } else {
      const double lo = a.x0 + rng.uniform(0.5, (a.x1 - a.x0) - door_width - 0.5);
      add_door(house.rooms[i], a, 2, lo, door_width);
      add_door(house.rooms[i + 1], b, 0, lo, door_width);
    }
  }

  int object_counter = 0;
  for (int i = 0; i < n_rooms; ++i) {
    const Cell& cell = cells[i];
    const Room& room = house.rooms[i];
    const auto& specific = prototypes_for(name_of(room.kind));

    // keep-out zones in front of every door so the rooms stay connected
    std::vector<Footprint> placed;
    for (const Door& d : room.doors) {
      const Vec2 a = room.floor_polygon[d.edge], b = room.floor_polygon[(d.edge + 1) % 4];
      const Vec2 dir = (b - a) * (1.0 / length(b - a));
      const Vec2 inward{-dir.y, dir.x};
      const Vec2 p0 = a + dir * (d.offset - 0.3), p1 = a + dir * (d.offset + d.width + 0.3);
      const Vec2 p2 = p0 + inward * 1.3, p3 = p1 + inward * 1.3;
      placed.push_back({{std::min({p0.x, p1.x, p2.x, p3.x}), std::min({p0.y, p1.y, p2.y, p3.y})},
                        {std::max({p0.x, p1.x, p2.x, p3.x}), std::max({p0.y, p1.y, p2.y, p3.y})}});
    }

    const int target = static_cast<int>(rng.range(params.objects_per_room.min, params.objects_per_room.max));
    const int large_budget = static_cast<int>(rng.range(1, 3));
    int large_used = 0;
    for (int k = 0; k < target; ++k) {
      const bool use_specific = rng.uniform() < 0.6;
      const auto& pool = use_specific ? specific : kGeneric;
      const Prototype* proto = &pool[rng.range(0, static_cast<std::int64_t>(pool.size()) - 1)];
      if (proto->size == SizeClass::large) {
        if (large_used >= large_budget) proto = &kGeneric[rng.range(0, static_cast<std::int64_t>(kGeneric.size()) - 1)];
        if (proto->size == SizeClass::large) ++large_used;
      }
      const Vec3 size{rng.uniform(proto->lo.x, proto->hi.x), rng.uniform(proto->lo.y, proto->hi.y),
                      rng.uniform(proto->lo.z, proto->hi.z)};
      const bool axis_aligned = proto->size != SizeClass::small;
      const double yaw = axis_aligned ? kPi / 2 * static_cast<double>(rng.range(0, 3)) : rng.uniform(0, 2 * kPi);

      SceneObject obj;
      obj.id = "o" + std::to_string(object_counter);
      obj.room_id = room.id;
      obj.fine_category = fine_id(proto->fine);
      obj.category = fine_category_parent(obj.fine_category);
      obj.mesh = make_mesh(proto->shape, size);
      obj.dynamic = proto->dynamic;
      const bool patterned = rng.uniform() < 0.25;
      obj.material_layers.push_back({material_id(proto->material), make_texture(rng, proto->color, patterned)});
      if (proto->shape != Shape::box) {
        const char* second = proto->second_material ? proto->second_material : proto->material;
        const Rgb second_color{jitter(rng, static_cast<std::uint8_t>(255 - proto->color[0] / 2)),
                               jitter(rng, static_cast<std::uint8_t>(255 - proto->color[1] / 2)),
                               jitter(rng, static_cast<std::uint8_t>(255 - proto->color[2] / 2))};
        obj.material_layers.push_back({material_id(second), Texture::solid(second_color)});
      }

      // rejection sampling inside the room, away from walls, doors and other objects
      const Mat3 rot = Mat3::from_yaw(yaw);
      AABB local = AABB::empty();
      for (const Vec3& v : obj.mesh.vertices) local.expand(rot * v);
      const Vec3 he = local.half_extents();
      const double margin = 0.05;
      const double min_x = cell.x0 + he.x + margin, max_x = cell.x1 - he.x - margin;
      const double min_y = cell.y0 + he.y + margin, max_y = cell.y1 - he.y - margin;
      if (min_x >= max_x || min_y >= max_y) continue;
      bool ok = false;
      Footprint fp{};
      Vec2 c{};
      for (int attempt = 0; attempt < 60 && !ok; ++attempt) {
        c = {rng.uniform(min_x, max_x), rng.uniform(min_y, max_y)};
        fp = {{c.x - he.x, c.y - he.y}, {c.x + he.x, c.y + he.y}};
        ok = std::none_of(placed.begin(), placed.end(), [&](const Footprint& f) { return f.overlaps(fp, 0.08); });
      }
      if (!ok) continue;
      placed.push_back(fp);
      obj.transform.rotation = rot;
      obj.transform.translation = {c.x, c.y, room.elevation + he.z};
      house.objects.push_back(std::move(obj));
      ++object_counter;
    }
  }

  for (const Room& room : house.rooms) {
    const Vec2 c = (room.floor_polygon[0] + room.floor_polygon[2]) * 0.5;
    house.lights.push_back({{c.x, c.y, room.elevation + room.wall_height - 0.3}, 6.0});
  }

  // one sound source, kept out of every object
  {
    const int ri = static_cast<int>(rng.range(0, n_rooms - 1));
    const Cell& cell = cells[ri];
    SoundSource src;
    src.id = "s0";
    src.reference_gain = 1.0;
    if (rng.uniform() < 0.5) {
      src.signal.kind = SignalSpec::Kind::sine;
      src.signal.frequency = std::round(rng.uniform(220.0, 880.0));
    } else {
      src.signal.kind = SignalSpec::Kind::noise;
      src.signal.seed = rng.next() >> 16;
    }
    Vec3 p{};
    for (int attempt = 0; attempt < 200; ++attempt) {
      p = {rng.uniform(cell.x0 + 0.5, cell.x1 - 0.5), rng.uniform(cell.y0 + 0.5, cell.y1 - 0.5), 1.0};
      const bool clear = std::none_of(house.objects.begin(), house.objects.end(), [&](const SceneObject& o) {
        AABB b = object_aabb(o);
        b.min -= Vec3{0.05, 0.05, 0.05};
        b.max += Vec3{0.05, 0.05, 0.05};
        return b.contains(p);
      });
      if (clear) break;
    }
    src.position = p;
    house.sound_sources.push_back(std::move(src));
  }

  AABB b = AABB::empty();
  for (const Room& r : house.rooms)
    for (Vec2 p : r.floor_polygon) {
      b.expand(Vec3{p.x, p.y, r.elevation});
      b.expand(Vec3{p.x, p.y, r.elevation + r.wall_height});
    }
  for (const auto& o : house.objects) b.expand(object_aabb(o));
  house.bounds = b;

  validate_house(house);
  return house;
}

}  // namespace home
