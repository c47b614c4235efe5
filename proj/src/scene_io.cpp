#include "home/scene_io.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "home/bytes.hpp"
#include "home/errors.hpp"
#include "home/geometry.hpp"
#include "home/media_io.hpp"

namespace home {

using nlohmann::json;

namespace {

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json vec_json(Vec3 v) { return json::array({v.x, v.y, v.z}); }

Vec3 vec3_from(const json& j) {
  if (!j.is_array() || j.size() != 3) throw Error(ErrorCode::ParseError, "expected 3-element array");
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

Rgb rgb_from(const json& j) {
  if (!j.is_array() || j.size() != 3) throw Error(ErrorCode::ParseError, "expected RGB triple");
  Rgb c{};
  for (int i = 0; i < 3; ++i) {
    const int v = j[i].get<int>();
    if (v < 0 || v > 255) throw Error(ErrorCode::ParseError, "color component out of range");
    c[i] = static_cast<std::uint8_t>(v);
  }
  return c;
}

template <class Id>
Id lookup(const TermList& terms, const json& j, const std::string& path) {
  const auto name = j.get<std::string>();
  auto id = terms.find(name);
  if (!id) throw ValidationError(path, "unknown term '" + name + "'");
  return Id{*id};
}

MaterialId lookup_material(const MaterialTable& table, const json& j, const std::string& path) {
  const auto name = j.get<std::string>();
  auto id = table.find(name);
  if (!id) throw ValidationError(path, "unknown material '" + name + "'");
  return *id;
}

TriMesh mesh_from(const json& j, const std::filesystem::path& base_dir) {
  if (j.contains("file")) return read_hmsh(read_file(base_dir / j.at("file").get<std::string>()));
  TriMesh m;
  for (const auto& v : j.at("vertices")) m.vertices.push_back(vec3_from(v));
  for (const auto& t : j.at("triangles")) {
    if (!t.is_array() || t.size() != 3) throw Error(ErrorCode::ParseError, "triangle must have 3 indices");
    m.triangles.push_back({t[0].get<std::uint32_t>(), t[1].get<std::uint32_t>(), t[2].get<std::uint32_t>()});
  }
  if (j.contains("triangle_material"))
    m.triangle_material = j.at("triangle_material").get<std::vector<std::uint16_t>>();
  else
    m.triangle_material.assign(m.triangles.size(), 0);
  return m;
}

json mesh_json(const TriMesh& m) {
  json verts = json::array(), tris = json::array();
  for (const auto& v : m.vertices) verts.push_back(vec_json(v));
  for (const auto& t : m.triangles) tris.push_back(json::array({t[0], t[1], t[2]}));
  return {{"vertices", verts}, {"triangles", tris}, {"triangle_material", m.triangle_material}};
}

json texture_json(const Texture& t) {
  if (t.width == 1 && t.height == 1 && t.texels.size() == 1)
    return {{"color", json::array({t.texels[0][0], t.texels[0][1], t.texels[0][2]})}};
  json texels = json::array();
  for (const auto& c : t.texels) texels.push_back(json::array({c[0], c[1], c[2]}));
  return {{"grid", {{"width", t.width}, {"height", t.height}, {"texels", texels}}}};
}

Texture texture_from(const json& j) {
  if (j.contains("color")) return Texture::solid(rgb_from(j.at("color")));
  const auto& g = j.at("grid");
  Texture t;
  t.width = g.at("width").get<int>();
  t.height = g.at("height").get<int>();
  t.texels.clear();
  for (const auto& c : g.at("texels")) t.texels.push_back(rgb_from(c));
  return t;
}

json signal_json(const SignalSpec& s) {
  switch (s.kind) {
    case SignalSpec::Kind::sine: return {{"type", "sine"}, {"frequency", s.frequency}};
    case SignalSpec::Kind::noise: return {{"type", "noise"}, {"seed", s.seed}};
    case SignalSpec::Kind::sample: return {{"type", "sample"}, {"path", s.path}};
  }
  return {};
}

SignalSpec signal_from(const json& j, const std::filesystem::path& base_dir) {
  SignalSpec s;
  const auto type = j.at("type").get<std::string>();
  if (type == "sine") {
    s.kind = SignalSpec::Kind::sine;
    s.frequency = j.at("frequency").get<double>();
  } else if (type == "noise") {
    s.kind = SignalSpec::Kind::noise;
    s.seed = j.value("seed", std::uint64_t{0});
  } else if (type == "sample") {
    s.kind = SignalSpec::Kind::sample;
    s.path = j.at("path").get<std::string>();
    const WavData wav = read_wav(read_file(base_dir / s.path));
    s.samples = wav.mono();
    s.sample_rate = wav.sample_rate;
  } else {
    throw Error(ErrorCode::ParseError, "unknown signal type '" + type + "'");
  }
  return s;
}

House house_from(const json& doc, const std::filesystem::path& base_dir) {
  if (!doc.is_object()) throw Error(ErrorCode::ParseError, "document root must be an object");
  if (doc.value("version", std::string{}) != kSceneFormat)
    throw Error(ErrorCode::ParseError, "unsupported or missing version (expected home-scene/1)");

  House h;
  const auto& meta = doc.at("meta");
  h.id = meta.at("id").get<std::string>();

  if (doc.contains("materials")) {
    for (const auto& [name, m] : doc.at("materials").items()) {
      auto id = h.materials.find(name);
      if (!id) throw ValidationError("materials." + name, "unknown material");
      Material& mat = h.materials[*id];
      if (m.contains("absorption")) {
        const auto a = m.at("absorption").get<std::vector<double>>();
        if (a.size() != kBandCount) throw Error(ErrorCode::ParseError, "absorption needs 4 bands");
        std::copy(a.begin(), a.end(), mat.absorption.begin());
      }
      if (m.contains("density")) mat.density = m.at("density").get<double>();
    }
  }

  const auto rooms = doc.value("rooms", json::array());
  for (std::size_t i = 0; i < rooms.size(); ++i) {
    const auto& r = rooms[i];
    const std::string path = "rooms[" + std::to_string(i) + "]";
    Room room;
    room.id = r.at("id").get<std::string>();
    room.kind = lookup<RoomKind>(room_kinds(), r.at("kind"), path + ".kind");
    for (const auto& p : r.at("floor_polygon")) {
      if (!p.is_array() || p.size() != 2) throw Error(ErrorCode::ParseError, path + ".floor_polygon point");
      room.floor_polygon.push_back({p[0].get<double>(), p[1].get<double>()});
    }
    room.elevation = r.value("elevation", 0.0);
    room.wall_height = r.at("wall_height").get<double>();
    room.wall_material = lookup_material(h.materials, r.at("wall_material"), path + ".wall_material");
    room.floor_material = lookup_material(h.materials, r.at("floor_material"), path + ".floor_material");
    for (const auto& d : r.value("doors", json::array()))
      room.doors.push_back({d.at("edge").get<std::uint32_t>(), d.at("offset").get<double>(),
                            d.at("width").get<double>(), d.at("height").get<double>()});
    h.rooms.push_back(std::move(room));
  }

  const auto objects = doc.value("objects", json::array());
  for (std::size_t i = 0; i < objects.size(); ++i) {
    const auto& o = objects[i];
    const std::string path = "objects[" + std::to_string(i) + "]";
    SceneObject obj;
    obj.id = o.at("id").get<std::string>();
    obj.room_id = o.at("room_id").get<std::string>();
    obj.category = lookup<CategoryId>(categories(), o.at("category"), path + ".category");
    obj.fine_category = lookup<FineCategoryId>(fine_categories(), o.at("fine_category"), path + ".fine_category");
    obj.mesh = mesh_from(o.at("mesh"), base_dir);
    if (o.contains("transform")) {
      const auto& t = o.at("transform");
      const auto rot = t.value("rotation", std::vector<double>{1, 0, 0, 0, 1, 0, 0, 0, 1});
      if (rot.size() != 9) throw Error(ErrorCode::ParseError, path + ".transform.rotation needs 9 values");
      std::copy(rot.begin(), rot.end(), obj.transform.rotation.m.begin());
      obj.transform.translation = vec3_from(t.value("translation", json::array({0, 0, 0})));
    }
    const auto layers = o.at("material_layers");
    for (std::size_t k = 0; k < layers.size(); ++k) {
      MaterialLayer layer;
      layer.material = lookup_material(h.materials, layers[k].at("material"),
                                       path + ".material_layers[" + std::to_string(k) + "].material");
      layer.texture = texture_from(layers[k]);
      obj.material_layers.push_back(std::move(layer));
    }
    obj.dynamic = o.value("dynamic", false);
    h.objects.push_back(std::move(obj));
  }

  for (const auto& l : doc.value("lights", json::array()))
    h.lights.push_back({vec3_from(l.at("position")), l.value("intensity", 1.0)});

  for (const auto& s : doc.value("sound_sources", json::array())) {
    SoundSource src;
    src.id = s.at("id").get<std::string>();
    src.position = vec3_from(s.at("position"));
    src.signal = signal_from(s.at("signal"), base_dir);
    src.reference_gain = s.value("reference_gain", 1.0);
    h.sound_sources.push_back(std::move(src));
  }

  if (meta.contains("bounds")) {
    h.bounds = {vec3_from(meta.at("bounds").at("min")), vec3_from(meta.at("bounds").at("max"))};
  } else {
    // derive from content when the author omitted it
    AABB b = AABB::empty();
    for (const auto& r : h.rooms)
      for (Vec2 p : r.floor_polygon) {
        b.expand(Vec3{p.x, p.y, r.elevation});
        b.expand(Vec3{p.x, p.y, r.elevation + r.wall_height});
      }
    for (const auto& o : h.objects) b.expand(object_aabb(o));
    for (const auto& s : h.sound_sources) b.expand(s.position);
    h.bounds = b.valid() ? b : AABB{};
  }
  return h;
}

void check(bool ok, const std::string& path, const std::string& detail) {
  if (!ok) throw ValidationError(path, detail);
}

void validate_impl(const House& h) {
  const auto& table = h.materials;
  check(h.bounds.valid(), "meta.bounds", "min must not exceed max");
  for (std::size_t m = 0; m < table.size(); ++m) {
    const auto& mat = table.entries()[m];
    for (double a : mat.absorption) check(a >= 0 && a <= 1, "materials." + mat.name, "absorption outside [0,1]");
    check(mat.density > 0, "materials." + mat.name, "density must be positive");
  }

  std::set<std::string> room_ids;
  for (std::size_t i = 0; i < h.rooms.size(); ++i) {
    const Room& r = h.rooms[i];
    const std::string path = "rooms[" + std::to_string(i) + "]";
    check(room_ids.insert(r.id).second, path + ".id", "duplicate room id");
    check(r.kind.value < room_kinds().size(), path + ".kind", "room kind out of taxonomy");
    check(is_simple_polygon(r.floor_polygon), path + ".floor_polygon", "polygon is not simple");
    check(signed_area(r.floor_polygon) > 0, path + ".floor_polygon", "polygon must be counter-clockwise with area > 0");
    check(r.wall_height > 0, path + ".wall_height", "must be positive");
    check(r.wall_material.value < table.size(), path + ".wall_material", "unknown material");
    check(r.floor_material.value < table.size(), path + ".floor_material", "unknown material");
    for (std::size_t d = 0; d < r.doors.size(); ++d) {
      const Door& door = r.doors[d];
      const std::string dp = path + ".doors[" + std::to_string(d) + "]";
      check(door.edge < r.floor_polygon.size(), dp + ".edge", "edge index out of range");
      const Vec2 a = r.floor_polygon[door.edge], b = r.floor_polygon[(door.edge + 1) % r.floor_polygon.size()];
      check(door.width > 0 && door.offset >= 0 && door.offset + door.width <= length(b - a) + 1e-9, dp,
            "opening must lie within its wall");
      check(door.height > 0 && door.height <= r.wall_height + 1e-9, dp + ".height", "must be within wall height");
    }
    for (Vec2 p : r.floor_polygon) {
      check(h.bounds.contains(Vec3{p.x, p.y, r.elevation}, 1e-9) &&
                h.bounds.contains(Vec3{p.x, p.y, r.elevation + r.wall_height}, 1e-9),
            path, "room outside house bounds");
    }
  }

  std::set<std::string> object_ids;
  for (std::size_t i = 0; i < h.objects.size(); ++i) {
    const SceneObject& o = h.objects[i];
    const std::string path = "objects[" + std::to_string(i) + "]";
    check(object_ids.insert(o.id).second, path + ".id", "duplicate object id");
    check(room_ids.contains(o.room_id), path + ".room_id", "no room with id '" + o.room_id + "'");
    check(o.category.value < categories().size(), path + ".category", "category out of taxonomy");
    check(o.fine_category.value < fine_categories().size(), path + ".fine_category", "fine category out of taxonomy");
    const TriMesh& m = o.mesh;
    check(m.triangles.size() >= 4, path + ".mesh", "degenerate mesh: fewer than 4 triangles");
    check(m.triangle_material.size() == m.triangles.size(), path + ".mesh.triangle_material",
          "one layer index per triangle required");
    for (const auto& t : m.triangles)
      for (auto v : t) check(v < m.vertices.size(), path + ".mesh.triangles", "vertex index out of range");
    for (const auto& t : m.triangles)
      check(triangle_area(m.vertices[t[0]], m.vertices[t[1]], m.vertices[t[2]]) > 1e-12, path + ".mesh",
            "degenerate mesh: zero-area triangle");
    check(!o.material_layers.empty(), path + ".material_layers", "at least one layer required");
    for (auto l : m.triangle_material)
      check(l < o.material_layers.size(), path + ".mesh.triangle_material", "layer index out of range");
    for (std::size_t k = 0; k < o.material_layers.size(); ++k) {
      const auto& layer = o.material_layers[k];
      const std::string lp = path + ".material_layers[" + std::to_string(k) + "]";
      check(layer.material.value < table.size(), lp + ".material", "unknown material");
      check(layer.texture.width >= 1 && layer.texture.height >= 1 &&
                layer.texture.texels.size() ==
                    static_cast<std::size_t>(layer.texture.width) * static_cast<std::size_t>(layer.texture.height),
            lp, "texture size mismatch");
    }
    const Mat3& R = o.transform.rotation;
    const Mat3 rtr = R.transposed() * R;
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b)
        check(std::abs(rtr.m[a * 3 + b] - (a == b ? 1.0 : 0.0)) < 1e-6, path + ".transform.rotation",
              "rotation must be orthonormal");
    check(h.bounds.contains(object_aabb(o), 1e-9), path, "object outside house bounds");
  }

  for (std::size_t i = 0; i < h.lights.size(); ++i)
    check(h.lights[i].intensity >= 0, "lights[" + std::to_string(i) + "].intensity", "must be non-negative");

  for (std::size_t i = 0; i < h.sound_sources.size(); ++i) {
    const auto& s = h.sound_sources[i];
    const std::string path = "sound_sources[" + std::to_string(i) + "]";
    check(s.reference_gain >= 0, path + ".reference_gain", "must be non-negative");
    check(h.bounds.contains(s.position, 1e-9), path + ".position", "outside house bounds");
  }
}

}  // namespace

void validate_house(const House& house) { validate_impl(house); }

void validate_house(House& house) {
  for (auto& o : house.objects) o.mesh.watertight = is_watertight(o.mesh);
  validate_impl(house);
}

House load_scene(std::string_view document, const std::filesystem::path& base_dir) {
  json doc;
  try {
    doc = json::parse(document);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ParseError, e.what());
  }
  House h;
  try {
    h = house_from(doc, base_dir);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ParseError, e.what());
  }
  validate_house(h);
  return h;
}

House load_scene_file(const std::filesystem::path& path) {
  return load_scene(read_file(path), path.parent_path());
}

std::string serialize_scene(const House& h) {
  json doc;
  doc["version"] = kSceneFormat;
  doc["meta"] = {{"id", h.id}, {"bounds", {{"min", vec_json(h.bounds.min)}, {"max", vec_json(h.bounds.max)}}}};

  json overrides = json::object();
  const auto& standard = MaterialTable::standard();
  for (std::size_t i = 0; i < h.materials.size() && i < standard.size(); ++i) {
    const auto& m = h.materials.entries()[i];
    if (m == standard.entries()[i]) continue;
    overrides[m.name] = {{"absorption", m.absorption}, {"density", m.density}};
  }
  if (!overrides.empty()) doc["materials"] = overrides;

  json rooms = json::array();
  for (const auto& r : h.rooms) {
    json poly = json::array();
    for (Vec2 p : r.floor_polygon) poly.push_back(json::array({p.x, p.y}));
    json doors = json::array();
    for (const auto& d : r.doors)
      doors.push_back({{"edge", d.edge}, {"offset", d.offset}, {"width", d.width}, {"height", d.height}});
    rooms.push_back({{"id", r.id},
                     {"kind", name_of(r.kind)},
                     {"floor_polygon", poly},
                     {"elevation", r.elevation},
                     {"wall_height", r.wall_height},
                     {"wall_material", h.materials[r.wall_material].name},
                     {"floor_material", h.materials[r.floor_material].name},
                     {"doors", doors}});
  }
  doc["rooms"] = rooms;

  json objects = json::array();
  for (const auto& o : h.objects) {
    json layers = json::array();
    for (const auto& l : o.material_layers) {
      json lj = texture_json(l.texture);
      lj["material"] = h.materials[l.material].name;
      layers.push_back(lj);
    }
    objects.push_back({{"id", o.id},
                       {"room_id", o.room_id},
                       {"category", name_of(o.category)},
                       {"fine_category", name_of(o.fine_category)},
                       {"mesh", mesh_json(o.mesh)},
                       {"transform",
                        {{"rotation", o.transform.rotation.m}, {"translation", vec_json(o.transform.translation)}}},
                       {"material_layers", layers},
                       {"dynamic", o.dynamic}});
  }
  doc["objects"] = objects;

  json lights = json::array();
  for (const auto& l : h.lights) lights.push_back({{"position", vec_json(l.position)}, {"intensity", l.intensity}});
  doc["lights"] = lights;

  json sources = json::array();
  for (const auto& s : h.sound_sources)
    sources.push_back({{"id", s.id},
                       {"position", vec_json(s.position)},
                       {"signal", signal_json(s.signal)},
                       {"reference_gain", s.reference_gain}});
  doc["sound_sources"] = sources;
  return doc.dump(1) + "\n";
}

TriMesh read_hmsh(std::string_view bytes) {
  ByteReader in(bytes);
  if (in.take(4) != "HMSH") throw Error(ErrorCode::ParseError, "bad mesh magic (expected HMSH)");
  const auto nv = in.get<std::uint32_t>();
  const auto nt = in.get<std::uint32_t>();
  // 12 bytes per vertex, 14 per triangle
  if (in.remaining() != std::uint64_t{nv} * 12 + std::uint64_t{nt} * 14)
    throw Error(ErrorCode::ParseError, "mesh file size does not match its header");
  TriMesh m;
  m.vertices.reserve(nv);
  for (std::uint32_t i = 0; i < nv; ++i) {
    const float x = in.get<float>(), y = in.get<float>(), z = in.get<float>();
    m.vertices.push_back({x, y, z});
  }
  for (std::uint32_t i = 0; i < nt; ++i) {
    const auto a = in.get<std::uint32_t>(), b = in.get<std::uint32_t>(), c = in.get<std::uint32_t>();
    m.triangles.push_back({a, b, c});
  }
  for (std::uint32_t i = 0; i < nt; ++i) m.triangle_material.push_back(in.get<std::uint16_t>());
  return m;
}

std::string write_hmsh(const TriMesh& m) {
  std::string out = "HMSH";
  put_le(out, static_cast<std::uint32_t>(m.vertices.size()));
  put_le(out, static_cast<std::uint32_t>(m.triangles.size()));
  for (const auto& v : m.vertices) {
    put_le(out, static_cast<float>(v.x));
    put_le(out, static_cast<float>(v.y));
    put_le(out, static_cast<float>(v.z));
  }
  for (const auto& t : m.triangles)
    for (auto i : t) put_le(out, i);
  for (std::size_t i = 0; i < m.triangles.size(); ++i)
    put_le(out, i < m.triangle_material.size() ? m.triangle_material[i] : std::uint16_t{0});
  return out;
}

const Room* House::find_room(std::string_view room_id) const {
  for (const auto& r : rooms)
    if (r.id == room_id) return &r;
  return nullptr;
}

const SceneObject* House::find_object(std::string_view object_id) const {
  for (const auto& o : objects)
    if (o.id == object_id) return &o;
  return nullptr;
}

}  // namespace home
