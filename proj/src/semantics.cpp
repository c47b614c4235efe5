#include "home/semantics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>
#include <sstream>

#include <json.hpp>

#include "home/errors.hpp"
#include "home/generator.hpp"
#include "home/geometry.hpp"

namespace home {

ColorPalette::ColorPalette(ColorGranularity g, std::vector<PaletteEntry> entries)
    : granularity_(g), entries_(std::move(entries)) {
  if (entries_.empty()) throw Error(ErrorCode::ValidationError, "empty palette");
  std::set<std::string> names;
  for (const auto& e : entries_)
    if (!names.insert(e.name).second) throw Error(ErrorCode::ValidationError, "duplicate palette name " + e.name);
}

namespace {

ColorPalette load_palette(ColorGranularity g, std::string_view file, std::size_t expected) {
  std::vector<PaletteEntry> entries;
  for (const auto& line : detail::data_lines(detail::embedded_file(file))) {
    const auto t1 = line.find('\t');
    if (t1 == std::string::npos) throw Error(ErrorCode::ParseError, std::string(file) + ": " + line);
    std::istringstream in(line.substr(t1 + 1));
    int r, gr, b;
    if (!(in >> r >> gr >> b)) throw Error(ErrorCode::ParseError, std::string(file) + ": " + line);
    entries.push_back({line.substr(0, t1), Rgb{static_cast<std::uint8_t>(r), static_cast<std::uint8_t>(gr),
                                                static_cast<std::uint8_t>(b)}});
  }
  if (entries.size() != expected) throw Error(ErrorCode::ValidationError, std::string(file) + ": unexpected entry count");
  return ColorPalette(g, std::move(entries));
}

}  // namespace

const ColorPalette& ColorPalette::shipped(ColorGranularity g) {
  static const ColorPalette basic = load_palette(ColorGranularity::basic, "palette_basic.txt", kBasicPaletteSize);
  static const ColorPalette inter =
      load_palette(ColorGranularity::intermediate, "palette_intermediate.txt", kIntermediatePaletteSize);
  static const ColorPalette detailed =
      load_palette(ColorGranularity::detailed, "palette_detailed.txt", kDetailedPaletteSize);
  switch (g) {
    case ColorGranularity::basic: return basic;
    case ColorGranularity::intermediate: return inter;
    case ColorGranularity::detailed: return detailed;
  }
  return basic;
}

std::size_t ColorPalette::nearest(Rgb c) const {
  std::size_t best = 0;
  int best_d = 1 << 30;
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    int d = 0;
    for (int k = 0; k < 3; ++k) {
      const int diff = int(c[k]) - int(entries_[i].rgb[k]);
      d += diff * diff;
    }
    if (d < best_d) {
      best_d = d;
      best = i;
    }
  }
  return best;
}

const std::string& quantize_color(Rgb c, const ColorPalette& palette) { return palette[palette.nearest(c)].name; }

const std::string& dominant_color(const SceneObject& obj, const ColorPalette& palette) {
  const auto areas = surface_area_by_layer(obj.mesh);
  std::map<std::size_t, double> weight;
  for (std::size_t l = 0; l < obj.material_layers.size(); ++l) {
    const auto it = areas.find(static_cast<int>(l));
    const double area = it == areas.end() ? 0.0 : it->second;
    const auto& texels = obj.material_layers[l].texture.texels;
    if (texels.empty()) continue;
    const double w = area / static_cast<double>(texels.size());
    for (const Rgb& t : texels) weight[palette.nearest(t)] += w;
  }
  std::size_t best = 0;
  double best_w = -1;
  for (const auto& [idx, w] : weight)  // ascending index, strict > keeps the lowest on ties
    if (w > best_w) {
      best_w = w;
      best = idx;
    }
  return palette[best].name;
}

int dominant_layer(const SceneObject& obj) {
  const auto areas = surface_area_by_layer(obj.mesh);
  int best = 0;
  double best_a = -1;
  for (const auto& [layer, a] : areas)
    if (a > best_a) {
      best_a = a;
      best = layer;
    }
  return best;
}

MaterialId dominant_material(const SceneObject& obj) {
  return obj.material_layers.at(static_cast<std::size_t>(dominant_layer(obj))).material;
}

std::string_view to_string(SizeClass s) {
  switch (s) {
    case SizeClass::small: return "small";
    case SizeClass::medium: return "medium";
    case SizeClass::large: return "large";
  }
  return "medium";
}

double CategoryVolumeStats::percentile(const std::vector<double>& sorted, double q) {
  if (sorted.empty()) return 0;
  const double rank = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(rank));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = rank - static_cast<double>(lo);
  return sorted[lo] + (sorted[hi] - sorted[lo]) * frac;
}

CategoryVolumeStats::Entry CategoryVolumeStats::summarize(std::vector<double> volumes) {
  std::sort(volumes.begin(), volumes.end());
  Entry e;
  e.count = volumes.size();
  e.fallback = volumes.size() < 3;
  if (!volumes.empty()) {
    e.p33 = percentile(volumes, 0.33);
    e.p67 = percentile(volumes, 0.67);
  }
  e.samples = std::move(volumes);
  return e;
}

const CategoryVolumeStats::Entry* CategoryVolumeStats::find(FineCategoryId category) const {
  const auto it = entries_.find(category.value);
  return it == entries_.end() ? nullptr : &it->second;
}

CategoryVolumeStats CategoryVolumeStats::from_houses(const std::vector<House>& houses) {
  std::map<std::uint16_t, std::vector<double>> volumes;
  for (const auto& h : houses)
    for (const auto& o : h.objects) volumes[o.fine_category.value].push_back(mesh_volume(o.mesh));
  CategoryVolumeStats stats;
  for (auto& [id, v] : volumes) stats.entries_[id] = summarize(std::move(v));
  return stats;
}

CategoryVolumeStats CategoryVolumeStats::from_generated(std::uint64_t house_count) {
  std::vector<House> houses;
  houses.reserve(house_count);
  for (std::uint64_t s = 0; s < house_count; ++s) houses.push_back(generate_house(s));
  return from_houses(houses);
}

std::string CategoryVolumeStats::to_text() const {
  std::string out = "# fine_id\tname\tcount\tp33\tp67\n";
  char buf[128];
  for (const auto& [id, e] : entries_) {
    std::snprintf(buf, sizeof buf, "\t%zu\t%.17g\t%.17g\n", e.count, e.p33, e.p67);
    out += std::to_string(id) + "\t" + name_of(FineCategoryId{id}) + buf;
  }
  return out;
}

CategoryVolumeStats CategoryVolumeStats::parse(std::string_view text) {
  CategoryVolumeStats stats;
  for (const auto& line : detail::data_lines(text)) {
    std::vector<std::string> cols;
    std::size_t start = 0;
    while (true) {
      const auto tab = line.find('\t', start);
      cols.push_back(line.substr(start, tab == std::string::npos ? std::string::npos : tab - start));
      if (tab == std::string::npos) break;
      start = tab + 1;
    }
    if (cols.size() != 5) throw Error(ErrorCode::ParseError, "volume stats line: " + line);
    try {
      const auto id = static_cast<std::uint16_t>(std::stoul(cols[0]));
      if (id >= kFineCategoryCount) throw Error(ErrorCode::ParseError, "volume stats: fine id out of range");
      Entry e;
      e.count = std::stoul(cols[2]);
      e.p33 = std::stod(cols[3]);
      e.p67 = std::stod(cols[4]);
      e.fallback = e.count < 3;
      if (e.p33 > e.p67) throw Error(ErrorCode::ParseError, "volume stats: p33 > p67 for " + cols[1]);
      stats.entries_[id] = e;
    } catch (const std::logic_error&) {
      throw Error(ErrorCode::ParseError, "volume stats line: " + line);
    }
  }
  return stats;
}

const CategoryVolumeStats& CategoryVolumeStats::shipped() {
  static const CategoryVolumeStats stats = parse(detail::embedded_file("volume_stats.txt"));
  return stats;
}

SizeResult size_class(double volume, FineCategoryId category, const CategoryVolumeStats& stats) {
  const auto* e = stats.find(category);
  if (e == nullptr || e->fallback) return {SizeClass::medium, true};
  if (volume < e->p33) return {SizeClass::small, false};
  if (volume > e->p67) return {SizeClass::large, false};
  return {SizeClass::medium, false};
}

SizeResult size_class(const SceneObject& obj, const CategoryVolumeStats& stats) {
  return size_class(mesh_volume(obj.mesh), obj.fine_category, stats);
}

std::string describe(const SemanticRecord& r) {
  std::string s = "a " + std::string(to_string(r.size)) + " " + r.color[0] + " " + r.material + " " + r.fine_category +
                  " in the " + r.room_kind;
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

SemanticRecord make_record(const House& house, const SceneObject& obj, const CategoryVolumeStats& stats) {
  SemanticRecord r;
  r.object_id = obj.id;
  r.color[0] = dominant_color(obj, ColorPalette::shipped(ColorGranularity::basic));
  r.color[1] = dominant_color(obj, ColorPalette::shipped(ColorGranularity::intermediate));
  r.color[2] = dominant_color(obj, ColorPalette::shipped(ColorGranularity::detailed));
  r.category = name_of(obj.category);
  r.fine_category = name_of(obj.fine_category);
  r.material = house.materials[dominant_material(obj)].name;
  const SizeResult sz = size_class(obj, stats);
  r.size = sz.size;
  r.size_fallback = sz.fallback;
  r.room_id = obj.room_id;
  const Room* room = house.find_room(obj.room_id);
  r.room_kind = room ? display_name(room->kind) : "house";
  r.centroid = object_aabb(obj).center();
  r.description = describe(r);
  return r;
}

std::string record_to_json_line(const SemanticRecord& r) {
  nlohmann::json j;
  j["object_id"] = r.object_id;
  j["color"] = {{"basic", r.color[0]}, {"intermediate", r.color[1]}, {"detailed", r.color[2]}};
  j["category"] = r.category;
  j["fine_category"] = r.fine_category;
  j["material"] = r.material;
  j["size"] = std::string(to_string(r.size));
  j["size_fallback"] = r.size_fallback;
  j["location"] = {{"room_id", r.room_id}, {"room_kind", r.room_kind}, {"centroid", {r.centroid.x, r.centroid.y, r.centroid.z}}};
  j["description"] = r.description;
  return j.dump();
}

std::map<std::uint16_t, std::string> segmentation_legend(const House& house) {
  std::map<std::uint16_t, std::string> legend;
  for (FineCategoryId id : {kFineWall, kFineFloor, kFineCeiling}) legend[id.value] = name_of(id);
  for (const auto& o : house.objects) legend[o.fine_category.value] = name_of(o.fine_category);
  return legend;
}

}  // namespace home
