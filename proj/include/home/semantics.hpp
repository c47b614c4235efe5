#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "home/scene.hpp"

namespace home {

enum class ColorGranularity { basic, intermediate, detailed };

struct PaletteEntry {
  std::string name;
  Rgb rgb;
};

class ColorPalette {
 public:
  ColorPalette(ColorGranularity g, std::vector<PaletteEntry> entries);

  /// Shipped palettes: 16 basic, 130 intermediate, 949 detailed entries.
  static const ColorPalette& shipped(ColorGranularity g);

  ColorGranularity granularity() const { return granularity_; }
  std::size_t size() const { return entries_.size(); }
  const PaletteEntry& operator[](std::size_t i) const { return entries_[i]; }
  const std::vector<PaletteEntry>& entries() const { return entries_; }

  /// Index of the nearest entry in RGB; ties go to the lowest index.
  std::size_t nearest(Rgb c) const;

 private:
  ColorGranularity granularity_;
  std::vector<PaletteEntry> entries_;
};

inline constexpr std::size_t kBasicPaletteSize = 16;
inline constexpr std::size_t kIntermediatePaletteSize = 130;
inline constexpr std::size_t kDetailedPaletteSize = 949;

const std::string& quantize_color(Rgb c, const ColorPalette& palette);

/// Modal palette name over all texels, each weighted by its layer's surface
/// area divided by the layer's texel count. Ties go to the lower palette index.
const std::string& dominant_color(const SceneObject& obj, const ColorPalette& palette);

/// Layer with the largest surface area (ties: lower layer index).
int dominant_layer(const SceneObject& obj);
MaterialId dominant_material(const SceneObject& obj);

enum class SizeClass : std::uint8_t { small, medium, large };
std::string_view to_string(SizeClass s);

/// 33rd/67th percentiles (linear interpolation between order statistics)
/// of mesh volumes per fine category.
class CategoryVolumeStats {
 public:
  struct Entry {
    std::vector<double> samples;  // sorted; empty when loaded from the data file
    std::size_t count = 0;
    double p33 = 0;
    double p67 = 0;
    bool fallback = true;  // fewer than 3 samples
  };

  static Entry summarize(std::vector<double> volumes);
  /// Percentile q in [0,1] of sorted samples, linear interpolation on rank q*(n-1).
  static double percentile(const std::vector<double>& sorted, double q);

  void add(FineCategoryId category, Entry entry) { entries_[category.value] = std::move(entry); }
  const Entry* find(FineCategoryId category) const;
  const std::map<std::uint16_t, Entry>& entries() const { return entries_; }

  /// Stats over every object of `houses`, grouped by fine category.
  static CategoryVolumeStats from_houses(const std::vector<House>& houses);
  /// Stats over generated houses for seeds [0, house_count).
  static CategoryVolumeStats from_generated(std::uint64_t house_count);

  /// Tab-separated "fine_id name count p33 p67" lines, '#' header.
  std::string to_text() const;
  static CategoryVolumeStats parse(std::string_view text);
  /// The shipped table (data/volume_stats.txt).
  static const CategoryVolumeStats& shipped();

 private:
  std::map<std::uint16_t, Entry> entries_;
};

struct SizeResult {
  SizeClass size = SizeClass::medium;
  bool fallback = false;
};

/// volume < p33 -> small, volume > p67 -> large, else medium; categories
/// with fewer than 3 samples are medium with the fallback flag.
SizeResult size_class(double volume, FineCategoryId category, const CategoryVolumeStats& stats);
SizeResult size_class(const SceneObject& obj, const CategoryVolumeStats& stats);

struct SemanticRecord {
  std::string object_id;
  std::array<std::string, 3> color;  // basic, intermediate, detailed
  std::string category;
  std::string fine_category;
  std::string material;
  SizeClass size = SizeClass::medium;
  bool size_fallback = false;
  std::string room_id;
  std::string room_kind;
  Vec3 centroid;
  std::string description;

  friend bool operator==(const SemanticRecord&, const SemanticRecord&) = default;
};

/// "a <size> <basic color> <material> <fine category> in the <room kind>".
std::string describe(const SemanticRecord& record);

SemanticRecord make_record(const House& house, const SceneObject& obj,
                           const CategoryVolumeStats& stats = CategoryVolumeStats::shipped());

/// One JSON object per line, keys sorted.
std::string record_to_json_line(const SemanticRecord& record);

/// Fine-category id -> name for every label that can appear in a
/// segmentation frame of `house` (structure ids always included).
std::map<std::uint16_t, std::string> segmentation_legend(const House& house);

}  // namespace home
