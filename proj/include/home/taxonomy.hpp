#pragma once

#include <array>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace home {

/// Small strong index type; `Tag` keeps the taxonomies from mixing.
template <class Tag>
struct TaxonomyId {
  std::uint16_t value = 0;
  friend constexpr auto operator<=>(TaxonomyId, TaxonomyId) = default;
};

using RoomKind = TaxonomyId<struct RoomKindTag>;
using CategoryId = TaxonomyId<struct CategoryTag>;
using FineCategoryId = TaxonomyId<struct FineCategoryTag>;
using MaterialId = TaxonomyId<struct MaterialTag>;

inline constexpr std::size_t kRoomKindCount = 24;
inline constexpr std::size_t kCategoryCount = 84;
inline constexpr std::size_t kFineCategoryCount = 187;
inline constexpr std::size_t kMaterialCount = 20;
inline constexpr std::size_t kBandCount = 4;

/// Octave-band centers shared by the material table and the acoustic engine.
inline constexpr std::array<double, kBandCount> kBandCenters{125.0, 500.0, 2000.0, 8000.0};

/// Fine categories reserved for house structure (their line order in the data file).
inline constexpr FineCategoryId kFineWall{0};
inline constexpr FineCategoryId kFineFloor{1};
inline constexpr FineCategoryId kFineCeiling{2};

/// A fixed list of terms where line number = id.
class TermList {
 public:
  TermList() = default;
  explicit TermList(std::vector<std::string> terms) : terms_(std::move(terms)) {}

  std::size_t size() const { return terms_.size(); }
  const std::string& operator[](std::size_t i) const { return terms_.at(i); }
  std::optional<std::uint16_t> find(std::string_view term) const;
  const std::vector<std::string>& terms() const { return terms_; }

 private:
  std::vector<std::string> terms_;
};

const TermList& room_kinds();
const TermList& categories();
const TermList& fine_categories();

/// Coarse category a fine category rolls up to.
CategoryId fine_category_parent(FineCategoryId fine);

const std::string& name_of(RoomKind k);
const std::string& name_of(CategoryId c);
const std::string& name_of(FineCategoryId f);

/// Room kind rendered for prose: "living_room" -> "living room".
std::string display_name(RoomKind k);

struct Material {
  std::string name;
  std::array<double, kBandCount> absorption{};
  double density = 0;  // kg/m^3
  friend bool operator==(const Material&, const Material&) = default;
};

class MaterialTable {
 public:
  MaterialTable() = default;
  explicit MaterialTable(std::vector<Material> entries) : entries_(std::move(entries)) {}

  /// The shipped 20-entry table.
  static const MaterialTable& standard();

  std::size_t size() const { return entries_.size(); }
  const Material& operator[](MaterialId id) const { return entries_.at(id.value); }
  Material& operator[](MaterialId id) { return entries_.at(id.value); }
  std::optional<MaterialId> find(std::string_view name) const;
  const std::vector<Material>& entries() const { return entries_; }

  friend bool operator==(const MaterialTable&, const MaterialTable&) = default;

 private:
  std::vector<Material> entries_;
};

namespace detail {
/// Contents of a file from data/, compiled into the library.
std::string_view embedded_file(std::string_view name);
/// Splits embedded text into non-empty, non-comment lines.
std::vector<std::string> data_lines(std::string_view text);
}  // namespace detail

}  // namespace home
