#include "home/taxonomy.hpp"

#include <sstream>
#include <stdexcept>

#include "home/errors.hpp"

namespace home {

namespace detail {

std::vector<std::string> data_lines(std::string_view text) {
  std::vector<std::string> lines;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (!line.empty() && line.front() != '#') lines.emplace_back(line);
    pos = end + 1;
  }
  return lines;
}

}  // namespace detail

namespace {

TermList load_terms(std::string_view file) {
  auto text = detail::embedded_file(file);
  if (text.empty()) throw Error(ErrorCode::IoError, "missing embedded data file " + std::string(file));
  return TermList(detail::data_lines(text));
}

}  // namespace

std::optional<std::uint16_t> TermList::find(std::string_view term) const {
  for (std::size_t i = 0; i < terms_.size(); ++i)
    if (terms_[i] == term) return static_cast<std::uint16_t>(i);
  return std::nullopt;
}

const TermList& room_kinds() {
  static const TermList t = load_terms("room_kinds.txt");
  return t;
}

const TermList& categories() {
  static const TermList t = load_terms("categories.txt");
  return t;
}

const TermList& fine_categories() {
  static const TermList t = load_terms("fine_categories.txt");
  return t;
}

CategoryId fine_category_parent(FineCategoryId fine) {
  static const std::vector<CategoryId> parents = [] {
    const TermList parent_names = load_terms("fine_category_parent.txt");
    std::vector<CategoryId> out;
    for (const auto& name : parent_names.terms()) {
      auto id = categories().find(name);
      if (!id) throw Error(ErrorCode::IoError, "fine category parent not in taxonomy: " + name);
      out.push_back(CategoryId{*id});
    }
    return out;
  }();
  return parents.at(fine.value);
}

const std::string& name_of(RoomKind k) { return room_kinds()[k.value]; }
const std::string& name_of(CategoryId c) { return categories()[c.value]; }
const std::string& name_of(FineCategoryId f) { return fine_categories()[f.value]; }

std::string display_name(RoomKind k) {
  std::string s = name_of(k);
  for (char& c : s)
    if (c == '_') c = ' ';
  return s;
}

const MaterialTable& MaterialTable::standard() {
  static const MaterialTable table = [] {
    std::vector<Material> entries;
    for (const auto& line : detail::data_lines(detail::embedded_file("materials.txt"))) {
      std::istringstream in(line);
      Material m;
      in >> m.name;
      for (auto& a : m.absorption) in >> a;
      in >> m.density;
      if (!in) throw Error(ErrorCode::IoError, "bad materials.txt line: " + line);
      entries.push_back(std::move(m));
    }
    return MaterialTable(std::move(entries));
  }();
  return table;
}

std::optional<MaterialId> MaterialTable::find(std::string_view name) const {
  for (std::size_t i = 0; i < entries_.size(); ++i)
    if (entries_[i].name == name) return MaterialId{static_cast<std::uint16_t>(i)};
  return std::nullopt;
}

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::ValidationError: return "ValidationError";
    case ErrorCode::ParamError: return "ParamError";
    case ErrorCode::NotWatertight: return "NotWatertight";
    case ErrorCode::CameraOutOfBounds: return "CameraOutOfBounds";
    case ErrorCode::DegenerateGeometry: return "DegenerateGeometry";
    case ErrorCode::RangeError: return "RangeError";
    case ErrorCode::RateMismatch: return "RateMismatch";
    case ErrorCode::UnknownObject: return "UnknownObject";
    case ErrorCode::StaticObject: return "StaticObject";
    case ErrorCode::OutOfReach: return "OutOfReach";
    case ErrorCode::HandsFull: return "HandsFull";
    case ErrorCode::TooHeavy: return "TooHeavy";
    case ErrorCode::NothingHeld: return "NothingHeld";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::NoHousesAvailable: return "NoHousesAvailable";
    case ErrorCode::SpawnFailure: return "SpawnFailure";
    case ErrorCode::NotReset: return "NotReset";
    case ErrorCode::UnknownAgent: return "UnknownAgent";
    case ErrorCode::UnknownSource: return "UnknownSource";
    case ErrorCode::BindError: return "BindError";
    case ErrorCode::ProtocolError: return "ProtocolError";
    case ErrorCode::IoError: return "IoError";
  }
  return "Error";
}

}  // namespace home
