#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "home/scene.hpp"

namespace home {

inline constexpr std::string_view kSceneFormat = "home-scene/1";

/// Parses and validates a scene document. Mesh and sample-file references
/// resolve relative to `base_dir`.
House load_scene(std::string_view document, const std::filesystem::path& base_dir = {});
House load_scene_file(const std::filesystem::path& path);

/// Canonical document text; meshes are always written inline.
std::string serialize_scene(const House& house);

/// Records derived flags (mesh watertightness) and checks every House
/// invariant; throws ValidationError naming the offending entity.
void validate_house(House& house);
void validate_house(const House& house);

/// Binary mesh file: "HMSH", u32 vertex count, u32 triangle count,
/// f32 vertex triples, u32 index triples, u16 layer per triangle (all LE).
TriMesh read_hmsh(std::string_view bytes);
std::string write_hmsh(const TriMesh& mesh);

}  // namespace home
