#pragma once

#include <string>
#include <vector>

#include "home/env.hpp"

namespace home {

/// EnvConfig as a JSON document. Keys (all optional):
///   seed, agents, step_rate, episode_length, width, height, fov_deg, lights, threads,
///   modalities.{rgb,depth,segmentation,audio,semantics},
///   houses.{corpus,seed_min,seed_max,rooms_min,rooms_max,objects_min,objects_max},
///   audio.{order,sample_rate,speed_of_sound,temperature_c,pressure_kpa,humidity_pct,recompute_distance},
///   physics.{dt,friction,restitution,reach,carry_limit},
///   agent.{radius,height,step,turn_deg,look_deg,push_impulse}
/// Unknown keys and wrong types throw ConfigError.
EnvConfig config_from_json(std::string_view text, const std::vector<std::string>& overrides = {});
EnvConfig load_config_file(const std::string& path, const std::vector<std::string>& overrides = {});

/// Applies "dotted.key=value" overrides to a JSON document; the value is
/// parsed as JSON when possible, else taken as a string.
std::string apply_overrides(std::string_view text, const std::vector<std::string>& overrides);

/// Canonical JSON echo (sorted keys, every key present).
std::string config_to_json(const EnvConfig& cfg);

}  // namespace home
