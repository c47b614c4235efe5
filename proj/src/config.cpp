#include "home/config.hpp"

#include <cmath>

#include <json.hpp>

#include "home/errors.hpp"
#include "home/media_io.hpp"

namespace home {

using nlohmann::json;

namespace {

struct Reader {
  const json& j;
  std::string prefix;

  template <class T>
  void get(const char* key, T& out) const {
    if (!j.contains(key)) return;
    try {
      out = j.at(key).get<T>();
    } catch (const json::exception&) {
      throw Error(ErrorCode::ConfigError, prefix + key + ": wrong type");
    }
  }
  void check_keys(std::initializer_list<const char*> allowed) const {
    if (!j.is_object()) throw Error(ErrorCode::ConfigError, prefix + ": expected an object");
    for (const auto& [k, v] : j.items()) {
      (void)v;
      bool ok = false;
      for (const char* a : allowed) ok = ok || k == a;
      if (!ok) throw Error(ErrorCode::ConfigError, "unknown key " + prefix + k);
    }
  }
  Reader sub(const char* key) const {
    static const json empty = json::object();
    return {j.contains(key) ? j.at(key) : empty, prefix + key + "."};
  }
};

json to_doc(const EnvConfig& c) {
  return {
      {"seed", c.seed},
      {"agents", c.agent_count},
      {"step_rate", c.step_rate},
      {"episode_length", c.episode_length},
      {"width", c.width},
      {"height", c.height},
      {"fov_deg", c.vertical_fov * 180.0 / kPi},
      {"lights", c.lights},
      {"threads", c.threads},
      {"modalities",
       {{"rgb", c.modalities.rgb},
        {"depth", c.modalities.depth},
        {"segmentation", c.modalities.segmentation},
        {"audio", c.modalities.audio},
        {"semantics", c.modalities.semantics}}},
      {"houses",
       {{"corpus", c.corpus_dir},
        {"seed_min", c.house_seed_min},
        {"seed_max", c.house_seed_max},
        {"rooms_min", c.generator.room_count.min},
        {"rooms_max", c.generator.room_count.max},
        {"objects_min", c.generator.objects_per_room.min},
        {"objects_max", c.generator.objects_per_room.max}}},
      {"audio",
       {{"order", c.acoustics.max_order},
        {"sample_rate", c.acoustics.sample_rate},
        {"speed_of_sound", c.acoustics.speed_of_sound},
        {"air_absorption", c.acoustics.air_absorption},
        {"recompute_distance", c.recompute_distance}}},
      {"physics",
       {{"dt", c.physics.dt},
        {"friction", c.physics.friction},
        {"restitution", c.physics.restitution},
        {"reach", c.physics.reach},
        {"carry_limit", c.physics.carry_limit}}},
      {"agent",
       {{"radius", c.agent.radius},
        {"height", c.agent.height},
        {"step", c.agent.step},
        {"turn_deg", c.agent.turn * 180.0 / kPi},
        {"look_deg", c.agent.look * 180.0 / kPi},
        {"push_impulse", c.agent.push_impulse}}},
  };
}

}  // namespace

std::string apply_overrides(std::string_view text, const std::vector<std::string>& overrides) {
  json doc;
  try {
    doc = text.empty() ? json::object() : json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ConfigError, std::string("config parse: ") + e.what());
  }
  for (const std::string& o : overrides) {
    const auto eq = o.find('=');
    if (eq == std::string::npos || eq == 0) throw Error(ErrorCode::ConfigError, "override must be key=value: " + o);
    const std::string key = o.substr(0, eq), raw = o.substr(eq + 1);
    json value = json::parse(raw, nullptr, false);
    if (value.is_discarded()) value = raw;
    json* node = &doc;
    std::size_t start = 0;
    while (true) {
      const auto dot = key.find('.', start);
      const std::string part = key.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
      if (part.empty()) throw Error(ErrorCode::ConfigError, "bad override key " + key);
      if (!node->is_object()) throw Error(ErrorCode::ConfigError, "override key " + key + " crosses a non-object");
      if (dot == std::string::npos) {
        (*node)[part] = value;
        break;
      }
      node = &(*node)[part];
      if (node->is_null()) *node = json::object();
      start = dot + 1;
    }
  }
  return doc.dump();
}

EnvConfig config_from_json(std::string_view text, const std::vector<std::string>& overrides) {
  const json doc = json::parse(apply_overrides(text, overrides));
  EnvConfig c;
  const Reader r{doc, ""};
  r.check_keys({"seed", "agents", "step_rate", "episode_length", "width", "height", "fov_deg", "lights", "threads",
                "modalities", "houses", "audio", "physics", "agent"});
  r.get("seed", c.seed);
  r.get("agents", c.agent_count);
  r.get("step_rate", c.step_rate);
  r.get("episode_length", c.episode_length);
  r.get("width", c.width);
  r.get("height", c.height);
  double fov = 60;
  r.get("fov_deg", fov);
  c.vertical_fov = deg_to_rad(fov);
  r.get("lights", c.lights);
  r.get("threads", c.threads);

  const Reader m = r.sub("modalities");
  m.check_keys({"rgb", "depth", "segmentation", "audio", "semantics"});
  m.get("rgb", c.modalities.rgb);
  m.get("depth", c.modalities.depth);
  m.get("segmentation", c.modalities.segmentation);
  m.get("audio", c.modalities.audio);
  m.get("semantics", c.modalities.semantics);

  const Reader h = r.sub("houses");
  h.check_keys({"corpus", "seed_min", "seed_max", "rooms_min", "rooms_max", "objects_min", "objects_max"});
  h.get("corpus", c.corpus_dir);
  h.get("seed_min", c.house_seed_min);
  h.get("seed_max", c.house_seed_max);
  h.get("rooms_min", c.generator.room_count.min);
  h.get("rooms_max", c.generator.room_count.max);
  h.get("objects_min", c.generator.objects_per_room.min);
  h.get("objects_max", c.generator.objects_per_room.max);

  const Reader a = r.sub("audio");
  a.check_keys({"order", "sample_rate", "speed_of_sound", "temperature_c", "pressure_kpa", "humidity_pct",
                "air_absorption", "recompute_distance"});
  a.get("order", c.acoustics.max_order);
  a.get("sample_rate", c.acoustics.sample_rate);
  a.get("speed_of_sound", c.acoustics.speed_of_sound);
  a.get("recompute_distance", c.recompute_distance);
  if (a.j.contains("temperature_c") || a.j.contains("pressure_kpa") || a.j.contains("humidity_pct")) {
    double t = 20, p = 101.325, hum = 50;
    a.get("temperature_c", t);
    a.get("pressure_kpa", p);
    a.get("humidity_pct", hum);
    try {
      c.acoustics.air_absorption = derive_air_absorption(t, p, hum);
    } catch (const Error& e) {
      throw Error(ErrorCode::ConfigError, e.what());
    }
  } else {
    a.get("air_absorption", c.acoustics.air_absorption);
  }

  const Reader ph = r.sub("physics");
  ph.check_keys({"dt", "friction", "restitution", "reach", "carry_limit"});
  ph.get("dt", c.physics.dt);
  ph.get("friction", c.physics.friction);
  ph.get("restitution", c.physics.restitution);
  ph.get("reach", c.physics.reach);
  ph.get("carry_limit", c.physics.carry_limit);

  const Reader ag = r.sub("agent");
  ag.check_keys({"radius", "height", "step", "turn_deg", "look_deg", "push_impulse"});
  ag.get("radius", c.agent.radius);
  ag.get("height", c.agent.height);
  ag.get("step", c.agent.step);
  double turn = 10, look = 10;
  ag.get("turn_deg", turn);
  ag.get("look_deg", look);
  c.agent.turn = deg_to_rad(turn);
  c.agent.look = deg_to_rad(look);
  ag.get("push_impulse", c.agent.push_impulse);

  c.validate();
  return c;
}

EnvConfig load_config_file(const std::string& path, const std::vector<std::string>& overrides) {
  std::string text;
  try {
    text = read_file_bytes(path);
  } catch (const Error& e) {
    throw Error(ErrorCode::ConfigError, e.what());
  }
  return config_from_json(text, overrides);
}

std::string config_to_json(const EnvConfig& cfg) { return to_doc(cfg).dump(); }

}  // namespace home
