#include "home/env.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <set>

#include <json.hpp>

#include "home/bytes.hpp"
#include "home/errors.hpp"
#include "home/geometry.hpp"
#include "home/rng.hpp"
#include "home/scene_io.hpp"

namespace home {

namespace {

constexpr std::string_view kActionNames[kActionCount] = {
    "noop",      "move_forward", "move_backward", "strafe_left", "strafe_right", "turn_left",
    "turn_right", "look_up",     "look_down",     "pick",        "drop",         "push"};

double ms_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

std::string_view to_string(Action a) { return kActionNames[static_cast<int>(a)]; }

Action action_from_int(int v) {
  if (v < 0 || v >= kActionCount) throw Error(ErrorCode::ParamError, "action " + std::to_string(v) + " outside 0..11");
  return static_cast<Action>(v);
}

int EnvConfig::substeps() const {
  const double ratio = 1.0 / physics.dt / step_rate;
  const double rounded = std::round(ratio);
  if (rounded < 1 || std::abs(ratio - rounded) > 1e-6 * rounded)
    throw Error(ErrorCode::ConfigError, "step_rate must divide the physics rate 1/dt");
  return static_cast<int>(rounded);
}

std::size_t EnvConfig::audio_frame_length() const {
  return static_cast<std::size_t>(std::llround(acoustics.sample_rate / step_rate));
}

void EnvConfig::validate() const {
  if (agent_count < 1) throw Error(ErrorCode::ConfigError, "agent count must be >= 1");
  if (!(step_rate > 0)) throw Error(ErrorCode::ConfigError, "step_rate must be positive");
  if (episode_length < 1) throw Error(ErrorCode::ConfigError, "episode_length must be >= 1");
  if (width < 1 || height < 1 || width > 4096 || height > 4096) throw Error(ErrorCode::ConfigError, "bad resolution");
  if (!(vertical_fov > 0 && vertical_fov < kPi)) throw Error(ErrorCode::ConfigError, "fov must be in (0, 180) degrees");
  if (threads < 1) throw Error(ErrorCode::ConfigError, "threads must be >= 1");
  if (corpus_dir.empty() && house_seed_min > house_seed_max)
    throw Error(ErrorCode::ConfigError, "house seed range is empty");
  if (!(recompute_distance >= 0)) throw Error(ErrorCode::ConfigError, "recompute distance must be >= 0");
  if (!(agent.radius > 0 && agent.height > physics.eye_height))
    throw Error(ErrorCode::ConfigError, "agent radius/height invalid");
  physics.validate();
  acoustics.validate();
  substeps();
}

Camera AgentState::camera(const EnvConfig& cfg) const {
  Camera c;
  c.position = position + Vec3{0, 0, cfg.physics.eye_height};
  c.yaw = yaw;
  c.pitch = pitch;
  c.vertical_fov = cfg.vertical_fov;
  c.width = cfg.width;
  c.height = cfg.height;
  return c;
}

ListenerRig AgentState::listener(const EnvConfig& cfg) const {
  ListenerRig r;
  r.head = position + Vec3{0, 0, cfg.physics.eye_height};
  r.yaw = yaw;
  return r;
}

std::string room_of(const House& house, Vec3 p) {
  for (const Room& r : house.rooms)
    if (p.z >= r.elevation - 1e-6 && p.z < r.elevation + r.wall_height && point_in_polygon(r.floor_polygon, xy(p)))
      return r.id;
  return {};
}

struct Env::State {
  std::unique_ptr<House> house;
  std::unique_ptr<RayScene> scene;
  PhysicsWorld world;
  std::vector<Vec3> synced;  // object translation last pushed to the ray scene
  std::vector<std::optional<SemanticRecord>> records;
  Rng rng{0};
};

Env::Env(EnvConfig cfg) : cfg_(std::move(cfg)) {
  cfg_.validate();
  if (!cfg_.corpus_dir.empty()) {
    std::error_code ec;
    if (std::filesystem::is_directory(cfg_.corpus_dir, ec))
      for (const auto& entry : std::filesystem::directory_iterator(cfg_.corpus_dir, ec))
        if (entry.is_regular_file() && entry.path().extension() == ".json") corpus_.push_back(entry.path().string());
    std::sort(corpus_.begin(), corpus_.end());
  }
}

Env::~Env() = default;
Env::Env(Env&&) noexcept = default;
Env& Env::operator=(Env&&) noexcept = default;

bool Env::active() const { return st_ != nullptr; }

const House& Env::house() const {
  if (!st_) throw Error(ErrorCode::NotReset, "no house loaded");
  return *st_->house;
}

const PhysicsWorld& Env::world() const {
  if (!st_) throw Error(ErrorCode::NotReset, "no house loaded");
  return st_->world;
}

void Env::set_reward_hook(RewardHook hook) { hook_ = std::move(hook); }

std::uint64_t Env::house_count() const {
  if (!cfg_.corpus_dir.empty()) return corpus_.size();
  return cfg_.house_seed_max - cfg_.house_seed_min + 1;
}

House Env::load_house(std::uint64_t index) const {
  if (!cfg_.corpus_dir.empty()) return load_scene_file(corpus_[index]);
  return generate_house(cfg_.house_seed_min + index, cfg_.generator);
}

AgentPose Env::pose_of(const AgentState& a) const { return {a.position, a.yaw, {}}; }

bool Env::capsule_clear(Vec2 from, Vec2 to, double elevation, std::uint32_t self) const {
  const double r = cfg_.agent.radius - 1e-9;
  const double z0 = elevation, z1 = elevation + cfg_.agent.height;
  const House& h = *st_->house;
  for (const Room& room : h.rooms) {
    if (room.elevation + room.wall_height <= z0 || room.elevation >= z1) continue;
    const std::size_t n = room.floor_polygon.size();
    for (std::size_t e = 0; e < n; ++e) {
      const Vec2 a = room.floor_polygon[e], b = room.floor_polygon[(e + 1) % n];
      const double len = length(b - a);
      if (len <= 0) continue;
      const Vec2 u = (b - a) * (1.0 / len);
      // solid parts of the edge below the agent's head
      std::vector<std::pair<double, double>> gaps;
      for (const Door& d : room.doors)
        if (d.edge == e && room.elevation + d.height >= z1) gaps.emplace_back(d.offset, d.offset + d.width);
      std::sort(gaps.begin(), gaps.end());
      double cursor = 0;
      auto blocked = [&](double s0, double s1) { return s1 > s0 && segment_distance(from, to, a + u * s0, a + u * s1) < r; };
      for (const auto& [g0, g1] : gaps) {
        if (blocked(cursor, g0)) return false;
        cursor = std::max(cursor, g1);
      }
      if (blocked(cursor, len)) return false;
    }
  }
  const auto& bodies = st_->world.bodies();
  for (std::size_t i = 0; i < bodies.size(); ++i) {
    const RigidBody& b = bodies[i];
    if (b.held) continue;
    const AABB box = b.box();
    if (box.max.z <= z0 + cfg_.agent.walkable_height || box.min.z >= z1) continue;
    if (segment_rect_distance(from, to, xy(box.min), xy(box.max)) < r) return false;
  }
  for (const AgentState& o : agents_) {
    if (o.id == self) continue;
    if (segment_distance(from, to, xy(o.position), xy(o.position)) < 2 * cfg_.agent.radius - 1e-9) return false;
  }
  return true;
}

AgentState Env::place_agent(std::uint32_t id) {
  const House& h = *st_->house;
  if (h.rooms.empty()) throw Error(ErrorCode::SpawnFailure, "house has no rooms");
  std::set<std::string> occupied;
  for (const AgentState& a : agents_) occupied.insert(room_of(h, a.position));
  std::vector<std::size_t> preferred, all;
  for (std::size_t i = 0; i < h.rooms.size(); ++i) {
    all.push_back(i);
    if (!occupied.count(h.rooms[i].id)) preferred.push_back(i);
  }
  if (preferred.empty()) preferred = all;
  Rng& rng = st_->rng;
  constexpr int kAttempts = 1000;
  for (int attempt = 0; attempt < kAttempts; ++attempt) {
    const auto& pool = attempt < kAttempts / 2 ? preferred : all;
    const Room& room = h.rooms[pool[static_cast<std::size_t>(rng.range(0, static_cast<std::int64_t>(pool.size()) - 1))]];
    AABB box = AABB::empty();
    for (Vec2 p : room.floor_polygon) box.expand(Vec3{p.x, p.y, 0});
    const Vec2 p{rng.uniform(box.min.x, box.max.x), rng.uniform(box.min.y, box.max.y)};
    if (!point_in_polygon(room.floor_polygon, p)) continue;
    if (!capsule_clear(p, p, room.elevation, id)) continue;
    AgentState a;
    a.id = id;
    a.position = {p.x, p.y, room.elevation};
    a.yaw = rng.uniform(-kPi, kPi);
    return a;
  }
  throw Error(ErrorCode::SpawnFailure, "no free position after 1000 samples");
}

std::vector<Observation> Env::reset(std::optional<std::uint64_t> seed) {
  const std::uint64_t s = seed.value_or(cfg_.seed);
  const std::uint64_t n = house_count();
  if (n == 0) throw Error(ErrorCode::NoHousesAvailable, cfg_.corpus_dir);
  auto st = std::make_unique<State>();
  st->rng = Rng(s);
  const auto index = static_cast<std::uint64_t>(st->rng.range(0, static_cast<std::int64_t>(n - 1)));
  st->house = std::make_unique<House>(load_house(index));
  st->scene = std::make_unique<RayScene>(*st->house, 0.5, cfg_.acoustics.object_surface_min_volume);
  st->world = PhysicsWorld(*st->house, cfg_.physics);
  for (const auto& o : st->house->objects) st->synced.push_back(o.transform.translation);
  st->records.resize(st->house->objects.size());
  st_ = std::move(st);

  agents_.clear();
  ir_cache_.clear();
  next_agent_ = 0;
  steps_ = 0;
  sample_clock_ = 0;
  done_ = false;
  try {
    for (int i = 0; i < cfg_.agent_count; ++i) spawn_agent();
  } catch (...) {
    st_.reset();
    agents_.clear();
    throw;
  }

  std::vector<Observation> obs;
  StepTiming timing;
  for (std::size_t i = 0; i < agents_.size(); ++i) {
    std::size_t paths = 0;
    obs.push_back(assemble(i, timing, paths));
  }
  sample_clock_ += static_cast<std::int64_t>(cfg_.audio_frame_length());
  return obs;
}

std::uint32_t Env::spawn_agent() {
  if (!st_) throw Error(ErrorCode::NotReset, "spawn before reset");
  const std::uint32_t id = next_agent_;
  AgentState a = place_agent(id);
  ++next_agent_;
  agents_.push_back(a);
  ir_cache_.emplace_back(st_->house->sound_sources.size());
  return id;
}

std::optional<std::size_t> Env::reach_target(const AgentState& a) const {
  const auto& bodies = st_->world.bodies();
  const PhysicsConfig& pc = st_->world.config();
  std::optional<std::size_t> best;
  double best_d = 0;
  const Vec2 fwd{std::cos(a.yaw), std::sin(a.yaw)};
  for (std::size_t i = 0; i < bodies.size(); ++i) {
    const RigidBody& b = bodies[i];
    if (b.is_static || b.held) continue;
    const Vec2 d = xy(b.position) - xy(a.position);
    const double dist = length(d);
    if (dist > pc.reach) continue;
    if (dist > 1e-9 && dot(d * (1.0 / dist), fwd) < std::cos(pc.reach_angle) - 1e-12) continue;
    if (!best || dist < best_d) {
      best = i;
      best_d = dist;
    }
  }
  return best;
}

void Env::apply_action(AgentState& a, Action act, std::vector<std::string>& events) {
  a.collided_last_step = false;
  const AgentParams& p = cfg_.agent;
  auto move = [&](double along, double across) {
    const Vec2 fwd{std::cos(a.yaw), std::sin(a.yaw)};
    const Vec2 left{-std::sin(a.yaw), std::cos(a.yaw)};
    const Vec2 from = xy(a.position);
    const Vec2 to = from + fwd * along + left * across;
    if (capsule_clear(from, to, a.position.z, a.id)) {
      a.position.x = to.x;
      a.position.y = to.y;
    } else {
      a.collided_last_step = true;
      events.push_back("collision");
    }
  };
  PhysicsWorld& w = st_->world;
  switch (act) {
    case Action::noop: break;
    case Action::move_forward: move(p.step, 0); break;
    case Action::move_backward: move(-p.step, 0); break;
    case Action::strafe_left: move(0, p.step); break;
    case Action::strafe_right: move(0, -p.step); break;
    case Action::turn_left: a.yaw += p.turn; break;
    case Action::turn_right: a.yaw -= p.turn; break;
    case Action::look_up: a.pitch = std::min(kPi / 2, a.pitch + p.look); break;
    case Action::look_down: a.pitch = std::max(-kPi / 2, a.pitch - p.look); break;
    case Action::pick: {
      const auto target = reach_target(a);
      if (!target) {
        events.push_back("pick:OutOfReach");
        break;
      }
      try {
        w.pick(a.id, pose_of(a), *target);
        events.push_back("pick:" + w.bodies()[*target].object_id);
      } catch (const Error& e) {
        events.push_back("pick:" + std::string(to_string(e.code())));
      }
      break;
    }
    case Action::drop: {
      try {
        const std::size_t b = w.drop(a.id, pose_of(a));
        events.push_back("drop:" + w.bodies()[b].object_id);
      } catch (const Error& e) {
        events.push_back("drop:" + std::string(to_string(e.code())));
      }
      break;
    }
    case Action::push: {
      const auto target = reach_target(a);
      if (!target) {
        events.push_back("push:OutOfReach");
        break;
      }
      w.apply_push(*target, Vec3{std::cos(a.yaw), std::sin(a.yaw), 0} * p.push_impulse);
      events.push_back("push:" + w.bodies()[*target].object_id);
      break;
    }
  }
  w.update_held(a.id, pose_of(a));
}

void Env::sync_scene() {
  const auto& bodies = st_->world.bodies();
  for (std::size_t i = 0; i < st_->house->objects.size(); ++i) {
    if (bodies[i].is_static) continue;
    const Vec3 t = st_->world.object_translation(i);
    if (t == st_->synced[i]) continue;
    Transform tr = st_->scene->object_transform(i);
    tr.translation = t;
    st_->scene->set_object_transform(i, tr);
    st_->synced[i] = t;
  }
}

Observation Env::assemble(std::size_t agent_index, StepTiming& timing, std::size_t& path_count) {
  const AgentState& a = agents_[agent_index];
  const Modalities& m = cfg_.modalities;
  Observation obs;
  const House& h = *st_->house;

  if (m.rgb || m.depth || m.segmentation || m.semantics) {
    const auto t0 = std::chrono::steady_clock::now();
    RenderOptions ro;
    ro.lights_enabled = cfg_.lights;
    ro.threads = cfg_.threads;
    FrameBundle f = render(*st_->scene, a.camera(cfg_), ro);
    timing.render_ms += ms_since(t0);

    if (m.semantics) {
      const auto t1 = std::chrono::steady_clock::now();
      std::set<std::int32_t> visible(f.instance.begin(), f.instance.end());
      for (std::int32_t idx : visible) {
        if (idx < 0) continue;
        auto& cached = st_->records[static_cast<std::size_t>(idx)];
        if (!cached) cached = make_record(h, h.objects[static_cast<std::size_t>(idx)]);
        SemanticRecord r = *cached;
        const RigidBody& b = st_->world.bodies()[static_cast<std::size_t>(idx)];
        if (!b.is_static) {
          r.centroid = b.position;
          r.room_id = room_of(h, b.position - Vec3{0, 0, b.half_extents.z});
          if (r.room_id.empty()) r.room_id = h.objects[static_cast<std::size_t>(idx)].room_id;
        }
        obs.semantics.push_back(std::move(r));
      }
      timing.semantics_ms += ms_since(t1);
    }
    obs.frame.width = f.width;
    obs.frame.height = f.height;
    if (m.rgb) obs.frame.rgb = std::move(f.rgb);
    if (m.depth) obs.frame.depth = std::move(f.depth);
    if (m.segmentation) obs.frame.segmentation = std::move(f.segmentation);
  }

  if (m.audio) {
    const auto t0 = std::chrono::steady_clock::now();
    const ListenerRig rig = a.listener(cfg_);
    std::vector<SourceFeed> feeds;
    auto& caches = ir_cache_[agent_index];
    for (std::size_t s = 0; s < h.sound_sources.size(); ++s) {
      const SoundSource& src = h.sound_sources[s];
      IrCache& c = caches[s];
      const bool stale = !c.valid || length(c.source - src.position) > cfg_.recompute_distance ||
                         length(c.head - rig.head) > cfg_.recompute_distance || c.yaw != rig.yaw;
      if (stale) {
        const auto paths = trace_paths(*st_->scene, src.position, rig.head, cfg_.acoustics);
        c.ir = build_ir(paths, rig, cfg_.acoustics);
        c.paths = paths.size();
        c.source = src.position;
        c.head = rig.head;
        c.yaw = rig.yaw;
        c.valid = true;
      }
      path_count += c.paths;
      feeds.push_back({&src.signal, src.reference_gain, &c.ir});
    }
    obs.audio = render_frame(feeds, cfg_.audio_frame_length(), sample_clock_);
    timing.audio_ms += ms_since(t0);
  }

  obs.self.id = a.id;
  obs.self.position = a.position;
  obs.self.yaw = a.yaw;
  obs.self.pitch = a.pitch;
  obs.self.collided = a.collided_last_step;
  obs.self.room_id = room_of(h, a.position);
  if (const auto held = st_->world.held_by(a.id)) obs.self.held_object = st_->world.bodies()[*held].object_id;
  return obs;
}

Observation Env::observe(std::uint32_t agent) {
  if (!st_) throw Error(ErrorCode::NotReset, "observe before reset");
  for (std::size_t i = 0; i < agents_.size(); ++i)
    if (agents_[i].id == agent) {
      StepTiming t;
      std::size_t paths = 0;
      const std::int64_t clock = sample_clock_;
      sample_clock_ -= static_cast<std::int64_t>(cfg_.audio_frame_length());  // the window of the last step
      Observation o = assemble(i, t, paths);
      sample_clock_ = clock;
      return o;
    }
  throw Error(ErrorCode::UnknownAgent, std::to_string(agent));
}

StepResult Env::step(const std::map<std::uint32_t, Action>& actions) {
  if (!st_) throw Error(ErrorCode::NotReset, "step before reset");
  for (const auto& [id, act] : actions) {
    (void)act;
    if (std::none_of(agents_.begin(), agents_.end(), [&](const AgentState& a) { return a.id == id; }))
      throw Error(ErrorCode::UnknownAgent, std::to_string(id));
  }
  const auto start = std::chrono::steady_clock::now();
  StepResult r;
  r.events.resize(agents_.size());
  for (std::size_t i = 0; i < agents_.size(); ++i) {
    const auto it = actions.find(agents_[i].id);
    apply_action(agents_[i], it == actions.end() ? Action::noop : it->second, r.events[i]);
  }

  const auto tp = std::chrono::steady_clock::now();
  const int substeps = cfg_.substeps();
  for (int k = 0; k < substeps; ++k) st_->world.step();
  sync_scene();
  r.timing.physics_ms = ms_since(tp);

  r.path_counts.assign(agents_.size(), 0);
  for (std::size_t i = 0; i < agents_.size(); ++i) r.observations.push_back(assemble(i, r.timing, r.path_counts[i]));
  sample_clock_ += static_cast<std::int64_t>(cfg_.audio_frame_length());

  r.rewards.assign(agents_.size(), 0.0);
  if (hook_) {
    const auto rewards = hook_(*st_->house, agents_, r.events);
    for (std::size_t i = 0; i < std::min(rewards.size(), r.rewards.size()); ++i) r.rewards[i] = rewards[i];
  }
  ++steps_;
  if (steps_ >= static_cast<std::uint64_t>(cfg_.episode_length)) done_ = true;
  r.step = steps_;
  r.done = done_;
  r.timing.total_ms = ms_since(start);
  return r;
}

// --- transcripts ---

namespace {

nlohmann::json observation_header(const Observation& o, const Modalities& m, std::vector<std::string>& blobs) {
  using nlohmann::json;
  json j;
  j["self"] = {{"id", o.self.id},
               {"position", {o.self.position.x, o.self.position.y, o.self.position.z}},
               {"yaw", o.self.yaw},
               {"pitch", o.self.pitch},
               {"held", o.self.held_object},
               {"collided", o.self.collided},
               {"room", o.self.room_id}};
  json sem = json::array();
  for (const auto& rec : o.semantics) sem.push_back(json::parse(record_to_json_line(rec)));
  j["semantics"] = std::move(sem);
  json planes = json::array();
  auto add = [&](const char* name, json shape, const char* dtype, std::string bytes) {
    planes.push_back({{"name", name}, {"shape", std::move(shape)}, {"dtype", dtype}, {"bytes", bytes.size()}});
    blobs.push_back(std::move(bytes));
  };
  const int w = o.frame.width, h = o.frame.height;
  if (m.rgb) add("rgb", {h, w, 3}, "u8", std::string(o.frame.rgb.begin(), o.frame.rgb.end()));
  if (m.depth) {
    std::string b;
    b.reserve(o.frame.depth.size() * 4);
    for (float v : o.frame.depth) put_le(b, v);
    add("depth", {h, w}, "f32", std::move(b));
  }
  if (m.segmentation) {
    std::string b;
    b.reserve(o.frame.segmentation.size() * 2);
    for (std::uint16_t v : o.frame.segmentation) put_le(b, v);
    add("segmentation", {h, w}, "u16", std::move(b));
  }
  if (m.audio) {
    std::string b;
    b.reserve((o.audio.left.size() + o.audio.right.size()) * 4);
    for (float v : o.audio.left) put_le(b, v);
    for (float v : o.audio.right) put_le(b, v);
    add("audio", {2, o.audio.left.size()}, "f32", std::move(b));
  }
  j["planes"] = std::move(planes);
  return j;
}

EncodedStep finish(nlohmann::json body, std::vector<std::string> blobs) {
  nlohmann::json sizes = nlohmann::json::array();
  for (const auto& b : blobs) sizes.push_back(b.size());
  body["blobs"] = std::move(sizes);
  return {body.dump(), std::move(blobs)};
}

}  // namespace

EncodedStep encode_observations(const std::vector<Observation>& obs, const Modalities& m) {
  std::vector<std::string> blobs;
  nlohmann::json agents = nlohmann::json::array();
  for (const auto& o : obs) agents.push_back(observation_header(o, m, blobs));
  nlohmann::json body;
  body["agents"] = std::move(agents);
  return finish(std::move(body), std::move(blobs));
}

EncodedStep encode_step(const StepResult& r, const Modalities& m) {
  std::vector<std::string> blobs;
  nlohmann::json agents = nlohmann::json::array();
  for (std::size_t i = 0; i < r.observations.size(); ++i) {
    nlohmann::json a = observation_header(r.observations[i], m, blobs);
    a["reward"] = r.rewards[i];
    a["events"] = r.events[i];
    a["paths"] = r.path_counts[i];
    agents.push_back(std::move(a));
  }
  nlohmann::json body;
  body["step"] = r.step;
  body["done"] = r.done;
  body["agents"] = std::move(agents);
  return finish(std::move(body), std::move(blobs));
}

std::string transcript_bytes(const EncodedStep& e) {
  std::string out;
  put_le(out, static_cast<std::uint32_t>(e.body.size()));
  out += e.body;
  for (const auto& b : e.blobs) {
    put_le(out, static_cast<std::uint32_t>(b.size()));
    out += b;
  }
  return out;
}

}  // namespace home
