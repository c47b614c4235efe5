#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "home/acoustics.hpp"
#include "home/generator.hpp"
#include "home/physics.hpp"
#include "home/render.hpp"
#include "home/semantics.hpp"

namespace home {

enum class Action : std::uint8_t {
  noop,
  move_forward,
  move_backward,
  strafe_left,
  strafe_right,
  turn_left,
  turn_right,
  look_up,
  look_down,
  pick,
  drop,
  push,
};
inline constexpr int kActionCount = 12;
std::string_view to_string(Action a);
/// Action from its integer encoding; throws ParamError outside 0..11.
Action action_from_int(int v);

struct Modalities {
  bool rgb = true;
  bool depth = true;
  bool segmentation = true;
  bool audio = true;
  bool semantics = true;
  friend bool operator==(const Modalities&, const Modalities&) = default;
};

struct AgentParams {
  double radius = 0.3;
  double height = 1.7;
  double step = 0.25;
  double turn = deg_to_rad(10.0);
  double look = deg_to_rad(10.0);
  double push_impulse = 5.0;      // N*s
  double walkable_height = 0.05;  // objects lower than this are stepped over
};

struct EnvConfig {
  // house source: a directory of scene documents, or generator seeds [seed_min, seed_max]
  std::string corpus_dir;
  std::uint64_t house_seed_min = 0;
  std::uint64_t house_seed_max = 999;
  GeneratorParams generator;

  int agent_count = 1;
  double step_rate = 10;  // Hz
  int episode_length = 500;
  std::uint64_t seed = 0;
  Modalities modalities;

  int width = 64;
  int height = 64;
  double vertical_fov = deg_to_rad(60.0);
  bool lights = true;
  int threads = 1;

  AcousticConfig acoustics;
  double recompute_distance = 0.1;  // m of source/listener motion before IRs are retraced

  PhysicsConfig physics;
  AgentParams agent;

  /// Substeps of physics per env step; throws ConfigError unless integral.
  int substeps() const;
  std::size_t audio_frame_length() const;
  void validate() const;
};

struct AgentState {
  std::uint32_t id = 0;
  Vec3 position;  // feet
  double yaw = 0;
  double pitch = 0;
  bool collided_last_step = false;

  Camera camera(const EnvConfig& cfg) const;
  ListenerRig listener(const EnvConfig& cfg) const;
};

struct AgentSelf {
  std::uint32_t id = 0;
  Vec3 position;
  double yaw = 0, pitch = 0;
  std::string held_object;  // empty when nothing is held
  bool collided = false;
  std::string room_id;      // empty outside every room
  friend bool operator==(const AgentSelf&, const AgentSelf&) = default;
};

struct Observation {
  FrameBundle frame;  // planes of disabled modalities are empty
  StereoFrame audio;
  std::vector<SemanticRecord> semantics;
  AgentSelf self;
  friend bool operator==(const Observation&, const Observation&) = default;
};

struct StepTiming {
  double render_ms = 0, audio_ms = 0, physics_ms = 0, semantics_ms = 0, total_ms = 0;
};

struct StepResult {
  std::uint64_t step = 0;
  std::vector<Observation> observations;  // ascending agent id
  std::vector<double> rewards;
  bool done = false;
  std::vector<std::vector<std::string>> events;  // per agent: collisions, pick/drop/push outcomes
  std::vector<std::size_t> path_counts;         // acoustic paths per agent (all sources)
  StepTiming timing;                            // not part of transcripts
};

using RewardHook = std::function<std::vector<double>(const House&, const std::vector<AgentState>&,
                                                     const std::vector<std::vector<std::string>>&)>;

class Env {
 public:
  explicit Env(EnvConfig cfg);
  ~Env();
  Env(Env&&) noexcept;
  Env& operator=(Env&&) noexcept;

  const EnvConfig& config() const { return cfg_; }

  /// Selects a house with the seeded rng, spawns the configured agents and
  /// returns their initial observations. Throws NoHousesAvailable, SpawnFailure.
  std::vector<Observation> reset(std::optional<std::uint64_t> seed = std::nullopt);
  /// Missing agents act noop. Throws NotReset, UnknownAgent.
  StepResult step(const std::map<std::uint32_t, Action>& actions);
  std::uint32_t spawn_agent();
  void set_reward_hook(RewardHook hook);
  /// Renders the current view of one agent without advancing time.
  Observation observe(std::uint32_t agent);

  bool active() const;
  const House& house() const;
  const std::vector<AgentState>& agents() const { return agents_; }
  const PhysicsWorld& world() const;
  std::uint64_t step_count() const { return steps_; }

 private:
  struct State;
  struct IrCache {
    Vec3 source, head;
    double yaw = 0;
    ImpulseResponse ir;
    std::size_t paths = 0;
    bool valid = false;
  };

  House load_house(std::uint64_t index) const;
  std::uint64_t house_count() const;
  AgentState place_agent(std::uint32_t id);
  bool capsule_clear(Vec2 from, Vec2 to, double elevation, std::uint32_t self) const;
  void apply_action(AgentState& a, Action act, std::vector<std::string>& events);
  std::optional<std::size_t> reach_target(const AgentState& a) const;
  void sync_scene();
  Observation assemble(std::size_t agent_index, StepTiming& timing, std::size_t& path_count);
  AgentPose pose_of(const AgentState& a) const;

  EnvConfig cfg_;
  RewardHook hook_;
  std::vector<std::string> corpus_;
  std::unique_ptr<State> st_;
  std::vector<AgentState> agents_;
  std::vector<std::vector<IrCache>> ir_cache_;  // [agent][source]
  std::uint32_t next_agent_ = 0;
  std::uint64_t steps_ = 0;
  std::int64_t sample_clock_ = 0;
  bool done_ = false;
};

inline Env make_env(EnvConfig cfg) { return Env(std::move(cfg)); }

/// Agent id -> room id containing the agent ("" outside every room).
std::string room_of(const House& house, Vec3 position);

// --- transcripts ---

/// JSON description of one step plus the raw planes it references; the
/// wire protocol carries exactly these bytes.
struct EncodedStep {
  std::string body;                // JSON text, keys sorted
  std::vector<std::string> blobs;  // per agent: rgb, depth, segmentation, audio (enabled ones)
  friend bool operator==(const EncodedStep&, const EncodedStep&) = default;
};

EncodedStep encode_observations(const std::vector<Observation>& obs, const Modalities& m);
EncodedStep encode_step(const StepResult& r, const Modalities& m);
/// body, then each blob, each prefixed by its u32 length.
std::string transcript_bytes(const EncodedStep& e);

}  // namespace home
