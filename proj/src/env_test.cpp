#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>

#include "home/env.hpp"
#include "home/errors.hpp"
#include "home/media_io.hpp"
#include "home/scene_io.hpp"
#include "oracles.hpp"
#include "scenes.hpp"

using namespace home;
namespace fs = std::filesystem;

namespace {

EnvConfig small_config() {
  EnvConfig c;
  c.width = c.height = 16;
  c.house_seed_max = 20;
  return c;
}

/// Writes `house` as the only document of a fresh corpus directory.
std::string corpus_of(const House& house, const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("home_env_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  write_file(dir / "house.json", serialize_scene(house));
  return dir.string();
}

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error";
  return ErrorCode::IoError;
}

double wrap(double a) { return std::remainder(a, 2 * kPi); }

}  // namespace

TEST(EnvConfig, Validation) {
  EnvConfig c;
  c.step_rate = 7;  // 120 / 7 substeps
  EXPECT_EQ(code_of([&] { c.validate(); }), ErrorCode::ConfigError);
  c = EnvConfig{};
  c.agent_count = 0;
  EXPECT_EQ(code_of([&] { c.validate(); }), ErrorCode::ConfigError);
  c = EnvConfig{};
  c.house_seed_min = 5;
  c.house_seed_max = 4;
  EXPECT_EQ(code_of([&] { c.validate(); }), ErrorCode::ConfigError);
  EXPECT_EQ(EnvConfig{}.substeps(), 12);
  EXPECT_EQ(EnvConfig{}.audio_frame_length(), 1600u);
}

TEST(Actions, IntegerEncoding) {
  for (int i = 0; i < kActionCount; ++i) EXPECT_EQ(static_cast<int>(action_from_int(i)), i);
  EXPECT_EQ(to_string(Action::move_forward), "move_forward");
  EXPECT_EQ(code_of([] { action_from_int(12); }), ErrorCode::ParamError);
  EXPECT_EQ(code_of([] { action_from_int(-1); }), ErrorCode::ParamError);
}

TEST(Env, StepBeforeResetFails) {
  Env env(small_config());
  EXPECT_EQ(code_of([&] { env.step({}); }), ErrorCode::NotReset);
  EXPECT_EQ(code_of([&] { env.spawn_agent(); }), ErrorCode::NotReset);
  EXPECT_FALSE(env.active());
}

TEST(Env, ResetObservationShapes) {
  Env env(small_config());
  const auto obs = env.reset(3);
  ASSERT_EQ(obs.size(), 1u);
  EXPECT_EQ(obs[0].frame.rgb.size(), 16u * 16 * 3);
  EXPECT_EQ(obs[0].frame.depth.size(), 16u * 16);
  EXPECT_EQ(obs[0].frame.segmentation.size(), 16u * 16);
  EXPECT_EQ(obs[0].audio.left.size(), 1600u);
  EXPECT_LE(obs[0].semantics.size(), env.house().objects.size());  // visible objects only
  for (const auto& r : obs[0].semantics) EXPECT_FALSE(r.description.empty());
  EXPECT_FALSE(obs[0].self.room_id.empty());
}

TEST(Env, DisabledModalitiesAreEmpty) {
  EnvConfig c = small_config();
  c.modalities.rgb = c.modalities.audio = c.modalities.semantics = false;
  Env env(c);
  const auto obs = env.reset(1);
  EXPECT_TRUE(obs[0].frame.rgb.empty());
  EXPECT_TRUE(obs[0].audio.left.empty());
  EXPECT_TRUE(obs[0].semantics.empty());
  EXPECT_FALSE(obs[0].frame.depth.empty());
}

TEST(Env, UnknownAgent) {
  Env env(small_config());
  env.reset(0);
  EXPECT_EQ(code_of([&] { env.step({{7, Action::noop}}); }), ErrorCode::UnknownAgent);
}

TEST(Env, SameSeedSameTranscript) {
  Env a(small_config()), b(small_config());
  EXPECT_EQ(transcript_bytes(encode_observations(a.reset(5), a.config().modalities)),
            transcript_bytes(encode_observations(b.reset(5), b.config().modalities)));
  for (int i = 0; i < 20; ++i) {
    const auto act = action_from_int(i % kActionCount);
    EXPECT_EQ(transcript_bytes(encode_step(a.step({{0, act}}), a.config().modalities)),
              transcript_bytes(encode_step(b.step({{0, act}}), b.config().modalities)));
  }
}

TEST(Env, DifferentSeedsDiffer) {
  Env a(small_config()), b(small_config());
  EXPECT_NE(transcript_bytes(encode_observations(a.reset(1), a.config().modalities)),
            transcript_bytes(encode_observations(b.reset(2), b.config().modalities)));
}

TEST(Env, TurnAndLook) {
  Env env(small_config());
  env.reset(4);
  const double yaw0 = env.agents()[0].yaw;
  for (int i = 0; i < 4; ++i) env.step({{0, Action::turn_left}});
  EXPECT_NEAR(wrap(env.agents()[0].yaw - yaw0), deg_to_rad(40.0), 1e-12);
  env.step({{0, Action::turn_right}});
  EXPECT_NEAR(wrap(env.agents()[0].yaw - yaw0), deg_to_rad(30.0), 1e-12);
  for (int i = 0; i < 20; ++i) env.step({{0, Action::look_up}});
  EXPECT_LE(env.agents()[0].pitch, kPi / 2);
  EXPECT_GT(env.agents()[0].pitch, 0);
}

TEST(Env, WallsBlockMovement) {
  EnvConfig c = small_config();
  c.corpus_dir = corpus_of(fixture::shoebox(4, 4, 3), "walls");
  Env env(c);
  env.reset(0);
  bool collided = false;
  for (int i = 0; i < 40; ++i) {
    const auto r = env.step({{0, Action::move_forward}});
    for (const auto& e : r.events[0]) collided |= e == "collision";
    const Vec3 p = env.agents()[0].position;
    ASSERT_GE(p.x, 0.3 - 1e-9);
    ASSERT_LE(p.x, 3.7 + 1e-9);
    ASSERT_GE(p.y, 0.3 - 1e-9);
    ASSERT_LE(p.y, 3.7 + 1e-9);
  }
  EXPECT_TRUE(collided);
  EXPECT_TRUE(env.agents()[0].collided_last_step);
}

TEST(Env, MoveForwardAdvancesOneStep) {
  EnvConfig c = small_config();
  c.corpus_dir = corpus_of(fixture::shoebox(20, 20, 3), "open");
  Env env(c);
  env.reset(2);
  // step toward the room center so nothing is in the way
  const Vec3 p0 = env.agents()[0].position;
  const double yaw0 = env.agents()[0].yaw;
  const double want = std::atan2(10 - p0.y, 10 - p0.x);
  const int turns = static_cast<int>(std::lround(wrap(want - yaw0) / deg_to_rad(10.0)));
  for (int i = 0; i < std::abs(turns); ++i) env.step({{0, turns > 0 ? Action::turn_left : Action::turn_right}});
  const double yaw = env.agents()[0].yaw;
  env.step({{0, Action::move_forward}});
  const Vec3 d = env.agents()[0].position - p0;
  EXPECT_NEAR(d.x, 0.25 * std::cos(yaw), 1e-12);
  EXPECT_NEAR(d.y, 0.25 * std::sin(yaw), 1e-12);
}

TEST(Env, TwoAgentsSpawnInDistinctRooms) {
  EnvConfig c = small_config();
  c.agent_count = 2;
  for (std::uint64_t s = 0; s < 5; ++s) {
    Env env(c);
    const auto obs = env.reset(s);
    ASSERT_EQ(obs.size(), 2u);
    EXPECT_NE(obs[0].self.room_id, obs[1].self.room_id);
    EXPECT_GE(length(env.agents()[0].position - env.agents()[1].position), 0.6);
  }
}

TEST(Env, SpawnFailureInACloset) {
  House closet;
  closet.id = "closet";
  closet.rooms.push_back(fixture::box_room("r0", 0, 0, 0.5, 0.5, 2.5, "storage"));
  closet.bounds = {{0, 0, 0}, {0.5, 0.5, 2.5}};
  validate_house(closet);
  EnvConfig c = small_config();
  c.corpus_dir = corpus_of(closet, "storage");
  Env env(c);
  EXPECT_EQ(code_of([&] { env.reset(0); }), ErrorCode::SpawnFailure);
  EXPECT_FALSE(env.active());
}

TEST(Env, EmptyCorpus) {
  EnvConfig c = small_config();
  c.corpus_dir = (fs::temp_directory_path() / "home_env_test_empty").string();
  fs::remove_all(c.corpus_dir);
  fs::create_directories(c.corpus_dir);
  Env env(c);
  EXPECT_EQ(code_of([&] { env.reset(0); }), ErrorCode::NoHousesAvailable);
}

TEST(Env, RewardHookSeesRooms) {
  House h = fixture::shoebox(4, 4, 3);
  h.rooms[0].kind = RoomKind{*room_kinds().find("kitchen")};
  EnvConfig c = small_config();
  c.corpus_dir = corpus_of(h, "kitchen");
  Env env(c);
  env.set_reward_hook([](const House& house, const std::vector<AgentState>& agents, const auto&) {
    std::vector<double> r;
    for (const auto& a : agents) {
      const std::string room = room_of(house, a.position);
      r.push_back(!room.empty() && room_kinds()[house.rooms[0].kind.value] == "kitchen" ? 1.0 : 0.0);
    }
    return r;
  });
  env.reset(0);
  EXPECT_EQ(env.step({}).rewards, std::vector<double>{1.0});
}

TEST(Env, EpisodeEndsAfterItsLength) {
  EnvConfig c = small_config();
  c.episode_length = 3;
  Env env(c);
  env.reset(0);
  EXPECT_FALSE(env.step({}).done);
  EXPECT_FALSE(env.step({}).done);
  EXPECT_TRUE(env.step({}).done);
}

TEST(Env, SpawnAgentMidEpisode) {
  Env env(small_config());
  env.reset(6);
  const auto id = env.spawn_agent();
  EXPECT_EQ(id, 1u);
  const auto r = env.step({{id, Action::turn_left}});
  EXPECT_EQ(r.observations.size(), 2u);
  EXPECT_EQ(r.observations[1].self.id, id);
}

TEST(Env, TurningAroundSwapsEars) {
  House h = fixture::shoebox(6, 6, 3);
  SoundSource s;
  s.id = "radio";
  s.position = {1, 3, 1.2};
  s.signal.frequency = 500;
  h.sound_sources.push_back(s);
  validate_house(h);
  EnvConfig c = small_config();
  c.corpus_dir = corpus_of(h, "ears");
  Env env(c);
  env.reset(1);
  // face along +y so the source at x=1 is off to one side
  const int turns = static_cast<int>(std::lround(wrap(kPi / 2 - env.agents()[0].yaw) / deg_to_rad(10.0)));
  for (int i = 0; i < std::abs(turns); ++i) env.step({{0, turns > 0 ? Action::turn_left : Action::turn_right}});
  const auto before = env.step({}).observations[0].audio;
  for (int i = 0; i < 18; ++i) env.step({{0, Action::turn_left}});
  const auto after = env.step({}).observations[0].audio;
  const double l0 = fixture::rms(before.left), r0 = fixture::rms(before.right);
  const double l1 = fixture::rms(after.left), r1 = fixture::rms(after.right);
  ASSERT_GT(l0, 0);
  EXPECT_NEAR(l0 / r0, r1 / l1, 0.05 * (l0 / r0));
}

TEST(Transcript, BlobLayout) {
  Env env(small_config());
  const auto e = encode_observations(env.reset(0), env.config().modalities);
  ASSERT_EQ(e.blobs.size(), 4u);
  EXPECT_EQ(e.blobs[0].size(), 16u * 16 * 3);
  EXPECT_EQ(e.blobs[1].size(), 16u * 16 * 4);
  EXPECT_EQ(e.blobs[2].size(), 16u * 16 * 2);
  EXPECT_EQ(e.blobs[3].size(), 1600u * 2 * 4);
  EXPECT_EQ(e.body.find("timing"), std::string::npos);
}
