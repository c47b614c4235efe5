#include <gtest/gtest.h>

#include "home/config.hpp"
#include "home/errors.hpp"
#include <functional>

using namespace home;

namespace {
ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::IoError;
}
}  // namespace

TEST(Config, EmptyDocumentGivesDefaults) {
  const EnvConfig c = config_from_json("");
  EXPECT_EQ(c.width, 64);
  EXPECT_EQ(c.step_rate, 10);
  EXPECT_EQ(c.acoustics.max_order, 2);
  EXPECT_EQ(config_to_json(c), config_to_json(EnvConfig{}));
}

TEST(Config, ReadsNestedKeys) {
  const EnvConfig c = config_from_json(
      R"({"seed": 9, "agents": 2, "modalities": {"audio": false}, "audio": {"order": 1}, "physics": {"dt": 0.005},
          "agent": {"turn_deg": 15}, "houses": {"seed_min": 3, "seed_max": 8}})");
  EXPECT_EQ(c.seed, 9u);
  EXPECT_EQ(c.agent_count, 2);
  EXPECT_FALSE(c.modalities.audio);
  EXPECT_EQ(c.acoustics.max_order, 1);
  EXPECT_EQ(c.physics.dt, 0.005);
  EXPECT_NEAR(c.agent.turn, deg_to_rad(15.0), 1e-15);
  EXPECT_EQ(c.house_seed_min, 3u);
}

TEST(Config, EchoRoundTrips) {
  const EnvConfig c = config_from_json(R"({"seed": 4, "width": 32, "audio": {"temperature_c": 30}})");
  const std::string echo = config_to_json(c);
  EXPECT_EQ(config_to_json(config_from_json(echo)), echo);
}

TEST(Config, ClimateDerivesAirAbsorption) {
  const EnvConfig warm = config_from_json(R"({"audio": {"temperature_c": 30, "humidity_pct": 20}})");
  EXPECT_EQ(warm.acoustics.air_absorption, derive_air_absorption(30, 101.325, 20));
}

TEST(Config, Overrides) {
  const EnvConfig c = config_from_json(R"({"width": 32})", {"width=48", "physics.friction=0.2", "modalities.rgb=false"});
  EXPECT_EQ(c.width, 48);
  EXPECT_EQ(c.physics.friction, 0.2);
  EXPECT_FALSE(c.modalities.rgb);
  EXPECT_EQ(code_of([] { config_from_json("", {"width"}); }), ErrorCode::ConfigError);
}

TEST(Config, Errors) {
  EXPECT_EQ(code_of([] { config_from_json(R"({"colour": 1})"); }), ErrorCode::ConfigError);
  EXPECT_EQ(code_of([] { config_from_json(R"({"audio": {"bogus": 1}})"); }), ErrorCode::ConfigError);
  EXPECT_EQ(code_of([] { config_from_json(R"({"width": "wide"})"); }), ErrorCode::ConfigError);
  EXPECT_EQ(code_of([] { config_from_json("{"); }), ErrorCode::ConfigError);
  EXPECT_EQ(code_of([] { config_from_json(R"({"step_rate": 7})"); }), ErrorCode::ConfigError);
  EXPECT_EQ(code_of([] { load_config_file("/nonexistent/cfg.json"); }), ErrorCode::ConfigError);
}
