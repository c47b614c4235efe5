#pragma once

#include <cstdint>
#include <string>

#include "home/env.hpp"

namespace home {

struct BenchReport {
  int envs = 1;
  std::uint64_t steps = 0;  // per env
  double wall_seconds = 0;
  double steps_per_second = 0;  // aggregate over envs
  // mean milliseconds per step
  double render_ms = 0, audio_ms = 0, physics_ms = 0, semantics_ms = 0, step_ms = 0;
  std::string config_echo;

  std::string to_json() const;
  std::string to_text() const;
};

/// Resets with `seed` and runs `steps` steps of uniformly random actions
/// (drawn from an rng seeded by `seed`), re-resetting when an episode ends.
BenchReport run_bench(const EnvConfig& cfg, std::uint64_t steps, std::uint64_t seed);
/// `envs` independent envs (seeds seed, seed+1, ...) on their own threads.
BenchReport run_parallel_bench(const EnvConfig& cfg, int envs, std::uint64_t steps, std::uint64_t seed);

}  // namespace home
