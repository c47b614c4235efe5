#include "home/bench.hpp"

#include <chrono>
#include <cstdio>
#include <thread>

#include <json.hpp>

#include "home/config.hpp"
#include "home/errors.hpp"
#include "home/rng.hpp"

namespace home {

namespace {

struct Totals {
  double render = 0, audio = 0, physics = 0, semantics = 0, step = 0;
};

Totals drive(const EnvConfig& cfg, std::uint64_t steps, std::uint64_t seed) {
  Env env(cfg);
  Rng rng(mix64(seed));
  env.reset(seed);
  Totals t;
  for (std::uint64_t i = 0; i < steps; ++i) {
    std::map<std::uint32_t, Action> actions;
    for (const auto& a : env.agents()) actions[a.id] = action_from_int(static_cast<int>(rng.range(0, kActionCount - 1)));
    const StepResult r = env.step(actions);
    t.render += r.timing.render_ms;
    t.audio += r.timing.audio_ms;
    t.physics += r.timing.physics_ms;
    t.semantics += r.timing.semantics_ms;
    t.step += r.timing.total_ms;
    if (r.done) env.reset(seed + i + 1);
  }
  return t;
}

}  // namespace

BenchReport run_parallel_bench(const EnvConfig& cfg, int envs, std::uint64_t steps, std::uint64_t seed) {
  if (envs < 1) throw Error(ErrorCode::ConfigError, "bench needs at least one env");
  if (steps < 1) throw Error(ErrorCode::ConfigError, "bench needs at least one step");
  cfg.validate();
  std::vector<Totals> totals(static_cast<std::size_t>(envs));
  const auto start = std::chrono::steady_clock::now();
  if (envs == 1) {
    totals[0] = drive(cfg, steps, seed);
  } else {
    std::vector<std::thread> threads;
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(envs));
    for (int e = 0; e < envs; ++e)
      threads.emplace_back([&, e] {
        try {
          totals[static_cast<std::size_t>(e)] = drive(cfg, steps, seed + static_cast<std::uint64_t>(e));
        } catch (...) {
          errors[static_cast<std::size_t>(e)] = std::current_exception();
        }
      });
    for (auto& t : threads) t.join();
    for (auto& err : errors)
      if (err) std::rethrow_exception(err);
  }
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  BenchReport r;
  r.envs = envs;
  r.steps = steps;
  r.wall_seconds = wall;
  r.steps_per_second = static_cast<double>(steps) * envs / wall;
  const double n = static_cast<double>(steps) * envs;
  for (const Totals& t : totals) {
    r.render_ms += t.render / n;
    r.audio_ms += t.audio / n;
    r.physics_ms += t.physics / n;
    r.semantics_ms += t.semantics / n;
    r.step_ms += t.step / n;
  }
  r.config_echo = config_to_json(cfg);
  return r;
}

BenchReport run_bench(const EnvConfig& cfg, std::uint64_t steps, std::uint64_t seed) {
  return run_parallel_bench(cfg, 1, steps, seed);
}

std::string BenchReport::to_json() const {
  nlohmann::json j = {{"envs", envs},
                      {"steps", steps},
                      {"wall_seconds", wall_seconds},
                      {"steps_per_second", steps_per_second},
                      {"ms_per_step",
                       {{"render", render_ms},
                        {"audio", audio_ms},
                        {"physics", physics_ms},
                        {"semantics", semantics_ms},
                        {"total", step_ms}}},
                      {"config", nlohmann::json::parse(config_echo)}};
  return j.dump(2);
}

std::string BenchReport::to_text() const {
  char buf[512];
  std::snprintf(buf, sizeof buf,
                "envs: %d\nsteps: %llu\nwall: %.3f s\nsteps/sec: %.2f\n"
                "ms/step: render %.3f  audio %.3f  physics %.3f  semantics %.3f  total %.3f\n",
                envs, static_cast<unsigned long long>(steps), wall_seconds, steps_per_second, render_ms, audio_ms,
                physics_ms, semantics_ms, step_ms);
  return std::string(buf) + "config: " + config_echo + "\n";
}

}  // namespace home
