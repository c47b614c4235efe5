// Command-line front end: render, ir, semantics, gen, bench, serve.
#include <CLI11.hpp>

#include <cmath>
#include <csignal>
#include <cstdio>
#include <filesystem>
#include <iostream>

#include "home/acoustics.hpp"
#include "home/bench.hpp"
#include "home/config.hpp"
#include "home/errors.hpp"
#include "home/generator.hpp"
#include "home/media_io.hpp"
#include "home/render.hpp"
#include "home/scene_io.hpp"
#include "home/semantics.hpp"
#include "home/wire.hpp"

namespace fs = std::filesystem;
using namespace home;

namespace {

struct Globals {
  std::string config;
  std::vector<std::string> overrides;
  std::uint64_t seed = 0;
  bool seed_set = false;
  std::string out = ".";
};

// "seed:N" generates a house, anything else is a scene document.
House open_scene(const std::string& spec) {
  if (spec.rfind("seed:", 0) == 0) {
    try {
      return generate_house(std::stoull(spec.substr(5)));
    } catch (const std::logic_error&) {
      throw Error(ErrorCode::ParamError, "bad seed in " + spec);
    }
  }
  return load_scene_file(spec);
}

Vec3 parse_vec3(const std::vector<double>& v) { return {v.at(0), v.at(1), v.at(2)}; }

EnvConfig env_config(const Globals& g) {
  EnvConfig cfg = g.config.empty() ? config_from_json("", g.overrides) : load_config_file(g.config, g.overrides);
  if (g.seed_set) cfg.seed = g.seed;
  return cfg;
}

std::string out_path(const Globals& g, const std::string& name) {
  fs::create_directories(g.out);
  return (fs::path(g.out) / name).string();
}

int cmd_render(const Globals& g, const std::string& scene_path, const std::vector<double>& pos, double yaw,
               double pitch, int width, int height, bool no_lights) {
  const House house = open_scene(scene_path);
  Camera cam;
  if (pos.empty()) {
    if (house.rooms.empty()) throw Error(ErrorCode::CameraOutOfBounds, "no rooms to place a default camera");
    const Room& r = house.rooms.front();
    Vec2 c{0, 0};
    for (Vec2 p : r.floor_polygon) c = c + p;
    c = c * (1.0 / static_cast<double>(r.floor_polygon.size()));
    cam.position = {c.x, c.y, r.elevation + 1.6};
  } else {
    cam.position = parse_vec3(pos);
  }
  cam.yaw = deg_to_rad(yaw);
  cam.pitch = deg_to_rad(pitch);
  cam.width = width;
  cam.height = height;
  const FrameBundle f = render(house, cam, !no_lights);
  write_file(out_path(g, "rgb.png"), encode_png(f.width, f.height, f.rgb));
  write_file(out_path(g, "depth.hdep"), encode_hdep(f.width, f.height, f.depth));
  write_file(out_path(g, "seg.pgm"), encode_pgm16(f.width, f.height, f.segmentation));
  std::printf("wrote rgb.png depth.hdep seg.pgm (%dx%d) to %s\n", f.width, f.height, g.out.c_str());
  return 0;
}

int cmd_ir(const Globals& g, const std::string& scene_path, const std::string& source_id,
           const std::vector<double>& listener, double yaw, int order) {
  const House house = open_scene(scene_path);
  const SoundSource* src = nullptr;
  for (const auto& s : house.sound_sources)
    if (s.id == source_id) src = &s;
  if (!src) throw Error(ErrorCode::UnknownSource, source_id);
  AcousticConfig cfg = env_config(g).acoustics;
  cfg.max_order = order;
  const auto paths = trace_paths(house, src->position, parse_vec3(listener), cfg);
  ListenerRig rig;
  rig.head = parse_vec3(listener);
  rig.yaw = deg_to_rad(yaw);
  const ImpulseResponse ir = build_ir(paths, rig, cfg);
  WavData wav;
  wav.channels = 2;
  wav.sample_rate = cfg.sample_rate;
  for (std::size_t i = 0; i < ir.left.size(); ++i) {
    wav.interleaved.push_back(static_cast<float>(ir.left[i]));
    wav.interleaved.push_back(static_cast<float>(ir.right[i]));
  }
  write_file(out_path(g, "ir.wav"), encode_wav(wav));
  BandArray energy{};
  for (const auto& p : paths)
    for (std::size_t b = 0; b < kBandCount; ++b) energy[b] += p.band_gain[b] * p.band_gain[b];
  std::printf("paths: %zu\n", paths.size());
  for (std::size_t b = 0; b < kBandCount; ++b)
    std::printf("band %g Hz energy: %.9g\n", kBandCenters[b], energy[b]);
  return 0;
}

int cmd_semantics(const Globals& g, const std::string& scene_path, std::uint64_t recompute) {
  if (recompute > 0) {
    const auto stats = CategoryVolumeStats::from_generated(recompute);
    write_file(out_path(g, "volume_stats.txt"), stats.to_text());
    std::printf("wrote volume_stats.txt over %llu houses\n", static_cast<unsigned long long>(recompute));
    return 0;
  }
  if (scene_path.empty()) throw Error(ErrorCode::ParamError, "semantics needs a scene");
  const House house = open_scene(scene_path);
  for (const auto& o : house.objects) std::printf("%s\n", record_to_json_line(make_record(house, o)).c_str());
  return 0;
}

int cmd_gen(const Globals& g, std::uint64_t count, bool reference_data) {
  if (reference_data) {
    const BandArray a = derive_air_absorption(20.0, 101.325, 50.0);
    char buf[256];
    std::snprintf(buf, sizeof buf,
                  "# temperature_c pressure_kpa humidity_pct alpha_125 alpha_500 alpha_2000 alpha_8000 (Np/m)\n"
                  "20 101.325 50 %.17g %.17g %.17g %.17g\n",
                  a[0], a[1], a[2], a[3]);
    write_file(out_path(g, "air_absorption_reference.txt"), buf);
    write_file(out_path(g, "volume_stats.txt"), CategoryVolumeStats::from_generated(count).to_text());
    std::printf("wrote reference data to %s\n", g.out.c_str());
    return 0;
  }
  for (std::uint64_t i = 0; i < count; ++i) {
    const std::uint64_t s = g.seed + i;
    write_file(out_path(g, "house_" + std::to_string(s) + ".json"), serialize_scene(generate_house(s)));
  }
  std::printf("wrote %llu houses to %s\n", static_cast<unsigned long long>(count), g.out.c_str());
  return 0;
}

int cmd_bench(const Globals& g, std::uint64_t steps, int envs, bool json) {
  const EnvConfig cfg = env_config(g);
  const BenchReport r = run_parallel_bench(cfg, envs, steps, cfg.seed);
  std::fputs((json ? r.to_json() + "\n" : r.to_text()).c_str(), stdout);
  return 0;
}

Server* g_server = nullptr;
extern "C" void on_signal(int) {
  if (g_server) g_server->stop();
}

int cmd_serve(const Globals& g, const std::string& host, std::uint16_t port) {
  Server server(env_config(g), host, port);
  std::printf("serving %s on %s:%u\n", std::string(kWireVersion).c_str(), host.c_str(), server.port());
  std::fflush(stdout);
  g_server = &server;
  std::signal(SIGINT, on_signal);
  std::signal(SIGTERM, on_signal);
  server.run();
  g_server = nullptr;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"home: headless household simulator"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--config", g.config, "environment config (JSON)");
  app.add_option("--set", g.overrides, "override a config key, e.g. --set physics.dt=0.005");
  auto* seed_opt = app.add_option("--seed", g.seed, "rng seed");
  app.add_option("--out", g.out, "output directory");

  std::string scene;
  std::vector<double> pos, listener;
  double yaw = 0, pitch = 0;
  int width = 64, height = 64, order = 2, envs = 1;
  bool no_lights = false, json = false, reference_data = false;
  std::string source, host = "127.0.0.1";
  std::uint64_t count = 10, steps = 1000, recompute = 0;
  std::uint16_t port = 7878;

  auto* render_cmd = app.add_subcommand("render", "render rgb/depth/segmentation of a scene");
  render_cmd->add_option("scene", scene, "scene document or seed:N")->required();
  render_cmd->add_option("--pos", pos, "camera position x y z")->expected(3);
  render_cmd->add_option("--yaw", yaw, "degrees");
  render_cmd->add_option("--pitch", pitch, "degrees");
  render_cmd->add_option("--width", width)->check(CLI::Range(1, 4096));
  render_cmd->add_option("--height", height)->check(CLI::Range(1, 4096));
  render_cmd->add_flag("--no-lights", no_lights);

  auto* ir_cmd = app.add_subcommand("ir", "trace paths and write a stereo impulse response");
  ir_cmd->add_option("scene", scene, "scene document or seed:N")->required();
  ir_cmd->add_option("--source", source, "sound source id")->required();
  ir_cmd->add_option("--listener", listener, "listener head x y z")->expected(3)->required();
  ir_cmd->add_option("--yaw", yaw, "listener yaw, degrees");
  ir_cmd->add_option("--order", order, "maximum reflection order")->check(CLI::Range(0, 6));

  auto* sem_cmd = app.add_subcommand("semantics", "dump semantic records, one JSON object per line");
  sem_cmd->add_option("scene", scene, "scene document or seed:N");
  sem_cmd->add_option("--recompute-stats", recompute, "write volume_stats.txt over this many generated houses");

  auto* gen_cmd = app.add_subcommand("gen", "generate a corpus of houses (seeds --seed ..)");
  gen_cmd->add_option("--count", count);
  gen_cmd->add_flag("--reference-data", reference_data, "write the shipped reference data files instead");

  auto* bench_cmd = app.add_subcommand("bench", "run random actions and report throughput");
  bench_cmd->add_option("--steps", steps)->check(CLI::PositiveNumber);
  bench_cmd->add_option("--envs", envs)->check(CLI::Range(1, 64));
  bench_cmd->add_flag("--json", json);

  auto* serve_cmd = app.add_subcommand("serve", "serve the episode protocol over TCP");
  serve_cmd->add_option("--host", host);
  serve_cmd->add_option("--port", port);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }
  g.seed_set = seed_opt->count() > 0;

  try {
    if (*render_cmd) return cmd_render(g, scene, pos, yaw, pitch, width, height, no_lights);
    if (*ir_cmd) return cmd_ir(g, scene, source, listener, yaw, order);
    if (*sem_cmd) return cmd_semantics(g, scene, recompute);
    if (*gen_cmd) return cmd_gen(g, count, reference_data);
    if (*bench_cmd) return cmd_bench(g, steps, envs, json);
    if (*serve_cmd) return cmd_serve(g, host, port);
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 1;
}
