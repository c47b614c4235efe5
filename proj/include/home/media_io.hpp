#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace home {

struct WavData {
  int channels = 1;
  double sample_rate = 16000;
  std::vector<float> interleaved;  // [-1, 1]

  /// Channel average.
  std::vector<float> mono() const;
};

/// PCM 16-bit WAV with `channels` interleaved channels; samples are clamped to [-1, 1].
std::string encode_wav(const WavData& wav);
WavData read_wav(std::string_view bytes);

/// 8-bit RGB PNG (zlib-compressed, no filtering).
std::string encode_png(int width, int height, std::span<const std::uint8_t> rgb);

/// Binary 16-bit PGM ("P5", maxval 65535, big-endian samples as the format requires).
std::string encode_pgm16(int width, int height, std::span<const std::uint16_t> values);

/// Depth plane: "HDEP", u32 width, u32 height, u32 zero pad, then f32 LE row-major.
std::string encode_hdep(int width, int height, std::span<const float> depth);

struct DepthPlane {
  int width = 0, height = 0;
  std::vector<float> values;
};
DepthPlane decode_hdep(std::string_view bytes);

void write_file(const std::string& path, std::string_view bytes);
std::string read_file_bytes(const std::string& path);

}  // namespace home
