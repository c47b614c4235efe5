#include "home/media_io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <zlib.h>

#include "home/bytes.hpp"
#include "home/errors.hpp"

namespace home {

std::vector<float> WavData::mono() const {
  if (channels <= 1) return interleaved;
  std::vector<float> out(interleaved.size() / static_cast<std::size_t>(channels));
  for (std::size_t i = 0; i < out.size(); ++i) {
    float s = 0;
    for (int c = 0; c < channels; ++c) s += interleaved[i * static_cast<std::size_t>(channels) + static_cast<std::size_t>(c)];
    out[i] = s / static_cast<float>(channels);
  }
  return out;
}

std::string encode_wav(const WavData& wav) {
  const auto data_bytes = static_cast<std::uint32_t>(wav.interleaved.size() * 2);
  const auto rate = static_cast<std::uint32_t>(std::lround(wav.sample_rate));
  const auto channels = static_cast<std::uint16_t>(wav.channels);
  std::string out = "RIFF";
  put_le(out, std::uint32_t{36} + data_bytes);
  out += "WAVEfmt ";
  put_le(out, std::uint32_t{16});
  put_le(out, std::uint16_t{1});  // PCM
  put_le(out, channels);
  put_le(out, rate);
  put_le(out, rate * channels * 2u);
  put_le(out, static_cast<std::uint16_t>(channels * 2));
  put_le(out, std::uint16_t{16});
  out += "data";
  put_le(out, data_bytes);
  for (float s : wav.interleaved) {
    const float c = std::clamp(s, -1.0f, 1.0f);
    put_le(out, static_cast<std::int16_t>(std::lround(c * 32767.0f)));
  }
  return out;
}

WavData read_wav(std::string_view bytes) {
  ByteReader in(bytes);
  if (in.take(4) != "RIFF") throw Error(ErrorCode::ParseError, "not a RIFF file");
  in.get<std::uint32_t>();
  if (in.take(4) != "WAVE") throw Error(ErrorCode::ParseError, "not a WAVE file");
  WavData wav;
  int bits = 0;
  bool have_fmt = false;
  while (in.remaining() >= 8) {
    const std::string_view id = in.take(4);
    const auto size = in.get<std::uint32_t>();
    std::string_view chunk = in.take(size);
    if (size % 2 == 1 && in.remaining() > 0) in.take(1);
    if (id == "fmt ") {
      ByteReader f(chunk);
      const auto format = f.get<std::uint16_t>();
      if (format != 1) throw Error(ErrorCode::ParseError, "only PCM WAV supported");
      wav.channels = f.get<std::uint16_t>();
      wav.sample_rate = f.get<std::uint32_t>();
      f.get<std::uint32_t>();
      f.get<std::uint16_t>();
      bits = f.get<std::uint16_t>();
      have_fmt = true;
    } else if (id == "data") {
      if (!have_fmt || bits != 16 || wav.channels < 1) throw Error(ErrorCode::ParseError, "only 16-bit PCM WAV supported");
      ByteReader d(chunk);
      while (d.remaining() >= 2) wav.interleaved.push_back(static_cast<float>(d.get<std::int16_t>()) / 32767.0f);
      return wav;
    }
  }
  throw Error(ErrorCode::ParseError, "WAV has no data chunk");
}

namespace {

void put_be32(std::string& out, std::uint32_t v) {
  for (int s = 24; s >= 0; s -= 8) out.push_back(static_cast<char>((v >> s) & 0xff));
}

void png_chunk(std::string& out, const char* type, const std::string& data) {
  put_be32(out, static_cast<std::uint32_t>(data.size()));
  std::string body = std::string(type, 4) + data;
  out += body;
  put_be32(out, static_cast<std::uint32_t>(
                    crc32(0L, reinterpret_cast<const Bytef*>(body.data()), static_cast<uInt>(body.size()))));
}

}  // namespace

std::string encode_png(int width, int height, std::span<const std::uint8_t> rgb) {
  if (rgb.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height) * 3)
    throw Error(ErrorCode::IoError, "rgb plane size mismatch");
  std::string raw;
  raw.reserve(static_cast<std::size_t>(height) * (static_cast<std::size_t>(width) * 3 + 1));
  for (int y = 0; y < height; ++y) {
    raw.push_back(0);  // filter: none
    raw.append(reinterpret_cast<const char*>(rgb.data()) + static_cast<std::size_t>(y) * width * 3,
               static_cast<std::size_t>(width) * 3);
  }
  uLongf zlen = compressBound(static_cast<uLong>(raw.size()));
  std::string z(zlen, '\0');
  if (compress2(reinterpret_cast<Bytef*>(z.data()), &zlen, reinterpret_cast<const Bytef*>(raw.data()),
                static_cast<uLong>(raw.size()), 6) != Z_OK)
    throw Error(ErrorCode::IoError, "zlib compression failed");
  z.resize(zlen);

  std::string out("\x89PNG\r\n\x1a\n", 8);
  std::string ihdr;
  put_be32(ihdr, static_cast<std::uint32_t>(width));
  put_be32(ihdr, static_cast<std::uint32_t>(height));
  ihdr += std::string("\x08\x02\x00\x00\x00", 5);  // 8-bit, truecolor, deflate, no filter, no interlace
  png_chunk(out, "IHDR", ihdr);
  png_chunk(out, "IDAT", z);
  png_chunk(out, "IEND", "");
  return out;
}

std::string encode_pgm16(int width, int height, std::span<const std::uint16_t> values) {
  std::string out = "P5\n" + std::to_string(width) + " " + std::to_string(height) + "\n65535\n";
  for (auto v : values) {
    out.push_back(static_cast<char>(v >> 8));
    out.push_back(static_cast<char>(v & 0xff));
  }
  return out;
}

std::string encode_hdep(int width, int height, std::span<const float> depth) {
  std::string out = "HDEP";
  put_le(out, static_cast<std::uint32_t>(width));
  put_le(out, static_cast<std::uint32_t>(height));
  put_le(out, std::uint32_t{0});
  for (float d : depth) put_le(out, d);
  return out;
}

DepthPlane decode_hdep(std::string_view bytes) {
  ByteReader in(bytes);
  if (in.take(4) != "HDEP") throw Error(ErrorCode::ParseError, "bad depth magic");
  DepthPlane p;
  p.width = static_cast<int>(in.get<std::uint32_t>());
  p.height = static_cast<int>(in.get<std::uint32_t>());
  in.get<std::uint32_t>();
  const std::size_t n = static_cast<std::size_t>(p.width) * static_cast<std::size_t>(p.height);
  if (in.remaining() != n * 4) throw Error(ErrorCode::ParseError, "depth plane size mismatch");
  p.values.resize(n);
  for (auto& v : p.values) v = in.get<float>();
  return p;
}

void write_file(const std::string& path, std::string_view bytes) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

std::string read_file_bytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace home
