#pragma once

#include <cstdint>
#include <cstring>
#include <stdexcept>
#include <string>
#include <vector>

#include <zlib.h>

namespace stablechaos::detail {

// Minimal PNG encoder: 8-bit RGB, filter 0 scanlines, one zlib-compressed
// IDAT.  Enough for diagnostic heatmaps; not a general imaging library.
inline std::vector<unsigned char> encode_png_rgb8(std::uint32_t width, std::uint32_t height,
                                                  const std::vector<unsigned char>& rgb) {
  if (rgb.size() != static_cast<std::size_t>(width) * height * 3)
    throw std::invalid_argument("encode_png_rgb8: pixel buffer size mismatch");

  auto put_u32 = [](std::vector<unsigned char>& v, std::uint32_t x) {
    v.push_back(static_cast<unsigned char>(x >> 24));
    v.push_back(static_cast<unsigned char>(x >> 16));
    v.push_back(static_cast<unsigned char>(x >> 8));
    v.push_back(static_cast<unsigned char>(x));
  };
  auto put_chunk = [&](std::vector<unsigned char>& out, const char type[4],
                       const std::vector<unsigned char>& payload) {
    put_u32(out, static_cast<std::uint32_t>(payload.size()));
    std::vector<unsigned char> body(type, type + 4);
    body.insert(body.end(), payload.begin(), payload.end());
    out.insert(out.end(), body.begin(), body.end());
    put_u32(out, static_cast<std::uint32_t>(crc32(0L, body.data(),
                                                  static_cast<uInt>(body.size()))));
  };

  // filter byte 0 in front of every scanline
  std::vector<unsigned char> raw;
  raw.reserve(static_cast<std::size_t>(height) * (static_cast<std::size_t>(width) * 3 + 1));
  for (std::uint32_t row = 0; row < height; ++row) {
    raw.push_back(0);
    const unsigned char* src = rgb.data() + static_cast<std::size_t>(row) * width * 3;
    raw.insert(raw.end(), src, src + static_cast<std::size_t>(width) * 3);
  }

  uLongf bound = compressBound(static_cast<uLong>(raw.size()));
  std::vector<unsigned char> compressed(bound);
  if (compress2(compressed.data(), &bound, raw.data(), static_cast<uLong>(raw.size()), 6) != Z_OK)
    throw std::runtime_error("encode_png_rgb8: zlib compression failed");
  compressed.resize(bound);

  std::vector<unsigned char> out = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};
  std::vector<unsigned char> ihdr;
  put_u32(ihdr, width);
  put_u32(ihdr, height);
  ihdr.push_back(8);  // bit depth
  ihdr.push_back(2);  // truecolor
  ihdr.push_back(0);  // compression
  ihdr.push_back(0);  // filter
  ihdr.push_back(0);  // no interlace
  put_chunk(out, "IHDR", ihdr);
  put_chunk(out, "IDAT", compressed);
  put_chunk(out, "IEND", {});
  return out;
}

}  // namespace stablechaos::detail
