#include "osdm/pngio.hpp"

#include <zlib.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>

#include "osdm/types.hpp"

namespace osdm {

namespace {

void put_u32_be(std::vector<unsigned char>& out, std::uint32_t v) {
  out.push_back((v >> 24) & 0xFF);
  out.push_back((v >> 16) & 0xFF);
  out.push_back((v >> 8) & 0xFF);
  out.push_back(v & 0xFF);
}

void put_chunk(std::vector<unsigned char>& out, const char type[4],
               const std::vector<unsigned char>& data) {
  put_u32_be(out, std::uint32_t(data.size()));
  std::size_t crc_start = out.size();
  out.insert(out.end(), type, type + 4);
  out.insert(out.end(), data.begin(), data.end());
  std::uint32_t crc = std::uint32_t(
      crc32(0L, out.data() + crc_start, uInt(out.size() - crc_start)));
  put_u32_be(out, crc);
}

}  // namespace

void write_png_gray(const std::string& path, const std::vector<double>& values,
                    int rows, int cols, double lo, double hi) {
  if (values.size() != std::size_t(rows) * cols)
    throw ConfigError("png: shape mismatch");
  if (!(hi > lo)) throw ConfigError("png: window hi must exceed lo");

  // Filter byte 0 per scanline, then zlib-compress.
  std::vector<unsigned char> raw;
  raw.reserve(std::size_t(rows) * (cols + 1));
  for (int r = 0; r < rows; ++r) {
    raw.push_back(0);
    for (int c = 0; c < cols; ++c) {
      double t = (values[std::size_t(r) * cols + c] - lo) / (hi - lo);
      t = std::clamp(t, 0.0, 1.0);
      raw.push_back(static_cast<unsigned char>(std::lround(t * 255.0)));
    }
  }
  uLongf comp_len = compressBound(uLong(raw.size()));
  std::vector<unsigned char> comp(comp_len);
  if (compress2(comp.data(), &comp_len, raw.data(), uLong(raw.size()), 9) != Z_OK)
    throw NumericalError("png: compression failed");
  comp.resize(comp_len);

  std::vector<unsigned char> out = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1A, '\n'};
  std::vector<unsigned char> ihdr;
  put_u32_be(ihdr, std::uint32_t(cols));
  put_u32_be(ihdr, std::uint32_t(rows));
  ihdr.push_back(8);  // bit depth
  ihdr.push_back(0);  // grayscale
  ihdr.push_back(0);  // deflate
  ihdr.push_back(0);  // filter method
  ihdr.push_back(0);  // no interlace
  put_chunk(out, "IHDR", ihdr);
  put_chunk(out, "IDAT", comp);
  put_chunk(out, "IEND", {});

  std::ofstream f(path, std::ios::binary);
  if (!f) throw ConfigError("png: cannot open " + path);
  f.write(reinterpret_cast<const char*>(out.data()), std::streamsize(out.size()));
  if (!f) throw ConfigError("png: write failed for " + path);
}

}  // namespace osdm
