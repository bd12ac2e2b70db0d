#include "osdm/arrayio.hpp"

#include <zlib.h>

#include <cstring>
#include <fstream>

namespace osdm {

void write_array(const std::string& path, const ArrayData& array) {
  if (array.dims.empty() || array.dims.size() > 255)
    throw ConfigError("array file: invalid ndim");
  if (array.values.size() != array.count())
    throw ConfigError("array file: payload length mismatch");

  std::vector<unsigned char> bytes;
  bytes.insert(bytes.end(), {'O', 'S', 'D', 'M'});
  bytes.push_back(1);  // version
  bytes.push_back(static_cast<unsigned char>(array.dims.size()));
  for (std::uint32_t d : array.dims) {
    unsigned char b[4];
    std::memcpy(b, &d, 4);
    bytes.insert(bytes.end(), b, b + 4);
  }
  for (double v : array.values) {
    float f = float(v);
    unsigned char b[4];
    std::memcpy(b, &f, 4);
    bytes.insert(bytes.end(), b, b + 4);
  }
  std::uint32_t crc =
      std::uint32_t(crc32(0L, bytes.data(), uInt(bytes.size())));
  unsigned char cb[4];
  std::memcpy(cb, &crc, 4);
  bytes.insert(bytes.end(), cb, cb + 4);

  std::ofstream f(path, std::ios::binary);
  if (!f) throw ConfigError("array file: cannot open " + path);
  f.write(reinterpret_cast<const char*>(bytes.data()),
          std::streamsize(bytes.size()));
  if (!f) throw ConfigError("array file: write failed for " + path);
}

ArrayData read_array(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ConfigError("array file: cannot open " + path);
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(f)),
                                   std::istreambuf_iterator<char>());
  if (bytes.size() < 10 || std::memcmp(bytes.data(), "OSDM", 4) != 0)
    throw ConfigError("array file: bad magic in " + path);
  std::uint32_t stored;
  std::memcpy(&stored, bytes.data() + bytes.size() - 4, 4);
  std::uint32_t computed =
      std::uint32_t(crc32(0L, bytes.data(), uInt(bytes.size() - 4)));
  if (stored != computed)
    throw ConfigError("array file: CRC mismatch in " + path);

  if (bytes[4] != 1) throw ConfigError("array file: unsupported version");
  std::size_t ndim = bytes[5];
  std::size_t off = 6;
  if (bytes.size() < off + 4 * ndim + 4)
    throw ConfigError("array file: truncated header");
  ArrayData array;
  array.dims.resize(ndim);
  for (std::size_t i = 0; i < ndim; ++i) {
    std::memcpy(&array.dims[i], bytes.data() + off, 4);
    off += 4;
  }
  std::size_t n = array.count();
  if (bytes.size() != off + 4 * n + 4)
    throw ConfigError("array file: payload length mismatch in " + path);
  array.values.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    float v;
    std::memcpy(&v, bytes.data() + off + 4 * i, 4);
    array.values[i] = double(v);
  }
  return array;
}

void write_sinogram(const std::string& path, const Sinogram& s) {
  ArrayData a;
  a.dims = {std::uint32_t(s.n_views), std::uint32_t(s.n_detectors)};
  a.values = s.values;
  write_array(path, a);
}

Sinogram read_sinogram(const std::string& path, double scale) {
  ArrayData a = read_array(path);
  if (a.dims.size() != 2)
    throw ConfigError("sinogram file must be 2D: " + path);
  Sinogram s(int(a.dims[0]), int(a.dims[1]), scale);
  s.values = std::move(a.values);
  return s;
}

void write_image(const std::string& path, const ImageGrid& img) {
  ArrayData a;
  a.dims = {std::uint32_t(img.height), std::uint32_t(img.width)};
  a.values = img.values;
  write_array(path, a);
}

ImageGrid read_image(const std::string& path, double pixel_size) {
  ArrayData a = read_array(path);
  if (a.dims.size() != 2) throw ConfigError("image file must be 2D: " + path);
  ImageGrid img(int(a.dims[1]), int(a.dims[0]), pixel_size);
  img.values = std::move(a.values);
  return img;
}

}  // namespace osdm
