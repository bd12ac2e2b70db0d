#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "osdm/types.hpp"

namespace osdm {

// Toolkit binary array format:
//   "OSDM" | version u8 | ndim u8 | dims u32 LE each | payload f32 LE
//   row-major | crc32 u32 LE over everything before it
struct ArrayData {
  std::vector<std::uint32_t> dims;
  std::vector<double> values;  // stored as f32 on disk

  std::size_t count() const {
    std::size_t n = 1;
    for (auto d : dims) n *= d;
    return n;
  }
};

void write_array(const std::string& path, const ArrayData& array);
ArrayData read_array(const std::string& path);

// Convenience wrappers for the domain types (2D arrays).
void write_sinogram(const std::string& path, const Sinogram& s);
Sinogram read_sinogram(const std::string& path, double scale = 1.0);
void write_image(const std::string& path, const ImageGrid& img);
ImageGrid read_image(const std::string& path, double pixel_size);

}  // namespace osdm
