#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace mvdc {

template <typename T>
struct Grid {
  int width = 0;
  int height = 0;
  std::vector<T> data;

  Grid() = default;
  Grid(int w, int h, T fill = T())
      : width(w), height(h), data(static_cast<size_t>(w) * h, fill) {}

  T& at(int y, int x) { return data[static_cast<size_t>(y) * width + x]; }
  const T& at(int y, int x) const {
    return data[static_cast<size_t>(y) * width + x];
  }

  size_t size() const { return data.size(); }
  bool same_size(const Grid& o) const {
    return width == o.width && height == o.height;
  }
};

using Grid8 = Grid<uint8_t>;

// Packed 8-bit RGB, row major.
struct TextureImage {
  int width = 0;
  int height = 0;
  std::vector<uint8_t> data;

  TextureImage() = default;
  TextureImage(int w, int h)
      : width(w), height(h), data(static_cast<size_t>(w) * h * 3, 0) {}

  uint8_t* px(int y, int x) {
    return data.data() + 3 * (static_cast<size_t>(y) * width + x);
  }
  const uint8_t* px(int y, int x) const {
    return data.data() + 3 * (static_cast<size_t>(y) * width + x);
  }

  size_t pixel_count() const { return static_cast<size_t>(width) * height; }
  bool same_size(const TextureImage& o) const {
    return width == o.width && height == o.height;
  }
};

}  // namespace mvdc
