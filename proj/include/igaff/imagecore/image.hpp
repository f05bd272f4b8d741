#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace igaff {

/// Channel/height/width triple. Ordering follows the storage layout.
struct Shape {
  int channels = 0;
  int height = 0;
  int width = 0;

  std::size_t numel() const noexcept {
    return static_cast<std::size_t>(channels) * static_cast<std::size_t>(height) *
           static_cast<std::size_t>(width);
  }
  bool operator==(const Shape&) const = default;
  std::string str() const;
};

/// Dense C x H x W float image, row-major with channel planes outermost.
/// Public operations keep every element finite and inside [0, 1].
class Image {
 public:
  Image() = default;
  Image(Shape shape, float fill = 0.0f);
  Image(Shape shape, std::vector<float> data);

  const Shape& shape() const noexcept { return shape_; }
  int channels() const noexcept { return shape_.channels; }
  int height() const noexcept { return shape_.height; }
  int width() const noexcept { return shape_.width; }
  std::size_t size() const noexcept { return data_.size(); }

  std::span<float> data() noexcept { return data_; }
  std::span<const float> data() const noexcept { return data_; }

  float& at(int c, int y, int x) noexcept { return data_[index(c, y, x)]; }
  float at(int c, int y, int x) const noexcept { return data_[index(c, y, x)]; }

  std::span<float> row(int c, int y) noexcept {
    return std::span<float>(data_).subspan(index(c, y, 0), static_cast<std::size_t>(shape_.width));
  }

  double mean() const noexcept;

  /// Throws std::domain_error if any element is non-finite or outside [0, 1].
  void validate() const;

  bool operator==(const Image&) const = default;

 private:
  std::size_t index(int c, int y, int x) const noexcept {
    return (static_cast<std::size_t>(c) * shape_.height + static_cast<std::size_t>(y)) * shape_.width +
           static_cast<std::size_t>(x);
  }

  Shape shape_{};
  std::vector<float> data_;
};

/// Ordered, shape-homogeneous, non-empty group of images.
class Batch {
 public:
  Batch() = default;
  explicit Batch(std::vector<Image> images);

  std::size_t size() const noexcept { return images_.size(); }
  bool empty() const noexcept { return images_.empty(); }
  const Shape& shape() const;

  Image& operator[](std::size_t i) { return images_[i]; }
  const Image& operator[](std::size_t i) const { return images_[i]; }

  auto begin() noexcept { return images_.begin(); }
  auto end() noexcept { return images_.end(); }
  auto begin() const noexcept { return images_.begin(); }
  auto end() const noexcept { return images_.end(); }

  const std::vector<Image>& images() const noexcept { return images_; }

  bool operator==(const Batch&) const = default;

 private:
  std::vector<Image> images_;
};

/// Bit-level equality (distinguishes -0.0 from 0.0, compares NaN payloads).
bool bitwise_equal(const Image& a, const Image& b) noexcept;
bool bitwise_equal(const Batch& a, const Batch& b) noexcept;

}  // namespace igaff
