#include "igaff/imagecore/image.hpp"

#include <cmath>
#include <cstring>

namespace igaff {

std::string Shape::str() const {
  return std::to_string(channels) + "x" + std::to_string(height) + "x" + std::to_string(width);
}

Image::Image(Shape shape, float fill) : shape_(shape) {
  if (shape.channels < 1 || shape.height < 1 || shape.width < 1)
    throw std::invalid_argument("Image: dimensions must be positive, got " + shape.str());
  data_.assign(shape.numel(), fill);
}

Image::Image(Shape shape, std::vector<float> data) : shape_(shape), data_(std::move(data)) {
  if (shape.channels < 1 || shape.height < 1 || shape.width < 1)
    throw std::invalid_argument("Image: dimensions must be positive, got " + shape.str());
  if (data_.size() != shape.numel())
    throw std::invalid_argument("Image: data length " + std::to_string(data_.size()) + " does not match " +
                                shape.str());
}

double Image::mean() const noexcept {
  if (data_.empty()) return 0.0;
  double acc = 0.0;
  for (float v : data_) acc += v;
  return acc / static_cast<double>(data_.size());
}

void Image::validate() const {
  for (std::size_t i = 0; i < data_.size(); ++i) {
    const float v = data_[i];
    if (!std::isfinite(v) || v < 0.0f || v > 1.0f)
      throw std::domain_error("Image: element " + std::to_string(i) + " outside [0,1]");
  }
}

Batch::Batch(std::vector<Image> images) : images_(std::move(images)) {
  if (images_.empty()) throw std::invalid_argument("Batch: must contain at least one image");
  for (const auto& img : images_) {
    if (img.shape() != images_.front().shape())
      throw std::invalid_argument("Batch: mixed shapes " + img.shape().str() + " and " +
                                  images_.front().shape().str());
  }
}

const Shape& Batch::shape() const {
  if (images_.empty()) throw std::logic_error("Batch: empty");
  return images_.front().shape();
}

bool bitwise_equal(const Image& a, const Image& b) noexcept {
  if (a.shape() != b.shape()) return false;
  return std::memcmp(a.data().data(), b.data().data(), a.size() * sizeof(float)) == 0;
}

bool bitwise_equal(const Batch& a, const Batch& b) noexcept {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (!bitwise_equal(a[i], b[i])) return false;
  return true;
}

}  // namespace igaff
