#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "igaff/imagecore/image.hpp"

namespace igaff {

enum class IoErrorKind {
  kOpen,
  kMalformedHeader,
  kDimensionMismatch,
  kTruncated,
  kUnsupported,
};

const char* to_string(IoErrorKind kind) noexcept;

class IoError : public std::runtime_error {
 public:
  IoError(IoErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}
  IoErrorKind kind() const noexcept { return kind_; }

 private:
  IoErrorKind kind_;
};

/// Raw tensor as stored in an IGT container.
struct Tensor {
  std::vector<std::uint32_t> dims;
  std::vector<float> data;

  std::size_t numel() const noexcept;
};

// IGT container: "IGT1", u32 LE rank, rank x u32 LE dims, float32 LE payload.
std::vector<std::uint8_t> encode_igt(std::span<const std::uint32_t> dims, std::span<const float> data);
Tensor decode_igt(std::span<const std::uint8_t> bytes);

void write_igt(const std::filesystem::path& path, const Tensor& t);
Tensor read_igt(const std::filesystem::path& path);

// Binary P6 only, maxval 255. Bytes map to v/255; saving rounds v*255.
std::vector<std::uint8_t> encode_ppm(const Image& img);
Image decode_ppm(std::span<const std::uint8_t> bytes);

/// Format chosen by extension: ".igt" or ".ppm". IGT images are rank 3
/// [C,H,W]; a rank-4 tensor with leading dimension 1 is also accepted.
Image load_image(const std::filesystem::path& path);
void save_image(const Image& img, const std::filesystem::path& path);

/// Batches are rank-4 IGT tensors [B,C,H,W].
Batch load_batch(const std::filesystem::path& path);
void save_batch(const Batch& batch, const std::filesystem::path& path);

std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path);
void write_file_bytes(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);

}  // namespace igaff
