#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace igaff::remote {

/// RFC 4648 base64 with '=' padding.
std::string base64_encode(std::span<const std::uint8_t> bytes);
/// Throws std::invalid_argument on characters outside the alphabet or bad padding.
std::vector<std::uint8_t> base64_decode(std::string_view text);

std::vector<std::uint8_t> pack_f32le(std::span<const float> values);
/// Throws std::invalid_argument if the byte count is not a multiple of 4.
std::vector<float> unpack_f32le(std::span<const std::uint8_t> bytes);

}  // namespace igaff::remote
