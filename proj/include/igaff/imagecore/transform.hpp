#pragma once

#include <array>

#include "igaff/imagecore/image.hpp"
#include "igaff/imagecore/rng.hpp"

namespace igaff {

/// One affine perturbation. Angles in degrees; translation as a fraction of
/// the image width/height.
struct AffineParams {
  double theta = 0.0;
  double tau_x = 0.0;
  double tau_y = 0.0;
  double scale = 1.0;
  double shear = 0.0;

  static AffineParams identity() noexcept { return {}; }
  bool operator==(const AffineParams&) const = default;
};

/// Sampling ranges for sample_affine.
namespace affine_range {
inline constexpr double kThetaDeg = 3.0;
inline constexpr double kTranslate = 0.05;
inline constexpr double kScaleLo = 0.95;
inline constexpr double kScaleHi = 1.05;
inline constexpr double kShearDeg = 1.0;
}  // namespace affine_range

/// Draws exactly five uniforms from `rng`, in the order theta, tau_x, tau_y,
/// scale, shear.
AffineParams sample_affine(RngStream& rng);

/// Row-major 2x3 matrix mapping source pixel coordinates to destination
/// coordinates:
///   T(center) * R(theta) * Shear_x(phi) * S(s) * T(-center) * T(tau_x*W, tau_y*H)
/// with center ((W-1)/2, (H-1)/2).
using Affine2x3 = std::array<double, 6>;
Affine2x3 forward_matrix(const AffineParams& p, int height, int width);
Affine2x3 invert(const Affine2x3& m);

/// Warps every channel with a single composed affine map using inverse
/// mapping, bilinear interpolation and zero padding. Throws
/// std::invalid_argument on non-finite parameters or a singular map.
Image apply_affine(const Image& img, const AffineParams& p);

/// clamp(img + delta, 0, 1) with delta ~ U(0, epsilon) drawn per element in
/// storage order. Throws std::invalid_argument if epsilon is outside [0, 1].
/// epsilon == 0 returns a copy without consuming draws.
Image add_noise(const Image& img, double epsilon, RngStream& rng);

/// Bilinear resampling with half-pixel centers and edge clamping.
Image resize_bilinear(const Image& img, int out_h, int out_w);

/// Same as resize_bilinear but leaves the image untouched if already sized.
Image resize_to(const Image& img, const Shape& target);

}  // namespace igaff
