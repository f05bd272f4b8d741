#include "igaff/imagecore/transform.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace igaff {

namespace {

constexpr double kDegToRad = std::numbers::pi / 180.0;

inline double lerp(double a, double b, double t) noexcept { return a + t * (b - a); }

inline float clamp01(double v) noexcept {
  return static_cast<float>(std::clamp(v, 0.0, 1.0));
}

// Zero outside the plane.
inline double fetch(const float* plane, int h, int w, int y, int x) noexcept {
  if (x < 0 || y < 0 || x >= w || y >= h) return 0.0;
  return plane[static_cast<std::size_t>(y) * w + x];
}

}  // namespace

AffineParams sample_affine(RngStream& rng) {
  using namespace affine_range;
  AffineParams p;
  p.theta = rng.uniform(-kThetaDeg, kThetaDeg);
  p.tau_x = rng.uniform(-kTranslate, kTranslate);
  p.tau_y = rng.uniform(-kTranslate, kTranslate);
  p.scale = rng.uniform(kScaleLo, kScaleHi);
  p.shear = rng.uniform(-kShearDeg, kShearDeg);
  return p;
}

Affine2x3 forward_matrix(const AffineParams& p, int height, int width) {
  const double cx = (width - 1) / 2.0;
  const double cy = (height - 1) / 2.0;
  const double c = std::cos(p.theta * kDegToRad);
  const double s = std::sin(p.theta * kDegToRad);
  const double k = std::tan(p.shear * kDegToRad);

  // L = R * Shear_x * Scale
  const double l00 = c * p.scale;
  const double l01 = (c * k - s) * p.scale;
  const double l10 = s * p.scale;
  const double l11 = (s * k + c) * p.scale;

  // x' = L (x + t - center) + center
  const double ox = p.tau_x * width - cx;
  const double oy = p.tau_y * height - cy;
  return {l00, l01, l00 * ox + l01 * oy + cx, l10, l11, l10 * ox + l11 * oy + cy};
}

Affine2x3 invert(const Affine2x3& m) {
  const double det = m[0] * m[4] - m[1] * m[3];
  if (det == 0.0 || !std::isfinite(det)) throw std::invalid_argument("affine map is singular");
  const double i00 = m[4] / det;
  const double i01 = -m[1] / det;
  const double i10 = -m[3] / det;
  const double i11 = m[0] / det;
  return {i00, i01, -(i00 * m[2] + i01 * m[5]), i10, i11, -(i10 * m[2] + i11 * m[5])};
}

Image apply_affine(const Image& img, const AffineParams& p) {
  for (double v : {p.theta, p.tau_x, p.tau_y, p.scale, p.shear})
    if (!std::isfinite(v)) throw std::invalid_argument("apply_affine: non-finite parameter");
  if (p.scale == 0.0) throw std::invalid_argument("apply_affine: zero scale");

  const int h = img.height();
  const int w = img.width();
  const double cx = (w - 1) / 2.0;
  const double cy = (h - 1) / 2.0;
  const double tx = p.tau_x * w;
  const double ty = p.tau_y * h;

  // Inverse of x' = L (x + t - center) + center, written out so the identity
  // case stays exact: x = L^-1 (x' - center) + center - t.
  const Affine2x3 fwd = forward_matrix(p, h, w);
  const double det = fwd[0] * fwd[4] - fwd[1] * fwd[3];
  if (det == 0.0 || !std::isfinite(det)) throw std::invalid_argument("apply_affine: singular map");
  const double i00 = fwd[4] / det;
  const double i01 = -fwd[1] / det;
  const double i10 = -fwd[3] / det;
  const double i11 = fwd[0] / det;

  Image out(img.shape(), 0.0f);
  const auto src = img.data();
  auto dst = out.data();
  const std::size_t plane = static_cast<std::size_t>(h) * w;

  for (int y = 0; y < h; ++y) {
    const double dy = y - cy;
    for (int x = 0; x < w; ++x) {
      const double dx = x - cx;
      const double sx = i00 * dx + i01 * dy + cx - tx;
      const double sy = i10 * dx + i11 * dy + cy - ty;
      const double fx0 = std::floor(sx);
      const double fy0 = std::floor(sy);
      if (fx0 < -1.0 || fy0 < -1.0 || fx0 > w || fy0 > h) continue;
      const int x0 = static_cast<int>(fx0);
      const int y0 = static_cast<int>(fy0);
      const double fx = sx - fx0;
      const double fy = sy - fy0;
      for (int ch = 0; ch < img.channels(); ++ch) {
        const float* pl = src.data() + ch * plane;
        const double top = lerp(fetch(pl, h, w, y0, x0), fetch(pl, h, w, y0, x0 + 1), fx);
        const double bot = lerp(fetch(pl, h, w, y0 + 1, x0), fetch(pl, h, w, y0 + 1, x0 + 1), fx);
        dst[ch * plane + static_cast<std::size_t>(y) * w + x] = clamp01(lerp(top, bot, fy));
      }
    }
  }
  return out;
}

Image add_noise(const Image& img, double epsilon, RngStream& rng) {
  if (!(epsilon >= 0.0 && epsilon <= 1.0))
    throw std::invalid_argument("add_noise: epsilon must lie in [0,1]");
  Image out = img;
  if (epsilon == 0.0) return out;
  for (float& v : out.data()) v = clamp01(static_cast<double>(v) + epsilon * rng.uniform01());
  return out;
}

Image resize_bilinear(const Image& img, int out_h, int out_w) {
  if (out_h < 1 || out_w < 1) throw std::invalid_argument("resize_bilinear: output size must be positive");
  const int in_h = img.height();
  const int in_w = img.width();
  Image out(Shape{img.channels(), out_h, out_w});

  auto source_coord = [](int d, int in, int outn) {
    const double s = (d + 0.5) * static_cast<double>(in) / outn - 0.5;
    return std::clamp(s, 0.0, static_cast<double>(in - 1));
  };

  const auto src = img.data();
  auto dst = out.data();
  const std::size_t in_plane = static_cast<std::size_t>(in_h) * in_w;
  const std::size_t out_plane = static_cast<std::size_t>(out_h) * out_w;
  for (int y = 0; y < out_h; ++y) {
    const double sy = source_coord(y, in_h, out_h);
    const int y0 = static_cast<int>(std::floor(sy));
    const int y1 = std::min(y0 + 1, in_h - 1);
    const double fy = sy - y0;
    for (int x = 0; x < out_w; ++x) {
      const double sx = source_coord(x, in_w, out_w);
      const int x0 = static_cast<int>(std::floor(sx));
      const int x1 = std::min(x0 + 1, in_w - 1);
      const double fx = sx - x0;
      for (int ch = 0; ch < img.channels(); ++ch) {
        const float* pl = src.data() + ch * in_plane;
        const double top = lerp(pl[y0 * in_w + x0], pl[y0 * in_w + x1], fx);
        const double bot = lerp(pl[y1 * in_w + x0], pl[y1 * in_w + x1], fx);
        dst[ch * out_plane + static_cast<std::size_t>(y) * out_w + x] = clamp01(lerp(top, bot, fy));
      }
    }
  }
  return out;
}

Image resize_to(const Image& img, const Shape& target) {
  if (img.channels() != target.channels)
    throw std::invalid_argument("resize_to: channel count " + std::to_string(img.channels()) +
                                " cannot be resized to " + target.str());
  if (img.shape() == target) return img;
  return resize_bilinear(img, target.height, target.width);
}

}  // namespace igaff
