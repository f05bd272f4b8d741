#include "igaff/imagecore/io.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>

namespace igaff {

namespace {

constexpr char kIgtMagic[4] = {'I', 'G', 'T', '1'};
constexpr std::uint32_t kMaxRank = 8;

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

std::uint32_t get_u32(std::span<const std::uint8_t> bytes, std::size_t off) {
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(bytes[off + i]) << (8 * i);
  return v;
}

std::string lower_ext(const std::filesystem::path& path) {
  std::string ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
  return ext;
}

Image image_from_tensor(Tensor t, const std::string& origin) {
  if (t.dims.size() == 4 && t.dims[0] == 1) t.dims.erase(t.dims.begin());
  if (t.dims.size() != 3)
    throw IoError(IoErrorKind::kDimensionMismatch,
                  origin + ": expected rank-3 [C,H,W] tensor, got rank " + std::to_string(t.dims.size()));
  Shape shape{static_cast<int>(t.dims[0]), static_cast<int>(t.dims[1]), static_cast<int>(t.dims[2])};
  return Image(shape, std::move(t.data));
}

// PPM header token reader; skips whitespace and '#' comments.
class PpmHeader {
 public:
  explicit PpmHeader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  std::string token() {
    skip();
    std::string tok;
    while (pos_ < bytes_.size() && !std::isspace(bytes_[pos_])) tok.push_back(static_cast<char>(bytes_[pos_++]));
    if (tok.empty()) throw IoError(IoErrorKind::kMalformedHeader, "ppm: unexpected end of header");
    return tok;
  }

  long number() {
    const std::string tok = token();
    if (!std::all_of(tok.begin(), tok.end(), [](unsigned char c) { return std::isdigit(c); }) || tok.size() > 9)
      throw IoError(IoErrorKind::kMalformedHeader, "ppm: bad number '" + tok + "'");
    return std::stol(tok);
  }

  // Exactly one whitespace byte separates the header from the raster.
  std::size_t raster_offset() {
    if (pos_ >= bytes_.size() || !std::isspace(bytes_[pos_]))
      throw IoError(IoErrorKind::kMalformedHeader, "ppm: missing separator before raster");
    return pos_ + 1;
  }

 private:
  void skip() {
    while (pos_ < bytes_.size()) {
      if (std::isspace(bytes_[pos_])) {
        ++pos_;
      } else if (bytes_[pos_] == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
      } else {
        break;
      }
    }
  }

  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

const char* to_string(IoErrorKind kind) noexcept {
  switch (kind) {
    case IoErrorKind::kOpen: return "open failed";
    case IoErrorKind::kMalformedHeader: return "malformed header";
    case IoErrorKind::kDimensionMismatch: return "dimension mismatch";
    case IoErrorKind::kTruncated: return "truncated payload";
    case IoErrorKind::kUnsupported: return "unsupported format";
  }
  return "unknown";
}

std::size_t Tensor::numel() const noexcept {
  std::size_t n = 1;
  for (auto d : dims) n *= d;
  return n;
}

std::vector<std::uint8_t> encode_igt(std::span<const std::uint32_t> dims, std::span<const float> data) {
  std::size_t n = 1;
  for (auto d : dims) n *= d;
  if (n != data.size())
    throw IoError(IoErrorKind::kDimensionMismatch, "igt: dims imply " + std::to_string(n) + " elements, have " +
                                                       std::to_string(data.size()));
  std::vector<std::uint8_t> out;
  out.reserve(8 + 4 * dims.size() + 4 * data.size());
  out.insert(out.end(), std::begin(kIgtMagic), std::end(kIgtMagic));
  put_u32(out, static_cast<std::uint32_t>(dims.size()));
  for (auto d : dims) put_u32(out, d);
  for (float f : data) put_u32(out, std::bit_cast<std::uint32_t>(f));
  return out;
}

Tensor decode_igt(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 8 || std::memcmp(bytes.data(), kIgtMagic, 4) != 0)
    throw IoError(IoErrorKind::kMalformedHeader, "igt: bad magic");
  const std::uint32_t rank = get_u32(bytes, 4);
  if (rank == 0 || rank > kMaxRank)
    throw IoError(IoErrorKind::kMalformedHeader, "igt: unsupported rank " + std::to_string(rank));
  const std::size_t header = 8 + 4 * static_cast<std::size_t>(rank);
  if (bytes.size() < header) throw IoError(IoErrorKind::kMalformedHeader, "igt: header cut short");

  Tensor t;
  std::size_t n = 1;
  for (std::uint32_t i = 0; i < rank; ++i) {
    const std::uint32_t d = get_u32(bytes, 8 + 4 * i);
    if (d == 0) throw IoError(IoErrorKind::kDimensionMismatch, "igt: zero-length dimension");
    t.dims.push_back(d);
    n *= d;
  }
  const std::size_t payload = bytes.size() - header;
  if (payload < 4 * n)
    throw IoError(IoErrorKind::kTruncated,
                  "igt: expected " + std::to_string(4 * n) + " payload bytes, found " + std::to_string(payload));
  if (payload > 4 * n)
    throw IoError(IoErrorKind::kDimensionMismatch, "igt: " + std::to_string(payload - 4 * n) +
                                                       " trailing bytes beyond declared dims");
  t.data.resize(n);
  for (std::size_t i = 0; i < n; ++i) t.data[i] = std::bit_cast<float>(get_u32(bytes, header + 4 * i));
  return t;
}

void write_igt(const std::filesystem::path& path, const Tensor& t) {
  write_file_bytes(path, encode_igt(t.dims, t.data));
}

Tensor read_igt(const std::filesystem::path& path) { return decode_igt(read_file_bytes(path)); }

std::vector<std::uint8_t> encode_ppm(const Image& img) {
  if (img.channels() != 3)
    throw IoError(IoErrorKind::kUnsupported, "ppm: P6 requires 3 channels, image has " +
                                                 std::to_string(img.channels()));
  const std::string header =
      "P6\n" + std::to_string(img.width()) + " " + std::to_string(img.height()) + "\n255\n";
  std::vector<std::uint8_t> out(header.begin(), header.end());
  out.reserve(out.size() + img.size());
  for (int y = 0; y < img.height(); ++y)
    for (int x = 0; x < img.width(); ++x)
      for (int c = 0; c < 3; ++c) {
        const double v = std::clamp(static_cast<double>(img.at(c, y, x)), 0.0, 1.0);
        out.push_back(static_cast<std::uint8_t>(std::lround(v * 255.0)));
      }
  return out;
}

Image decode_ppm(std::span<const std::uint8_t> bytes) {
  PpmHeader hdr(bytes);
  if (hdr.token() != "P6") throw IoError(IoErrorKind::kMalformedHeader, "ppm: only binary P6 is supported");
  const long w = hdr.number();
  const long h = hdr.number();
  const long maxval = hdr.number();
  if (w < 1 || h < 1) throw IoError(IoErrorKind::kDimensionMismatch, "ppm: zero dimension");
  if (maxval != 255) throw IoError(IoErrorKind::kUnsupported, "ppm: maxval must be 255");
  const std::size_t off = hdr.raster_offset();
  const std::size_t need = static_cast<std::size_t>(w) * h * 3;
  if (bytes.size() - off < need)
    throw IoError(IoErrorKind::kTruncated, "ppm: expected " + std::to_string(need) + " raster bytes, found " +
                                               std::to_string(bytes.size() - off));
  if (bytes.size() - off > need)
    throw IoError(IoErrorKind::kDimensionMismatch, "ppm: raster longer than declared dimensions");

  Image img(Shape{3, static_cast<int>(h), static_cast<int>(w)});
  std::size_t i = off;
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      for (int c = 0; c < 3; ++c) img.at(c, y, x) = static_cast<float>(bytes[i++] / 255.0);
  return img;
}

Image load_image(const std::filesystem::path& path) {
  const std::string ext = lower_ext(path);
  if (ext == ".igt") {
    Image img = image_from_tensor(read_igt(path), path.string());
    img.validate();
    return img;
  }
  if (ext == ".ppm") return decode_ppm(read_file_bytes(path));
  throw IoError(IoErrorKind::kUnsupported, "unknown image extension '" + ext + "'");
}

void save_image(const Image& img, const std::filesystem::path& path) {
  const std::string ext = lower_ext(path);
  if (ext == ".igt") {
    const std::uint32_t dims[3] = {static_cast<std::uint32_t>(img.channels()),
                                   static_cast<std::uint32_t>(img.height()),
                                   static_cast<std::uint32_t>(img.width())};
    write_file_bytes(path, encode_igt(dims, img.data()));
  } else if (ext == ".ppm") {
    write_file_bytes(path, encode_ppm(img));
  } else {
    throw IoError(IoErrorKind::kUnsupported, "unknown image extension '" + ext + "'");
  }
}

Batch load_batch(const std::filesystem::path& path) {
  Tensor t = read_igt(path);
  if (t.dims.size() != 4)
    throw IoError(IoErrorKind::kDimensionMismatch, "batch: expected rank-4 [B,C,H,W] tensor");
  const Shape shape{static_cast<int>(t.dims[1]), static_cast<int>(t.dims[2]), static_cast<int>(t.dims[3])};
  std::vector<Image> images;
  const std::size_t n = shape.numel();
  for (std::uint32_t b = 0; b < t.dims[0]; ++b) {
    auto first = t.data.begin() + static_cast<std::ptrdiff_t>(b * n);
    images.emplace_back(shape, std::vector<float>(first, first + static_cast<std::ptrdiff_t>(n)));
  }
  return Batch(std::move(images));
}

void save_batch(const Batch& batch, const std::filesystem::path& path) {
  const Shape& s = batch.shape();
  const std::uint32_t dims[4] = {static_cast<std::uint32_t>(batch.size()), static_cast<std::uint32_t>(s.channels),
                                 static_cast<std::uint32_t>(s.height), static_cast<std::uint32_t>(s.width)};
  std::vector<float> flat;
  flat.reserve(batch.size() * s.numel());
  for (const auto& img : batch) flat.insert(flat.end(), img.data().begin(), img.data().end());
  write_file_bytes(path, encode_igt(dims, flat));
}

std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(IoErrorKind::kOpen, "cannot open '" + path.string() + "'");
  return std::vector<std::uint8_t>(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

void write_file_bytes(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError(IoErrorKind::kOpen, "cannot write '" + path.string() + "'");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError(IoErrorKind::kOpen, "short write to '" + path.string() + "'");
}

}  // namespace igaff
