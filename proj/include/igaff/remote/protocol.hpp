#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include "igaff/imagecore/image.hpp"
#include "igaff/models/victim.hpp"

namespace igaff::remote {

inline constexpr int kProtocolVersion = 1;

enum class ProtocolErrorKind {
  kConnect,
  kVersionMismatch,
  kMalformed,
  kTimeout,
  kIdMismatch,
  kShapeMismatch,
  kClosed,
  kServerError,
};

const char* to_string(ProtocolErrorKind kind) noexcept;

class ProtocolError : public ModelError {
 public:
  ProtocolError(ProtocolErrorKind kind, const std::string& what)
      : ModelError(std::string("protocol ") + to_string(kind) + ": " + what), kind_(kind) {}
  ProtocolErrorKind kind() const noexcept { return kind_; }

 private:
  ProtocolErrorKind kind_;
};

struct ModelMeta {
  int num_classes = 0;
  Shape input;
};

// Frames are single JSON objects terminated by '\n'. Builders return the line
// without the terminator; keys appear in the documented order.

/// {"op":"hello","version":1}
std::string hello_frame();
/// {"op":"meta","num_classes":K,"input":[C,H,W]}
std::string meta_frame(const ModelMeta& meta);
/// {"op":"predict","id":n,"shape":[B,C,H,W],"dtype":"f32le","data":"<base64>"}
std::string predict_frame(std::uint64_t id, const Batch& batch);
/// {"op":"logits","id":n,"shape":[B,K],"data":"<base64>"}
std::string logits_frame(std::uint64_t id, const LogitsBatch& logits);
/// {"op":"error","id":n,"msg":"..."}
std::string error_frame(std::uint64_t id, std::string_view msg);

/// Parses a meta reply. A "version" field other than 1, or an error frame
/// mentioning the version, is reported as kVersionMismatch.
ModelMeta parse_meta(std::string_view line);

/// Parses a logits reply for request `id`, expecting `rows` x `cols` values.
LogitsBatch parse_logits(std::string_view line, std::uint64_t id, std::size_t rows, std::size_t cols);

struct PredictRequest {
  std::uint64_t id = 0;
  Batch batch;
};
/// Server-side decoding of a predict frame.
PredictRequest parse_predict(std::string_view line);

}  // namespace igaff::remote
