#include "igaff/remote/protocol.hpp"

#include <cmath>

#include "igaff/remote/codec.hpp"
#include "json.hpp"

namespace igaff::remote {

namespace {

using ordered_json = nlohmann::ordered_json;

nlohmann::json parse_frame(std::string_view line) {
  try {
    nlohmann::json j = nlohmann::json::parse(line);
    if (!j.is_object()) throw ProtocolError(ProtocolErrorKind::kMalformed, "frame is not a JSON object");
    return j;
  } catch (const nlohmann::json::exception& e) {
    throw ProtocolError(ProtocolErrorKind::kMalformed, std::string("unparseable frame: ") + e.what());
  }
}

std::string op_of(const nlohmann::json& j) {
  const auto it = j.find("op");
  if (it == j.end() || !it->is_string()) throw ProtocolError(ProtocolErrorKind::kMalformed, "frame has no op");
  return it->get<std::string>();
}

std::vector<std::uint64_t> shape_of(const nlohmann::json& j) {
  const auto it = j.find("shape");
  if (it == j.end() || !it->is_array()) throw ProtocolError(ProtocolErrorKind::kMalformed, "frame has no shape");
  std::vector<std::uint64_t> dims;
  for (const auto& d : *it) {
    if (!d.is_number_unsigned()) throw ProtocolError(ProtocolErrorKind::kMalformed, "shape entries must be unsigned");
    dims.push_back(d.get<std::uint64_t>());
  }
  return dims;
}

std::vector<float> data_of(const nlohmann::json& j) {
  const auto it = j.find("data");
  if (it == j.end() || !it->is_string()) throw ProtocolError(ProtocolErrorKind::kMalformed, "frame has no data");
  try {
    return unpack_f32le(base64_decode(it->get<std::string>()));
  } catch (const std::invalid_argument& e) {
    throw ProtocolError(ProtocolErrorKind::kMalformed, std::string("bad payload: ") + e.what());
  }
}

std::uint64_t id_of(const nlohmann::json& j) {
  const auto it = j.find("id");
  if (it == j.end() || !it->is_number_unsigned()) throw ProtocolError(ProtocolErrorKind::kMalformed, "frame has no id");
  return it->get<std::uint64_t>();
}

[[noreturn]] void throw_server_error(const nlohmann::json& j) {
  throw ProtocolError(ProtocolErrorKind::kServerError, j.value("msg", std::string("(no message)")));
}

}  // namespace

const char* to_string(ProtocolErrorKind kind) noexcept {
  switch (kind) {
    case ProtocolErrorKind::kConnect: return "connect failure";
    case ProtocolErrorKind::kVersionMismatch: return "version mismatch";
    case ProtocolErrorKind::kMalformed: return "malformed frame";
    case ProtocolErrorKind::kTimeout: return "timeout";
    case ProtocolErrorKind::kIdMismatch: return "id mismatch";
    case ProtocolErrorKind::kShapeMismatch: return "shape mismatch";
    case ProtocolErrorKind::kClosed: return "transport closed";
    case ProtocolErrorKind::kServerError: return "server error";
  }
  return "unknown";
}

std::string hello_frame() {
  ordered_json j;
  j["op"] = "hello";
  j["version"] = kProtocolVersion;
  return j.dump();
}

std::string meta_frame(const ModelMeta& meta) {
  ordered_json j;
  j["op"] = "meta";
  j["num_classes"] = meta.num_classes;
  j["input"] = {meta.input.channels, meta.input.height, meta.input.width};
  return j.dump();
}

std::string predict_frame(std::uint64_t id, const Batch& batch) {
  const Shape& s = batch.shape();
  std::vector<float> flat;
  flat.reserve(batch.size() * s.numel());
  for (const auto& img : batch) flat.insert(flat.end(), img.data().begin(), img.data().end());
  ordered_json j;
  j["op"] = "predict";
  j["id"] = id;
  j["shape"] = {batch.size(), s.channels, s.height, s.width};
  j["dtype"] = "f32le";
  j["data"] = base64_encode(pack_f32le(flat));
  return j.dump();
}

std::string logits_frame(std::uint64_t id, const LogitsBatch& logits) {
  ordered_json j;
  j["op"] = "logits";
  j["id"] = id;
  j["shape"] = {logits.rows(), logits.cols()};
  j["data"] = base64_encode(pack_f32le(logits.values()));
  return j.dump();
}

std::string error_frame(std::uint64_t id, std::string_view msg) {
  ordered_json j;
  j["op"] = "error";
  j["id"] = id;
  j["msg"] = msg;
  return j.dump();
}

ModelMeta parse_meta(std::string_view line) {
  const nlohmann::json j = parse_frame(line);
  const std::string op = op_of(j);
  if (op == "error") {
    const std::string msg = j.value("msg", std::string());
    if (msg.find("version") != std::string::npos) throw ProtocolError(ProtocolErrorKind::kVersionMismatch, msg);
    throw_server_error(j);
  }
  if (op != "meta") throw ProtocolError(ProtocolErrorKind::kMalformed, "expected meta, got '" + op + "'");
  if (const auto v = j.find("version"); v != j.end()) {
    if (!v->is_number_integer() || v->get<int>() != kProtocolVersion)
      throw ProtocolError(ProtocolErrorKind::kVersionMismatch, "server speaks version " + v->dump());
  }
  const auto k = j.find("num_classes");
  const auto in = j.find("input");
  if (k == j.end() || !k->is_number_integer() || k->get<int>() < 1)
    throw ProtocolError(ProtocolErrorKind::kMalformed, "meta: num_classes must be a positive integer");
  if (in == j.end() || !in->is_array() || in->size() != 3)
    throw ProtocolError(ProtocolErrorKind::kMalformed, "meta: input must be [C,H,W]");
  ModelMeta meta;
  meta.num_classes = k->get<int>();
  for (const auto& d : *in)
    if (!d.is_number_integer() || d.get<int>() < 1)
      throw ProtocolError(ProtocolErrorKind::kMalformed, "meta: input dims must be positive integers");
  meta.input = Shape{(*in)[0].get<int>(), (*in)[1].get<int>(), (*in)[2].get<int>()};
  return meta;
}

LogitsBatch parse_logits(std::string_view line, std::uint64_t id, std::size_t rows, std::size_t cols) {
  const nlohmann::json j = parse_frame(line);
  const std::string op = op_of(j);
  if (op == "error") throw_server_error(j);
  if (op != "logits") throw ProtocolError(ProtocolErrorKind::kMalformed, "expected logits, got '" + op + "'");
  const std::uint64_t got = id_of(j);
  if (got != id)
    throw ProtocolError(ProtocolErrorKind::kIdMismatch,
                        "sent id " + std::to_string(id) + ", reply carries " + std::to_string(got));
  const auto shape = shape_of(j);
  if (shape.size() != 2 || shape[0] != rows || shape[1] != cols)
    throw ProtocolError(ProtocolErrorKind::kShapeMismatch, "expected logits [" + std::to_string(rows) + "," +
                                                               std::to_string(cols) + "]");
  std::vector<float> values = data_of(j);
  if (values.size() != rows * cols)
    throw ProtocolError(ProtocolErrorKind::kShapeMismatch, "payload holds " + std::to_string(values.size()) +
                                                               " values, shape needs " +
                                                               std::to_string(rows * cols));
  for (float v : values)
    if (!std::isfinite(v)) throw ProtocolError(ProtocolErrorKind::kMalformed, "non-finite logit");
  return LogitsBatch(rows, cols, std::move(values));
}

PredictRequest parse_predict(std::string_view line) {
  const nlohmann::json j = parse_frame(line);
  if (op_of(j) != "predict") throw ProtocolError(ProtocolErrorKind::kMalformed, "expected predict");
  PredictRequest req;
  req.id = id_of(j);
  if (j.value("dtype", std::string()) != "f32le")
    throw ProtocolError(ProtocolErrorKind::kMalformed, "unsupported dtype");
  const auto shape = shape_of(j);
  if (shape.size() != 4 || shape[0] == 0)
    throw ProtocolError(ProtocolErrorKind::kShapeMismatch, "predict shape must be [B,C,H,W]");
  const Shape s{static_cast<int>(shape[1]), static_cast<int>(shape[2]), static_cast<int>(shape[3])};
  std::vector<float> values = data_of(j);
  if (values.size() != shape[0] * s.numel())
    throw ProtocolError(ProtocolErrorKind::kShapeMismatch, "payload size disagrees with shape");
  std::vector<Image> images;
  for (std::size_t b = 0; b < shape[0]; ++b) {
    auto first = values.begin() + static_cast<std::ptrdiff_t>(b * s.numel());
    images.emplace_back(s, std::vector<float>(first, first + static_cast<std::ptrdiff_t>(s.numel())));
  }
  req.batch = Batch(std::move(images));
  return req;
}

}  // namespace igaff::remote
