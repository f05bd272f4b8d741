#pragma once

#include <chrono>
#include <cstdint>
#include <memory>
#include <mutex>
#include <string>

#include "igaff/models/victim.hpp"
#include "igaff/remote/protocol.hpp"
#include "igaff/remote/transport.hpp"

namespace igaff::remote {

inline constexpr const char* kEndpointEnvVar = "IGAFF_MODEL_ENDPOINT";
inline constexpr std::chrono::milliseconds kDefaultTimeout{30000};

/// Victim model reached over the JSON-lines protocol.
///
/// One request is outstanding at a time; concurrent predict() calls are
/// serialized on an internal mutex.
class RemoteModel final : public VictimModel {
 public:
  /// Sends hello and reads meta.
  static std::unique_ptr<RemoteModel> handshake(std::unique_ptr<Transport> transport,
                                                std::chrono::milliseconds timeout = kDefaultTimeout);
  static std::unique_ptr<RemoteModel> connect(const std::string& endpoint,
                                              std::chrono::milliseconds timeout = kDefaultTimeout);

  int num_classes() const override { return meta_.num_classes; }
  Shape input_shape() const override { return meta_.input; }
  LogitsBatch predict(const Batch& batch) const override;

  const ModelMeta& meta() const noexcept { return meta_; }

 private:
  RemoteModel(std::unique_ptr<Transport> transport, ModelMeta meta, std::chrono::milliseconds timeout)
      : transport_(std::move(transport)), meta_(meta), timeout_(timeout) {}

  mutable std::mutex mu_;
  std::unique_ptr<Transport> transport_;
  ModelMeta meta_;
  std::chrono::milliseconds timeout_;
  mutable std::uint64_t next_id_ = 1;
};

/// Endpoint from the environment, or empty.
std::string default_endpoint();

}  // namespace igaff::remote
