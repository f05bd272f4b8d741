#include "igaff/remote/remote_model.hpp"

#include <cstdlib>

namespace igaff::remote {

std::unique_ptr<RemoteModel> RemoteModel::handshake(std::unique_ptr<Transport> transport,
                                                    std::chrono::milliseconds timeout) {
  transport->write_line(hello_frame());
  const ModelMeta meta = parse_meta(transport->read_line(timeout));
  return std::unique_ptr<RemoteModel>(new RemoteModel(std::move(transport), meta, timeout));
}

std::unique_ptr<RemoteModel> RemoteModel::connect(const std::string& endpoint, std::chrono::milliseconds timeout) {
  return handshake(open_endpoint(endpoint, timeout), timeout);
}

LogitsBatch RemoteModel::predict(const Batch& batch) const {
  check_input(batch);
  std::lock_guard lock(mu_);
  const std::uint64_t id = next_id_++;
  transport_->write_line(predict_frame(id, batch));
  return parse_logits(transport_->read_line(timeout_), id, batch.size(),
                      static_cast<std::size_t>(meta_.num_classes));
}

std::string default_endpoint() {
  const char* env = std::getenv(kEndpointEnvVar);
  return env ? std::string(env) : std::string();
}

}  // namespace igaff::remote
