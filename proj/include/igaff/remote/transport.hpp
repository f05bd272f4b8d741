#pragma once

#include <chrono>
#include <memory>
#include <string>
#include <string_view>
#include <sys/types.h>

namespace igaff::remote {

/// Newline-framed byte stream.
class Transport {
 public:
  virtual ~Transport() = default;
  /// Appends '\n'.
  virtual void write_line(std::string_view line) = 0;
  /// Returns the next line without its terminator. Throws ProtocolError
  /// (kTimeout or kClosed).
  virtual std::string read_line(std::chrono::milliseconds timeout) = 0;
};

/// Reads from one descriptor and writes to another; owns both.
class FdTransport : public Transport {
 public:
  FdTransport(int read_fd, int write_fd);
  ~FdTransport() override;
  FdTransport(const FdTransport&) = delete;
  FdTransport& operator=(const FdTransport&) = delete;

  void write_line(std::string_view line) override;
  std::string read_line(std::chrono::milliseconds timeout) override;

 private:
  int read_fd_;
  int write_fd_;
  std::string buffer_;
};

/// Child process speaking the protocol on its stdin/stdout.
class ProcessTransport final : public FdTransport {
 public:
  ProcessTransport(int read_fd, int write_fd, pid_t pid) : FdTransport(read_fd, write_fd), pid_(pid) {}
  ~ProcessTransport() override;

 private:
  pid_t pid_;
};

std::unique_ptr<Transport> connect_tcp(const std::string& host, int port, std::chrono::milliseconds timeout);
/// Runs `command` through /bin/sh with pipes attached to its stdin/stdout.
std::unique_ptr<Transport> spawn_stdio(const std::string& command);

/// Endpoint forms: "tcp://host:port", "host:port", "stdio:<shell command>".
std::unique_ptr<Transport> open_endpoint(const std::string& endpoint, std::chrono::milliseconds timeout);

}  // namespace igaff::remote
