#include "igaff/remote/transport.hpp"

#include <arpa/inet.h>
#include <cerrno>
#include <csignal>
#include <cstring>
#include <fcntl.h>
#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <poll.h>
#include <sys/socket.h>
#include <sys/wait.h>
#include <unistd.h>

#include "igaff/remote/protocol.hpp"

namespace igaff::remote {

namespace {

void ignore_sigpipe() {
  static const bool once = [] {
    std::signal(SIGPIPE, SIG_IGN);
    return true;
  }();
  (void)once;
}

std::string errno_text() { return std::strerror(errno); }

}  // namespace

FdTransport::FdTransport(int read_fd, int write_fd) : read_fd_(read_fd), write_fd_(write_fd) { ignore_sigpipe(); }

FdTransport::~FdTransport() {
  if (write_fd_ >= 0 && write_fd_ != read_fd_) ::close(write_fd_);
  if (read_fd_ >= 0) ::close(read_fd_);
}

void FdTransport::write_line(std::string_view line) {
  std::string frame(line);
  frame.push_back('\n');
  std::size_t off = 0;
  while (off < frame.size()) {
    const ssize_t n = ::write(write_fd_, frame.data() + off, frame.size() - off);
    if (n < 0) {
      if (errno == EINTR) continue;
      throw ProtocolError(ProtocolErrorKind::kClosed, "write failed: " + errno_text());
    }
    off += static_cast<std::size_t>(n);
  }
}

std::string FdTransport::read_line(std::chrono::milliseconds timeout) {
  using clock = std::chrono::steady_clock;
  const auto deadline = clock::now() + timeout;
  for (;;) {
    if (const auto nl = buffer_.find('\n'); nl != std::string::npos) {
      std::string line = buffer_.substr(0, nl);
      buffer_.erase(0, nl + 1);
      if (!line.empty() && line.back() == '\r') line.pop_back();
      return line;
    }
    const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - clock::now());
    if (left.count() <= 0) throw ProtocolError(ProtocolErrorKind::kTimeout, "no reply within deadline");
    pollfd pfd{read_fd_, POLLIN, 0};
    const int rc = ::poll(&pfd, 1, static_cast<int>(left.count()));
    if (rc < 0) {
      if (errno == EINTR) continue;
      throw ProtocolError(ProtocolErrorKind::kClosed, "poll failed: " + errno_text());
    }
    if (rc == 0) throw ProtocolError(ProtocolErrorKind::kTimeout, "no reply within deadline");
    char chunk[65536];
    const ssize_t n = ::read(read_fd_, chunk, sizeof chunk);
    if (n < 0) {
      if (errno == EINTR || errno == EAGAIN) continue;
      throw ProtocolError(ProtocolErrorKind::kClosed, "read failed: " + errno_text());
    }
    if (n == 0)
      throw ProtocolError(ProtocolErrorKind::kClosed,
                          buffer_.empty() ? "peer closed the connection" : "peer closed mid-response");
    buffer_.append(chunk, static_cast<std::size_t>(n));
  }
}

ProcessTransport::~ProcessTransport() {
  // Terminate and reap the child.
  if (pid_ > 0) {
    ::kill(pid_, SIGTERM);
    int status = 0;
    ::waitpid(pid_, &status, 0);
  }
}

std::unique_ptr<Transport> connect_tcp(const std::string& host, int port, std::chrono::milliseconds timeout) {
  addrinfo hints{};
  hints.ai_family = AF_UNSPEC;
  hints.ai_socktype = SOCK_STREAM;
  addrinfo* res = nullptr;
  const std::string service = std::to_string(port);
  if (const int rc = ::getaddrinfo(host.c_str(), service.c_str(), &hints, &res); rc != 0)
    throw ProtocolError(ProtocolErrorKind::kConnect, host + ":" + service + ": " + ::gai_strerror(rc));

  std::string last_error = "no addresses";
  for (addrinfo* ai = res; ai != nullptr; ai = ai->ai_next) {
    const int fd = ::socket(ai->ai_family, ai->ai_socktype | SOCK_CLOEXEC, ai->ai_protocol);
    if (fd < 0) {
      last_error = errno_text();
      continue;
    }
    // Non-blocking connect so the timeout applies to the handshake too.
    const int flags = ::fcntl(fd, F_GETFL, 0);
    ::fcntl(fd, F_SETFL, flags | O_NONBLOCK);
    int rc = ::connect(fd, ai->ai_addr, ai->ai_addrlen);
    if (rc < 0 && errno == EINPROGRESS) {
      pollfd pfd{fd, POLLOUT, 0};
      rc = ::poll(&pfd, 1, static_cast<int>(timeout.count()));
      if (rc == 1) {
        int err = 0;
        socklen_t len = sizeof err;
        ::getsockopt(fd, SOL_SOCKET, SO_ERROR, &err, &len);
        rc = err == 0 ? 0 : -1;
        errno = err;
      } else {
        errno = rc == 0 ? ETIMEDOUT : errno;
        rc = -1;
      }
    }
    if (rc == 0) {
      ::fcntl(fd, F_SETFL, flags);
      int one = 1;
      ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
      ::freeaddrinfo(res);
      return std::make_unique<FdTransport>(fd, fd);
    }
    last_error = errno_text();
    ::close(fd);
  }
  ::freeaddrinfo(res);
  throw ProtocolError(ProtocolErrorKind::kConnect, host + ":" + service + ": " + last_error);
}

std::unique_ptr<Transport> spawn_stdio(const std::string& command) {
  int to_child[2];
  int from_child[2];
  if (::pipe2(to_child, O_CLOEXEC) != 0) throw ProtocolError(ProtocolErrorKind::kConnect, "pipe: " + errno_text());
  if (::pipe2(from_child, O_CLOEXEC) != 0) {
    ::close(to_child[0]);
    ::close(to_child[1]);
    throw ProtocolError(ProtocolErrorKind::kConnect, "pipe: " + errno_text());
  }
  const pid_t pid = ::fork();
  if (pid < 0) {
    for (int fd : {to_child[0], to_child[1], from_child[0], from_child[1]}) ::close(fd);
    throw ProtocolError(ProtocolErrorKind::kConnect, "fork: " + errno_text());
  }
  if (pid == 0) {
    ::dup2(to_child[0], STDIN_FILENO);
    ::dup2(from_child[1], STDOUT_FILENO);
    ::execl("/bin/sh", "sh", "-c", command.c_str(), static_cast<char*>(nullptr));
    ::_exit(127);
  }
  ::close(to_child[0]);
  ::close(from_child[1]);
  return std::make_unique<ProcessTransport>(from_child[0], to_child[1], pid);
}

std::unique_ptr<Transport> open_endpoint(const std::string& endpoint, std::chrono::milliseconds timeout) {
  if (endpoint.empty()) throw ProtocolError(ProtocolErrorKind::kConnect, "empty endpoint");
  if (endpoint.rfind("stdio:", 0) == 0) return spawn_stdio(endpoint.substr(6));
  std::string addr = endpoint;
  if (addr.rfind("tcp://", 0) == 0) addr = addr.substr(6);
  const auto colon = addr.rfind(':');
  if (colon == std::string::npos || colon + 1 == addr.size())
    throw ProtocolError(ProtocolErrorKind::kConnect, "endpoint '" + endpoint + "' lacks a port");
  std::string host = addr.substr(0, colon);
  if (host.size() >= 2 && host.front() == '[' && host.back() == ']') host = host.substr(1, host.size() - 2);
  int port = 0;
  try {
    port = std::stoi(addr.substr(colon + 1));
  } catch (const std::exception&) {
    throw ProtocolError(ProtocolErrorKind::kConnect, "endpoint '" + endpoint + "' has a bad port");
  }
  if (port <= 0 || port > 65535) throw ProtocolError(ProtocolErrorKind::kConnect, "port out of range");
  return connect_tcp(host.empty() ? "127.0.0.1" : host, port, timeout);
}

}  // namespace igaff::remote
