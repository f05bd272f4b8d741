#include <unistd.h>

#include <atomic>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <thread>

#include "doctest.h"
#include "loopback.hpp"
#include "igaff/attacks/attacks.hpp"
#include "igaff/imagecore/io.hpp"
#include "igaff/models/builtin.hpp"
#include "igaff/remote/codec.hpp"
#include "igaff/remote/protocol.hpp"
#include "igaff/remote/remote_model.hpp"
#include "igaff/remote/transport.hpp"

using namespace igaff;
using namespace igaff::remote;
using namespace std::chrono_literals;
using loopback::LoopbackServer;
using loopback::serve;
namespace fs = std::filesystem;

namespace {

const fs::path kData = IGAFF_TEST_DATA;

std::vector<std::string> transcript() {
  std::ifstream in(kData / "protocol" / "transcript.jsonl");
  std::vector<std::string> lines;
  for (std::string l; std::getline(in, l);) lines.push_back(l);
  REQUIRE(lines.size() == 4);
  return lines;
}

Batch transcript_batch() {
  std::vector<float> px;
  for (int k = 0; k < 12; ++k) px.push_back(static_cast<float>(k) / 16.0f);
  return Batch({Image({3, 2, 2}, px)});
}

template <class Fn>
ProtocolErrorKind error_kind(Fn&& fn) {
  try {
    fn();
  } catch (const ProtocolError& e) {
    return e.kind();
  }
  FAIL("expected ProtocolError");
  return ProtocolErrorKind::kMalformed;
}

}  // namespace

TEST_CASE("base64 RFC 4648 vectors") {
  auto enc = [](std::string s) { return base64_encode(std::vector<std::uint8_t>(s.begin(), s.end())); };
  CHECK(enc("") == "");
  CHECK(enc("f") == "Zg==");
  CHECK(enc("fo") == "Zm8=");
  CHECK(enc("foo") == "Zm9v");
  CHECK(enc("foob") == "Zm9vYg==");
  CHECK(enc("fooba") == "Zm9vYmE=");
  CHECK(enc("foobar") == "Zm9vYmFy");
  const auto d = base64_decode("Zm9vYmE=");
  CHECK(std::string(d.begin(), d.end()) == "fooba");
  CHECK_THROWS_AS(base64_decode("Zm9"), std::invalid_argument);
  CHECK_THROWS_AS(base64_decode("Zm9*"), std::invalid_argument);
  CHECK_THROWS_AS(base64_decode("Z==="), std::invalid_argument);
}

TEST_CASE("f32le base64 round trip is the identity on finite floats") {
  std::vector<float> v{0.0f, -0.0f, 1.0f, -2.5f, std::numeric_limits<float>::denorm_min(),
                       std::numeric_limits<float>::max(), 1e-30f, 0.1f};
  const auto back = unpack_f32le(base64_decode(base64_encode(pack_f32le(v))));
  REQUIRE(back.size() == v.size());
  CHECK(std::memcmp(back.data(), v.data(), v.size() * sizeof(float)) == 0);
  CHECK_THROWS_AS(unpack_f32le(std::vector<std::uint8_t>(3)), std::invalid_argument);
}

TEST_CASE("frames match the golden transcript byte for byte") {
  const auto lines = transcript();
  CHECK(hello_frame() == lines[0]);
  CHECK(meta_frame({4, {3, 2, 2}}) == lines[1]);
  CHECK(predict_frame(1, transcript_batch()) == lines[2]);
  CHECK(logits_frame(1, LogitsBatch(1, 4, {0.5f, -1.25f, 2.0f, 0.0f})) == lines[3]);
}

TEST_CASE("golden frames parse back") {
  const auto lines = transcript();
  const ModelMeta m = parse_meta(lines[1]);
  CHECK(m.num_classes == 4);
  CHECK(m.input == Shape{3, 2, 2});
  const PredictRequest req = parse_predict(lines[2]);
  CHECK(req.id == 1);
  CHECK(bitwise_equal(req.batch, transcript_batch()));
  const LogitsBatch l = parse_logits(lines[3], 1, 1, 4);
  CHECK(l == LogitsBatch(1, 4, {0.5f, -1.25f, 2.0f, 0.0f}));
}

TEST_CASE("parse_meta negotiation and validation") {
  CHECK(error_kind([] { parse_meta(R"({"op":"meta","version":2,"num_classes":3,"input":[1,2,2]})"); }) ==
        ProtocolErrorKind::kVersionMismatch);
  CHECK(error_kind([] { parse_meta(R"({"op":"error","msg":"unsupported protocol version 1"})"); }) ==
        ProtocolErrorKind::kVersionMismatch);
  CHECK(error_kind([] { parse_meta(R"({"op":"meta","num_classes":3})"); }) == ProtocolErrorKind::kMalformed);
  CHECK(error_kind([] { parse_meta("not json"); }) == ProtocolErrorKind::kMalformed);
  CHECK(error_kind([] { parse_meta(R"({"op":"logits"})"); }) == ProtocolErrorKind::kMalformed);
  const ModelMeta ok = parse_meta(R"({"op":"meta","num_classes":10,"input":[3,32,32]})");
  CHECK(ok.num_classes == 10);
  CHECK(ok.input == Shape{3, 32, 32});
}

TEST_CASE("parse_logits rejects bad replies") {
  const std::string good = logits_frame(7, LogitsBatch(1, 2, {1.0f, 2.0f}));
  CHECK_NOTHROW(parse_logits(good, 7, 1, 2));
  CHECK(error_kind([&] { parse_logits(good, 8, 1, 2); }) == ProtocolErrorKind::kIdMismatch);
  CHECK(error_kind([&] { parse_logits(good, 7, 2, 2); }) == ProtocolErrorKind::kShapeMismatch);
  CHECK(error_kind([&] { parse_logits(good, 7, 1, 3); }) == ProtocolErrorKind::kShapeMismatch);
  // One float where the declared shape needs two; three bytes is not a float at all.
  CHECK(error_kind([] { parse_logits(R"({"op":"logits","id":1,"shape":[1,2],"data":"AAAAAA=="})", 1, 1, 2); }) ==
        ProtocolErrorKind::kShapeMismatch);
  CHECK(error_kind([] { parse_logits(R"({"op":"logits","id":1,"shape":[1,2],"data":"AAAA"})", 1, 1, 2); }) ==
        ProtocolErrorKind::kMalformed);
  CHECK(error_kind([] { parse_logits(R"({"op":"error","id":1,"msg":"boom"})", 1, 1, 2); }) ==
        ProtocolErrorKind::kServerError);
  const float nan = std::nanf("");
  const std::string bad = logits_frame(1, LogitsBatch(1, 1, {nan}));
  CHECK(error_kind([&] { parse_logits(bad, 1, 1, 1); }) == ProtocolErrorKind::kMalformed);
}

TEST_CASE("loopback: handshake and predict return the served logits bit-exactly") {
  const auto lines = transcript();
  std::string seen_hello, seen_predict;
  {
    LoopbackServer server([&](FdTransport& t) {
      seen_hello = t.read_line(5s);
      t.write_line(lines[1]);
      seen_predict = t.read_line(5s);
      t.write_line(lines[3]);
      t.read_line(5s);
    });
    auto model = RemoteModel::connect(server.endpoint(), 5000ms);
    CHECK(model->num_classes() == 4);
    CHECK(model->input_shape() == Shape{3, 2, 2});
    const LogitsBatch l = model->predict(transcript_batch());
    CHECK(l == LogitsBatch(1, 4, {0.5f, -1.25f, 2.0f, 0.0f}));
  }
  CHECK(seen_hello == lines[0]);
  CHECK(seen_predict == lines[2]);
}

TEST_CASE("loopback: wrong id is a protocol error") {
  LoopbackServer server([](FdTransport& t) {
    t.read_line(5s);
    t.write_line(meta_frame({2, {1, 1, 1}}));
    const PredictRequest req = parse_predict(t.read_line(5s));
    t.write_line(logits_frame(req.id + 1, LogitsBatch(1, 2, {0.0f, 1.0f})));
    t.read_line(5s);
  });
  auto model = RemoteModel::connect(server.endpoint(), 5000ms);
  CHECK(error_kind([&] { model->predict(Batch({Image({1, 1, 1})})); }) == ProtocolErrorKind::kIdMismatch);
}

TEST_CASE("loopback: version 2 server is rejected") {
  LoopbackServer server([](FdTransport& t) {
    t.read_line(5s);
    t.write_line(R"({"op":"meta","version":2,"num_classes":2,"input":[1,1,1]})");
    t.read_line(5s);
  });
  CHECK(error_kind([&] { RemoteModel::connect(server.endpoint(), 5000ms); }) ==
        ProtocolErrorKind::kVersionMismatch);
}

TEST_CASE("loopback: timeout and close mid-response") {
  {
    LoopbackServer server([](FdTransport& t) {
      t.read_line(5s);
      t.write_line(meta_frame({2, {1, 1, 1}}));
      t.read_line(5s);
      t.read_line(5s);  // never answers the predict
    });
    auto model = RemoteModel::connect(server.endpoint(), 200ms);
    CHECK(error_kind([&] { model->predict(Batch({Image({1, 1, 1})})); }) == ProtocolErrorKind::kTimeout);
  }
  {
    LoopbackServer server([](FdTransport& t) {
      t.read_line(5s);
      t.write_line(meta_frame({2, {1, 1, 1}}));
      t.read_line(5s);
      // Partial line, then the connection drops when the transport dies.
      throw std::runtime_error("drop");
    });
    auto model = RemoteModel::connect(server.endpoint(), 5000ms);
    CHECK(error_kind([&] { model->predict(Batch({Image({1, 1, 1})})); }) == ProtocolErrorKind::kClosed);
  }
}

TEST_CASE("loopback: batch shape is checked before sending") {
  LoopbackServer server([](FdTransport& t) {
    t.read_line(5s);
    t.write_line(meta_frame({2, {1, 1, 1}}));
    t.read_line(5s);
  });
  auto model = RemoteModel::connect(server.endpoint(), 5000ms);
  CHECK_THROWS_AS(model->predict(Batch({Image({1, 2, 2})})), ModelError);
}

TEST_CASE("connect failures") {
  // Bind then close to get a port with no listener.
  int port = 0;
  {
    const int fd = ::socket(AF_INET, SOCK_STREAM, 0);
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
    ::bind(fd, reinterpret_cast<sockaddr*>(&addr), sizeof addr);
    socklen_t len = sizeof addr;
    ::getsockname(fd, reinterpret_cast<sockaddr*>(&addr), &len);
    port = ntohs(addr.sin_port);
    ::close(fd);
  }
  CHECK(error_kind([&] { RemoteModel::connect("127.0.0.1:" + std::to_string(port), 1000ms); }) ==
        ProtocolErrorKind::kConnect);
  CHECK(error_kind([] { open_endpoint("localhost", 100ms); }) == ProtocolErrorKind::kConnect);
  CHECK(error_kind([] { open_endpoint("", 100ms); }) == ProtocolErrorKind::kConnect);
}

TEST_CASE("stdio endpoint speaks the protocol through a child process") {
  const auto lines = transcript();
  const fs::path script = fs::temp_directory_path() / "igaff_stdio_server.sh";
  {
    std::ofstream s(script);
    s << "read hello\n"
      << "printf '%s\\n' '" << lines[1] << "'\n"
      << "read req\n"
      << "printf '%s\\n' '" << lines[3] << "'\n"
      << "read done\n";
  }
  auto model = RemoteModel::connect("stdio:sh " + script.string(), 5000ms);
  CHECK(model->num_classes() == 4);
  CHECK(model->predict(transcript_batch()) == LogitsBatch(1, 4, {0.5f, -1.25f, 2.0f, 0.0f}));
}

TEST_CASE("remote model wrapping fixture weights is indistinguishable from the builtin") {
  const auto local = load_builtin_model(kData / "fixture" / "mlp1" / "model.json");
  LoopbackServer server([&](FdTransport& t) { serve(*local, t); });
  auto remote = RemoteModel::connect(server.endpoint(), 5000ms);

  std::vector<Image> imgs;
  Labels labels;
  for (int i = 0; i < 8; ++i) {
    char name[32];
    std::snprintf(name, sizeof name, "img_%02d.igt", i);
    imgs.push_back(load_image(kData / "fixture" / "images" / name));
    labels.push_back(i % 4);
  }
  const Batch x(imgs);
  CHECK(remote->predict(x) == local->predict(x));

  AttackConfig cfg;
  cfg.seed = 1234;
  cfg.iterations = 3;
  const AttackOutcome a = aga_attack(x, labels, *local, cfg);
  const AttackOutcome b = aga_attack(x, labels, *remote, cfg);
  CHECK(bitwise_equal(a.adversarial, b.adversarial));
  CHECK(a.final_score() == b.final_score());
}
