#include "copguide/mqtt.hpp"

#include <arpa/inet.h>
#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>

#include "copguide/error.hpp"

namespace copguide::gateway::mqtt {

namespace {

[[noreturn]] void transport(const std::string& msg) { throw Error(ErrorCode::kTransport, msg); }

void put_u16(Bytes& out, std::uint16_t v) {
  out.push_back(static_cast<std::uint8_t>(v >> 8));
  out.push_back(static_cast<std::uint8_t>(v & 0xff));
}

void put_string(Bytes& out, std::string_view s) {
  if (s.size() > 0xffff) transport("MQTT string longer than 65535 octets");
  put_u16(out, static_cast<std::uint16_t>(s.size()));
  out.insert(out.end(), s.begin(), s.end());
}

Bytes frame(std::uint8_t first, const Bytes& body) {
  Bytes out{first};
  const auto len = encode_remaining_length(body.size());
  out.insert(out.end(), len.begin(), len.end());
  out.insert(out.end(), body.begin(), body.end());
  return out;
}

}  // namespace

Bytes encode_remaining_length(std::size_t value) {
  if (value > 268'435'455) transport("MQTT remaining length too large");
  Bytes out;
  do {
    std::uint8_t byte = value % 128;
    value /= 128;
    if (value > 0) byte |= 0x80;
    out.push_back(byte);
  } while (value > 0);
  return out;
}

std::optional<std::pair<std::size_t, std::size_t>> decode_remaining_length(
    std::span<const std::uint8_t> in) {
  std::size_t value = 0;
  std::size_t multiplier = 1;
  for (std::size_t i = 0; i < in.size(); ++i) {
    if (i == 4) transport("malformed MQTT remaining length");
    value += (in[i] & 0x7f) * multiplier;
    if ((in[i] & 0x80) == 0) return std::pair{value, i + 1};
    multiplier *= 128;
  }
  if (in.size() >= 4) transport("malformed MQTT remaining length");
  return std::nullopt;
}

Bytes encode_connect(std::string_view client_id, std::uint16_t keepalive_s) {
  Bytes body;
  put_string(body, "MQTT");
  body.push_back(4);     // protocol level 3.1.1
  body.push_back(0x02);  // clean session
  put_u16(body, keepalive_s);
  put_string(body, client_id);
  return frame(kConnect << 4, body);
}

Bytes encode_publish(std::string_view topic, std::string_view payload) {
  Bytes body;
  put_string(body, topic);
  body.insert(body.end(), payload.begin(), payload.end());
  return frame(kPublish << 4, body);  // QoS 0, no DUP, no RETAIN
}

Bytes encode_pingreq() { return {kPingReq << 4, 0}; }
Bytes encode_disconnect() { return {kDisconnect << 4, 0}; }

std::optional<std::pair<Packet, std::size_t>> decode_packet(std::span<const std::uint8_t> in) {
  if (in.size() < 2) return std::nullopt;
  const auto len = decode_remaining_length(in.subspan(1));
  if (!len) return std::nullopt;
  const auto [body_len, len_octets] = *len;
  const std::size_t total = 1 + len_octets + body_len;
  if (in.size() < total) return std::nullopt;
  Packet p;
  p.type = in[0] >> 4;
  p.flags = in[0] & 0x0f;
  p.body.assign(in.begin() + 1 + len_octets, in.begin() + total);
  return std::pair{std::move(p), total};
}

std::pair<std::string, std::string> parse_publish(const Packet& p) {
  if (p.type != kPublish || p.body.size() < 2) transport("not a PUBLISH packet");
  const std::size_t tlen = (p.body[0] << 8) | p.body[1];
  if (p.body.size() < 2 + tlen) transport("PUBLISH topic overruns packet");
  std::string topic(p.body.begin() + 2, p.body.begin() + 2 + tlen);
  // QoS 0 carries no packet identifier.
  std::string payload(p.body.begin() + 2 + tlen, p.body.end());
  return {std::move(topic), std::move(payload)};
}

Client::~Client() {
  if (fd_ >= 0) ::close(fd_);
}

void Client::connect(const std::string& host, std::uint16_t port, std::string_view client_id,
                     std::uint16_t keepalive_s) {
  addrinfo hints{};
  hints.ai_family = AF_UNSPEC;
  hints.ai_socktype = SOCK_STREAM;
  addrinfo* res = nullptr;
  const auto service = std::to_string(port);
  if (::getaddrinfo(host.c_str(), service.c_str(), &hints, &res) != 0 || res == nullptr) {
    transport("cannot resolve broker " + host);
  }
  int fd = -1;
  for (addrinfo* ai = res; ai != nullptr; ai = ai->ai_next) {
    fd = ::socket(ai->ai_family, ai->ai_socktype, ai->ai_protocol);
    if (fd < 0) continue;
    if (::connect(fd, ai->ai_addr, ai->ai_addrlen) == 0) break;
    ::close(fd);
    fd = -1;
  }
  ::freeaddrinfo(res);
  if (fd < 0) transport("cannot connect to broker " + host + ":" + service);
  const int one = 1;
  ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
  fd_ = fd;

  send_all(encode_connect(client_id, keepalive_s));
  const Packet ack = read_packet();
  if (ack.type != kConnAck || ack.body.size() != 2) transport("broker did not answer CONNACK");
  if (ack.body[1] != 0) {
    disconnect();
    transport("broker refused connection, code " + std::to_string(ack.body[1]));
  }
}

void Client::publish(std::string_view topic, std::string_view payload) {
  send_all(encode_publish(topic, payload));
}

void Client::ping() {
  send_all(encode_pingreq());
  if (read_packet().type != kPingResp) transport("expected PINGRESP");
}

void Client::disconnect() {
  if (fd_ < 0) return;
  try {
    send_all(encode_disconnect());
  } catch (const Error&) {
  }
  ::close(fd_);
  fd_ = -1;
}

void Client::send_all(const Bytes& bytes) {
  if (fd_ < 0) transport("not connected");
  std::size_t sent = 0;
  while (sent < bytes.size()) {
    const auto n = ::send(fd_, bytes.data() + sent, bytes.size() - sent, MSG_NOSIGNAL);
    if (n < 0) {
      if (errno == EINTR) continue;
      transport(std::string("send failed: ") + std::strerror(errno));
    }
    sent += static_cast<std::size_t>(n);
  }
}

Packet Client::read_packet() {
  while (true) {
    if (auto p = decode_packet(rx_)) {
      rx_.erase(rx_.begin(), rx_.begin() + static_cast<std::ptrdiff_t>(p->second));
      return std::move(p->first);
    }
    std::uint8_t buf[512];
    const auto n = ::recv(fd_, buf, sizeof buf, 0);
    if (n == 0) transport("broker closed the connection");
    if (n < 0) {
      if (errno == EINTR) continue;
      transport(std::string("recv failed: ") + std::strerror(errno));
    }
    rx_.insert(rx_.end(), buf, buf + n);
  }
}

BusBridge::BusBridge(InProcessBus& bus, std::unique_ptr<Client> client, std::size_t queue_capacity)
    : bus_(bus),
      sub_(bus.subscribe(queue_capacity)),
      client_(std::move(client)),
      worker_([this] { run(); }) {}

BusBridge::~BusBridge() { stop(); }

void BusBridge::stop() {
  if (stop_.exchange(true)) return;
  bus_.unsubscribe(sub_);
  if (worker_.joinable()) worker_.join();
  client_->disconnect();
}

void BusBridge::run() {
  while (!stop_.load()) {
    auto msg = sub_->pop(std::chrono::milliseconds(50));
    if (!msg) continue;
    json wire = to_wire(*msg);
    json body = std::move(wire["payload"]);
    body["ts"] = msg->ts;
    try {
      client_->publish(msg->topic, body.dump());
      ++forwarded_;
    } catch (const Error&) {
      ++failed_;
    }
  }
  // Flush what was queued before stop.
  while (auto msg = sub_->try_pop()) {
    json body = to_wire(*msg)["payload"];
    body["ts"] = msg->ts;
    try {
      client_->publish(msg->topic, body.dump());
      ++forwarded_;
    } catch (const Error&) {
      ++failed_;
    }
  }
}

}  // namespace copguide::gateway::mqtt
