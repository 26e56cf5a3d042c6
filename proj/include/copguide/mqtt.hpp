#pragma once

// Minimal MQTT 3.1.1 client: CONNECT / CONNACK, QoS 0 PUBLISH, PINGREQ and
// DISCONNECT over a blocking TCP socket. Enough to mirror the bus onto a
// broker; subscriptions are not needed.

#include <atomic>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <thread>
#include <utility>
#include <vector>

#include "copguide/bus.hpp"

namespace copguide::gateway::mqtt {

using Bytes = std::vector<std::uint8_t>;

enum PacketType : std::uint8_t {
  kConnect = 1,
  kConnAck = 2,
  kPublish = 3,
  kPingReq = 12,
  kPingResp = 13,
  kDisconnect = 14,
};

/// Variable-length "remaining length" (1-4 octets). Throws for values above
/// 268,435,455.
Bytes encode_remaining_length(std::size_t value);
/// (value, octets consumed), or nullopt when more input is needed.
/// Throws kTransport on a malformed (5+ octet) encoding.
std::optional<std::pair<std::size_t, std::size_t>> decode_remaining_length(
    std::span<const std::uint8_t> in);

Bytes encode_connect(std::string_view client_id, std::uint16_t keepalive_s = 60);
Bytes encode_publish(std::string_view topic, std::string_view payload);
Bytes encode_pingreq();
Bytes encode_disconnect();

struct Packet {
  std::uint8_t type = 0;
  std::uint8_t flags = 0;
  Bytes body;
};

/// Splits one complete packet off the front of `in`; nullopt if incomplete.
std::optional<std::pair<Packet, std::size_t>> decode_packet(std::span<const std::uint8_t> in);

/// For QoS 0 PUBLISH bodies: (topic, payload).
std::pair<std::string, std::string> parse_publish(const Packet& p);

class Client {
 public:
  Client() = default;
  ~Client();
  Client(const Client&) = delete;
  Client& operator=(const Client&) = delete;

  /// Connects and waits for CONNACK. Throws Error(kTransport) on any failure
  /// or a non-zero return code.
  void connect(const std::string& host, std::uint16_t port, std::string_view client_id,
               std::uint16_t keepalive_s = 60);
  void publish(std::string_view topic, std::string_view payload);
  void ping();
  void disconnect();
  bool connected() const { return fd_ >= 0; }

 private:
  void send_all(const Bytes& bytes);
  Packet read_packet();

  int fd_ = -1;
  Bytes rx_;
};

/// Forwards every bus message to the broker as its topic with the JSON
/// payload {"ts": ..., ...payload fields}. Runs on its own thread.
class BusBridge {
 public:
  BusBridge(InProcessBus& bus, std::unique_ptr<Client> client, std::size_t queue_capacity = 4096);
  ~BusBridge();
  BusBridge(const BusBridge&) = delete;
  BusBridge& operator=(const BusBridge&) = delete;

  void stop();
  std::size_t forwarded() const { return forwarded_.load(); }
  std::size_t failed() const { return failed_.load(); }

 private:
  void run();

  InProcessBus& bus_;
  std::shared_ptr<InProcessBus::Subscription> sub_;
  std::unique_ptr<Client> client_;
  std::atomic<bool> stop_{false};
  std::atomic<std::size_t> forwarded_{0};
  std::atomic<std::size_t> failed_{0};
  std::thread worker_;
};

}  // namespace copguide::gateway::mqtt
