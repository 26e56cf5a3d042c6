#pragma once

// Topic bus. The in-process binding fans messages out to bounded
// per-subscriber queues that drop their oldest entry when full; publishing
// never blocks. External bindings (MQTT, the serve stream) are subscribers.

#include <array>
#include <chrono>
#include <condition_variable>
#include <deque>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <thread>
#include <variant>
#include <vector>

#include "copguide/codec.hpp"
#include "copguide/session.hpp"

namespace copguide::gateway {

inline constexpr std::string_view kTopicSample = "cop/sample";
inline constexpr std::string_view kTopicFeedback = "cop/feedback";
inline constexpr std::string_view kTopicEvent = "cop/event";
inline constexpr std::string_view kTopicTrial = "cop/trial";
inline constexpr std::array<std::string_view, 4> kTopics = {kTopicSample, kTopicFeedback,
                                                            kTopicEvent, kTopicTrial};

using BusPayload = std::variant<CoPSample, feedback::FeedbackCommand, guidance::GuidanceEvent,
                                guidance::TrialRecord>;

struct BusMessage {
  std::string topic;
  TimestampMs ts = 0;
  BusPayload payload;
};

std::string_view topic_for(const BusPayload& payload);
BusMessage make_message(TimestampMs ts, BusPayload payload);

/// {"topic": ..., "ts": ..., "payload": {...}}
json to_wire(const BusMessage& msg);
/// Validates topic membership and the payload schema for that topic; throws
/// Error(kSchemaViolation).
BusMessage from_wire(const json& j);
bool validates(const json& j);

class InProcessBus {
 public:
  class Subscription {
   public:
    explicit Subscription(std::size_t capacity) : capacity_(capacity) {}

    std::optional<BusMessage> pop(std::chrono::milliseconds timeout);
    std::optional<BusMessage> try_pop();
    std::size_t dropped() const;
    void close();
    bool closed() const;

   private:
    friend class InProcessBus;
    void push(const BusMessage& msg);

    std::size_t capacity_;
    mutable std::mutex mu_;
    std::condition_variable cv_;
    std::deque<BusMessage> queue_;
    std::size_t dropped_ = 0;
    bool closed_ = false;
  };

  std::shared_ptr<Subscription> subscribe(std::size_t capacity = 4096);
  void unsubscribe(const std::shared_ptr<Subscription>& sub);
  void publish(const BusMessage& msg);
  /// Messages dropped across all current subscribers.
  std::size_t dropped_total() const;
  std::size_t published() const;

 private:
  mutable std::mutex mu_;
  std::vector<std::shared_ptr<Subscription>> subs_;
  std::size_t published_ = 0;
};

/// Publishes every loop output on its topic.
class BusObserver : public SessionObserver {
 public:
  explicit BusObserver(InProcessBus& bus) : bus_(bus) {}

  void on_sample(const CoPSample& s) override;
  void on_command(TimestampMs ts, const feedback::FeedbackCommand& cmd) override;
  void on_event(const guidance::GuidanceEvent& e) override;
  void on_trial(const guidance::TrialRecord& r) override;

 private:
  InProcessBus& bus_;
};

/// Runs an observer on its own thread behind an unbounded queue, so the
/// session loop never waits on it and nothing is dropped. on_finish drains
/// the queue before returning.
class AsyncObserver : public SessionObserver {
 public:
  explicit AsyncObserver(SessionObserver& inner);
  ~AsyncObserver() override;
  AsyncObserver(const AsyncObserver&) = delete;
  AsyncObserver& operator=(const AsyncObserver&) = delete;

  void on_sample(const CoPSample& s) override;
  void on_command(TimestampMs ts, const feedback::FeedbackCommand& cmd) override;
  void on_event(const guidance::GuidanceEvent& e) override;
  void on_trial(const guidance::TrialRecord& r) override;
  void on_finish() override;

  std::size_t high_water() const;

 private:
  void enqueue(std::function<void()> fn);
  void drain();
  void run();

  SessionObserver& inner_;
  mutable std::mutex mu_;
  std::condition_variable cv_;
  std::condition_variable idle_cv_;
  std::deque<std::function<void()>> queue_;
  std::size_t high_water_ = 0;
  bool busy_ = false;
  bool stop_ = false;
  std::thread worker_;
};

}  // namespace copguide::gateway
