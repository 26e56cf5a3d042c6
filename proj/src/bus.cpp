#include "copguide/bus.hpp"

#include <algorithm>

#include "copguide/error.hpp"

namespace copguide::gateway {

std::string_view topic_for(const BusPayload& payload) {
  switch (payload.index()) {
    case 0: return kTopicSample;
    case 1: return kTopicFeedback;
    case 2: return kTopicEvent;
    default: return kTopicTrial;
  }
}

BusMessage make_message(TimestampMs ts, BusPayload payload) {
  BusMessage msg;
  msg.topic = std::string(topic_for(payload));
  msg.ts = ts;
  msg.payload = std::move(payload);
  return msg;
}

json to_wire(const BusMessage& msg) {
  json payload = std::visit([](const auto& p) { return to_json(p); }, msg.payload);
  return {{"topic", msg.topic}, {"ts", msg.ts}, {"payload", std::move(payload)}};
}

BusMessage from_wire(const json& j) {
  if (!j.is_object()) throw Error(ErrorCode::kSchemaViolation, "message is not an object");
  if (!j.contains("topic") || !j["topic"].is_string()) {
    throw Error(ErrorCode::kSchemaViolation, "message has no topic");
  }
  if (!j.contains("ts") || !j["ts"].is_number_integer()) {
    throw Error(ErrorCode::kSchemaViolation, "message has no integer ts");
  }
  if (!j.contains("payload")) throw Error(ErrorCode::kSchemaViolation, "message has no payload");
  const auto topic = j["topic"].get<std::string>();
  const auto ts = j["ts"].get<TimestampMs>();
  const auto& p = j["payload"];
  if (topic == kTopicSample) return make_message(ts, sample_from_json(p));
  if (topic == kTopicFeedback) return make_message(ts, command_from_json(p));
  if (topic == kTopicEvent) return make_message(ts, event_from_json(p));
  if (topic == kTopicTrial) return make_message(ts, trial_from_json(p));
  throw Error(ErrorCode::kSchemaViolation, "undeclared topic '" + topic + "'");
}

bool validates(const json& j) {
  try {
    from_wire(j);
    return true;
  } catch (const Error&) {
    return false;
  }
}

void InProcessBus::Subscription::push(const BusMessage& msg) {
  {
    std::lock_guard lock(mu_);
    if (closed_) return;
    if (queue_.size() >= capacity_) {
      queue_.pop_front();
      ++dropped_;
    }
    queue_.push_back(msg);
  }
  cv_.notify_one();
}

std::optional<BusMessage> InProcessBus::Subscription::pop(std::chrono::milliseconds timeout) {
  std::unique_lock lock(mu_);
  cv_.wait_for(lock, timeout, [this] { return !queue_.empty() || closed_; });
  if (queue_.empty()) return std::nullopt;
  auto msg = std::move(queue_.front());
  queue_.pop_front();
  return msg;
}

std::optional<BusMessage> InProcessBus::Subscription::try_pop() {
  std::lock_guard lock(mu_);
  if (queue_.empty()) return std::nullopt;
  auto msg = std::move(queue_.front());
  queue_.pop_front();
  return msg;
}

std::size_t InProcessBus::Subscription::dropped() const {
  std::lock_guard lock(mu_);
  return dropped_;
}

void InProcessBus::Subscription::close() {
  {
    std::lock_guard lock(mu_);
    closed_ = true;
  }
  cv_.notify_all();
}

bool InProcessBus::Subscription::closed() const {
  std::lock_guard lock(mu_);
  return closed_;
}

std::shared_ptr<InProcessBus::Subscription> InProcessBus::subscribe(std::size_t capacity) {
  auto sub = std::make_shared<Subscription>(std::max<std::size_t>(1, capacity));
  std::lock_guard lock(mu_);
  subs_.push_back(sub);
  return sub;
}

void InProcessBus::unsubscribe(const std::shared_ptr<Subscription>& sub) {
  sub->close();
  std::lock_guard lock(mu_);
  std::erase(subs_, sub);
}

void InProcessBus::publish(const BusMessage& msg) {
  std::vector<std::shared_ptr<Subscription>> subs;
  {
    std::lock_guard lock(mu_);
    ++published_;
    subs = subs_;
  }
  for (const auto& s : subs) s->push(msg);
}

std::size_t InProcessBus::dropped_total() const {
  std::lock_guard lock(mu_);
  std::size_t total = 0;
  for (const auto& s : subs_) total += s->dropped();
  return total;
}

std::size_t InProcessBus::published() const {
  std::lock_guard lock(mu_);
  return published_;
}

void BusObserver::on_sample(const CoPSample& s) { bus_.publish(make_message(s.ts, s)); }

void BusObserver::on_command(TimestampMs ts, const feedback::FeedbackCommand& cmd) {
  bus_.publish(make_message(ts, cmd));
}

void BusObserver::on_event(const guidance::GuidanceEvent& e) {
  bus_.publish(make_message(e.ts, e));
}

void BusObserver::on_trial(const guidance::TrialRecord& r) {
  guidance::TrialRecord summary = r;
  summary.path.clear();
  bus_.publish(make_message(r.success_ts, std::move(summary)));
}

AsyncObserver::AsyncObserver(SessionObserver& inner) : inner_(inner), worker_([this] { run(); }) {}

AsyncObserver::~AsyncObserver() {
  {
    std::lock_guard lock(mu_);
    stop_ = true;
  }
  cv_.notify_all();
  worker_.join();
}

void AsyncObserver::enqueue(std::function<void()> fn) {
  {
    std::lock_guard lock(mu_);
    queue_.push_back(std::move(fn));
    high_water_ = std::max(high_water_, queue_.size());
  }
  cv_.notify_one();
}

void AsyncObserver::run() {
  std::unique_lock lock(mu_);
  while (true) {
    cv_.wait(lock, [this] { return stop_ || !queue_.empty(); });
    if (queue_.empty()) {
      if (stop_) return;
      continue;
    }
    auto fn = std::move(queue_.front());
    queue_.pop_front();
    busy_ = true;
    lock.unlock();
    fn();
    lock.lock();
    busy_ = false;
    if (queue_.empty()) idle_cv_.notify_all();
  }
}

void AsyncObserver::drain() {
  std::unique_lock lock(mu_);
  idle_cv_.wait(lock, [this] { return queue_.empty() && !busy_; });
}

void AsyncObserver::on_sample(const CoPSample& s) {
  enqueue([this, s] { inner_.on_sample(s); });
}

void AsyncObserver::on_command(TimestampMs ts, const feedback::FeedbackCommand& cmd) {
  enqueue([this, ts, cmd] { inner_.on_command(ts, cmd); });
}

void AsyncObserver::on_event(const guidance::GuidanceEvent& e) {
  enqueue([this, e] { inner_.on_event(e); });
}

void AsyncObserver::on_trial(const guidance::TrialRecord& r) {
  enqueue([this, r] { inner_.on_trial(r); });
}

void AsyncObserver::on_finish() {
  enqueue([this] { inner_.on_finish(); });
  drain();
}

std::size_t AsyncObserver::high_water() const {
  std::lock_guard lock(mu_);
  return high_water_;
}

}  // namespace copguide::gateway
