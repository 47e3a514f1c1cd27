#pragma once

// A small shared-memory actor runtime: index-addressed workers with FIFO
// mailboxes, multiplexed round-robin onto a fixed set of execution units,
// plus exact quiescence detection for a single external driver.
//
// Quiescence rests on two monotone counters. `sent` is bumped before a
// message becomes visible in a mailbox and `processed` after its handler
// returns, so processed <= sent always holds, and processed == sent means no
// message is queued and no handler is running. Only the driver injects
// messages from outside, so once reached the state persists until the
// driver sends again.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <condition_variable>
#include <cstddef>
#include <cstdint>
#include <deque>
#include <exception>
#include <fstream>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <thread>
#include <utility>
#include <vector>

#include "actorgraph/partition.hpp"

namespace actorgraph {

enum class MessageKind : std::uint8_t { Update, Iterate, RankBatch, LabelBatch, BufferReady, Control };

inline std::string_view to_string(MessageKind k) {
  switch (k) {
    case MessageKind::Update: return "Update";
    case MessageKind::Iterate: return "Iterate";
    case MessageKind::RankBatch: return "RankBatch";
    case MessageKind::LabelBatch: return "LabelBatch";
    case MessageKind::BufferReady: return "BufferReady";
    case MessageKind::Control: return "Control";
  }
  return "?";
}

inline constexpr ChunkId kDriver = static_cast<ChunkId>(-1);

template <class Payload>
struct Envelope {
  MessageKind kind = MessageKind::Control;
  ChunkId from = kDriver;
  Payload payload{};
};

class LifecycleError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

class DeadlockError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct TraceEvent {
  std::int64_t ts_ns = 0;
  ChunkId worker = 0;
  MessageKind kind = MessageKind::Control;
};

inline std::int64_t monotonic_ns() {
  return std::chrono::duration_cast<std::chrono::nanoseconds>(std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

/// Trace as CSV `ts_ns,worker,kind`, one row per processed message.
inline void write_trace_csv(std::ostream& out, const std::vector<TraceEvent>& events) {
  out << "ts_ns,worker,kind\n";
  for (const auto& e : events) out << e.ts_ns << ',' << e.worker << ',' << to_string(e.kind) << '\n';
}

struct QuiescenceCounters {
  std::uint64_t sent = 0;
  std::uint64_t processed = 0;
  std::size_t idle_workers = 0;
};

struct EngineOptions {
  bool trace = false;
  // After every successful wait, lock each mailbox and assert it is empty.
  bool check_quiescence = true;
  std::optional<std::chrono::milliseconds> quiescence_timeout;
};

template <class Payload>
class Engine {
 public:
  using Message = Envelope<Payload>;
  using Handler = std::function<void(ChunkId self, Message&& msg)>;

  /// Spawns num_workers execution units serving num_chunks workers; worker w
  /// runs on unit w % num_workers.
  Engine(std::size_t num_workers, std::size_t num_chunks, Handler handler, EngineOptions options = {})
      : handler_(std::move(handler)), options_(options), workers_(num_chunks), units_(num_workers) {
    if (num_workers == 0) throw std::invalid_argument("Engine: need at least one execution unit");
    if (num_chunks == 0) throw std::invalid_argument("Engine: need at least one worker");
    try {
      for (std::size_t u = 0; u < num_workers; ++u) threads_.emplace_back([this, u] { run_unit(u); });
    } catch (const std::system_error& e) {
      shutdown();
      throw std::runtime_error(std::string("Engine: failed to start execution units: ") + e.what());
    }
  }

  Engine(const Engine&) = delete;
  Engine& operator=(const Engine&) = delete;

  ~Engine() { shutdown(); }

  std::size_t num_workers() const { return workers_.size(); }
  std::size_t num_units() const { return units_.size(); }
  std::size_t unit_of(ChunkId w) const { return w % units_.size(); }

  /// Workers hosted by execution unit u, ascending.
  std::vector<ChunkId> workers_on(std::size_t u) const {
    std::vector<ChunkId> out;
    for (std::size_t w = u; w < workers_.size(); w += units_.size()) out.push_back(static_cast<ChunkId>(w));
    return out;
  }

  void send(ChunkId to, Message msg) {
    if (to >= workers_.size())
      throw std::out_of_range("Engine::send: worker " + std::to_string(to) + " out of range (" +
                              std::to_string(workers_.size()) + " workers)");
    if (stopped_.load(std::memory_order_acquire)) throw LifecycleError("Engine::send: engine stopped");
    sent_.fetch_add(1, std::memory_order_acq_rel);
    auto& w = workers_[to];
    bool schedule = false;
    {
      std::lock_guard lock(w.mutex);
      w.mailbox.push_back(std::move(msg));
      if (!w.scheduled) {
        w.scheduled = true;
        schedule = true;
      }
    }
    if (schedule) {
      auto& unit = units_[unit_of(to)];
      {
        std::lock_guard lock(unit.mutex);
        unit.ready.push_back(to);
      }
      unit.cv.notify_one();
    }
  }

  /// Delivers a copy of msg to every worker, in index order.
  void broadcast(const Message& msg) {
    if (stopped_.load(std::memory_order_acquire)) throw LifecycleError("Engine::broadcast: engine stopped");
    for (std::size_t w = 0; w < workers_.size(); ++w) send(static_cast<ChunkId>(w), msg);
  }

  /// Blocks until every sent message has been processed. Rethrows the first
  /// handler exception, if any.
  void wait_quiescence() {
    std::unique_lock lock(qd_mutex_);
    auto done = [&] { return quiescent() || failure_ != nullptr; };
    if (options_.quiescence_timeout) {
      if (!qd_cv_.wait_for(lock, *options_.quiescence_timeout, done)) {
        auto c = counters();
        throw DeadlockError("quiescence not reached within " + std::to_string(options_.quiescence_timeout->count()) +
                            " ms: sent=" + std::to_string(c.sent) + " processed=" + std::to_string(c.processed) +
                            " pending=" + std::to_string(c.sent - c.processed));
      }
    } else {
      qd_cv_.wait(lock, done);
    }
    if (failure_) {
      auto e = failure_;
      failure_ = nullptr;
      failed_.store(false, std::memory_order_release);
      std::rethrow_exception(e);
    }
    lock.unlock();
    if (options_.check_quiescence) {
      for (std::size_t w = 0; w < workers_.size(); ++w) {
        std::lock_guard wl(workers_[w].mutex);
        if (!workers_[w].mailbox.empty())
          throw std::logic_error("quiescence reported with a non-empty mailbox at worker " + std::to_string(w));
      }
    }
  }

  QuiescenceCounters counters() const {
    QuiescenceCounters c;
    c.processed = processed_.load(std::memory_order_acquire);
    c.sent = sent_.load(std::memory_order_acquire);
    c.idle_workers = workers_.size() - active_.load(std::memory_order_acquire);
    return c;
  }

  /// Messages currently queued across all mailboxes.
  std::size_t pending_messages() const {
    std::size_t n = 0;
    for (const auto& w : workers_) {
      std::lock_guard lock(w.mutex);
      n += w.mailbox.size();
    }
    return n;
  }

  /// Processed-message events from all units, ordered by timestamp. Only
  /// meaningful at quiescence.
  std::vector<TraceEvent> trace() const {
    std::vector<TraceEvent> all;
    for (const auto& u : units_) all.insert(all.end(), u.trace.begin(), u.trace.end());
    std::stable_sort(all.begin(), all.end(), [](const TraceEvent& x, const TraceEvent& y) { return x.ts_ns < y.ts_ns; });
    return all;
  }

  void shutdown() {
    if (stopped_.exchange(true)) return;
    for (auto& u : units_) {
      {
        std::lock_guard lock(u.mutex);
      }
      u.cv.notify_all();
    }
    for (auto& t : threads_)
      if (t.joinable()) t.join();
  }

 private:
  struct Worker {
    mutable std::mutex mutex;
    std::deque<Message> mailbox;
    bool scheduled = false;
  };

  struct Unit {
    std::mutex mutex;
    std::condition_variable cv;
    std::deque<ChunkId> ready;
    std::vector<TraceEvent> trace;
  };

  // Messages handled per activation before a busy worker yields its unit.
  static constexpr int kBurst = 64;

  bool quiescent() const {
    // processed first: see the header comment.
    const auto p = processed_.load(std::memory_order_acquire);
    return p == sent_.load(std::memory_order_acquire);
  }

  void run_unit(std::size_t u) {
    auto& unit = units_[u];
    for (;;) {
      ChunkId w;
      {
        std::unique_lock lock(unit.mutex);
        unit.cv.wait(lock, [&] { return !unit.ready.empty() || stopped_.load(std::memory_order_acquire); });
        if (unit.ready.empty()) return;
        w = unit.ready.front();
        unit.ready.pop_front();
      }
      drain(unit, w);
    }
  }

  void drain(Unit& unit, ChunkId id) {
    auto& w = workers_[id];
    for (int handled = 0;; ++handled) {
      Message msg;
      {
        std::lock_guard lock(w.mutex);
        if (w.mailbox.empty()) {
          w.scheduled = false;
          return;
        }
        if (handled == kBurst) break;
        msg = std::move(w.mailbox.front());
        w.mailbox.pop_front();
      }
      if (options_.trace) unit.trace.push_back({monotonic_ns(), id, msg.kind});
      active_.fetch_add(1, std::memory_order_acq_rel);
      try {
        handler_(id, std::move(msg));
      } catch (...) {
        std::lock_guard lock(qd_mutex_);
        if (!failure_) failure_ = std::current_exception();
        failed_.store(true, std::memory_order_release);
      }
      active_.fetch_sub(1, std::memory_order_acq_rel);
      const auto p = processed_.fetch_add(1, std::memory_order_acq_rel) + 1;
      if (p == sent_.load(std::memory_order_acquire) || failed_.load(std::memory_order_acquire)) {
        std::lock_guard lock(qd_mutex_);
        qd_cv_.notify_all();
      }
    }
    // Burst exhausted with mail left: requeue behind the unit's other workers.
    {
      std::lock_guard lock(unit.mutex);
      unit.ready.push_back(id);
    }
  }

  Handler handler_;
  EngineOptions options_;
  std::vector<Worker> workers_;
  std::vector<Unit> units_;
  std::vector<std::thread> threads_;

  std::atomic<std::uint64_t> sent_{0};
  std::atomic<std::uint64_t> processed_{0};
  std::atomic<std::size_t> active_{0};
  std::atomic<bool> stopped_{false};
  std::atomic<bool> failed_{false};

  std::mutex qd_mutex_;
  std::condition_variable qd_cv_;
  std::exception_ptr failure_;
};

}  // namespace actorgraph
