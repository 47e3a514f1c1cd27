#pragma once

// Parallel PageRank and label propagation over the actor engine, in five
// exchange strategies:
//
//   basic     one batch of (dest, value) records per destination chunk,
//             sent after the whole local edge loop
//   atomic    no messages; values are combined into a shared per-vertex
//             buffer with CAS loops, then folded in by the owners
//   pairs     one shared buffer per ordered chunk pair, handed over with a
//             BufferReady notice
//   reduction every chunk fills a full-length buffer; buffers are combined
//             up a fixed binary tree and the root hands the result back
//   sortdest  edges stored destination-major, values for one destination
//             combined locally, one batch sent per destination chunk as
//             soon as it is complete
//
// Each iteration is driven like a bulk-synchronous step: broadcast Update,
// wait for quiescence, broadcast Iterate, wait for quiescence (plus a Fold
// step for atomic). Message variants apply received batches in sender order
// once the local loop is done, which makes their float results reproducible;
// RunOptions::apply_on_arrival applies them as they come instead.

#include <algorithm>
#include <array>
#include <atomic>
#include <chrono>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "actorgraph/engine.hpp"
#include "actorgraph/graph.hpp"
#include "actorgraph/partition.hpp"
#include "actorgraph/serial.hpp"

namespace actorgraph {

enum class VariantId { Basic, Atomic, Pairs, Reduction, SortDest };

inline constexpr std::array<VariantId, 5> kAllVariants{VariantId::Basic, VariantId::Atomic, VariantId::Pairs,
                                                       VariantId::Reduction, VariantId::SortDest};

inline std::string_view to_string(VariantId v) {
  switch (v) {
    case VariantId::Basic: return "basic";
    case VariantId::Atomic: return "atomic";
    case VariantId::Pairs: return "pairs";
    case VariantId::Reduction: return "reduction";
    case VariantId::SortDest: return "sortdest";
  }
  return "?";
}

inline std::optional<VariantId> parse_variant(std::string_view name) {
  for (auto v : kAllVariants)
    if (to_string(v) == name) return v;
  return std::nullopt;
}

struct RunOptions {
  std::size_t chunks = 0;  // 0: one chunk per worker
  bool apply_on_arrival = false;
  bool trace = false;
  bool filter_changed = true;  // label propagation only
  std::optional<std::chrono::milliseconds> quiescence_timeout;
  // Fault injection for verification tests: in this iteration chunk 0 drops
  // every contribution of its first sending vertex.
  std::optional<std::size_t> fault_iteration;
};

enum class PhaseKind { Update, Iterate, Fold };

inline std::string_view to_string(PhaseKind k) {
  switch (k) {
    case PhaseKind::Update: return "update";
    case PhaseKind::Iterate: return "iterate";
    case PhaseKind::Fold: return "fold";
  }
  return "?";
}

/// Driver-side interval from the broadcast that opens a phase to the
/// quiescence point that closes it.
struct PhaseSpan {
  PhaseKind kind = PhaseKind::Update;
  std::size_t iteration = 0;
  std::int64_t start_ns = 0;
  std::int64_t end_ns = 0;
};

struct RunStats {
  // (dest, value) records moved between workers: batch records for
  // basic/sortdest, buffer records for pairs, full-length partials sent up
  // the tree for reduction, none for atomic.
  std::uint64_t update_records = 0;
  std::size_t iterations_run = 0;
  std::vector<PhaseSpan> phases;
  std::vector<TraceEvent> trace;
};

inline std::uint64_t count_update_records(const RunStats& stats) { return stats.update_records; }

inline bool is_application_kind(MessageKind k) {
  return k == MessageKind::RankBatch || k == MessageKind::LabelBatch || k == MessageKind::BufferReady ||
         k == MessageKind::Control;
}

/// Application events (batches, buffer notices, control) that do not lie
/// strictly inside an iterate or fold phase. Empty means the run was
/// phase-safe. Requires a traced run.
inline std::vector<std::string> phase_violations(const RunStats& stats) {
  std::vector<std::string> out;
  for (const auto& e : stats.trace) {
    if (!is_application_kind(e.kind)) continue;
    const PhaseSpan* home = nullptr;
    for (const auto& p : stats.phases)
      if (e.ts_ns >= p.start_ns && e.ts_ns <= p.end_ns && (!home || p.kind != PhaseKind::Update)) home = &p;
    if (!home || home->kind == PhaseKind::Update)
      out.push_back(std::string(to_string(e.kind)) + " at worker " + std::to_string(e.worker) + " ts " +
                    std::to_string(e.ts_ns) +
                    (home ? " inside update phase of iteration " + std::to_string(home->iteration)
                          : std::string(" outside every phase")));
  }
  return out;
}

template <class Value>
struct Record {
  VertexId dest;
  Value value;
};

using RankRecord = Record<float>;
using LabelRecord = Record<VertexId>;

namespace detail {

struct PageRankAlgo {
  using Value = float;
  static constexpr MessageKind kBatchKind = MessageKind::RankBatch;

  struct Chunk {
    std::vector<float> a, b;
    std::vector<std::uint32_t> d;
  };

  float alpha = kDefaultAlpha;

  static Value identity(std::size_t) { return 0.0f; }
  static Value combine(Value acc, Value x) { return acc + x; }

  static void atomic_combine(Value& cell, Value x) {
    std::atomic_ref<float> ref(cell);
    float seen = ref.load(std::memory_order_relaxed);
    while (!ref.compare_exchange_weak(seen, seen + x, std::memory_order_relaxed)) {
    }
  }

  void init(Chunk& c, const ChunkEdges& edges) const {
    const auto n = edges.num_local();
    c.a.assign(n, 0.0f);
    c.b.assign(n, 0.0f);
    c.d.resize(n);
    for (std::size_t i = 0; i < n; ++i) c.d[i] = edges.degree(i);
  }

  void update(Chunk& c) const {
    for (std::size_t i = 0; i < c.a.size(); ++i) {
      c.b[i] = scaled_contribution(alpha, c.a[i], c.d[i]);
      c.a[i] = 1.0f - alpha;
    }
  }

  bool sends(const Chunk&, std::size_t) const { return true; }
  Value out(const Chunk& c, std::size_t i) const { return c.b[i]; }
  void apply(Chunk& c, std::size_t i, Value v) const { c.a[i] += v; }
};

struct LabelPropAlgo {
  using Value = VertexId;
  static constexpr MessageKind kBatchKind = MessageKind::LabelBatch;

  struct Chunk {
    std::vector<VertexId> labels;
    // prev_changed drives this iteration's sends; changed records receipts.
    std::vector<char> prev_changed, changed;
    bool any_changed = false;
    bool first = true;
  };

  bool filter_changed = true;

  static Value identity(std::size_t num_vertices) { return static_cast<VertexId>(num_vertices); }
  static Value combine(Value acc, Value x) { return std::min(acc, x); }

  static void atomic_combine(Value& cell, Value x) {
    std::atomic_ref<VertexId> ref(cell);
    VertexId seen = ref.load(std::memory_order_relaxed);
    while (x < seen && !ref.compare_exchange_weak(seen, x, std::memory_order_relaxed)) {
    }
  }

  void init(Chunk& c, const ChunkEdges& edges) const {
    const auto n = edges.num_local();
    c.labels.resize(n);
    for (std::size_t i = 0; i < n; ++i) c.labels[i] = edges.base + static_cast<VertexId>(i);
    c.prev_changed.assign(n, 1);
    c.changed.assign(n, 0);
    c.any_changed = false;
    c.first = true;
  }

  void update(Chunk& c) const {
    if (c.first) {
      std::fill(c.prev_changed.begin(), c.prev_changed.end(), 1);
      c.first = false;
    } else {
      c.prev_changed.swap(c.changed);
    }
    std::fill(c.changed.begin(), c.changed.end(), 0);
    c.any_changed = false;
  }

  bool sends(const Chunk& c, std::size_t i) const { return !filter_changed || c.prev_changed[i]; }
  Value out(const Chunk& c, std::size_t i) const { return c.labels[i]; }
  void apply(Chunk& c, std::size_t i, Value v) const {
    if (v < c.labels[i]) {
      c.labels[i] = v;
      c.changed[i] = 1;
      c.any_changed = true;
    }
  }
};

template <class Value>
struct Partial {
  unsigned level = 0;
  std::vector<Value> data;
};

template <class Value>
using ExchangePayload =
    std::variant<std::monostate, std::vector<Record<Value>>, Partial<Value>, std::shared_ptr<const std::vector<Value>>>;

/// Per-chunk actor state plus the shared channels of one run.
template <class Algo>
class Exchange {
 public:
  using Value = typename Algo::Value;
  using Batch = std::vector<Record<Value>>;
  using Payload = ExchangePayload<Value>;
  using Message = Envelope<Payload>;

  Exchange(const Graph& g, VariantId variant, std::size_t workers, const RunOptions& opts, Algo algo)
      : variant_(variant),
        opts_(opts),
        algo_(algo),
        partition_(g.num_vertices(), opts.chunks ? opts.chunks : workers),
        chunks_(build_chunks(g, partition_)),
        slots_(partition_.num_chunks()) {
    if (workers == 0) throw std::invalid_argument("need at least one worker");
    const auto C = partition_.num_chunks();
    if (variant_ == VariantId::SortDest) {
      dest_major_.reserve(C);
      for (const auto& ce : chunks_) dest_major_.push_back(to_dest_major(ce, partition_));
    }
    if (variant_ == VariantId::Pairs) pair_buffers_.assign(C, std::vector<Batch>(C));
    if (variant_ == VariantId::Atomic) global_.assign(partition_.num_vertices(), Algo::identity(partition_.num_vertices()));
    unsigned levels = 1;
    while ((std::size_t{1} << (levels - 1)) < C) ++levels;
    for (auto& s : slots_) {
      s.inbox.resize(C);
      s.arrived.assign(C, 0);
      s.children.resize(levels);
    }
    EngineOptions eo;
    eo.trace = opts.trace;
    eo.quiescence_timeout = opts.quiescence_timeout;
    engine_ = std::make_unique<Engine<Payload>>(
        workers, C, [this](ChunkId self, Message&& m) { handle(self, std::move(m)); }, eo);
  }

  Algo& algo() { return algo_; }
  const Partition& partition() const { return partition_; }
  typename Algo::Chunk& chunk_state(ChunkId c) { return slots_[c].state; }

  void reset() {
    for (ChunkId c = 0; c < slots_.size(); ++c) algo_.init(slots_[c].state, chunks_[c]);
    if (variant_ == VariantId::Atomic) std::fill(global_.begin(), global_.end(), Algo::identity(partition_.num_vertices()));
    records_.store(0);
    stats_ = {};
  }

  /// One driver step: update, iterate, and fold where the strategy needs it.
  void step() {
    const auto iter = stats_.iterations_run;
    current_iteration_.store(iter, std::memory_order_relaxed);
    phase(PhaseKind::Update, iter, MessageKind::Update);
    phase(PhaseKind::Iterate, iter, MessageKind::Iterate);
    if (variant_ == VariantId::Atomic) phase(PhaseKind::Fold, iter, MessageKind::Control);
    ++stats_.iterations_run;
  }

  RunStats finish() {
    stats_.update_records = records_.load();
    if (opts_.trace) stats_.trace = engine_->trace();
    return stats_;
  }

 private:
  struct Slot {
    typename Algo::Chunk state;
    // sender-ordered application
    std::vector<Batch> inbox;
    std::vector<char> arrived;
    std::size_t next_sender = 0;
    bool loop_done = false;
    // reduction tree
    std::vector<Value> partial;
    std::vector<std::optional<std::vector<Value>>> children;
    unsigned next_level = 0;
    bool own_ready = false;
  };

  void phase(PhaseKind kind, std::size_t iter, MessageKind msg) {
    PhaseSpan span{kind, iter, monotonic_ns(), 0};
    engine_->broadcast(Message{msg, kDriver, {}});
    engine_->wait_quiescence();
    span.end_ns = monotonic_ns();
    stats_.phases.push_back(span);
  }

  std::size_t num_chunks() const { return slots_.size(); }

  // Local vertex dropped by fault injection in this iterate, if any.
  std::optional<std::size_t> faulted_vertex(ChunkId self, const Slot& s) const {
    if (self != 0 || opts_.fault_iteration != current_iteration_.load(std::memory_order_relaxed)) return std::nullopt;
    const auto& ce = chunks_[self];
    for (std::size_t i = 0; i < ce.num_local(); ++i)
      if (ce.degree(i) > 0 && algo_.sends(s.state, i)) return i;
    return std::nullopt;
  }

  void handle(ChunkId self, Message&& m) {
    auto& s = slots_[self];
    switch (m.kind) {
      case MessageKind::Update:
        on_update(self, s);
        break;
      case MessageKind::Iterate:
        on_iterate(self, s);
        break;
      case MessageKind::RankBatch:
      case MessageKind::LabelBatch: {
        auto& batch = std::get<Batch>(m.payload);
        if (opts_.apply_on_arrival) {
          apply_batch(self, s, batch);
        } else {
          s.inbox[m.from] = std::move(batch);
          s.arrived[m.from] = 1;
          drain_ordered(self, s);
        }
        break;
      }
      case MessageKind::BufferReady:
        if (opts_.apply_on_arrival) {
          apply_batch(self, s, pair_buffers_[m.from][self]);
        } else {
          s.arrived[m.from] = 1;
          drain_ordered(self, s);
        }
        break;
      case MessageKind::Control:
        on_control(self, s, m.payload);
        break;
    }
  }

  void on_update(ChunkId, Slot& s) {
    algo_.update(s.state);
    std::fill(s.arrived.begin(), s.arrived.end(), 0);
    s.next_sender = 0;
    s.loop_done = false;
    s.next_level = 0;
    s.own_ready = false;
  }

  void on_iterate(ChunkId self, Slot& s) {
    switch (variant_) {
      case VariantId::Basic: iterate_basic(self, s); break;
      case VariantId::Atomic: iterate_atomic(self, s); break;
      case VariantId::Pairs: iterate_pairs(self, s); break;
      case VariantId::Reduction: iterate_reduction(self, s); break;
      case VariantId::SortDest: iterate_sortdest(self, s); break;
    }
  }

  void iterate_basic(ChunkId self, Slot& s) {
    const auto& ce = chunks_[self];
    const auto skip = faulted_vertex(self, s);
    std::vector<Batch> outgoing(num_chunks());
    std::uint64_t emitted = 0;
    for (std::size_t i = 0; i < ce.num_local(); ++i) {
      if (!algo_.sends(s.state, i) || skip == i) continue;
      const Value v = algo_.out(s.state, i);
      for (auto dest : ce.neighbors(i)) outgoing[partition_.chunk_of(dest)].push_back({dest, v});
      emitted += ce.degree(i);
    }
    records_.fetch_add(emitted, std::memory_order_relaxed);
    for (ChunkId q = 0; q < num_chunks(); ++q)
      engine_->send(q, Message{Algo::kBatchKind, self, std::move(outgoing[q])});
    s.loop_done = true;
    drain_ordered(self, s);
  }

  void iterate_sortdest(ChunkId self, Slot& s) {
    const auto& dm = dest_major_[self];
    const auto skip = faulted_vertex(self, s);
    const auto identity = Algo::identity(partition_.num_vertices());
    std::uint64_t emitted = 0;
    for (ChunkId q = 0; q < num_chunks(); ++q) {
      Batch batch;
      batch.reserve(dm.chunk_groups[q + 1] - dm.chunk_groups[q]);
      for (auto g = dm.chunk_groups[q]; g < dm.chunk_groups[q + 1]; ++g) {
        Value acc = identity;
        bool any = false;
        for (auto src : dm.group_sources(g)) {
          if (!algo_.sends(s.state, src) || skip == src) continue;
          acc = Algo::combine(acc, algo_.out(s.state, src));
          any = true;
        }
        if (any) batch.push_back({dm.group_dest[g], acc});
      }
      emitted += batch.size();
      engine_->send(q, Message{Algo::kBatchKind, self, std::move(batch)});
    }
    records_.fetch_add(emitted, std::memory_order_relaxed);
    s.loop_done = true;
    drain_ordered(self, s);
  }

  void iterate_pairs(ChunkId self, Slot& s) {
    const auto& ce = chunks_[self];
    const auto skip = faulted_vertex(self, s);
    auto& row = pair_buffers_[self];
    for (auto& buf : row) buf.clear();
    std::uint64_t emitted = 0;
    for (std::size_t i = 0; i < ce.num_local(); ++i) {
      if (!algo_.sends(s.state, i) || skip == i) continue;
      const Value v = algo_.out(s.state, i);
      for (auto dest : ce.neighbors(i)) row[partition_.chunk_of(dest)].push_back({dest, v});
      emitted += ce.degree(i);
    }
    records_.fetch_add(emitted, std::memory_order_relaxed);
    for (ChunkId q = 0; q < num_chunks(); ++q) engine_->send(q, Message{MessageKind::BufferReady, self, {}});
    s.loop_done = true;
    drain_ordered(self, s);
  }

  void iterate_atomic(ChunkId self, Slot& s) {
    const auto& ce = chunks_[self];
    const auto skip = faulted_vertex(self, s);
    for (std::size_t i = 0; i < ce.num_local(); ++i) {
      if (!algo_.sends(s.state, i) || skip == i) continue;
      const Value v = algo_.out(s.state, i);
      for (auto dest : ce.neighbors(i)) Algo::atomic_combine(global_[dest], v);
    }
  }

  // Full-length contribution over every local edge; label propagation does
  // not filter by changed flags here.
  void iterate_reduction(ChunkId self, Slot& s) {
    const auto& ce = chunks_[self];
    const auto skip = faulted_vertex(self, s);
    s.partial.assign(partition_.num_vertices(), Algo::identity(partition_.num_vertices()));
    for (std::size_t i = 0; i < ce.num_local(); ++i) {
      if (skip == i) continue;
      const Value v = algo_.out(s.state, i);
      for (auto dest : ce.neighbors(i)) s.partial[dest] = Algo::combine(s.partial[dest], v);
    }
    s.own_ready = true;
    advance_reduction(self, s);
  }

  // Adjacent-pair binary tree: at level l (stride 2^l) chunk c with
  // c % 2^(l+1) == 2^l sends to c - 2^l; chunk 0 ends up with the total.
  void advance_reduction(ChunkId self, Slot& s) {
    if (!s.own_ready) return;
    const std::size_t C = num_chunks();
    for (;;) {
      const std::size_t stride = std::size_t{1} << s.next_level;
      if (stride >= C) {
        auto reduced = std::make_shared<const std::vector<Value>>(std::move(s.partial));
        s.own_ready = false;
        for (ChunkId q = 0; q < C; ++q) engine_->send(q, Message{MessageKind::Control, self, Payload{reduced}});
        return;
      }
      if (self % (2 * stride) != 0) {
        records_.fetch_add(s.partial.size(), std::memory_order_relaxed);
        s.own_ready = false;
        engine_->send(static_cast<ChunkId>(self - stride),
                      Message{MessageKind::Control, self, Payload{Partial<Value>{s.next_level, std::move(s.partial)}}});
        return;
      }
      if (self + stride < C) {
        auto& child = s.children[s.next_level];
        if (!child) return;
        for (std::size_t v = 0; v < s.partial.size(); ++v) s.partial[v] = Algo::combine(s.partial[v], (*child)[v]);
        child.reset();
      }
      ++s.next_level;
    }
  }

  void on_control(ChunkId self, Slot& s, Payload& payload) {
    const auto base = partition_.base(self);
    const auto n = partition_.size(self);
    if (std::holds_alternative<std::monostate>(payload)) {
      // Fold the shared buffer slice owned by this chunk.
      const auto identity = Algo::identity(partition_.num_vertices());
      for (std::size_t i = 0; i < n; ++i) {
        algo_.apply(s.state, i, global_[base + i]);
        global_[base + i] = identity;
      }
    } else if (auto* part = std::get_if<Partial<Value>>(&payload)) {
      s.children[part->level] = std::move(part->data);
      advance_reduction(self, s);
    } else if (auto* reduced = std::get_if<std::shared_ptr<const std::vector<Value>>>(&payload)) {
      const auto& r = **reduced;
      for (std::size_t i = 0; i < n; ++i) algo_.apply(s.state, i, r[base + i]);
    } else {
      throw std::logic_error("unexpected control payload");
    }
  }

  void apply_batch(ChunkId self, Slot& s, const Batch& batch) {
    const auto base = partition_.base(self);
    for (const auto& r : batch) algo_.apply(s.state, r.dest - base, r.value);
  }

  void drain_ordered(ChunkId self, Slot& s) {
    if (!s.loop_done) return;
    const auto base = partition_.base(self);
    while (s.next_sender < num_chunks() && s.arrived[s.next_sender]) {
      const Batch& batch = variant_ == VariantId::Pairs ? pair_buffers_[s.next_sender][self] : s.inbox[s.next_sender];
      for (const auto& r : batch) algo_.apply(s.state, r.dest - base, r.value);
      if (variant_ != VariantId::Pairs) Batch{}.swap(s.inbox[s.next_sender]);
      ++s.next_sender;
    }
  }

  VariantId variant_;
  RunOptions opts_;
  Algo algo_;
  Partition partition_;
  std::vector<ChunkEdges> chunks_;
  std::vector<DestMajorEdges> dest_major_;
  std::vector<std::vector<Batch>> pair_buffers_;  // [producer][consumer]
  std::vector<Value> global_;
  std::vector<Slot> slots_;
  std::atomic<std::uint64_t> records_{0};
  std::atomic<std::size_t> current_iteration_{0};
  RunStats stats_;
  std::unique_ptr<Engine<Payload>> engine_;  // last: joined before the state it touches is destroyed
};

}  // namespace detail

/// Prepared PageRank job: partitioning, edge layouts and the worker pool are
/// set up by the constructor so run() covers only the computation.
class PageRankRun {
 public:
  PageRankRun(const Graph& g, VariantId variant, std::size_t workers, RunOptions opts = {})
      : exchange_(g, variant, workers, opts, detail::PageRankAlgo{}) {}

  std::vector<float> run(float alpha = kDefaultAlpha, std::size_t iterations = kDefaultIterations) {
    check_alpha(alpha);
    exchange_.algo().alpha = alpha;
    exchange_.reset();
    for (std::size_t it = 0; it < iterations; ++it) exchange_.step();
    stats_ = exchange_.finish();
    std::vector<float> ranks;
    ranks.reserve(exchange_.partition().num_vertices());
    for (ChunkId c = 0; c < exchange_.partition().num_chunks(); ++c) {
      const auto& a = exchange_.chunk_state(c).a;
      ranks.insert(ranks.end(), a.begin(), a.end());
    }
    return ranks;
  }

  const RunStats& stats() const { return stats_; }

 private:
  detail::Exchange<detail::PageRankAlgo> exchange_;
  RunStats stats_;
};

/// Prepared label-propagation job over a symmetrized graph.
class LabelPropRun {
 public:
  LabelPropRun(const Graph& g_sym, VariantId variant, std::size_t workers, RunOptions opts = {})
      : exchange_(g_sym, variant, workers, opts, detail::LabelPropAlgo{opts.filter_changed}) {}

  std::vector<VertexId> run() {
    exchange_.reset();
    const auto C = exchange_.partition().num_chunks();
    bool changed = true;
    while (changed) {
      exchange_.step();
      changed = false;
      for (ChunkId c = 0; c < C; ++c) changed = changed || exchange_.chunk_state(c).any_changed;
    }
    stats_ = exchange_.finish();
    std::vector<VertexId> labels;
    labels.reserve(exchange_.partition().num_vertices());
    for (ChunkId c = 0; c < C; ++c) {
      const auto& l = exchange_.chunk_state(c).labels;
      labels.insert(labels.end(), l.begin(), l.end());
    }
    return labels;
  }

  const RunStats& stats() const { return stats_; }

 private:
  detail::Exchange<detail::LabelPropAlgo> exchange_;
  RunStats stats_;
};

inline std::vector<float> run_pagerank(const Graph& g, VariantId variant, std::size_t workers,
                                       float alpha = kDefaultAlpha, std::size_t iterations = kDefaultIterations,
                                       const RunOptions& opts = {}, RunStats* stats = nullptr) {
  PageRankRun job(g, variant, workers, opts);
  auto ranks = job.run(alpha, iterations);
  if (stats) *stats = job.stats();
  return ranks;
}

inline std::vector<VertexId> run_labelprop(const Graph& g_sym, VariantId variant, std::size_t workers,
                                           const RunOptions& opts = {}, RunStats* stats = nullptr) {
  LabelPropRun job(g_sym, variant, workers, opts);
  auto labels = job.run();
  if (stats) *stats = job.stats();
  return labels;
}

}  // namespace actorgraph
