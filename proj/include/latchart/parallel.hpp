#pragma once

// Parallel drain mode: one driver thread runs the frame-synchronous
// control loop; a persistent pool of workers drains each cycle's agenda.
// All chart and agenda state sits behind a single mutex — workers pop
// pairs and publish combine results under the lock, and run the expensive
// stage (quick check + feature unification) outside it, which is safe
// because unification only reads edge members that never change after
// creation.  Results are confluent with the sequential engine: combine
// arithmetic is schedule-independent per derivation, and out-of-order
// completions that improve an existing edge reschedule its combinations.
//
// worker_count == 1 bypasses threads entirely and is byte-identical to the
// sequential engine.

#include <algorithm>
#include <array>
#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <mutex>
#include <optional>
#include <thread>
#include <utility>
#include <vector>

#include "latchart/engine.hpp"

namespace latchart {

struct WorkerConfig {
  int worker_count = 1;
  int task_batch = 1;  // pairs fetched per lock acquisition
  bool metrics_enabled = false;
};

struct WorkerMetrics {
  std::uint64_t tasks = 0;  // agenda pairs this worker processed
  double unify_ms = 0.0;    // unification stage (outside the lock)
  double busy_ms = 0.0;     // unification plus publication
  double idle_ms = 0.0;     // waiting for work while a cycle is draining
  // Unification-batch durations, binned at 1,4,16,...,4096 microseconds.
  std::array<std::uint64_t, 8> unify_hist{};
};

struct ParallelMetrics {
  std::vector<WorkerMetrics> workers;
  std::uint64_t tasks_total = 0;
  double unify_ms_total = 0.0;
  double busy_ms_total = 0.0;
  double unification_share = 0.0;  // unify time over busy time
  double wall_ms = 0.0;
};

struct ParallelOutcome {
  ParseOutcome outcome;
  ParallelMetrics metrics;
};

// Relative speed gain of `candidate_ms` over `baseline_ms`, in percent.
inline double percent_gain(double baseline_ms, double candidate_ms) {
  if (baseline_ms <= 0.0) return 0.0;
  return 100.0 * (baseline_ms - candidate_ms) / baseline_ms;
}

namespace detail {

inline void record_hist(std::array<std::uint64_t, 8>& hist, double us) {
  static constexpr double kEdges[7] = {1, 4, 16, 64, 256, 1024, 4096};
  std::size_t bin = 0;
  while (bin < 7 && us >= kEdges[bin]) ++bin;
  ++hist[bin];
}

// Persistent worker pool bound to one Parser.  The driver alternates
// between exclusive phases (vertex creation, word insertion) and drain
// phases where workers race on the agenda; `mutex()` guards every touch of
// the parser outside this class.
class WorkerPool {
 public:
  WorkerPool(Parser& parser, int workers, int batch, bool metrics)
      : parser_(parser),
        batch_(std::max(1, batch)),
        metrics_(metrics),
        per_worker_(static_cast<std::size_t>(workers)) {
    threads_.reserve(static_cast<std::size_t>(workers));
    for (int i = 0; i < workers; ++i)
      threads_.emplace_back([this, i] { work(static_cast<std::size_t>(i)); });
  }

  ~WorkerPool() { shutdown(); }

  std::mutex& mutex() { return m_; }

  // Lets the workers drain the current agenda; returns when it is empty
  // and every worker has finished publishing.
  void drain_cycle() {
    std::unique_lock<std::mutex> lk(m_);
    ++generation_;
    cycle_done_ = false;
    cv_work_.notify_all();
    cv_done_.wait(lk, [this] { return cycle_done_; });
  }

  void shutdown() {
    {
      std::lock_guard<std::mutex> lk(m_);
      if (stop_) return;
      stop_ = true;
    }
    cv_work_.notify_all();
    for (auto& t : threads_) t.join();
  }

  const std::vector<WorkerMetrics>& metrics() const { return per_worker_; }

 private:
  using Clock = std::chrono::steady_clock;
  static double ms_between(Clock::time_point a, Clock::time_point b) {
    return std::chrono::duration<double, std::milli>(b - a).count();
  }

  void work(std::size_t wid) {
    WorkerMetrics& wm = per_worker_[wid];
    std::vector<AgendaItem> items;
    std::vector<std::pair<const Edge*, const Edge*>> operands;
    std::vector<std::optional<SlotsPtr>> unified;

    std::unique_lock<std::mutex> lk(m_);
    std::uint64_t seen_gen = 0;
    for (;;) {
      cv_work_.wait(lk, [&] { return stop_ || generation_ > seen_gen; });
      if (stop_) return;
      seen_gen = generation_;

      while (!cycle_done_) {
        items.clear();
        for (int k = 0; k < batch_; ++k) {
          auto item = parser_.pop_pair();
          if (!item) break;
          items.push_back(*item);
        }
        if (items.empty()) {
          if (busy_ == 0) {
            // Agenda empty and nobody mid-flight: the cycle is complete.
            cycle_done_ = true;
            cv_work_.notify_all();
            cv_done_.notify_all();
            break;
          }
          // A peer may still publish follow-up work; wait for it.
          auto w0 = Clock::now();
          cv_work_.wait(lk);
          if (metrics_) wm.idle_ms += ms_between(w0, Clock::now());
          continue;
        }

        ++busy_;
        operands.clear();
        for (const AgendaItem& item : items)
          operands.emplace_back(&parser_.edge(item.active),
                                &parser_.edge(item.passive));
        lk.unlock();
        auto u0 = Clock::now();
        unified.clear();
        for (const auto& [a, i] : operands)
          unified.push_back(parser_.unify_pair(*a, *i));
        auto u1 = Clock::now();
        lk.lock();
        for (std::size_t k = 0; k < items.size(); ++k)
          parser_.complete_pair(items[k], std::move(unified[k]));
        --busy_;
        wm.tasks += items.size();
        if (metrics_) {
          auto p1 = Clock::now();
          double unify_ms = ms_between(u0, u1);
          wm.unify_ms += unify_ms;
          wm.busy_ms += ms_between(u0, p1);
          record_hist(wm.unify_hist, unify_ms * 1000.0);
        }
        // Publications may have queued follow-up pairs for idle peers.
        cv_work_.notify_all();
      }
    }
  }

  Parser& parser_;
  const int batch_;
  const bool metrics_;
  std::vector<WorkerMetrics> per_worker_;
  std::vector<std::thread> threads_;

  std::mutex m_;
  std::condition_variable cv_work_;
  std::condition_variable cv_done_;
  std::uint64_t generation_ = 0;
  int busy_ = 0;  // workers between pop and publish
  bool cycle_done_ = true;
  bool stop_ = false;
};

}  // namespace detail

inline ParallelMetrics collect_metrics(
    const std::vector<WorkerMetrics>& per_worker, double wall_ms) {
  ParallelMetrics m;
  m.workers = per_worker;
  for (const auto& w : per_worker) {
    m.tasks_total += w.tasks;
    m.unify_ms_total += w.unify_ms;
    m.busy_ms_total += w.busy_ms;
  }
  m.unification_share =
      m.busy_ms_total > 0.0 ? m.unify_ms_total / m.busy_ms_total : 0.0;
  m.wall_ms = wall_ms;
  return m;
}

// Runs one lattice through `parser` with a pool of unification workers.
inline ParallelOutcome parallel_parse(Parser& parser, const Lattice& lat,
                                      const WorkerConfig& wc) {
  if (wc.worker_count < 1)
    throw InputError("parallel: worker count must be >= 1");
  if (wc.task_batch < 1)
    throw InputError("parallel: task batch must be >= 1");

  ParallelOutcome out;
  auto t0 = std::chrono::steady_clock::now();

  if (wc.worker_count == 1) {
    // Threadless path, byte-identical to the sequential engine.
    out.outcome = parser.parse(lat);
    WorkerMetrics wm;
    wm.tasks = out.outcome.agenda_stats.popped;
    out.metrics = collect_metrics({wm}, out.outcome.wall_ms);
    return out;
  }

  detail::WorkerPool pool(parser, wc.worker_count, wc.task_batch,
                          wc.metrics_enabled);
  {
    std::lock_guard<std::mutex> lk(pool.mutex());
    parser.begin(lat);
  }
  EmissionStream stream(lat);
  stream.emit_frame(0);
  for (Frame t = 1; t <= lat.frame_count; ++t) {
    {
      std::lock_guard<std::mutex> lk(pool.mutex());
      if (parser.config().predict)
        stream.set_prediction(parser.prediction_filter());
      parser.start_cycle(t, stream.emit_frame(t));
    }
    pool.drain_cycle();
  }
  {
    std::lock_guard<std::mutex> lk(pool.mutex());
    out.outcome = parser.outcome();
  }
  pool.shutdown();
  out.outcome.wall_ms = std::chrono::duration<double, std::milli>(
                            std::chrono::steady_clock::now() - t0)
                            .count();
  out.metrics = collect_metrics(pool.metrics(), out.outcome.wall_ms);
  return out;
}

}  // namespace latchart
