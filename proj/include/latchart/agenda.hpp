#pragma once

// Scored agenda with relative beam pruning.  Each parse cycle tracks the
// maximum score pushed so far this cycle; a pair is retained only when its
// score is strictly above (max - offset), and the check is repeated when the
// pair is popped, so late high scores retire entries already queued.  Pops
// are best-first; ties fall back to push order.

#include <cstdint>
#include <limits>
#include <optional>
#include <queue>
#include <vector>

#include "latchart/chart.hpp"

namespace latchart {

struct AgendaStats {
  std::uint64_t push_attempts = 0;
  std::uint64_t pushed = 0;
  std::uint64_t rejected_at_push = 0;
  std::uint64_t popped = 0;
  std::uint64_t dropped_at_pop = 0;

  bool operator==(const AgendaStats&) const = default;
};

struct AgendaItem {
  double score = 0.0;
  std::uint64_t seq = 0;
  EdgeId active = -1;
  EdgeId passive = -1;
};

class Agenda {
 public:
  explicit Agenda(double beam_offset = std::numeric_limits<double>::infinity())
      : offset_(beam_offset) {}

  void set_offset(double beam_offset) { offset_ = beam_offset; }
  double offset() const { return offset_; }

  // Resets the per-cycle running maximum (the queue is empty between cycles).
  void begin_cycle() { running_max_ = -std::numeric_limits<double>::infinity(); }

  bool push(EdgeId active, EdgeId passive, double score) {
    ++stats_.push_attempts;
    if (score > running_max_) running_max_ = score;
    if (!retained(score)) {
      ++stats_.rejected_at_push;
      return false;
    }
    heap_.push(AgendaItem{score, next_seq_++, active, passive});
    ++stats_.pushed;
    return true;
  }

  // Next retained pair, best score first; drops entries that fell below the
  // beam after they were pushed.
  std::optional<AgendaItem> pop() {
    while (!heap_.empty()) {
      AgendaItem item = heap_.top();
      heap_.pop();
      if (!retained(item.score)) {
        ++stats_.dropped_at_pop;
        continue;
      }
      ++stats_.popped;
      return item;
    }
    return std::nullopt;
  }

  bool empty() const { return heap_.empty(); }
  const AgendaStats& stats() const { return stats_; }

 private:
  bool retained(double score) const {
    if (offset_ == std::numeric_limits<double>::infinity()) return true;
    return score > running_max_ - offset_;
  }

  struct Later {
    bool operator()(const AgendaItem& a, const AgendaItem& b) const {
      if (a.score != b.score) return a.score < b.score;
      return a.seq > b.seq;  // equal scores: earlier push first
    }
  };

  std::priority_queue<AgendaItem, std::vector<AgendaItem>, Later> heap_;
  double offset_;
  double running_max_ = -std::numeric_limits<double>::infinity();
  std::uint64_t next_seq_ = 0;
  AgendaStats stats_;
};

}  // namespace latchart
