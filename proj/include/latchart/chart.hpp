#pragma once

// Chart storage: vertices (one per frame) and edges.  An edge family is a
// single edge with several end vertices; `to` lists them in the order they
// were added and the most recent one is the edge's actual end.  Edges are
// kept in a deque so references stay stable while the chart grows.

#include <deque>
#include <memory>
#include <string>
#include <unordered_map>
#include <vector>

#include "latchart/core.hpp"
#include "latchart/feature.hpp"
#include "latchart/models.hpp"

namespace latchart {

using EdgeId = int;

inline constexpr int kLexRule = -1;   // edge from a lexicon entry
inline constexpr int kGoalRule = -2;  // synthesized initial edge

using SlotsPtr = std::shared_ptr<const std::vector<FeatureValue>>;

struct Edge {
  int rule = kLexRule;  // index into Grammar::rules, or kLexRule/kGoalRule
  int dot = 0;          // rhs positions consumed; passive iff dot == rhs_size
  int rhs_size = 0;
  std::string cat;       // lhs category (lexical: the entry's category)
  std::string next_cat;  // expected category when active, else empty
  Frame from = 0;
  std::vector<Frame> to;  // end frames in insertion order; actual is back()
  std::vector<std::string> words;      // covered lexical keys, left to right
  std::string left_context = kBeginMarker;  // word before from, for bigram
  ScoreRecord scores;
  // Feature slots (0 = lhs, k = rhs position k), immutable once created;
  // null when the edge carries no constraints.
  SlotsPtr slots;
  QuickSig sig;          // export signature (passive) or expectation (active)
  std::string sig_text;  // canonical feature-context text, dedup component

  bool active() const { return dot < rhs_size; }
  bool passive() const { return !active(); }
  Frame actual() const { return to.back(); }
  const std::string& effective_last_word() const {
    return words.empty() ? left_context : words.back();
  }
};

struct Vertex {
  Frame frame = 0;
  ProsodyAttribute prosody;
  // Edge ids by incidence: *_out lists edges starting here, *_in edges
  // ending here (an edge appears in one _in list per end frame).
  std::vector<EdgeId> active_out;
  std::vector<EdgeId> active_in;
  std::vector<EdgeId> inactive_out;
  std::vector<EdgeId> inactive_in;
};

class Chart {
 public:
  std::deque<Edge> edges;
  std::vector<Vertex> vertices;
  EdgeId goal = -1;

  Vertex& vertex(Frame f) { return vertices[static_cast<std::size_t>(f)]; }
  const Vertex& vertex(Frame f) const {
    return vertices[static_cast<std::size_t>(f)];
  }

  // Identity for duplicate detection: rule (with lexical key), dot, start
  // vertex, end-frame set and canonical feature signature.
  static std::string edge_key(const Edge& e) {
    std::string key;
    key += std::to_string(e.rule);
    if (e.rule == kLexRule) {
      key += ':';
      key += e.words.empty() ? std::string() : e.words.front();
    }
    key += '|';
    key += std::to_string(e.dot);
    key += '|';
    key += std::to_string(e.from);
    key += '|';
    for (Frame f : e.to) {
      key += std::to_string(f);
      key += ',';
    }
    key += '|';
    key += e.sig_text;
    return key;
  }

  // All edge ids currently stored under the duplicate key of `e`.
  std::vector<EdgeId> duplicates_of(const Edge& e) const {
    std::vector<EdgeId> out;
    auto [lo, hi] = dedupe_.equal_range(edge_key(e));
    for (auto it = lo; it != hi; ++it) out.push_back(it->second);
    return out;
  }

  EdgeId append(Edge&& e) {
    EdgeId id = static_cast<EdgeId>(edges.size());
    dedupe_.emplace(edge_key(e), id);
    edges.push_back(std::move(e));
    Edge& stored = edges.back();
    Vertex& vf = vertex(stored.from);
    (stored.active() ? vf.active_out : vf.inactive_out).push_back(id);
    for (Frame f : stored.to) {
      Vertex& vt = vertex(f);
      (stored.active() ? vt.active_in : vt.inactive_in).push_back(id);
    }
    return id;
  }

  // Re-indexes an edge whose end set is about to change (Inherit).
  void begin_rekey(EdgeId id) {
    auto [lo, hi] = dedupe_.equal_range(edge_key(edges[id]));
    for (auto it = lo; it != hi; ++it) {
      if (it->second == id) {
        dedupe_.erase(it);
        return;
      }
    }
  }
  void end_rekey(EdgeId id) { dedupe_.emplace(edge_key(edges[id]), id); }

 private:
  std::unordered_multimap<std::string, EdgeId> dedupe_;
};

}  // namespace latchart
