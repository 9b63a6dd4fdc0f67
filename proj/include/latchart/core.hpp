#pragma once

// Core value types shared by every stage of the lattice parser: frames,
// log-score sets keyed by end frame, the four-component score record kept
// on every chart edge, and the error taxonomy surfaced through the CLI.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace latchart {

// Frames are integer time indices into the utterance, starting at 0.
using Frame = std::int32_t;

// Sentence-begin marker used as bigram/trigram left context before the
// first word of an utterance.
inline constexpr const char* kBeginMarker = "<s>";

// Log-probability floor standing in for log(0) in prosody attributes.
inline constexpr double kLogZero = -1e9;

// ---------------------------------------------------------------------------
// Errors.  InputError covers anything wrong with user-supplied files or
// configuration (CLI exit code 2); EngineError covers runtime violations
// inside the parser (exit code 3).  Messages are module-qualified.

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InputError : public Error {
 public:
  using Error::Error;
};

// Syntax or validation failure in a specific file, with a 1-based line.
class FileFormatError : public InputError {
 public:
  FileFormatError(const std::string& module, int line, const std::string& what)
      : InputError(module + ": line " + std::to_string(line) + ": " + what),
        line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

class UnknownWordError : public InputError {
 public:
  explicit UnknownWordError(const std::string& key)
      : InputError("engine: word hypothesis key not in lexicon: " + key) {}
};

class EngineError : public Error {
 public:
  using Error::Error;
};

// Raised when a score-set lookup names a frame the set does not cover;
// this always signals an illegal pairing of edges.
class MissingFrameError : public EngineError {
 public:
  explicit MissingFrameError(Frame t)
      : EngineError("engine: no score entry for frame " +
                    std::to_string(t)) {}
};

// ---------------------------------------------------------------------------
// ScoreSet: a small map frame -> log score, kept sorted by frame.  An edge
// family shares one edge with several end frames; the acoustic components
// of its scores are ScoreSets keyed by those end frames.

class ScoreSet {
 public:
  using Entry = std::pair<Frame, double>;

  ScoreSet() = default;

  static ScoreSet single(Frame t, double value) {
    ScoreSet s;
    s.entries_.emplace_back(t, value);
    return s;
  }

  bool empty() const { return entries_.empty(); }
  std::size_t size() const { return entries_.size(); }

  bool has(Frame t) const { return find(t) != nullptr; }

  const double* find(Frame t) const {
    auto it = lower_bound(t);
    if (it != entries_.end() && it->first == t) return &it->second;
    return nullptr;
  }

  // Log score at end frame t; the frame must be covered.
  double at(Frame t) const {
    if (const double* v = find(t)) return *v;
    throw MissingFrameError(t);
  }

  // Inserts or overwrites the entry for frame t.
  void set(Frame t, double value) {
    auto it = lower_bound(t);
    if (it != entries_.end() && it->first == t) {
      it->second = value;
    } else {
      entries_.insert(it, Entry{t, value});
    }
  }

  // Adds x to every element, preserving frames.
  void add_all(double x) {
    for (auto& e : entries_) e.second += x;
  }

  const std::vector<Entry>& entries() const { return entries_; }

  bool operator==(const ScoreSet& other) const = default;

 private:
  std::vector<Entry>::const_iterator lower_bound(Frame t) const {
    return std::lower_bound(
        entries_.begin(), entries_.end(), t,
        [](const Entry& e, Frame f) { return e.first < f; });
  }
  std::vector<Entry>::iterator lower_bound(Frame t) {
    return std::lower_bound(
        entries_.begin(), entries_.end(), t,
        [](const Entry& e, Frame f) { return e.first < f; });
  }

  std::vector<Entry> entries_;
};

// score-set plus scalar: adds x to every element of the set.
inline ScoreSet oplus(const ScoreSet& s, double x) {
  ScoreSet out = s;
  out.add_all(x);
  return out;
}

// Score at end frame t of set s; throws MissingFrameError when absent.
inline double lookup(const ScoreSet& s, Frame t) { return s.at(t); }

// ---------------------------------------------------------------------------
// Per-edge scores.  Each of the four knowledge sources contributes an
// inside score (log probability of the derivation covered by the edge) and
// an outside score (a Viterbi estimate of the best derivation prefix from
// utterance start through the edge).  The acoustic components are keyed by
// end frame because an edge family can end at several frames; the other
// components are scalars shared by all ends.

struct ScoreRecord {
  ScoreSet inside_acoustic;
  ScoreSet outside_acoustic;
  double inside_bigram = 0.0;
  double outside_bigram = 0.0;
  double inside_prosody = 0.0;
  double outside_prosody = 0.0;
  double inside_grammar = 0.0;
  double outside_grammar = 0.0;

  bool operator==(const ScoreRecord& other) const = default;
};

// Weights for combining the four score components (lambda_X).
struct ScoreWeights {
  double acoustic = 1.0;
  double bigram = 1.0;
  double prosody = 1.0;
  double grammar = 1.0;
};

// Weighted total of the inside components at end frame t.
inline double weighted_inside(const ScoreRecord& r, Frame t,
                              const ScoreWeights& w) {
  return w.acoustic * lookup(r.inside_acoustic, t) + w.bigram * r.inside_bigram +
         w.prosody * r.inside_prosody + w.grammar * r.inside_grammar;
}

// Weighted total of the outside components at end frame t.
inline double weighted_outside(const ScoreRecord& r, Frame t,
                               const ScoreWeights& w) {
  return w.acoustic * lookup(r.outside_acoustic, t) +
         w.bigram * r.outside_bigram + w.prosody * r.outside_prosody +
         w.grammar * r.outside_grammar;
}

// ---------------------------------------------------------------------------
// A scored word hypothesis from the decoder: key spans (from, to] in
// frames with an acoustic log score.  from < to always holds.

struct WordHypothesis {
  Frame from = 0;
  Frame to = 0;
  std::string key;
  double score = 0.0;

  bool operator==(const WordHypothesis& other) const = default;
};

}  // namespace latchart
