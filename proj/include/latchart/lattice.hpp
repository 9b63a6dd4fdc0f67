#pragma once

// Word lattices and the decoder-side emission stream.  A lattice is the
// full hypothesis set for one utterance; the emission stream replays it
// frame-synchronously (all hypotheses ending at frame t are emitted in
// cycle t) and applies an optional per-frame prediction filter.
//
// Lattice file format ('#' starts a comment):
//   FRAMES <n>                                (first line)
//   WORD <key> <from> <to> <logscore>
//   PROSODY <from> <to> <pB0> <pB2> <pB3> <pB9>

#include <algorithm>
#include <cmath>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "latchart/core.hpp"
#include "latchart/models.hpp"
#include "latchart/textio.hpp"

namespace latchart {

struct Lattice {
  Frame frame_count = 0;
  // Sorted by to-frame (stable), so hypotheses of one edge family (same
  // from and key, consecutive to-frames) arrive in consecutive cycles.
  std::vector<WordHypothesis> hypotheses;
  std::vector<ProsodyHypothesis> prosody;
};

inline Lattice load_lattice(const std::string& text) {
  constexpr const char* kMod = "lattice";
  Lattice lat;
  bool have_frames = false;
  std::istringstream in(text);
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string line = detail::strip_comment(raw);
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string keyword;
    ls >> keyword;

    if (!have_frames) {
      if (keyword != "FRAMES")
        throw FileFormatError(kMod, line_no,
                              "first line must be FRAMES <count>");
      std::string count;
      if (!(ls >> count) || (ls >> std::ws, !ls.eof()))
        throw FileFormatError(kMod, line_no, "expected FRAMES <count>");
      long n = detail::parse_int(count, kMod, line_no);
      if (n < 0)
        throw FileFormatError(kMod, line_no, "frame count must be >= 0");
      lat.frame_count = static_cast<Frame>(n);
      have_frames = true;
      continue;
    }

    if (keyword == "FRAMES") {
      throw FileFormatError(kMod, line_no, "duplicate FRAMES line");
    } else if (keyword == "WORD") {
      std::string key, from, to, score;
      if (!(ls >> key >> from >> to >> score) || (ls >> std::ws, !ls.eof()))
        throw FileFormatError(kMod, line_no,
                              "expected WORD <key> <from> <to> <logscore>");
      WordHypothesis w;
      w.key = key;
      w.from = static_cast<Frame>(detail::parse_int(from, kMod, line_no));
      w.to = static_cast<Frame>(detail::parse_int(to, kMod, line_no));
      w.score = detail::parse_double(score, kMod, line_no);
      if (w.from < 0 || w.to > lat.frame_count)
        throw FileFormatError(kMod, line_no,
                              "word frames outside [0, frame count]");
      if (w.from >= w.to)
        throw FileFormatError(kMod, line_no,
                              "word must satisfy from < to");
      lat.hypotheses.push_back(std::move(w));
    } else if (keyword == "PROSODY") {
      std::string from, to, p0, p2, p3, p9;
      if (!(ls >> from >> to >> p0 >> p2 >> p3 >> p9) ||
          (ls >> std::ws, !ls.eof()))
        throw FileFormatError(
            kMod, line_no,
            "expected PROSODY <from> <to> <pB0> <pB2> <pB3> <pB9>");
      ProsodyHypothesis p;
      p.from = static_cast<Frame>(detail::parse_int(from, kMod, line_no));
      p.to = static_cast<Frame>(detail::parse_int(to, kMod, line_no));
      p.p_b0 = detail::parse_double(p0, kMod, line_no);
      p.p_b2 = detail::parse_double(p2, kMod, line_no);
      p.p_b3 = detail::parse_double(p3, kMod, line_no);
      p.p_b9 = detail::parse_double(p9, kMod, line_no);
      if (p.from < 0 || p.to > lat.frame_count)
        throw FileFormatError(kMod, line_no,
                              "prosody frames outside [0, frame count]");
      if (p.from >= p.to)
        throw FileFormatError(kMod, line_no,
                              "prosody interval must satisfy from < to");
      if (p.p_b0 < 0 || p.p_b2 < 0 || p.p_b3 < 0 || p.p_b9 < 0 ||
          std::abs(p.p_b0 + p.p_b2 + p.p_b3 + p.p_b9 - 1.0) > 1e-9)
        throw FileFormatError(
            kMod, line_no,
            "boundary probabilities must be non-negative and sum to 1");
      lat.prosody.push_back(p);
    } else {
      throw FileFormatError(kMod, line_no, "unknown directive: " + keyword);
    }
  }
  if (!have_frames) throw InputError("lattice: missing FRAMES line");

  check_prosody_disjoint(lat.prosody, kMod);
  std::stable_sort(
      lat.hypotheses.begin(), lat.hypotheses.end(),
      [](const WordHypothesis& a, const WordHypothesis& b) { return a.to < b.to; });
  return lat;
}

// ---------------------------------------------------------------------------
// EmissionStream: frame-synchronous replay with optional prediction
// filtering.  Frames must be consumed strictly in order, one per cycle.

class EmissionStream {
 public:
  explicit EmissionStream(const Lattice& lattice) : lattice_(&lattice) {}

  Frame cursor() const { return cursor_; }
  bool done() const { return cursor_ > lattice_->frame_count; }

  // Replaces the prediction filter applied from the next emitted frame on.
  void set_prediction(std::set<std::string> keys) {
    filter_ = std::move(keys);
  }
  void clear_prediction() { filter_.reset(); }
  bool filtered() const { return filter_.has_value(); }

  // All hypotheses ending at frame t that pass the current filter.  t must
  // be the next unread frame.
  std::vector<WordHypothesis> emit_frame(Frame t) {
    if (t != cursor_)
      throw EngineError("decoder: out-of-order frame access: expected " +
                        std::to_string(cursor_) + ", got " +
                        std::to_string(t));
    ++cursor_;
    std::vector<WordHypothesis> out;
    for (; next_ < lattice_->hypotheses.size() &&
           lattice_->hypotheses[next_].to == t;
         ++next_) {
      const WordHypothesis& w = lattice_->hypotheses[next_];
      if (!filter_ || filter_->count(w.key) != 0) out.push_back(w);
    }
    return out;
  }

 private:
  const Lattice* lattice_;
  Frame cursor_ = 0;
  std::size_t next_ = 0;
  std::optional<std::set<std::string>> filter_;
};

}  // namespace latchart
