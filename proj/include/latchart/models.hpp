#pragma once

// Stochastic language and prosody models scored during parsing: a word
// bigram with begin marker and default back-off, prosodic boundary
// hypotheses attached to chart vertices as attributes, and a category
// trigram rating (left word category, boundary class, right word category)
// triples.
//
// Bigram file:   BIGRAM <lkey|<s>> <rkey> <logprob>   /  DEFAULT <logprob>
// Trigram file:  CAT <key> <category>
//                TRI <cat> <B0|B2|B3|B9> <cat> <logprob>  /  DEFAULT <logprob>

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "latchart/core.hpp"
#include "latchart/textio.hpp"

namespace latchart {

// ---------------------------------------------------------------------------
// Word bigram.

class BigramModel {
 public:
  // Neutral model: no entries, default 0.0 (= transitions cost nothing).
  BigramModel() = default;

  void set(const std::string& lkey, const std::string& rkey, double log_prob) {
    scores_[std::make_pair(lkey, rkey)] = log_prob;
  }
  void set_default(double log_prob) { default_ = log_prob; }
  double default_score() const { return default_; }

  double score(const std::string& lkey, const std::string& rkey) const {
    auto it = scores_.find(std::make_pair(lkey, rkey));
    return it == scores_.end() ? default_ : it->second;
  }

 private:
  std::map<std::pair<std::string, std::string>, double> scores_;
  double default_ = 0.0;
};

// Bigram transition log score for rword following lword (lword may be the
// begin marker).
inline double bigram_trans(const BigramModel& m, const std::string& lword,
                           const std::string& rword) {
  return m.score(lword, rword);
}

// ---------------------------------------------------------------------------
// Prosodic boundary classes and per-vertex attributes.

enum class Boundary { B0 = 0, B2 = 1, B3 = 2, B9 = 3 };
inline constexpr std::array<Boundary, 4> kBoundaries = {
    Boundary::B0, Boundary::B2, Boundary::B3, Boundary::B9};

inline const char* boundary_name(Boundary b) {
  switch (b) {
    case Boundary::B0: return "B0";
    case Boundary::B2: return "B2";
    case Boundary::B3: return "B3";
    case Boundary::B9: return "B9";
  }
  return "?";
}

// A prosodic boundary-class distribution over a frame interval [from, to);
// the four probabilities sum to 1.
struct ProsodyHypothesis {
  Frame from = 0;
  Frame to = 0;
  double p_b0 = 1.0;
  double p_b2 = 0.0;
  double p_b3 = 0.0;
  double p_b9 = 0.0;

  double prob(Boundary b) const {
    switch (b) {
      case Boundary::B0: return p_b0;
      case Boundary::B2: return p_b2;
      case Boundary::B3: return p_b3;
      case Boundary::B9: return p_b9;
    }
    return 0.0;
  }
};

// Log-probability attribute stored on a vertex; zero probabilities map to
// the kLogZero floor.
struct ProsodyAttribute {
  std::array<double, 4> log_p{0.0, kLogZero, kLogZero, kLogZero};

  static ProsodyAttribute neutral() { return ProsodyAttribute{}; }

  static ProsodyAttribute from_hypothesis(const ProsodyHypothesis& h) {
    ProsodyAttribute a;
    for (std::size_t i = 0; i < kBoundaries.size(); ++i) {
      double p = h.prob(kBoundaries[i]);
      a.log_p[i] = p > 0.0 ? std::log(p) : kLogZero;
    }
    return a;
  }

  double log_prob(Boundary b) const {
    return log_p[static_cast<std::size_t>(b)];
  }

  bool operator==(const ProsodyAttribute& other) const = default;
};

// Two prosody intervals overlap when their [from, to) ranges intersect.
inline void check_prosody_disjoint(const std::vector<ProsodyHypothesis>& hyps,
                                   const char* module) {
  std::vector<std::pair<Frame, Frame>> spans;
  spans.reserve(hyps.size());
  for (const auto& h : hyps) spans.emplace_back(h.from, h.to);
  std::sort(spans.begin(), spans.end());
  for (std::size_t i = 1; i < spans.size(); ++i) {
    if (spans[i].first < spans[i - 1].second)
      throw InputError(std::string(module) +
                       ": overlapping prosody intervals at frame " +
                       std::to_string(spans[i].first));
  }
}

// The attribute for a vertex at `frame`: the enclosing interval's
// distribution, or the neutral attribute (B0 certain) outside all
// intervals.
inline ProsodyAttribute attach_prosody(
    Frame frame, const std::vector<ProsodyHypothesis>& hyps) {
  const ProsodyHypothesis* found = nullptr;
  for (const auto& h : hyps) {
    if (h.from <= frame && frame < h.to) {
      if (found != nullptr)
        throw InputError("prosody: overlapping prosody intervals at frame " +
                         std::to_string(frame));
      found = &h;
    }
  }
  return found ? ProsodyAttribute::from_hypothesis(*found)
               : ProsodyAttribute::neutral();
}

// ---------------------------------------------------------------------------
// Category trigram over (left word category, boundary class, right word
// category).  Words map to a small category set via CAT entries; unknown
// keys (including the begin marker unless mapped) fall to the catch-all
// category "*".

class CategoryTrigram {
 public:
  static constexpr const char* kCatchAll = "*";

  CategoryTrigram() = default;

  void set_category(const std::string& key, const std::string& cat) {
    category_of_[key] = cat;
  }
  void set(const std::string& lcat, Boundary b, const std::string& rcat,
           double log_prob) {
    scores_[Key{lcat, b, rcat}] = log_prob;
  }
  void set_default(double log_prob) { default_ = log_prob; }
  double default_score() const { return default_; }

  const std::string& category(const std::string& key) const {
    static const std::string catch_all = kCatchAll;
    auto it = category_of_.find(key);
    return it == category_of_.end() ? catch_all : it->second;
  }

  double score(const std::string& lcat, Boundary b,
               const std::string& rcat) const {
    auto it = scores_.find(Key{lcat, b, rcat});
    return it == scores_.end() ? default_ : it->second;
  }

 private:
  struct Key {
    std::string l;
    Boundary b;
    std::string r;
    bool operator<(const Key& o) const {
      if (l != o.l) return l < o.l;
      if (b != o.b) return b < o.b;
      return r < o.r;
    }
  };
  std::map<std::string, std::string> category_of_;
  std::map<Key, double> scores_;
  double default_ = 0.0;
};

// Prosody transition for attaching rword after lword at a vertex carrying
// `attr`: the best boundary-class explanation, combining the boundary
// probability with the category trigram.
inline double prosody_trans(const ProsodyAttribute& attr,
                            const CategoryTrigram& t, const std::string& lword,
                            const std::string& rword) {
  const std::string& lcat = t.category(lword);
  const std::string& rcat = t.category(rword);
  double best = -std::numeric_limits<double>::infinity();
  for (Boundary b : kBoundaries) {
    double v = attr.log_prob(b) + t.score(lcat, b, rcat);
    if (v > best) best = v;
  }
  return best;
}

// ---------------------------------------------------------------------------
// Model file loading.

inline BigramModel load_bigram(const std::string& text) {
  constexpr const char* kMod = "bigram";
  BigramModel m;
  std::set<std::pair<std::string, std::string>> seen;
  bool have_default = false;
  std::istringstream in(text);
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::size_t hash = raw.find('#');
    if (hash != std::string::npos) raw = raw.substr(0, hash);
    std::istringstream ls(raw);
    std::string keyword;
    if (!(ls >> keyword)) continue;
    if (keyword == "BIGRAM") {
      std::string l, r, score;
      if (!(ls >> l >> r >> score) || (ls >> std::ws, !ls.eof()))
        throw FileFormatError(kMod, line_no,
                              "expected BIGRAM <lkey> <rkey> <logprob>");
      if (!seen.emplace(l, r).second)
        throw FileFormatError(kMod, line_no,
                              "duplicate bigram entry: " + l + " " + r);
      m.set(l, r, detail::parse_log_prob(score, kMod, line_no));
    } else if (keyword == "DEFAULT") {
      std::string score;
      if (!(ls >> score) || (ls >> std::ws, !ls.eof()))
        throw FileFormatError(kMod, line_no, "expected DEFAULT <logprob>");
      if (have_default)
        throw FileFormatError(kMod, line_no, "duplicate DEFAULT line");
      have_default = true;
      m.set_default(detail::parse_log_prob(score, kMod, line_no));
    } else {
      throw FileFormatError(kMod, line_no, "unknown directive: " + keyword);
    }
  }
  return m;
}

inline CategoryTrigram load_trigram(const std::string& text) {
  constexpr const char* kMod = "trigram";
  CategoryTrigram t;
  std::set<std::string> seen_cat;
  std::set<std::string> seen_tri;
  bool have_default = false;
  std::istringstream in(text);
  std::string raw;
  int line_no = 0;
  auto parse_boundary = [&](const std::string& tok) {
    for (Boundary b : kBoundaries)
      if (tok == boundary_name(b)) return b;
    throw FileFormatError(kMod, line_no,
                          "expected boundary class B0|B2|B3|B9, got '" + tok +
                              "'");
  };
  while (std::getline(in, raw)) {
    ++line_no;
    std::size_t hash = raw.find('#');
    if (hash != std::string::npos) raw = raw.substr(0, hash);
    std::istringstream ls(raw);
    std::string keyword;
    if (!(ls >> keyword)) continue;
    if (keyword == "CAT") {
      std::string key, cat;
      if (!(ls >> key >> cat) || (ls >> std::ws, !ls.eof()))
        throw FileFormatError(kMod, line_no, "expected CAT <key> <category>");
      if (!seen_cat.insert(key).second)
        throw FileFormatError(kMod, line_no, "duplicate CAT entry: " + key);
      t.set_category(key, cat);
    } else if (keyword == "TRI") {
      std::string l, b, r, score;
      if (!(ls >> l >> b >> r >> score) || (ls >> std::ws, !ls.eof()))
        throw FileFormatError(
            kMod, line_no, "expected TRI <cat> <boundary> <cat> <logprob>");
      if (!seen_tri.insert(l + "\x1f" + b + "\x1f" + r).second)
        throw FileFormatError(kMod, line_no, "duplicate TRI entry");
      t.set(l, parse_boundary(b), r,
            detail::parse_log_prob(score, kMod, line_no));
    } else if (keyword == "DEFAULT") {
      std::string score;
      if (!(ls >> score) || (ls >> std::ws, !ls.eof()))
        throw FileFormatError(kMod, line_no, "expected DEFAULT <logprob>");
      if (have_default)
        throw FileFormatError(kMod, line_no, "duplicate DEFAULT line");
      have_default = true;
      t.set_default(detail::parse_log_prob(score, kMod, line_no));
    } else {
      throw FileFormatError(kMod, line_no, "unknown directive: " + keyword);
    }
  }
  return t;
}

}  // namespace latchart
