#pragma once

// Seeded random corpora for the test suite: constraint-free grammars,
// word lattices (optionally with one-frame-longer family extensions),
// strictly linear lattices for context-model checks, and random bigram /
// category-trigram models.  All text is produced in the library's input
// formats so generation also exercises the loaders.

#include <cstdio>
#include <map>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <latchart/core.hpp>

namespace latchart::testsupport {

inline int rnd_int(std::mt19937& rng, int lo, int hi) {
  return lo + static_cast<int>(rng() % static_cast<std::uint32_t>(hi - lo + 1));
}

inline double rnd_real(std::mt19937& rng, double lo, double hi) {
  const double u = static_cast<double>(rng() >> 8) / 16777216.0;  // [0,1)
  return lo + u * (hi - lo);
}

inline std::string fmt(double v, int digits = 6) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
  return buf;
}

struct TestGrammar {
  std::string text;
  std::vector<std::string> keys;  // lexical keys usable in lattices
};

// A small constraint-free grammar with guaranteed-defined categories.
inline TestGrammar random_grammar(std::mt19937& rng) {
  const int n_term = rnd_int(rng, 2, 3);
  const int n_nt = rnd_int(rng, 2, 4);

  std::vector<std::string> nts{"S"};
  for (int i = 1; i < n_nt; ++i) nts.push_back("N" + std::to_string(i));
  std::vector<std::string> terms;
  for (int i = 0; i < n_term; ++i) terms.push_back("t" + std::to_string(i));

  // Lexicon first, so rules only use terminal categories that have words.
  TestGrammar out;
  std::string lex_text;
  std::set<std::string> used_terms;
  const int n_words = rnd_int(rng, 3, 6);
  for (int i = 0; i < n_words; ++i) {
    const std::string key = "w" + std::to_string(i);
    const std::string& cat =
        terms[static_cast<std::size_t>(rnd_int(rng, 0, n_term - 1))];
    used_terms.insert(cat);
    lex_text += "LEX " + key + " " + cat + " : " +
                fmt(-rnd_real(rng, 0.0, 1.0)) + "\n";
    out.keys.push_back(key);
  }
  std::vector<std::string> term_pool(used_terms.begin(), used_terms.end());

  std::string rule_text;
  for (const std::string& lhs : nts) {
    const int n_rules = rnd_int(rng, 1, 3);
    for (int r = 0; r < n_rules; ++r) {
      const int len = rnd_int(rng, 1, 3);
      std::string rhs;
      for (int k = 0; k < len; ++k) {
        const bool terminal = rnd_int(rng, 0, 1) == 0;
        const std::string& sym =
            terminal ? term_pool[static_cast<std::size_t>(rnd_int(
                           rng, 0, static_cast<int>(term_pool.size()) - 1))]
                     : nts[static_cast<std::size_t>(rnd_int(
                           rng, 0, static_cast<int>(nts.size()) - 1))];
        rhs += " " + sym;
      }
      rule_text += "RULE " + lhs + " ->" + rhs + " : " +
                   fmt(-rnd_real(rng, 0.0, 1.5)) + "\n";
    }
  }

  out.text = "START S\n" + rule_text + lex_text;
  return out;
}

// A general lattice.  Never emits two hypotheses that share a key and end
// frame (the family-extension trigger must stay unambiguous), and with
// `families` sometimes emits one-frame-longer extensions of a hypothesis.
// Half the start frames are sampled from existing end frames so word
// chains — and therefore complete analyses — are common.
inline std::string random_lattice(std::mt19937& rng,
                                  const std::vector<std::string>& keys,
                                  Frame max_frames, bool families,
                                  int min_hyps = 3, int max_hyps = 9) {
  const Frame n = static_cast<Frame>(rnd_int(rng, 6, max_frames));
  std::string lines;
  std::set<std::pair<std::string, Frame>> taken;  // (key, end)
  std::vector<Frame> joints{0};
  auto try_add = [&](const std::string& key, Frame from, Frame to,
                     double score) {
    if (!taken.emplace(key, to).second) return;
    lines += "WORD " + key + " " + std::to_string(from) + " " +
             std::to_string(to) + " " + fmt(score) + "\n";
    if (to < n) joints.push_back(to);
  };
  const int m = rnd_int(rng, min_hyps, max_hyps);
  for (int i = 0; i < m; ++i) {
    const std::string& key = keys[static_cast<std::size_t>(
        rnd_int(rng, 0, static_cast<int>(keys.size()) - 1))];
    const Frame from =
        rnd_int(rng, 0, 1) == 0
            ? joints[static_cast<std::size_t>(
                  rnd_int(rng, 0, static_cast<int>(joints.size()) - 1))]
            : static_cast<Frame>(rnd_int(rng, 0, n - 1));
    const Frame len =
        static_cast<Frame>(rnd_int(rng, 1, std::min<Frame>(6, n - from)));
    const Frame to = from + len;
    const double score = -rnd_real(rng, 0.0, 8.0);
    try_add(key, from, to, score);
    if (families && rnd_int(rng, 0, 9) < 4) {
      const int ext = rnd_int(rng, 1, 2);
      for (int k = 1; k <= ext && to + k <= n; ++k)
        try_add(key, from, to + k, score - rnd_real(rng, 0.0, 0.5));
    }
  }
  return "FRAMES " + std::to_string(n) + "\n" + lines;
}

// A strictly linear lattice: one word chain, each vertex used once, so the
// word preceding any position is unambiguous.  Optionally adds prosody
// intervals around interior vertices and a one-frame family extension of
// the last word.
inline std::string linear_lattice(std::mt19937& rng,
                                  const std::vector<std::string>& keys,
                                  bool with_prosody, bool family_tail) {
  const int k = rnd_int(rng, 2, 6);
  std::vector<Frame> cuts{0};
  for (int i = 0; i < k; ++i)
    cuts.push_back(cuts.back() + static_cast<Frame>(rnd_int(rng, 2, 4)));

  std::vector<std::string> chain;
  for (int i = 0; i < k; ++i)
    chain.push_back(keys[static_cast<std::size_t>(
        rnd_int(rng, 0, static_cast<int>(keys.size()) - 1))]);

  const bool tail = family_tail && rnd_int(rng, 0, 1) == 0;
  const Frame frames = cuts.back() + (tail ? 1 : 0);

  std::string lines = "FRAMES " + std::to_string(frames) + "\n";
  for (int i = 0; i < k; ++i) {
    lines += "WORD " + chain[static_cast<std::size_t>(i)] + " " +
             std::to_string(cuts[static_cast<std::size_t>(i)]) + " " +
             std::to_string(cuts[static_cast<std::size_t>(i) + 1]) + " " +
             fmt(-rnd_real(rng, 0.0, 8.0)) + "\n";
  }
  if (tail) {
    lines += "WORD " + chain.back() + " " +
             std::to_string(cuts[static_cast<std::size_t>(k - 1)]) + " " +
             std::to_string(cuts.back() + 1) + " " +
             fmt(-rnd_real(rng, 0.0, 8.0)) + "\n";
  }
  if (with_prosody) {
    for (int i = 1; i < k; ++i) {
      if (rnd_int(rng, 0, 1) == 0) continue;
      double p[4];
      double sum = 0.0;
      for (double& x : p) {
        x = rnd_real(rng, 0.05, 1.0);
        sum += x;
      }
      lines += "PROSODY " + std::to_string(cuts[static_cast<std::size_t>(i)]) +
               " " + std::to_string(cuts[static_cast<std::size_t>(i)] + 1);
      for (double x : p) lines += " " + fmt(x / sum, 12);
      lines += "\n";
    }
  }
  return lines;
}

inline std::string random_bigram(std::mt19937& rng,
                                 const std::vector<std::string>& keys) {
  std::string text;
  if (rnd_int(rng, 0, 1) == 0)
    text += "DEFAULT " + fmt(-rnd_real(rng, 0.0, 0.5)) + "\n";
  std::vector<std::string> lefts{kBeginMarker};
  lefts.insert(lefts.end(), keys.begin(), keys.end());
  for (const std::string& l : lefts) {
    for (const std::string& r : keys) {
      if (rnd_int(rng, 0, 9) < 3)
        text += "BIGRAM " + l + " " + r + " " + fmt(-rnd_real(rng, 0.0, 2.0)) +
                "\n";
    }
  }
  return text;
}

inline std::string random_trigram(std::mt19937& rng,
                                  const std::vector<std::string>& keys) {
  static const char* cats[] = {"CA", "CB", "CC", "*"};
  static const char* bounds[] = {"B0", "B2", "B3", "B9"};
  std::string text;
  for (const std::string& key : keys) {
    if (rnd_int(rng, 0, 3) == 0) continue;  // leave some words uncategorized
    text += "CAT " + key + " " + cats[rnd_int(rng, 0, 2)] + "\n";
  }
  std::set<std::string> seen;
  for (int i = 0; i < 8; ++i) {
    std::string l = cats[rnd_int(rng, 0, 3)];
    std::string b = bounds[rnd_int(rng, 0, 3)];
    std::string r = cats[rnd_int(rng, 0, 3)];
    if (!seen.insert(l + " " + b + " " + r).second) continue;
    text += "TRI " + l + " " + b + " " + r + " " +
            fmt(-rnd_real(rng, 0.0, 3.0)) + "\n";
  }
  if (rnd_int(rng, 0, 1) == 0)
    text += "DEFAULT " + fmt(-rnd_real(rng, 0.0, 0.5)) + "\n";
  return text;
}

}  // namespace latchart::testsupport
