#pragma once

// Parse-based evaluation: the word string covered by the best analysis is
// scored against a reference transcript with a strict alignment — no
// recovery heuristics, so a partial parse pays for every word it fails to
// cover.

#include <string>
#include <vector>

#include "latchart/chart.hpp"
#include "latchart/core.hpp"
#include "latchart/engine.hpp"

namespace latchart {

struct AlignmentCounts {
  int matches = 0;
  int substitutions = 0;
  int deletions = 0;   // reference words the hypothesis misses
  int insertions = 0;  // hypothesis words with no reference counterpart

  bool operator==(const AlignmentCounts&) const = default;
};

struct EvalReport {
  std::size_t reference_words = 0;
  AlignmentCounts counts;
  double word_accuracy = 0.0;      // 1 - (S+D+I)/n, may go negative
  double word_correct_rate = 0.0;  // matches / n
  std::vector<std::string> covered;
  bool partial = false;
  bool prefix = false;
};

// The word string covered by the best analysis of a parse.
inline std::vector<std::string> covered_string(const ParseOutcome& out) {
  if (!out.best)
    throw EngineError("eval: no analysis to evaluate (empty result)");
  return out.best->words;
}

// Minimum-edit alignment with unit costs.  The backtrace prefers
// match/substitution over deletion over insertion, so the split of the
// total distance into counts is deterministic.
inline AlignmentCounts align_words(const std::vector<std::string>& ref,
                                   const std::vector<std::string>& hyp) {
  const std::size_t n = ref.size();
  const std::size_t m = hyp.size();
  std::vector<std::vector<int>> d(n + 1, std::vector<int>(m + 1, 0));
  for (std::size_t i = 0; i <= n; ++i) d[i][0] = static_cast<int>(i);
  for (std::size_t j = 0; j <= m; ++j) d[0][j] = static_cast<int>(j);
  for (std::size_t i = 1; i <= n; ++i) {
    for (std::size_t j = 1; j <= m; ++j) {
      const int sub = d[i - 1][j - 1] + (ref[i - 1] == hyp[j - 1] ? 0 : 1);
      const int del = d[i - 1][j] + 1;
      const int ins = d[i][j - 1] + 1;
      d[i][j] = std::min(sub, std::min(del, ins));
    }
  }
  AlignmentCounts c;
  std::size_t i = n;
  std::size_t j = m;
  while (i > 0 || j > 0) {
    if (i > 0 && j > 0) {
      const int cost = ref[i - 1] == hyp[j - 1] ? 0 : 1;
      if (d[i][j] == d[i - 1][j - 1] + cost) {
        (cost == 0 ? c.matches : c.substitutions) += 1;
        --i;
        --j;
        continue;
      }
    }
    if (i > 0 && d[i][j] == d[i - 1][j] + 1) {
      ++c.deletions;
      --i;
      continue;
    }
    ++c.insertions;
    --j;
  }
  return c;
}

// Scores a hypothesis word string against a reference transcript.
inline EvalReport score_strict(const std::vector<std::string>& ref,
                               const std::vector<std::string>& hyp) {
  if (ref.empty()) throw InputError("eval: reference transcript is empty");
  EvalReport r;
  r.reference_words = ref.size();
  r.counts = align_words(ref, hyp);
  const double n = static_cast<double>(ref.size());
  r.word_accuracy = 1.0 - (r.counts.substitutions + r.counts.deletions +
                           r.counts.insertions) /
                              n;
  r.word_correct_rate = r.counts.matches / n;
  r.covered = hyp;
  return r;
}

// Strict parse-based word accuracy: whatever the best analysis covers is
// the hypothesis, partial or not.
inline EvalReport strict_word_accuracy(const std::vector<std::string>& ref,
                                       const ParseOutcome& out) {
  EvalReport r = score_strict(ref, covered_string(out));
  r.partial = out.partial;
  r.prefix = out.best->prefix;
  return r;
}

// Chart population statistics; the initial edge counts toward the total
// but not toward any category.
inline ChartStats edge_stats(const Chart& chart) {
  ChartStats cs;
  cs.total_edges = chart.edges.size();
  for (std::size_t id = 0; id < chart.edges.size(); ++id) {
    const Edge& e = chart.edges[id];
    if (e.passive()) ++cs.passive_edges;
    if (static_cast<EdgeId>(id) == chart.goal) continue;
    ++cs.by_category[e.cat];
  }
  return cs;
}

}  // namespace latchart
