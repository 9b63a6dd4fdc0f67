#pragma once

// Time-synchronous active chart parsing over word lattices.
//
// The control loop is left-right incremental: cycle t creates vertex t,
// inserts (or inherits) every word hypothesis ending at frame t, and then
// drains the agenda, combining active edges with passive edges best-first
// under a relative beam.  Edge families keep one edge per derivation shape
// with several end frames; the frame-indexed acoustic score sets carry one
// entry per end.  Top-down predictions are precompiled left-corner
// closures, expanded once per (category, vertex) with Viterbi-best
// accumulated grammar scores.
//
// The combine pipeline is split in two stages so a parallel driver can run
// the unification stage outside the chart lock:
//   unify_pair()    reads only immutable edge members (slots, sig)
//   complete_pair() does score arithmetic and chart mutation

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <limits>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "latchart/agenda.hpp"
#include "latchart/chart.hpp"
#include "latchart/core.hpp"
#include "latchart/feature.hpp"
#include "latchart/grammar.hpp"
#include "latchart/lattice.hpp"
#include "latchart/models.hpp"

namespace latchart {

struct ParserConfig {
  ScoreWeights weights;
  // Pairs scoring more than this far below the cycle's running maximum are
  // pruned; infinity disables pruning.
  double beam_offset = std::numeric_limits<double>::infinity();
  bool prosody_enabled = true;
  bool predict = false;   // top-down word prediction filter on the decoder
  bool skeleton = false;  // context-free skeleton only, no unification
};

// One reported analysis: a start-category constituent from vertex 0 (or,
// marked `prefix`, the best open constituent when none completed).
struct ResultItem {
  Frame end = 0;
  bool spanning = false;
  bool prefix = false;
  std::vector<std::string> words;
  double inside_acoustic = 0.0;
  double inside_bigram = 0.0;
  double inside_prosody = 0.0;
  double inside_grammar = 0.0;
  double weighted = 0.0;

  bool operator==(const ResultItem&) const = default;
};

struct ChartStats {
  std::uint64_t total_edges = 0;  // including the initial edge
  std::uint64_t passive_edges = 0;
  std::map<std::string, std::uint64_t> by_category;  // initial edge excluded

  bool operator==(const ChartStats&) const = default;
};

struct ParseOutcome {
  Frame frames = 0;
  std::vector<ResultItem> results;  // complete analyses, canonical order
  std::optional<ResultItem> best;
  bool partial = true;  // no spanning analysis
  ChartStats chart_stats;
  AgendaStats agenda_stats;
  double wall_ms = 0.0;  // excluded from determinism comparisons
};

class Parser {
 public:
  Parser(const Grammar& grammar, const BigramModel& bigram,
         const CategoryTrigram& trigram, ParserConfig config)
      : g_(&grammar), bg_(&bigram), tri_(&trigram), cfg_(config) {
    if (!(cfg_.beam_offset > 0.0))
      throw InputError("engine: beam offset must be positive");
  }

  const ParserConfig& config() const { return cfg_; }
  const Chart& chart() const { return chart_; }
  const Grammar& grammar() const { return *g_; }

  // ---- whole-lattice drivers ----

  // Decoder-fed run: words arrive frame-synchronously through an emission
  // stream, optionally filtered by top-down prediction.
  ParseOutcome parse(const Lattice& lat) {
    auto t0 = std::chrono::steady_clock::now();
    begin(lat);
    EmissionStream stream(lat);
    stream.emit_frame(0);  // no word ends at frame 0
    for (Frame t = 1; t <= lat.frame_count; ++t) {
      if (cfg_.predict) stream.set_prediction(prediction_filter());
      run_cycle(t, stream.emit_frame(t));
    }
    ParseOutcome out = outcome();
    out.wall_ms = elapsed_ms(t0);
    return out;
  }

  // Batch run over the same cycles without a decoder in the loop (no
  // prediction filtering).  Produces the same chart as parse() when
  // prediction is off.
  ParseOutcome parse_batch(const Lattice& lat) {
    auto t0 = std::chrono::steady_clock::now();
    begin(lat);
    std::vector<std::vector<WordHypothesis>> by_frame(
        static_cast<std::size_t>(lat.frame_count) + 1);
    for (const auto& w : lat.hypotheses)
      by_frame[static_cast<std::size_t>(w.to)].push_back(w);
    for (Frame t = 1; t <= lat.frame_count; ++t)
      run_cycle(t, by_frame[static_cast<std::size_t>(t)]);
    ParseOutcome out = outcome();
    out.wall_ms = elapsed_ms(t0);
    return out;
  }

  // ---- stepwise driver (one call per frame) ----

  // Resets all state, creates vertex 0 and the initial edge expecting the
  // start category, and expands its predictions.  The lattice must outlive
  // the parse (prosody and frame count are read from it).
  void begin(const Lattice& lat) {
    lat_ = &lat;
    chart_ = Chart{};
    agenda_ = Agenda(cfg_.beam_offset);
    results_.clear();
    frontier_.clear();
    seen_.clear();
    var_counter_ = 0;
    for (const auto& w : lat.hypotheses) {
      if (g_->lex(w.key) == nullptr) throw UnknownWordError(w.key);
    }
    chart_.vertices.reserve(static_cast<std::size_t>(lat.frame_count) + 1);
    make_vertex(0);

    Edge goal;
    goal.rule = kGoalRule;
    goal.dot = 0;
    goal.rhs_size = 1;
    goal.next_cat = g_->start;
    goal.from = 0;
    goal.to = {0};
    goal.scores.inside_acoustic = ScoreSet::single(0, 0.0);
    goal.scores.outside_acoustic = ScoreSet::single(0, 0.0);
    finish_sig(goal);
    chart_.goal = chart_.append(std::move(goal));
    frontier_.insert(g_->start);
    agenda_.begin_cycle();
    seek_down(chart_.goal, 0);
  }

  // Inserts the words ending at frame t and drains the agenda.
  void run_cycle(Frame t, const std::vector<WordHypothesis>& words) {
    start_cycle(t, words);
    while (step()) {
    }
  }

  // Vertex creation plus word insertion; leaves the agenda to the caller
  // (the parallel driver drains it with workers).
  void start_cycle(Frame t, const std::vector<WordHypothesis>& words) {
    if (static_cast<Frame>(chart_.vertices.size()) != t)
      throw EngineError("engine: cycles must advance one frame at a time (at " +
                        std::to_string(chart_.vertices.size()) + ", got " +
                        std::to_string(t) + ")");
    make_vertex(t);
    agenda_.begin_cycle();
    for (const WordHypothesis& w : words) {
      if (g_->lex(w.key) == nullptr) throw UnknownWordError(w.key);
      auto pred = seen_.find(std::make_tuple(w.from, w.to - 1, w.key));
      if (pred != seen_.end()) {
        inherit_word(w, pred->second);
      } else {
        insert_word(w);
      }
      seen_[std::make_tuple(w.from, w.to, w.key)] = w.score;
    }
  }

  // Pops and processes one agenda pair; false when the agenda is empty.
  bool step() {
    auto item = agenda_.pop();
    if (!item) return false;
    complete_pair(*item, unify_pair(chart_.edges[static_cast<std::size_t>(
                                        item->active)],
                                    chart_.edges[static_cast<std::size_t>(
                                        item->passive)]));
    return true;
  }

  // ---- parallel access points ----

  std::optional<AgendaItem> pop_pair() { return agenda_.pop(); }
  bool agenda_empty() const { return agenda_.empty(); }
  const Edge& edge(EdgeId id) const {
    return chart_.edges[static_cast<std::size_t>(id)];
  }

  // Combine stage 1: quick check and feature unification.  Reads only
  // members that never change after edge creation (slots, sig), so this is
  // safe to call concurrently with chart mutation elsewhere.  nullopt means
  // the pair fails; an engaged null pointer means success without
  // constraints.
  std::optional<SlotsPtr> unify_pair(const Edge& a, const Edge& i) const {
    if (!quick_check(a.sig, i.sig)) return std::nullopt;
    if (cfg_.skeleton || !a.slots) return SlotsPtr();
    FeatureValue got = i.slots ? (*i.slots)[0] : empty_node();
    Subst s;
    auto m = merge_values((*a.slots)[static_cast<std::size_t>(a.dot) + 1], got,
                          s);
    if (!m) return std::nullopt;
    auto out = std::make_shared<std::vector<FeatureValue>>();
    out->reserve(a.slots->size());
    for (std::size_t k = 0; k < a.slots->size(); ++k) {
      out->push_back(k == static_cast<std::size_t>(a.dot) + 1
                         ? resolve(*m, s)
                         : resolve((*a.slots)[k], s));
    }
    return SlotsPtr(std::move(out));
  }

  // Combine stage 2: score arithmetic and publication (chart mutation).
  void complete_pair(const AgendaItem& item,
                     std::optional<SlotsPtr> unified) {
    if (!unified) return;
    const Edge& a = chart_.edges[static_cast<std::size_t>(item.active)];
    const Edge& i = chart_.edges[static_cast<std::size_t>(item.passive)];
    publish(combine_build(a, i, std::move(*unified)));
  }

  // ---- scoring ----

  // Ranking score of an active/passive pair: per component, the active
  // edge's best prefix estimate plus the passive edge's inside score plus
  // the transition, acoustically maximized over the passive edge's ends.
  double combined_score(const Edge& a, const Edge& i) const {
    const double a_out_ac = a.scores.outside_acoustic.at(i.from);
    double ac = -std::numeric_limits<double>::infinity();
    for (Frame f : i.to)
      ac = std::max(ac, a_out_ac + i.scores.inside_acoustic.at(f));
    auto [bg_t, pr_t] = transition(a, i);
    const ScoreWeights& w = cfg_.weights;
    return w.acoustic * ac +
           w.bigram *
               (a.scores.outside_bigram + i.scores.inside_bigram + bg_t) +
           w.prosody *
               (a.scores.outside_prosody + i.scores.inside_prosody + pr_t) +
           w.grammar * (a.scores.outside_grammar + i.scores.inside_grammar);
  }

  // ---- results ----

  ParseOutcome outcome() const {
    ParseOutcome out;
    out.frames = lat_ ? lat_->frame_count : 0;

    for (EdgeId id : results_) {
      const Edge& e = chart_.edges[static_cast<std::size_t>(id)];
      for (Frame f : e.to) {
        ResultItem r;
        r.end = f;
        r.spanning = (f == out.frames);
        r.words = e.words;
        r.inside_acoustic = e.scores.inside_acoustic.at(f);
        r.inside_bigram = e.scores.inside_bigram;
        r.inside_prosody = e.scores.inside_prosody;
        r.inside_grammar = e.scores.inside_grammar;
        r.weighted = weighted_inside(e.scores, f, cfg_.weights);
        out.results.push_back(std::move(r));
      }
    }
    std::sort(out.results.begin(), out.results.end(), row_order);
    out.results.erase(
        std::unique(out.results.begin(), out.results.end()),
        out.results.end());

    if (!out.results.empty()) {
      out.best = out.results.front();
    } else {
      // No complete constituent: fall back to the longest-covering open
      // start-category edge from vertex 0.
      std::optional<ResultItem> best;
      for (std::size_t id = 0; id < chart_.edges.size(); ++id) {
        const Edge& e = chart_.edges[id];
        if (static_cast<EdgeId>(id) == chart_.goal) continue;
        if (!e.active() || e.cat != g_->start || e.from != 0 ||
            e.words.empty())
          continue;
        Frame f = e.actual();
        ResultItem r;
        r.end = f;
        r.spanning = false;
        r.prefix = true;
        r.words = e.words;
        r.inside_acoustic = e.scores.inside_acoustic.at(f);
        r.inside_bigram = e.scores.inside_bigram;
        r.inside_prosody = e.scores.inside_prosody;
        r.inside_grammar = e.scores.inside_grammar;
        r.weighted = weighted_inside(e.scores, f, cfg_.weights);
        if (!best || row_order(r, *best)) best = std::move(r);
      }
      out.best = std::move(best);
    }
    out.partial = !(out.best && out.best->spanning);

    out.chart_stats.total_edges = chart_.edges.size();
    for (std::size_t id = 0; id < chart_.edges.size(); ++id) {
      const Edge& e = chart_.edges[id];
      if (e.passive()) ++out.chart_stats.passive_edges;
      if (static_cast<EdgeId>(id) == chart_.goal) continue;
      ++out.chart_stats.by_category[e.cat];
    }
    out.agenda_stats = agenda_.stats();
    return out;
  }

  // Lexical keys consumable next under any currently expected category.
  std::set<std::string> prediction_filter() const {
    auto words = predict_words(*g_, frontier_);
    return {words.begin(), words.end()};
  }

 private:
  static double elapsed_ms(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(
               std::chrono::steady_clock::now() - t0)
        .count();
  }

  static bool row_order(const ResultItem& x, const ResultItem& y) {
    if (x.end != y.end) return x.end > y.end;
    if (x.weighted != y.weighted) return x.weighted > y.weighted;
    if (x.words != y.words) return x.words < y.words;
    return std::tie(x.inside_acoustic, x.inside_bigram, x.inside_prosody,
                    x.inside_grammar) <
           std::tie(y.inside_acoustic, y.inside_bigram, y.inside_prosody,
                    y.inside_grammar);
  }

  void make_vertex(Frame f) {
    Vertex v;
    v.frame = f;
    v.prosody = (cfg_.prosody_enabled && lat_ != nullptr)
                    ? attach_prosody(f, lat_->prosody)
                    : ProsodyAttribute::neutral();
    chart_.vertices.push_back(std::move(v));
  }

  // Bigram and prosody transition scores for consuming passive edge i
  // after active edge a; nonzero only when i is lexical.
  std::pair<double, double> transition(const Edge& a, const Edge& i) const {
    if (i.rule != kLexRule) return {0.0, 0.0};
    const std::string& lword = a.effective_last_word();
    const std::string& rword = i.words.front();
    double bg = bigram_trans(*bg_, lword, rword);
    double pr = cfg_.prosody_enabled
                    ? prosody_trans(chart_.vertex(i.from).prosody, *tri_,
                                    lword, rword)
                    : 0.0;
    return {bg, pr};
  }

  // Fills in the quick-check signature and the canonical feature text used
  // for duplicate detection.  Must run after every other field is set.
  void finish_sig(Edge& e) const {
    const std::string& cat = e.active() ? e.next_cat : e.cat;
    if (e.slots) {
      std::size_t idx = e.active() ? static_cast<std::size_t>(e.dot) + 1 : 0;
      e.sig = make_quick_sig(cat, (*e.slots)[idx], g_->fast_check_paths);
      e.sig_text = canonical_text(*e.slots);
    } else {
      e.sig.cat = cat;
      e.sig.atoms.assign(g_->fast_check_paths.size(), std::nullopt);
      e.sig_text.clear();
    }
  }

  // ---- the five chart operations ----

  // Insert: a word hypothesis becomes a passive lexical edge.
  void insert_word(const WordHypothesis& w) {
    const LexEntry* le = g_->lex(w.key);
    Edge e;
    e.rule = kLexRule;
    e.dot = 0;
    e.rhs_size = 0;
    e.cat = le->cat;
    e.from = w.from;
    e.to = {w.to};
    e.words = {w.key};
    e.scores.inside_acoustic = ScoreSet::single(w.to, w.score);
    e.scores.outside_acoustic = e.scores.inside_acoustic;
    e.scores.inside_grammar = le->log_prob;
    e.scores.outside_grammar = le->log_prob;
    if (!cfg_.skeleton && le->features.is_node() &&
        !le->features.node_ref().attrs.empty()) {
      auto slots = std::make_shared<std::vector<FeatureValue>>();
      slots->push_back(le->features);
      e.slots = std::move(slots);
    }
    finish_sig(e);
    publish(std::move(e));
  }

  // Inherit: the word extends its edge family (same start, same key, one
  // frame further) instead of opening a new derivation.  Every edge ending
  // at the previous frame whose last word is the key gains the new end with
  // the acoustic difference applied; extended active edges predict at the
  // new vertex.
  void inherit_word(const WordHypothesis& w, double prev_score) {
    const Frame prev = w.to - 1;
    const Vertex& vp = chart_.vertex(prev);
    std::vector<EdgeId> cands;
    cands.reserve(vp.inactive_in.size() + vp.active_in.size());
    cands.insert(cands.end(), vp.inactive_in.begin(), vp.inactive_in.end());
    cands.insert(cands.end(), vp.active_in.begin(), vp.active_in.end());
    for (EdgeId id : cands) {
      Edge& e = chart_.edges[static_cast<std::size_t>(id)];
      if (e.words.empty() || e.words.back() != w.key) continue;
      if (std::find(e.to.begin(), e.to.end(), w.to) != e.to.end()) continue;
      const double* in_prev = e.scores.inside_acoustic.find(prev);
      const double* out_prev = e.scores.outside_acoustic.find(prev);
      if (in_prev == nullptr || out_prev == nullptr) continue;
      const double in_new = *in_prev - prev_score + w.score;
      const double out_new = *out_prev - prev_score + w.score;
      chart_.begin_rekey(id);
      e.to.push_back(w.to);
      e.scores.inside_acoustic.set(w.to, in_new);
      e.scores.outside_acoustic.set(w.to, out_new);
      chart_.end_rekey(id);
      Vertex& vt = chart_.vertex(w.to);
      (e.active() ? vt.active_in : vt.inactive_in).push_back(id);
      if (e.active()) seek_down(id, w.to);
    }
  }

  // Seek down: expand the precompiled left-corner closure of the active
  // edge's expected category at vertex `at`.  Closure entries carry the
  // Viterbi-best chain score, so predictions of predictions are already
  // covered and freshly created zero-span edges do not recurse.
  void seek_down(EdgeId aid, Frame at) {
    const Edge& a = chart_.edges[static_cast<std::size_t>(aid)];
    const auto& closure = g_->predictions(a.next_cat);
    if (closure.empty()) return;
    const std::string last = a.effective_last_word();
    const double out_ac_at = a.scores.outside_acoustic.at(at);
    const double out_bg = a.scores.outside_bigram;
    const double out_pr = a.scores.outside_prosody;
    const double out_gr = a.scores.outside_grammar;
    for (const PredictEntry& pe : closure) {
      const Rule& r = g_->rules[static_cast<std::size_t>(pe.rule)];
      Edge e;
      e.rule = pe.rule;
      e.dot = 0;
      e.rhs_size = static_cast<int>(r.rhs.size());
      e.cat = r.lhs;
      e.next_cat = r.rhs.front();
      e.from = at;
      e.to = {at};
      e.left_context = last;
      e.scores.inside_acoustic = ScoreSet::single(at, 0.0);
      e.scores.outside_acoustic = ScoreSet::single(at, out_ac_at);
      e.scores.outside_bigram = out_bg;
      e.scores.outside_prosody = out_pr;
      e.scores.inside_grammar = r.log_prob;
      e.scores.outside_grammar = out_gr + pe.accumulated;
      if (!cfg_.skeleton && r.has_constraints()) {
        auto slots = std::make_shared<std::vector<FeatureValue>>();
        slots->reserve(r.slots.size());
        for (const FeatureValue& s : r.slots)
          slots->push_back(rename_vars(s, var_counter_));
        var_counter_ += r.var_count;
        e.slots = std::move(slots);
      }
      finish_sig(e);
      publish(std::move(e));
    }
  }

  // Combine: dot advance.  The new edge inherits the active edge's start
  // and prefix estimates, consumes the passive edge's inside scores and
  // transition, and copies the passive edge's end set.
  Edge combine_build(const Edge& a, const Edge& i, SlotsPtr slots) const {
    Edge e;
    e.rule = a.rule;
    e.dot = a.dot + 1;
    e.rhs_size = a.rhs_size;
    e.cat = a.cat;
    if (e.dot < e.rhs_size)
      e.next_cat = g_->rules[static_cast<std::size_t>(e.rule)]
                       .rhs[static_cast<std::size_t>(e.dot)];
    e.from = a.from;
    e.to = i.to;
    e.words = a.words;
    e.words.insert(e.words.end(), i.words.begin(), i.words.end());
    e.left_context = a.left_context;

    auto [bg_t, pr_t] = transition(a, i);
    const ScoreRecord& ar = a.scores;
    const ScoreRecord& ir = i.scores;
    ScoreRecord& er = e.scores;
    er.inside_bigram = ar.inside_bigram + ir.inside_bigram + bg_t;
    er.outside_bigram = ar.outside_bigram + ir.inside_bigram + bg_t;
    er.inside_prosody = ar.inside_prosody + ir.inside_prosody + pr_t;
    er.outside_prosody = ar.outside_prosody + ir.inside_prosody + pr_t;
    er.inside_grammar = ar.inside_grammar + ir.inside_grammar;
    er.outside_grammar = ar.outside_grammar + ir.inside_grammar;
    const double a_in_ac = ar.inside_acoustic.at(i.from);
    const double a_out_ac = ar.outside_acoustic.at(i.from);
    for (Frame f : i.to) {
      const double leaf = ir.inside_acoustic.at(f);
      er.inside_acoustic.set(f, a_in_ac + leaf);
      er.outside_acoustic.set(f, a_out_ac + leaf);
    }
    e.slots = std::move(slots);
    finish_sig(e);
    return e;
  }

  // ---- publication: duplicate policy, pairing, prediction ----

  // x is no better than y at any shared end frame.
  bool dominated(const Edge& x, const Edge& y) const {
    for (Frame f : x.to) {
      if (weighted_inside(x.scores, f, cfg_.weights) >
          weighted_inside(y.scores, f, cfg_.weights))
        return false;
    }
    return true;
  }

  void publish(Edge&& cand) {
    const auto dups = chart_.duplicates_of(cand);
    for (EdgeId inc_id : dups) {
      if (dominated(cand, chart_.edges[static_cast<std::size_t>(inc_id)]))
        return;  // ties keep the incumbent
    }
    for (EdgeId inc_id : dups) {
      Edge& inc = chart_.edges[static_cast<std::size_t>(inc_id)];
      if (dominated(inc, cand)) {
        // Strict improvement of an existing edge: adopt the better scores
        // and derivation, then reschedule its combinations so consumers see
        // the improvement (only reachable under out-of-order completion).
        inc.scores = cand.scores;
        inc.words = std::move(cand.words);
        inc.left_context = std::move(cand.left_context);
        push_pairs(inc_id);
        return;
      }
    }

    const EdgeId id = chart_.append(std::move(cand));
    const Edge& e = chart_.edges[static_cast<std::size_t>(id)];
    if (e.active()) {
      frontier_.insert(e.next_cat);
      push_pairs(id);
      // Zero-span predictions carry their whole closure already.
      if (e.dot > 0) seek_down(id, e.actual());
    } else {
      if (e.cat == g_->start && e.from == 0) results_.push_back(id);
      push_pairs(id);
    }
  }

  // Pairing happens at insertion, symmetrically: a new active edge scans
  // the passive edges starting at each of its ends, a new passive edge
  // scans the active edges ending at its start.  The initial edge never
  // pairs.
  void push_pairs(EdgeId id) {
    const Edge& e = chart_.edges[static_cast<std::size_t>(id)];
    if (e.active()) {
      for (Frame f : e.to) {
        for (EdgeId pid : chart_.vertex(f).inactive_out) {
          const Edge& p = chart_.edges[static_cast<std::size_t>(pid)];
          if (p.cat == e.next_cat)
            agenda_.push(id, pid, combined_score(e, p));
        }
      }
    } else {
      for (EdgeId aid : chart_.vertex(e.from).active_in) {
        if (aid == chart_.goal) continue;
        const Edge& a = chart_.edges[static_cast<std::size_t>(aid)];
        if (a.next_cat == e.cat) agenda_.push(aid, id, combined_score(a, e));
      }
    }
  }

  const Grammar* g_;
  const BigramModel* bg_;
  const CategoryTrigram* tri_;
  ParserConfig cfg_;
  const Lattice* lat_ = nullptr;

  Chart chart_;
  Agenda agenda_{std::numeric_limits<double>::infinity()};
  std::vector<EdgeId> results_;
  std::set<std::string> frontier_;  // categories expected by active edges
  std::map<std::tuple<Frame, Frame, std::string>, double> seen_;
  int var_counter_ = 0;
};

}  // namespace latchart
