#pragma once

// Report rendering.  Two formats: a flat key=value text block and a
// structured JSON document ("latchart-report/1").  All wall-clock material
// lives in a separate timing section (text: after a marker line; JSON:
// under the "timing" key) so identical runs compare byte-identical with
// timing excluded.

#include <cstdio>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "latchart/engine.hpp"
#include "latchart/eval.hpp"
#include "latchart/parallel.hpp"

namespace latchart {

using Json = nlohmann::ordered_json;

inline constexpr const char* kReportSchema = "latchart-report/1";
inline constexpr const char* kTimingMarker = "-- timing --";

struct UtteranceReport {
  std::string id;  // lattice label (typically the file path)
  ParseOutcome outcome;
  std::optional<EvalReport> eval;
};

struct RunReport {
  std::string mode;  // parse | eval | bench
  Json config = Json::object();  // effective options, echoed by the caller
  std::vector<UtteranceReport> utterances;
  std::optional<double> aggregate_word_accuracy;
  std::optional<double> aggregate_correct_rate;
  std::optional<ParallelMetrics> metrics;  // bench
  std::optional<double> baseline_wall_ms;  // bench: sequential reference
  std::optional<double> gain_percent;      // bench: speedup vs baseline
  double wall_ms = 0.0;
};

namespace detail {

inline std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

inline std::string join_words(const std::vector<std::string>& words) {
  std::string out;
  for (std::size_t i = 0; i < words.size(); ++i) {
    if (i > 0) out += ' ';
    out += words[i];
  }
  return out;
}

inline const char* outcome_status(const ParseOutcome& o) {
  if (!o.best) return "empty";
  return o.partial ? "partial" : "complete";
}

}  // namespace detail

// ---------------------------------------------------------------------------
// JSON rendering.

inline Json to_json(const ResultItem& r) {
  Json j;
  j["end"] = r.end;
  j["spanning"] = r.spanning;
  j["prefix"] = r.prefix;
  j["words"] = r.words;
  j["inside"] = {{"acoustic", r.inside_acoustic},
                 {"bigram", r.inside_bigram},
                 {"prosody", r.inside_prosody},
                 {"grammar", r.inside_grammar}};
  j["weighted"] = r.weighted;
  return j;
}

inline Json to_json(const ChartStats& s) {
  Json cats = Json::object();
  for (const auto& [cat, n] : s.by_category) cats[cat] = n;
  return Json{{"total_edges", s.total_edges},
              {"passive_edges", s.passive_edges},
              {"categories", cats}};
}

inline Json to_json(const AgendaStats& s) {
  return Json{{"push_attempts", s.push_attempts},
              {"pushed", s.pushed},
              {"rejected_at_push", s.rejected_at_push},
              {"popped", s.popped},
              {"dropped_at_pop", s.dropped_at_pop}};
}

inline Json to_json(const ParseOutcome& o) {
  Json j;
  j["frames"] = o.frames;
  j["status"] = detail::outcome_status(o);
  j["best"] = o.best ? to_json(*o.best) : Json(nullptr);
  Json results = Json::array();
  for (const auto& r : o.results) results.push_back(to_json(r));
  j["results"] = results;
  j["chart"] = to_json(o.chart_stats);
  j["agenda"] = to_json(o.agenda_stats);
  return j;
}

inline Json to_json(const EvalReport& e) {
  Json j;
  j["reference_words"] = e.reference_words;
  j["matches"] = e.counts.matches;
  j["substitutions"] = e.counts.substitutions;
  j["deletions"] = e.counts.deletions;
  j["insertions"] = e.counts.insertions;
  j["word_accuracy"] = e.word_accuracy;
  j["word_correct_rate"] = e.word_correct_rate;
  j["covered"] = e.covered;
  j["partial"] = e.partial;
  j["prefix"] = e.prefix;
  return j;
}

inline Json render_json(const RunReport& r, bool with_timing) {
  Json j;
  j["schema"] = kReportSchema;
  j["mode"] = r.mode;
  j["config"] = r.config;
  Json utts = Json::array();
  for (const auto& u : r.utterances) {
    Json ju;
    ju["id"] = u.id;
    ju["parse"] = to_json(u.outcome);
    if (u.eval) ju["eval"] = to_json(*u.eval);
    utts.push_back(std::move(ju));
  }
  j["utterances"] = utts;
  if (r.aggregate_word_accuracy)
    j["aggregate"] = {{"word_accuracy", *r.aggregate_word_accuracy},
                      {"word_correct_rate",
                       r.aggregate_correct_rate.value_or(0.0)},
                      {"utterances", r.utterances.size()}};
  if (r.metrics) {
    Json pj;
    pj["tasks_total"] = r.metrics->tasks_total;
    Json wt = Json::array();
    for (const auto& w : r.metrics->workers) wt.push_back(w.tasks);
    pj["worker_tasks"] = wt;
    j["parallel"] = pj;
  }
  if (with_timing) {
    Json t;
    t["wall_ms"] = r.wall_ms;
    Json per_utt = Json::array();
    for (const auto& u : r.utterances) per_utt.push_back(u.outcome.wall_ms);
    t["utterance_wall_ms"] = per_utt;
    if (r.baseline_wall_ms) t["baseline_wall_ms"] = *r.baseline_wall_ms;
    if (r.gain_percent) t["gain_percent"] = *r.gain_percent;
    if (r.metrics) {
      Json workers = Json::array();
      for (const auto& w : r.metrics->workers) {
        Json wj;
        wj["tasks"] = w.tasks;
        wj["unify_ms"] = w.unify_ms;
        wj["busy_ms"] = w.busy_ms;
        wj["idle_ms"] = w.idle_ms;
        wj["unify_hist"] = w.unify_hist;
        workers.push_back(std::move(wj));
      }
      t["parallel"] = {{"unification_share", r.metrics->unification_share},
                       {"unify_ms_total", r.metrics->unify_ms_total},
                       {"busy_ms_total", r.metrics->busy_ms_total},
                       {"workers", workers}};
    }
    j["timing"] = t;
  }
  return j;
}

// ---------------------------------------------------------------------------
// Text rendering: flat key=value lines, one utterance block per lattice,
// timing (if requested) after the marker line.

inline std::string render_text(const RunReport& r, bool with_timing) {
  using detail::fmt_double;
  using detail::join_words;
  std::string out;
  auto kv = [&out](const std::string& k, const std::string& v) {
    out += k;
    out += '=';
    out += v;
    out += '\n';
  };

  kv("mode", r.mode);
  for (auto it = r.config.begin(); it != r.config.end(); ++it) {
    const Json& v = it.value();
    kv("config." + it.key(),
       v.is_string() ? v.get<std::string>() : v.dump());
  }

  for (const auto& u : r.utterances) {
    out += '\n';
    kv("utterance", u.id);
    const ParseOutcome& o = u.outcome;
    kv("frames", std::to_string(o.frames));
    kv("status", detail::outcome_status(o));
    if (o.best) {
      kv("best.words", join_words(o.best->words));
      kv("best.end", std::to_string(o.best->end));
      kv("best.spanning", o.best->spanning ? "1" : "0");
      kv("best.prefix", o.best->prefix ? "1" : "0");
      kv("best.inside.acoustic", fmt_double(o.best->inside_acoustic));
      kv("best.inside.bigram", fmt_double(o.best->inside_bigram));
      kv("best.inside.prosody", fmt_double(o.best->inside_prosody));
      kv("best.inside.grammar", fmt_double(o.best->inside_grammar));
      kv("best.weighted", fmt_double(o.best->weighted));
    }
    kv("results.count", std::to_string(o.results.size()));
    for (std::size_t i = 0; i < o.results.size(); ++i) {
      const ResultItem& res = o.results[i];
      const std::string p = "result." + std::to_string(i);
      kv(p + ".end", std::to_string(res.end));
      kv(p + ".words", join_words(res.words));
      kv(p + ".weighted", fmt_double(res.weighted));
    }
    kv("chart.total_edges", std::to_string(o.chart_stats.total_edges));
    kv("chart.passive_edges", std::to_string(o.chart_stats.passive_edges));
    for (const auto& [cat, n] : o.chart_stats.by_category)
      kv("chart.cat." + cat, std::to_string(n));
    kv("agenda.push_attempts", std::to_string(o.agenda_stats.push_attempts));
    kv("agenda.pushed", std::to_string(o.agenda_stats.pushed));
    kv("agenda.rejected_at_push",
       std::to_string(o.agenda_stats.rejected_at_push));
    kv("agenda.popped", std::to_string(o.agenda_stats.popped));
    kv("agenda.dropped_at_pop",
       std::to_string(o.agenda_stats.dropped_at_pop));
    if (u.eval) {
      const EvalReport& e = *u.eval;
      kv("eval.reference_words", std::to_string(e.reference_words));
      kv("eval.matches", std::to_string(e.counts.matches));
      kv("eval.substitutions", std::to_string(e.counts.substitutions));
      kv("eval.deletions", std::to_string(e.counts.deletions));
      kv("eval.insertions", std::to_string(e.counts.insertions));
      kv("eval.word_accuracy", fmt_double(e.word_accuracy));
      kv("eval.word_correct_rate", fmt_double(e.word_correct_rate));
      kv("eval.covered", join_words(e.covered));
      kv("eval.partial", e.partial ? "1" : "0");
    }
  }

  if (r.aggregate_word_accuracy) {
    out += '\n';
    kv("aggregate.utterances", std::to_string(r.utterances.size()));
    kv("aggregate.word_accuracy", fmt_double(*r.aggregate_word_accuracy));
    if (r.aggregate_correct_rate)
      kv("aggregate.word_correct_rate",
         fmt_double(*r.aggregate_correct_rate));
  }
  if (r.metrics) {
    out += '\n';
    kv("parallel.tasks_total", std::to_string(r.metrics->tasks_total));
    for (std::size_t i = 0; i < r.metrics->workers.size(); ++i)
      kv("parallel.worker." + std::to_string(i) + ".tasks",
         std::to_string(r.metrics->workers[i].tasks));
  }

  if (with_timing) {
    out += '\n';
    out += kTimingMarker;
    out += '\n';
    kv("timing.wall_ms", fmt_double(r.wall_ms));
    for (std::size_t i = 0; i < r.utterances.size(); ++i)
      kv("timing.utterance." + std::to_string(i) + ".wall_ms",
         fmt_double(r.utterances[i].outcome.wall_ms));
    if (r.baseline_wall_ms)
      kv("timing.baseline_wall_ms", fmt_double(*r.baseline_wall_ms));
    if (r.gain_percent)
      kv("timing.gain_percent", fmt_double(*r.gain_percent));
    if (r.metrics) {
      kv("timing.parallel.unification_share",
         fmt_double(r.metrics->unification_share));
      kv("timing.parallel.unify_ms_total",
         fmt_double(r.metrics->unify_ms_total));
      kv("timing.parallel.busy_ms_total",
         fmt_double(r.metrics->busy_ms_total));
      for (std::size_t i = 0; i < r.metrics->workers.size(); ++i) {
        const WorkerMetrics& w = r.metrics->workers[i];
        const std::string p = "timing.parallel.worker." + std::to_string(i);
        kv(p + ".unify_ms", fmt_double(w.unify_ms));
        kv(p + ".busy_ms", fmt_double(w.busy_ms));
        kv(p + ".idle_ms", fmt_double(w.idle_ms));
        std::string hist;
        for (std::size_t b = 0; b < w.unify_hist.size(); ++b) {
          if (b > 0) hist += ',';
          hist += std::to_string(w.unify_hist[b]);
        }
        kv(p + ".unify_hist", hist);
      }
    }
  }
  return out;
}

}  // namespace latchart
